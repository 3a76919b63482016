#include "routine/util.hpp"

#include <cctype>
#include <cstdio>

namespace routine {

namespace {

bool all_digits(const std::string& s, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return table[m - 1];
}

} // namespace

CivilDate parse_date(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
        !all_digits(iso, 0, 4) || !all_digits(iso, 5, 7) || !all_digits(iso, 8, 10)) {
        throw std::invalid_argument("bad date '" + iso + "', expected YYYY-MM-DD");
    }
    CivilDate d;
    d.year = std::stoi(iso.substr(0, 4));
    d.month = std::stoi(iso.substr(5, 2));
    d.day = std::stoi(iso.substr(8, 2));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        throw std::invalid_argument("impossible date '" + iso + "'");
    }
    return d;
}

// Howard Hinnant's civil-days algorithm.
long days_from_civil(const CivilDate& d) {
    long y = d.year;
    const int m = d.month;
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

CivilDate civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(day)};
}

std::string format_date(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::string add_days(const std::string& iso, int days) {
    return format_date(civil_from_days(days_from_civil(parse_date(iso)) + days));
}

int parse_minute_of_day(const std::string& hhmm) {
    if (hhmm.size() != 5 || hhmm[2] != ':' || !all_digits(hhmm, 0, 2) || !all_digits(hhmm, 3, 5)) {
        throw std::invalid_argument("bad time '" + hhmm + "', expected HH:MM");
    }
    const int h = std::stoi(hhmm.substr(0, 2));
    const int m = std::stoi(hhmm.substr(3, 2));
    if (h > 23 || m > 59) throw std::invalid_argument("time out of range '" + hhmm + "'");
    return h * 60 + m;
}

std::string format_minute_of_day(int minute) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

} // namespace routine
