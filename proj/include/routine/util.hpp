#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace routine {

// splitmix64: portable 64-bit generator (Steele, Lea, Flood 2014).
// Used everywhere randomness is needed so that generated data is
// bit-identical across platforms; std::mt19937 distributions are not
// portable across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [0, n), bias-free for the ranges used here (n << 2^64)
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Calendar dates are carried as "YYYY-MM-DD" strings; these helpers
// validate and do day arithmetic via the proleptic Gregorian calendar.
struct CivilDate {
    int year = 0;
    int month = 0;
    int day = 0;
};

// Throws std::invalid_argument on bad format or impossible date.
CivilDate parse_date(const std::string& iso);

// Days since 1970-01-01 (negative before).
long days_from_civil(const CivilDate& d);
CivilDate civil_from_days(long z);

std::string format_date(const CivilDate& d);
std::string add_days(const std::string& iso, int days);

// "HH:MM" -> minute of day in [0, 1439]; throws std::invalid_argument.
int parse_minute_of_day(const std::string& hhmm);
std::string format_minute_of_day(int minute);

} // namespace routine
