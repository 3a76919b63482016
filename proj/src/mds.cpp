#include "routine/mds.hpp"

#include <cmath>

namespace routine {

Embedding embed(const DistanceMatrix& D, int dim) {
    const int n = D.size();
    if (n < 2) throw TooFewNodes("MDS needs >= 2 nodes, got " + std::to_string(n));
    if (dim < 1 || dim > n) {
        throw std::invalid_argument("embedding dim must be in [1, node count]");
    }

    Eigen::MatrixXd sq(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = D.at(i, j);
            sq(i, j) = d * d;
        }
    }

    // double centering: B = -1/2 J sq J with J = I - 11'/n
    const Eigen::MatrixXd J =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const Eigen::MatrixXd B = -0.5 * J * sq * J;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }
    const Eigen::VectorXd& eigenvalues = solver.eigenvalues(); // ascending
    const Eigen::MatrixXd& eigenvectors = solver.eigenvectors();

    Embedding out;
    out.node_ids = D.keys();
    out.coords = Eigen::MatrixXd::Zero(n, dim);
    out.eigenvalues.reserve(dim);

    for (int i = 0; i < n; ++i) {
        if (eigenvalues(i) < 0.0) out.clamped_mass += -eigenvalues(i);
    }

    for (int c = 0; c < dim; ++c) {
        const int idx = n - 1 - c; // largest first
        const double lambda = eigenvalues(idx);
        out.eigenvalues.push_back(lambda);
        Eigen::VectorXd vec = eigenvectors.col(idx);
        for (int i = 0; i < n; ++i) {
            if (vec(i) != 0.0) {
                if (vec(i) < 0.0) vec = -vec;
                break;
            }
        }
        const double scale = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
        out.coords.col(c) = vec * scale;
    }
    return out;
}

} // namespace routine
