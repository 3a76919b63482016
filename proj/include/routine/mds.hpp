#pragma once

#include "routine/distance.hpp"

#include <Eigen/Dense>

namespace routine {

// 2D (by default) coordinates for every node, produced by classical
// (Torgerson) multidimensional scaling of the distance matrix.
struct Embedding {
    std::vector<NodeKey> node_ids;  // same order as the DistanceMatrix
    Eigen::MatrixXd coords;         // n x dim
    std::vector<double> eigenvalues; // top-dim spectral values, pre-clamp
    double clamped_mass = 0.0;       // |sum of negative eigenvalues|, diagnostic

    int dim() const { return static_cast<int>(coords.cols()); }
    double x(int i) const { return coords(i, 0); }
    double y(int i) const { return coords.cols() > 1 ? coords(i, 1) : 0.0; }
};

// Classical MDS: B = -1/2 J (D∘D) J, symmetric eigendecomposition,
// coordinates from the top-dim eigenpairs with negative eigenvalues
// clamped to zero. Reflections are fixed by forcing each eigenvector's
// first nonzero component positive, so coordinates are reproducible.
// Throws TooFewNodes below 2 nodes.
Embedding embed(const DistanceMatrix& D, int dim = 2);

} // namespace routine
