#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace amodal {

struct KMeansResult {
    Eigen::VectorXi assignments;  // one label per point
    Eigen::MatrixXf centroids;    // k_effective x dim
    int k_effective = 0;
    int iterations = 0;
};

/// Lloyd's algorithm with deterministic greedy farthest-point seeding.
/// Duplicated points collapse onto one centroid, so k_effective may be
/// smaller than k. Ties break toward the lowest index; identical inputs
/// always give identical assignments.
KMeansResult kmeans(const Eigen::MatrixXf& points, int k, int max_iterations = 50);

}  // namespace amodal
