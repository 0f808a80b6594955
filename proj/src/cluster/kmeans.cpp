#include "amodal/cluster/kmeans.hpp"

#include <limits>
#include <vector>

#include "amodal/core/error.hpp"

namespace amodal {

KMeansResult kmeans(const Eigen::MatrixXf& points, int k, int max_iterations) {
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    if (n == 0) throw ContractError("kmeans: no points");
    if (k < 1) throw ContractError("kmeans: k < 1");

    // Farthest-point seeding: start at point 0, then repeatedly take the
    // point with maximal distance to its nearest chosen centroid. Stops
    // early when the farthest distance is zero (fewer distinct points than k).
    std::vector<Eigen::Index> seeds{0};
    Eigen::VectorXf min_dist =
        (points.rowwise() - points.row(0)).rowwise().squaredNorm();
    while (static_cast<int>(seeds.size()) < k) {
        Eigen::Index best = 0;
        float best_dist = -1.0f;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (min_dist(i) > best_dist) {
                best_dist = min_dist(i);
                best = i;
            }
        }
        if (best_dist <= 0.0f) break;
        seeds.push_back(best);
        min_dist = min_dist.cwiseMin(
            (points.rowwise() - points.row(best)).rowwise().squaredNorm());
    }

    const int keff = static_cast<int>(seeds.size());
    Eigen::MatrixXf centroids(keff, d);
    for (int c = 0; c < keff; ++c) centroids.row(c) = points.row(seeds[c]);

    Eigen::VectorXi assign = Eigen::VectorXi::Constant(n, -1);
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            float best_dist = std::numeric_limits<float>::max();
            for (int c = 0; c < keff; ++c) {
                const float dist = (points.row(i) - centroids.row(c)).squaredNorm();
                if (dist < best_dist) {
                    best_dist = dist;
                    best = c;
                }
            }
            if (assign(i) != best) {
                assign(i) = best;
                changed = true;
            }
        }
        if (!changed) break;
        Eigen::MatrixXf sums = Eigen::MatrixXf::Zero(keff, d);
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(keff);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assign(i)) += points.row(i);
            counts(assign(i)) += 1;
        }
        for (int c = 0; c < keff; ++c) {
            if (counts(c) > 0) centroids.row(c) = sums.row(c) / static_cast<float>(counts(c));
        }
    }

    return {std::move(assign), std::move(centroids), keff, iter};
}

}  // namespace amodal
