#pragma once

#include "cloudsphere/types.hpp"

#include <cstdint>
#include <utility>

namespace cloudsphere {

// Rigid-plus-scale map recorded by normalize_cloud. Forward application is
// out = (in + translation) * scale; invert() undoes it.
struct NormalizeTransform {
    Vec3 translation = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return (p + translation) * scale; }
    Vec3 invert(const Vec3& p) const { return p / scale - translation; }
};

// Centers the cloud at the origin and scales it so the farthest point has
// norm exactly 1. Throws DegenerateInput when all points coincide.
std::pair<PointCloud, NormalizeTransform> normalize_cloud(const PointCloud& cloud);

// True when a cloud already satisfies the normalize_cloud postcondition up to
// the given tolerance on the max norm.
bool is_normalized(const PointCloud& cloud, double tol = 1e-6);

// Greedy max-min farthest point sampling. Returns m distinct indices starting
// at start_index; each subsequent pick maximizes the distance to the selected
// set, ties broken by lowest index. selection_dist, when given, receives the
// distance of each pick to the set selected before it (entry 0 is +inf).
std::vector<std::size_t> farthest_point_sampling(
    const PointCloud& cloud, std::size_t m, std::size_t start_index = 0,
    std::vector<double>* selection_dist = nullptr);

// Draws n_total points, n_total/|centroids| of them i.i.d. from an isotropic
// Gaussian around each centroid (std sigma per axis). Output is grouped by
// centroid in centroid order and deterministic for a fixed seed.
PointCloud gaussian_splatter(const PointCloud& centroids, std::size_t n_total,
                             double sigma, std::uint64_t seed);

// Multi-resolution supervision targets. levels[0] is the input cloud itself;
// every level has the same cardinality.
struct AbstractionPyramid {
    std::vector<PointCloud> levels;            // P^0 .. P^K
    std::vector<std::size_t> centroid_counts;  // N^0 (= n) .. N^K
    std::vector<double> sigma_per_level;       // 0 for level 0

    std::size_t stage_count() const { return levels.size(); }  // K + 1
    std::size_t cardinality() const { return levels.empty() ? 0 : levels[0].size(); }
};

// Builds the pyramid: for each count N^k (strictly decreasing, each dividing
// |cloud|), FPS from index 0 down to N^k centroids, then splatter back to
// |cloud| points with sigma = sigma_factor * (min pairwise FPS spacing).
AbstractionPyramid build_pyramid(const PointCloud& cloud,
                                 const std::vector<std::size_t>& centroid_counts,
                                 double sigma_factor, std::uint64_t seed);

}  // namespace cloudsphere
