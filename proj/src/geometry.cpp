#include "cloudsphere/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cloudsphere {

std::pair<PointCloud, NormalizeTransform> normalize_cloud(const PointCloud& cloud) {
    if (cloud.empty()) throw InvalidArgument("normalize_cloud: empty cloud");
    for (const Vec3& p : cloud)
        if (!all_finite(p))
            throw InvalidArgument("normalize_cloud: non-finite coordinate");

    const Vec3 center = centroid(cloud);
    double max_norm = 0.0;
    for (const Vec3& p : cloud) max_norm = std::max(max_norm, (p - center).norm());
    if (max_norm <= 0.0)
        throw DegenerateInput("normalize_cloud: all points coincide");

    NormalizeTransform tf;
    tf.translation = -center;
    tf.scale = 1.0 / max_norm;

    PointCloud out;
    out.reserve(cloud.size());
    for (const Vec3& p : cloud) out.push_back(tf.apply(p));
    return {std::move(out), tf};
}

bool is_normalized(const PointCloud& cloud, double tol) {
    if (cloud.empty()) return false;
    double max_norm = 0.0;
    for (const Vec3& p : cloud) {
        if (!all_finite(p)) return false;
        max_norm = std::max(max_norm, p.norm());
    }
    return std::abs(max_norm - 1.0) <= tol;
}

std::vector<std::size_t> farthest_point_sampling(const PointCloud& cloud,
                                                 std::size_t m,
                                                 std::size_t start_index,
                                                 std::vector<double>* selection_dist) {
    const std::size_t n = cloud.size();
    if (n == 0) throw InvalidArgument("farthest_point_sampling: empty cloud");
    if (m < 1 || m > n)
        throw InvalidArgument("farthest_point_sampling: m = " + std::to_string(m) +
                              " out of range for cloud of " + std::to_string(n));
    if (start_index >= n)
        throw InvalidArgument("farthest_point_sampling: start index out of range");

    std::vector<std::size_t> selected;
    selected.reserve(m);
    if (selection_dist) {
        selection_dist->clear();
        selection_dist->reserve(m);
    }

    // min squared distance from each point to the selected set so far
    std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());

    std::size_t current = start_index;
    selected.push_back(current);
    if (selection_dist)
        selection_dist->push_back(std::numeric_limits<double>::infinity());

    for (std::size_t round = 1; round < m; ++round) {
        const Vec3& q = cloud[current];
        double best_sq = -1.0;
        std::size_t best_idx = n;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (cloud[i] - q).squaredNorm();
            if (d < min_sq[i]) min_sq[i] = d;
            // strict > keeps the lowest index on ties
            if (min_sq[i] > best_sq && min_sq[i] > 0.0) {
                best_sq = min_sq[i];
                best_idx = i;
            }
        }
        if (best_idx == n) {
            // all remaining points coincide with the selected set; fall back to
            // the lowest unselected index to keep the result a valid index set
            std::vector<bool> taken(n, false);
            for (std::size_t s : selected) taken[s] = true;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i]) {
                    best_idx = i;
                    best_sq = 0.0;
                    break;
                }
        }
        selected.push_back(best_idx);
        if (selection_dist) selection_dist->push_back(std::sqrt(std::max(0.0, best_sq)));
        min_sq[best_idx] = 0.0;
        current = best_idx;
    }
    return selected;
}

PointCloud gaussian_splatter(const PointCloud& centroids, std::size_t n_total,
                             double sigma, std::uint64_t seed) {
    if (centroids.empty()) throw InvalidArgument("gaussian_splatter: no centroids");
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian_splatter: sigma must be positive");
    if (n_total < centroids.size())
        throw InvalidArgument("gaussian_splatter: n_total smaller than centroid count");
    if (n_total % centroids.size() != 0)
        throw InvalidArgument("gaussian_splatter: n_total = " + std::to_string(n_total) +
                              " not divisible by " + std::to_string(centroids.size()) +
                              " centroids");

    const std::size_t per_centroid = n_total / centroids.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);

    PointCloud out;
    out.reserve(n_total);
    for (const Vec3& c : centroids) {
        for (std::size_t j = 0; j < per_centroid; ++j) {
            const double dx = gauss(rng);
            const double dy = gauss(rng);
            const double dz = gauss(rng);
            out.emplace_back(c.x() + dx, c.y() + dy, c.z() + dz);
        }
    }
    return out;
}

AbstractionPyramid build_pyramid(const PointCloud& cloud,
                                 const std::vector<std::size_t>& centroid_counts,
                                 double sigma_factor, std::uint64_t seed) {
    const std::size_t n = cloud.size();
    if (n == 0) throw InvalidArgument("build_pyramid: empty cloud");
    if (!(sigma_factor > 0.0))
        throw InvalidArgument("build_pyramid: sigma_factor must be positive");
    for (std::size_t k = 0; k < centroid_counts.size(); ++k) {
        if (centroid_counts[k] == 0 || centroid_counts[k] > n)
            throw InvalidArgument("build_pyramid: centroid count out of range");
        if (n % centroid_counts[k] != 0)
            throw InvalidArgument("build_pyramid: centroid count " +
                                  std::to_string(centroid_counts[k]) +
                                  " does not divide cloud size " + std::to_string(n));
        if (k > 0 && centroid_counts[k] >= centroid_counts[k - 1])
            throw InvalidArgument("build_pyramid: centroid counts must be strictly decreasing");
    }

    AbstractionPyramid pyr;
    pyr.levels.push_back(cloud);
    pyr.centroid_counts.push_back(n);
    pyr.sigma_per_level.push_back(0.0);

    for (std::size_t k = 0; k < centroid_counts.size(); ++k) {
        const std::size_t count = centroid_counts[k];
        std::vector<double> sel_dist;
        const std::vector<std::size_t> idx =
            farthest_point_sampling(cloud, count, 0, &sel_dist);

        PointCloud centroids;
        centroids.reserve(count);
        for (std::size_t i : idx) centroids.push_back(cloud[i]);

        // Greedy max-min selection distances are non-increasing, so the last
        // one is exactly the min pairwise spacing of the selected set.
        double spacing;
        if (count >= 2) {
            spacing = sel_dist.back();
        } else {
            // single centroid: fall back to its coverage radius
            spacing = 0.0;
            for (const Vec3& p : cloud)
                spacing = std::max(spacing, (p - centroids[0]).norm());
        }
        if (!(spacing > 0.0))
            throw DegenerateInput("build_pyramid: selected centroids coincide");

        const double sigma = sigma_factor * spacing;
        pyr.levels.push_back(
            gaussian_splatter(centroids, n, sigma, seed + 1 + static_cast<std::uint64_t>(k)));
        pyr.centroid_counts.push_back(count);
        pyr.sigma_per_level.push_back(sigma);
    }
    return pyr;
}

}  // namespace cloudsphere
