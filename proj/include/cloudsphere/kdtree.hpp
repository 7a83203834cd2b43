#pragma once

#include "cloudsphere/types.hpp"

#include <array>

namespace cloudsphere {

// Static exact nearest-neighbor index over a fixed cloud.
//
// Results are exact and ties are broken by lowest point index, which keeps
// derivative bookkeeping deterministic. Small clouds are scanned linearly;
// larger ones go through a k-d tree whose pruning keeps equal-distance
// candidates reachable so the tie rule holds there too.
class NnIndex {
  public:
    struct Hit {
        std::size_t index = 0;
        double sq_dist = 0.0;
    };

    // Below this size a linear scan beats the tree and is trivially exact.
    static constexpr std::size_t kBruteForceThreshold = 512;

    explicit NnIndex(const PointCloud& points);

    Hit nearest(const Vec3& query) const;
    // Two closest points (distinct indices); hits[0] is the nearest.
    // Used to detect near-ties. Requires at least 2 points.
    std::array<Hit, 2> nearest_two(const Vec3& query) const;

    std::size_t size() const { return points_.size(); }
    const PointCloud& points() const { return points_; }

  private:
    struct Node {
        // leaf when axis < 0; internal nodes split at `split` on `axis`
        int axis = -1;
        double split = 0.0;
        std::uint32_t left = 0;    // child node or range begin for leaves
        std::uint32_t right = 0;   // child node or range end for leaves
    };

    void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end);

    template <typename Visitor>
    void walk(std::uint32_t node, const Vec3& query, double& prune_sq,
              Visitor&& visit) const;

    PointCloud points_;
    std::vector<std::uint32_t> order_;  // point indices grouped by leaf
    std::vector<Node> nodes_;
    bool brute_ = true;
};

// Convenience: nearest-neighbor index in `index` for every query point.
struct NnAssignment {
    std::vector<std::size_t> nearest;
    std::vector<double> sq_dist;
};
NnAssignment assign_nearest(const PointCloud& queries, const NnIndex& index);

}  // namespace cloudsphere
