#include "cloudsphere/kdtree.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace cloudsphere {

namespace {
constexpr std::uint32_t kLeafSize = 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

// lexicographic (distance, index): implements the lowest-index tie rule
inline bool better(double d, std::size_t i, const NnIndex::Hit& h) {
    return d < h.sq_dist || (d == h.sq_dist && i < h.index);
}
}  // namespace

NnIndex::NnIndex(const PointCloud& points) : points_(points) {
    if (points_.empty()) throw InvalidArgument("NnIndex: empty cloud");
    for (const Vec3& p : points_)
        if (!all_finite(p)) throw InvalidArgument("NnIndex: non-finite coordinate");
    brute_ = points_.size() < kBruteForceThreshold;
    if (brute_) return;

    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.emplace_back();
    build(0, 0, static_cast<std::uint32_t>(points_.size()));
}

void NnIndex::build(std::uint32_t node, std::uint32_t begin, std::uint32_t end) {
    if (end - begin <= kLeafSize) {
        nodes_[node].axis = -1;
        nodes_[node].left = begin;
        nodes_[node].right = end;
        return;
    }

    Vec3 lo = points_[order_[begin]];
    Vec3 hi = lo;
    for (std::uint32_t t = begin + 1; t < end; ++t) {
        lo = lo.cwiseMin(points_[order_[t]]);
        hi = hi.cwiseMax(points_[order_[t]]);
    }
    int axis = 0;
    const Vec3 ext = hi - lo;
    if (ext.y() > ext.x()) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;

    const std::uint32_t mid = begin + (end - begin) / 2;
    // (coordinate, index) total order makes the partition deterministic
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = points_[a][axis];
                         const double cb = points_[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });

    const std::uint32_t left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[node].axis = axis;
    nodes_[node].split = points_[order_[mid]][axis];
    nodes_[node].left = left;
    nodes_[node].right = left + 1;
    build(left, begin, mid);
    build(left + 1, mid, end);
}

template <typename Visitor>
void NnIndex::walk(std::uint32_t node, const Vec3& query, double& prune_sq,
                   Visitor&& visit) const {
    const Node nd = nodes_[node];
    if (nd.axis < 0) {
        for (std::uint32_t t = nd.left; t < nd.right; ++t) visit(order_[t]);
        return;
    }
    const double diff = query[nd.axis] - nd.split;
    const std::uint32_t near_child = diff <= 0.0 ? nd.left : nd.right;
    const std::uint32_t far_child = diff <= 0.0 ? nd.right : nd.left;
    walk(near_child, query, prune_sq, visit);
    // non-strict comparison keeps equal-distance candidates reachable, which
    // the lowest-index tie rule depends on
    if (diff * diff <= prune_sq) walk(far_child, query, prune_sq, visit);
}

NnIndex::Hit NnIndex::nearest(const Vec3& query) const {
    Hit best{points_.size(), kInf};
    auto consider = [&](std::size_t i) {
        const double d = (points_[i] - query).squaredNorm();
        if (better(d, i, best)) best = {i, d};
    };
    if (brute_) {
        for (std::size_t i = 0; i < points_.size(); ++i) consider(i);
    } else {
        double prune = kInf;
        walk(0, query, prune, [&](std::size_t i) {
            consider(i);
            prune = best.sq_dist;
        });
    }
    return best;
}

std::array<NnIndex::Hit, 2> NnIndex::nearest_two(const Vec3& query) const {
    if (points_.size() < 2)
        throw InvalidArgument("NnIndex::nearest_two: needs at least 2 points");
    std::array<Hit, 2> best{Hit{points_.size(), kInf}, Hit{points_.size(), kInf}};
    auto consider = [&](std::size_t i) {
        const double d = (points_[i] - query).squaredNorm();
        if (better(d, i, best[0])) {
            best[1] = best[0];
            best[0] = {i, d};
        } else if (better(d, i, best[1])) {
            best[1] = {i, d};
        }
    };
    if (brute_) {
        for (std::size_t i = 0; i < points_.size(); ++i) consider(i);
    } else {
        double prune = kInf;
        walk(0, query, prune, [&](std::size_t i) {
            consider(i);
            prune = best[1].sq_dist;
        });
    }
    return best;
}

NnAssignment assign_nearest(const PointCloud& queries, const NnIndex& index) {
    NnAssignment out;
    out.nearest.reserve(queries.size());
    out.sq_dist.reserve(queries.size());
    for (const Vec3& q : queries) {
        const NnIndex::Hit h = index.nearest(q);
        out.nearest.push_back(h.index);
        out.sq_dist.push_back(h.sq_dist);
    }
    return out;
}

}  // namespace cloudsphere
