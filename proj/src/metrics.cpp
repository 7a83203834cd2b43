#include "cloudsphere/metrics.hpp"

#include "cloudsphere/kdtree.hpp"
#include "cloudsphere/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace cloudsphere {

namespace {

// One directional Chamfer term: (1/|from|) sum of squared NN distances.
double directed_mean_sq(const PointCloud& from, const NnIndex& to_index) {
    double sum = 0.0;
    for (const Vec3& p : from) sum += to_index.nearest(p).sq_dist;
    return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer(const PointCloud& p, const PointCloud& q) {
    if (p.empty() || q.empty()) throw InvalidArgument("chamfer: empty cloud");
    const NnIndex p_index(p);
    const NnIndex q_index(q);
    // Each directional sum runs in its own cloud's index order, so swapping
    // the arguments produces the exact same two summands.
    return directed_mean_sq(p, q_index) + directed_mean_sq(q, p_index);
}

namespace {

// Shortest-augmenting-path assignment with potentials. Rows are matched one
// at a time; `cost` is row-major n x n. Returns the matched column per row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost,
                                          std::size_t n) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // 1-based with column 0 as the virtual root of each augmenting search
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_to(n + 1);
    std::vector<std::size_t> matched_row(n + 1, 0), way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        matched_row[0] = i;
        std::size_t j0 = 0;
        std::fill(min_to.begin(), min_to.end(), kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = matched_row[j0];
            const double* row = cost.data() + (i0 - 1) * n;
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = row[j - 1] - u[i0] - v[j];
                if (reduced < min_to[j]) {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if (min_to[j] < delta) {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
        } while (matched_row[j0] != 0);
        // walk back along the alternating path
        while (j0 != 0) {
            const std::size_t j_prev = way[j0];
            matched_row[j0] = matched_row[j_prev];
            j0 = j_prev;
        }
    }

    std::vector<std::size_t> match(n);
    for (std::size_t j = 1; j <= n; ++j) match[matched_row[j] - 1] = j - 1;
    return match;
}

}  // namespace

double emd(const PointCloud& p, const PointCloud& q, std::size_t solver_cap) {
    if (p.empty() || q.empty()) throw InvalidArgument("emd: empty cloud");
    if (p.size() != q.size())
        throw InvalidArgument("emd: cardinality mismatch (" + std::to_string(p.size()) +
                              " vs " + std::to_string(q.size()) + ")");
    if (p.size() > solver_cap)
        throw UnsupportedSize("emd: " + std::to_string(p.size()) +
                              " points above exact solver cap of " +
                              std::to_string(solver_cap));

    const std::size_t n = p.size();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i * n + j] = (p[i] - q[j]).norm();

    const std::vector<std::size_t> match = solve_assignment(cost, n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += cost[i * n + match[i]];
    return sum / static_cast<double>(n);
}

double iou_solid(const PointCloud& p, const PointCloud& q, int resolution) {
    if (p.empty() || q.empty()) throw InvalidArgument("iou_solid: empty cloud");
    if (resolution < 4) throw InvalidArgument("iou_solid: resolution must be >= 4");

    Box3 box = Box3::merge(Box3::bounding(p), Box3::bounding(q));
    // pad by one cell per side so the grid boundary is guaranteed exterior
    for (int a = 0; a < 3; ++a) {
        const double pad =
            std::max((box.max[a] - box.min[a]) / static_cast<double>(resolution), 1e-9);
        box.min[a] -= pad;
        box.max[a] += pad;
    }

    const VoxelGrid ga = voxelize_solid(p, resolution, box);
    const VoxelGrid gb = voxelize_solid(q, resolution, box);

    std::size_t inter = 0, uni = 0;
    for (std::size_t idx = 0; idx < ga.occupancy.size(); ++idx) {
        const bool a = ga.occupancy[idx] != 0;
        const bool b = gb.occupancy[idx] != 0;
        inter += (a && b) ? 1 : 0;
        uni += (a || b) ? 1 : 0;
    }
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double spread(const SphereTemplate& tmpl, const PointCloud& recon,
              int grid_resolution) {
    if (tmpl.size() != recon.size())
        throw InvalidArgument("spread: template/reconstruction cardinality mismatch");
    if (grid_resolution < 1)
        throw InvalidArgument("spread: grid resolution must be positive");

    Box3 box = Box3::bounding(tmpl.points);
    for (int a = 0; a < 3; ++a) {
        // nudge so boundary points land inside
        const double pad = std::max((box.max[a] - box.min[a]) * 1e-9, 1e-12);
        box.min[a] -= pad;
        box.max[a] += pad;
    }

    // bucket template indices by cell
    std::unordered_map<std::size_t, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        const auto c = voxel_cell_of(tmpl.points[i], grid_resolution, box);
        const std::size_t key =
            (static_cast<std::size_t>(c[2]) * grid_resolution + c[1]) * grid_resolution +
            c[0];
        cells[key].push_back(i);
    }

    // iterate in key order for a reproducible summation order
    std::vector<std::size_t> keys;
    keys.reserve(cells.size());
    for (const auto& kv : cells)
        if (kv.second.size() >= 2) keys.push_back(kv.first);
    if (keys.empty())
        throw DegenerateInput("spread: no grid cell holds two or more template points");
    std::sort(keys.begin(), keys.end());

    double total = 0.0;
    for (std::size_t key : keys) {
        const auto& members = cells[key];
        Vec3 mean = Vec3::Zero();
        for (std::size_t i : members) mean += recon[i];
        mean /= static_cast<double>(members.size());
        double trace = 0.0;
        for (std::size_t i : members) trace += (recon[i] - mean).squaredNorm();
        total += trace / static_cast<double>(members.size());
    }
    return total / static_cast<double>(keys.size());
}

double shift(const SphereTemplate& tmpl, const PointCloud& recon) {
    if (tmpl.size() != recon.size())
        throw InvalidArgument("shift: template/reconstruction cardinality mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < tmpl.size(); ++i)
        sum += (recon[i] - tmpl.points[i]).norm();
    return sum / static_cast<double>(tmpl.size());
}

}  // namespace cloudsphere
