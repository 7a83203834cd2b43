#include "cloudsphere/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace cloudsphere {

std::size_t VoxelGrid::occupied_count() const {
    return static_cast<std::size_t>(
        std::count_if(occupancy.begin(), occupancy.end(),
                      [](std::uint8_t c) { return c != 0; }));
}

std::array<int, 3> voxel_cell_of(const Vec3& p, int resolution, const Box3& bounds) {
    if (!bounds.contains(p))
        throw InvalidArgument("voxelize: point outside bounds");
    std::array<int, 3> cell{};
    for (int a = 0; a < 3; ++a) {
        const double span = bounds.max[a] - bounds.min[a];
        int c = static_cast<int>(std::floor((p[a] - bounds.min[a]) / span *
                                            static_cast<double>(resolution)));
        c = std::clamp(c, 0, resolution - 1);
        cell[a] = c;
    }
    return cell;
}

VoxelGrid voxelize_solid(const PointCloud& cloud, int resolution, const Box3& bounds) {
    if (cloud.empty()) throw InvalidArgument("voxelize_solid: empty cloud");
    if (resolution < 4) throw InvalidArgument("voxelize_solid: resolution must be >= 4");
    if (bounds.degenerate()) throw InvalidArgument("voxelize_solid: degenerate bounds");

    const int res = resolution;
    const std::size_t total = static_cast<std::size_t>(res) * res * res;

    VoxelGrid grid;
    grid.resolution = res;
    grid.bounds = bounds;
    grid.occupancy.assign(total, 0);

    // surface cells
    for (const Vec3& p : cloud) {
        const auto c = voxel_cell_of(p, res, bounds);
        grid.occupancy[grid.cell_index(c[0], c[1], c[2])] = 1;
    }

    // Flood the exterior from every unoccupied boundary cell (6-connectivity).
    std::vector<std::uint8_t> exterior(total, 0);
    std::deque<std::array<int, 3>> queue;
    auto seed = [&](int i, int j, int k) {
        const std::size_t idx = grid.cell_index(i, j, k);
        if (grid.occupancy[idx] == 0 && exterior[idx] == 0) {
            exterior[idx] = 1;
            queue.push_back({i, j, k});
        }
    };
    for (int a = 0; a < res; ++a)
        for (int b = 0; b < res; ++b) {
            seed(0, a, b);
            seed(res - 1, a, b);
            seed(a, 0, b);
            seed(a, res - 1, b);
            seed(a, b, 0);
            seed(a, b, res - 1);
        }
    static constexpr int kSteps[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                         {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
    while (!queue.empty()) {
        const auto [i, j, k] = queue.front();
        queue.pop_front();
        for (const auto& s : kSteps) {
            const int ni = i + s[0], nj = j + s[1], nk = k + s[2];
            if (ni < 0 || nj < 0 || nk < 0 || ni >= res || nj >= res || nk >= res)
                continue;
            const std::size_t idx = grid.cell_index(ni, nj, nk);
            if (grid.occupancy[idx] == 0 && exterior[idx] == 0) {
                exterior[idx] = 1;
                queue.push_back({ni, nj, nk});
            }
        }
    }

    // solid = complement of the exterior (covers surface and interior)
    for (std::size_t idx = 0; idx < total; ++idx)
        grid.occupancy[idx] = exterior[idx] ? 0 : 1;
    return grid;
}

}  // namespace cloudsphere
