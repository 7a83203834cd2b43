#pragma once

#include "cloudsphere/types.hpp"

#include <array>

namespace cloudsphere {

// Dense occupancy grid over an axis-aligned box, resolution cells per axis.
struct VoxelGrid {
    int resolution = 0;
    Box3 bounds;
    std::vector<std::uint8_t> occupancy;  // resolution^3 cells, 1 = occupied

    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * resolution + j) * resolution + i;
    }
    bool at(int i, int j, int k) const { return occupancy[cell_index(i, j, k)] != 0; }
    std::size_t occupied_count() const;
};

// Cell coordinates of a point; the upper boundary maps into the last cell.
// Throws InvalidArgument when the point lies outside the bounds.
std::array<int, 3> voxel_cell_of(const Vec3& p, int resolution, const Box3& bounds);

// Solid voxelization: cells containing points form the surface; the exterior
// is grown by a 6-connected flood fill from the grid boundary; everything
// not reached is solid (surface plus enclosed interior).
VoxelGrid voxelize_solid(const PointCloud& cloud, int resolution, const Box3& bounds);

}  // namespace cloudsphere
