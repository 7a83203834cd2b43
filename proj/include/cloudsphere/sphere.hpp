#pragma once

#include "cloudsphere/types.hpp"

namespace cloudsphere {

// Fixed spherical point cloud all deformation starts from. Generation is
// deterministic: the same n yields a bit-identical template.
struct SphereTemplate {
    PointCloud points;
    double radius = 1.0;

    std::size_t size() const { return points.size(); }
};

// Places n points on the sphere with a golden-spiral lattice, which gives
// near-uniform spacing without randomness. Requires n >= 4.
SphereTemplate generate_sphere_template(std::size_t n, double radius = 1.0);

}  // namespace cloudsphere
