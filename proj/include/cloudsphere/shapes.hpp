#pragma once

#include "cloudsphere/types.hpp"

#include <cstdint>
#include <string>

namespace cloudsphere {

// Seeded uniform surface samplings of simple solids, used as reproducible
// fitting targets. All are returned in their natural dimensions; normalize
// before fitting.

PointCloud make_cube_shell(std::size_t n, std::uint64_t seed);
PointCloud make_torus(std::size_t n, std::uint64_t seed, double major_radius = 1.0,
                      double minor_radius = 0.4);
PointCloud make_cylinder(std::size_t n, std::uint64_t seed, double radius = 0.5,
                         double height = 2.0);
PointCloud make_l_bracket(std::size_t n, std::uint64_t seed);
PointCloud make_sphere_surface(std::size_t n, std::uint64_t seed, double radius = 1.0);

// Dispatch by name: cube | torus | cylinder | lbracket | sphere.
PointCloud make_shape(const std::string& name, std::size_t n, std::uint64_t seed);

}  // namespace cloudsphere
