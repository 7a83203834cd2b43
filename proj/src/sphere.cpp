#include "cloudsphere/sphere.hpp"

#include <cmath>

namespace cloudsphere {

SphereTemplate generate_sphere_template(std::size_t n, double radius) {
    if (n < 4)
        throw InvalidArgument("sphere template needs at least 4 points, got " +
                              std::to_string(n));
    if (!(radius > 0.0))
        throw InvalidArgument("sphere template radius must be positive");

    SphereTemplate tmpl;
    tmpl.radius = radius;
    tmpl.points.reserve(n);

    // Golden-spiral lattice: latitudes at z_i = 1 - 2(i+0.5)/n, longitudes
    // advancing by the golden angle. r^2 + z^2 == 1 holds by construction.
    const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) /
                                   static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double theta = golden_angle * static_cast<double>(i);
        tmpl.points.emplace_back(radius * r * std::cos(theta),
                                 radius * r * std::sin(theta), radius * z);
    }
    return tmpl;
}

}  // namespace cloudsphere
