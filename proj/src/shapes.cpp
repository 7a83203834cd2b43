#include "cloudsphere/shapes.hpp"

#include <cmath>
#include <random>

namespace cloudsphere {

namespace {
void require_points(std::size_t n) {
    if (n == 0) throw InvalidArgument("shape generator: n must be positive");
}
}  // namespace

PointCloud make_cube_shell(std::size_t n, std::uint64_t seed) {
    require_points(n);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> face(0, 5);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);

    PointCloud cloud;
    cloud.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int f = face(rng);
        const double u = coord(rng);
        const double v = coord(rng);
        const int axis = f / 2;
        const double sign = (f % 2 == 0) ? 1.0 : -1.0;
        Vec3 p;
        p[axis] = sign;
        p[(axis + 1) % 3] = u;
        p[(axis + 2) % 3] = v;
        cloud.push_back(p);
    }
    return cloud;
}

PointCloud make_torus(std::size_t n, std::uint64_t seed, double major_radius,
                      double minor_radius) {
    require_points(n);
    if (!(major_radius > minor_radius) || !(minor_radius > 0.0))
        throw InvalidArgument("torus: need major > minor > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    PointCloud cloud;
    cloud.reserve(n);
    while (cloud.size() < n) {
        const double u = angle(rng);
        // area density over the tube angle is proportional to R + r cos(phi)
        const double phi = angle(rng);
        const double accept = (major_radius + minor_radius * std::cos(phi)) /
                              (major_radius + minor_radius);
        if (unit(rng) > accept) continue;
        const double ring = major_radius + minor_radius * std::cos(phi);
        cloud.emplace_back(ring * std::cos(u), ring * std::sin(u),
                           minor_radius * std::sin(phi));
    }
    return cloud;
}

PointCloud make_cylinder(std::size_t n, std::uint64_t seed, double radius,
                         double height) {
    require_points(n);
    if (!(radius > 0.0) || !(height > 0.0))
        throw InvalidArgument("cylinder: radius and height must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double side_area = 2.0 * M_PI * radius * height;
    const double cap_area = M_PI * radius * radius;
    const double total = side_area + 2.0 * cap_area;

    PointCloud cloud;
    cloud.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pick = unit(rng) * total;
        const double theta = angle(rng);
        if (pick < side_area) {
            const double z = (unit(rng) - 0.5) * height;
            cloud.emplace_back(radius * std::cos(theta), radius * std::sin(theta), z);
        } else {
            const double r = radius * std::sqrt(unit(rng));
            const double z = (pick < side_area + cap_area) ? height / 2.0 : -height / 2.0;
            cloud.emplace_back(r * std::cos(theta), r * std::sin(theta), z);
        }
    }
    return cloud;
}

PointCloud make_l_bracket(std::size_t n, std::uint64_t seed) {
    require_points(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // L-shaped prism: the polygon (0,0)(2,0)(2,1)(1,1)(1,2)(0,2) extruded to
    // z in [0,1]. Caps have area 3 each; the six side walls have the edge
    // lengths as areas.
    struct Wall {
        Vec3 origin, u_dir, v_dir;
        double area;
    };
    const std::vector<Wall> walls = {
        {{0, 0, 0}, {2, 0, 0}, {0, 0, 1}, 2.0},  // y = 0
        {{2, 0, 0}, {0, 1, 0}, {0, 0, 1}, 1.0},  // x = 2
        {{2, 1, 0}, {-1, 0, 0}, {0, 0, 1}, 1.0}, // y = 1 (outer notch)
        {{1, 1, 0}, {0, 1, 0}, {0, 0, 1}, 1.0},  // x = 1 (inner notch)
        {{1, 2, 0}, {-1, 0, 0}, {0, 0, 1}, 1.0}, // y = 2
        {{0, 2, 0}, {0, -2, 0}, {0, 0, 1}, 2.0}, // x = 0
    };
    const double cap_area = 3.0;
    double total = 2.0 * cap_area;
    for (const Wall& w : walls) total += w.area;

    auto sample_cap = [&](double z) {
        // rejection over the bounding square; inside the L when x<=1 or y<=1
        for (;;) {
            const double x = 2.0 * unit(rng);
            const double y = 2.0 * unit(rng);
            if (x <= 1.0 || y <= 1.0) return Vec3(x, y, z);
        }
    };

    PointCloud cloud;
    cloud.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pick = unit(rng) * total;
        if (pick < cap_area) {
            cloud.push_back(sample_cap(0.0));
            continue;
        }
        pick -= cap_area;
        if (pick < cap_area) {
            cloud.push_back(sample_cap(1.0));
            continue;
        }
        pick -= cap_area;
        for (const Wall& w : walls) {
            if (pick < w.area) {
                cloud.push_back(w.origin + unit(rng) * w.u_dir + unit(rng) * w.v_dir);
                break;
            }
            pick -= w.area;
        }
    }
    return cloud;
}

PointCloud make_sphere_surface(std::size_t n, std::uint64_t seed, double radius) {
    require_points(n);
    if (!(radius > 0.0)) throw InvalidArgument("sphere: radius must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    PointCloud cloud;
    cloud.reserve(n);
    while (cloud.size() < n) {
        const Vec3 g(gauss(rng), gauss(rng), gauss(rng));
        const double nrm = g.norm();
        if (nrm < 1e-12) continue;
        cloud.push_back(radius / nrm * g);
    }
    return cloud;
}

PointCloud make_shape(const std::string& name, std::size_t n, std::uint64_t seed) {
    if (name == "cube") return make_cube_shell(n, seed);
    if (name == "torus") return make_torus(n, seed);
    if (name == "cylinder") return make_cylinder(n, seed);
    if (name == "lbracket") return make_l_bracket(n, seed);
    if (name == "sphere") return make_sphere_surface(n, seed);
    throw InvalidArgument("unknown shape '" + name +
                          "' (expected cube, torus, cylinder, lbracket or sphere)");
}

}  // namespace cloudsphere
