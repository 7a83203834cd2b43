#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cloudsphere {

using Vec3 = Eigen::Vector3d;

// Ordered point set. Order is load-bearing wherever a cloud is paired with a
// template or an offset field; metrics that are order-invariant say so.
using PointCloud = std::vector<Vec3>;

struct RgbColor {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
};

// Axis-aligned box.
struct Box3 {
    Vec3 min{0.0, 0.0, 0.0};
    Vec3 max{0.0, 0.0, 0.0};

    Vec3 extent() const { return max - min; }
    bool contains(const Vec3& p) const {
        return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
               p.y() <= max.y() && p.z() >= min.z() && p.z() <= max.z();
    }
    bool degenerate() const {
        const Vec3 e = extent();
        return e.x() <= 0.0 || e.y() <= 0.0 || e.z() <= 0.0;
    }

    static Box3 bounding(const PointCloud& cloud);
    // Smallest box covering both.
    static Box3 merge(const Box3& a, const Box3& b);
};

inline Box3 Box3::bounding(const PointCloud& cloud) {
    if (cloud.empty()) throw std::invalid_argument("Box3::bounding: empty cloud");
    Box3 box{cloud[0], cloud[0]};
    for (const Vec3& p : cloud) {
        box.min = box.min.cwiseMin(p);
        box.max = box.max.cwiseMax(p);
    }
    return box;
}

inline Box3 Box3::merge(const Box3& a, const Box3& b) {
    return Box3{a.min.cwiseMin(b.min), a.max.cwiseMax(b.max)};
}

class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class UnsupportedSize : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Parse or encoding failure in an external file; carries file position.
class FormatError : public std::runtime_error {
  public:
    FormatError(const std::string& path, std::size_t position, bool byte_offset,
                const std::string& what)
        : std::runtime_error(path + (byte_offset ? " (byte " : " (line ") +
                             std::to_string(position) + "): " + what),
          path_(path),
          position_(position) {}

    const std::string& path() const { return path_; }
    std::size_t position() const { return position_; }

  private:
    std::string path_;
    std::size_t position_;
};

inline bool all_finite(const Vec3& p) {
    return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

inline Vec3 centroid(const PointCloud& cloud) {
    Vec3 c = Vec3::Zero();
    for (const Vec3& p : cloud) c += p;
    return c / static_cast<double>(cloud.size());
}

}  // namespace cloudsphere
