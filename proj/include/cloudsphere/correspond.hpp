#pragma once

#include "cloudsphere/losses.hpp"
#include "cloudsphere/rep.hpp"

#include <optional>
#include <string>

namespace cloudsphere {

// Per-template-index editing region. Hard booleans by default; soft weights
// in [0,1] override them when present.
struct RegionMask {
    std::vector<std::uint8_t> selected;
    std::optional<std::vector<double>> soft;

    std::size_t size() const { return selected.size(); }
    double weight(std::size_t i) const {
        return soft ? (*soft)[i] : (selected[i] ? 1.0 : 0.0);
    }

    static RegionMask none(std::size_t n) { return RegionMask{std::vector<std::uint8_t>(n, 0), std::nullopt}; }
    static RegionMask all(std::size_t n) { return RegionMask{std::vector<std::uint8_t>(n, 1), std::nullopt}; }
};

// Template-to-reconstruction map. The pairing is by index, so the map is the
// identity; the displacements are what carry the shape.
struct Correspondence {
    std::vector<std::size_t> index_map;
    std::vector<Vec3> displacement;  // reconstruction minus template, per point
};

Correspondence correspondence(const CloudSphereRep& rep);

enum class Axis { X, Y, Z };

// Linear ramp of the chosen template coordinate onto [0,1].
std::vector<double> color_ramp(const SphereTemplate& tmpl, Axis axis);

// Ramp values mapped through a rainbow colormap; colors follow any
// index-aligned cloud unchanged.
std::vector<RgbColor> color_code(const SphereTemplate& tmpl, Axis axis);
RgbColor rainbow_color(double t);

// Region-masked interpolation of offset fields between two representations
// sharing one template: for stages in `stages`, the stage field becomes
// (1 - t*w_i) * source + t*w_i * target per point; other stages keep the
// source field. Returns the full reconstruction of the blended cascade.
PointCloud blend_offsets(const CloudSphereRep& source, const CloudSphereRep& target,
                         const RegionMask& mask, double t,
                         const std::vector<std::size_t>& stages);
PointCloud blend_offsets(const CloudSphereRep& source, const CloudSphereRep& target,
                         const RegionMask& mask, double t);  // all stages

// Pushes one donor's masked geometry into every representation at once.
std::vector<PointCloud> co_edit(const std::vector<CloudSphereRep>& reps,
                                const CloudSphereRep& donor, const RegionMask& mask,
                                double t);

// Diffuses mask weights over the template neighbor graph to soften region
// boundaries. Each round averages a point with its weighted one-ring.
RegionMask smooth_mask(const RegionMask& mask, const RegGraph& graph,
                       std::size_t rounds);

// Mask file: one line per entry, either a bare template index or
// "box xmin ymin zmin xmax ymax zmax [template|recon]" selecting all indices
// whose template (default) or reconstruction position falls inside the box.
// Blank lines and '#' comments are skipped; entries accumulate as a union.
RegionMask read_mask_file(const std::string& path, const SphereTemplate& tmpl,
                          const PointCloud& recon);

}  // namespace cloudsphere
