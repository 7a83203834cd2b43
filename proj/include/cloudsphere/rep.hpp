#pragma once

#include "cloudsphere/sphere.hpp"
#include "cloudsphere/types.hpp"

#include <string>

namespace cloudsphere {

// Per-stage point-wise displacements, index-aligned with the template.
using OffsetField = std::vector<Vec3>;

// A shape encoded as the spherical template plus a cascade of offset fields.
// stages[k] holds the stage-k field; stage 0 is the finest. Summing stages
// down to 0 onto the template reproduces the shape.
struct CloudSphereRep {
    SphereTemplate sphere;
    std::vector<OffsetField> stages;  // indexed by stage k = 0..K

    std::size_t stage_count() const { return stages.size(); }         // K + 1
    std::size_t max_stage() const { return stages.size() - 1; }       // K
    std::size_t cardinality() const { return sphere.size(); }

    // All-zero fields over the given template.
    static CloudSphereRep zero(SphereTemplate tmpl, std::size_t stage_count);
};

// Intermediate reconstruction: template plus all fields from the coarsest
// stage down to `down_to_stage` (0 gives the full shape).
PointCloud reconstruct(const CloudSphereRep& rep, std::size_t down_to_stage = 0);

// Binary container: header (magic, version, n, K, radius), template
// coordinates, then the offset fields from coarsest to finest, all as
// little-endian 64-bit floats in template point order.
void save_rep(const CloudSphereRep& rep, const std::string& path);
CloudSphereRep load_rep(const std::string& path);

}  // namespace cloudsphere
