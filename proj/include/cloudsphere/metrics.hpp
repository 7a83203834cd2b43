#pragma once

#include "cloudsphere/sphere.hpp"
#include "cloudsphere/types.hpp"

#include <optional>

namespace cloudsphere {

// One row of evaluation results. Raw values; table-style scaling
// (cd * 1000, emd * 100) is applied at report time.
struct MetricsReport {
    std::optional<double> cd;
    std::optional<double> emd;
    std::optional<double> iou;
    std::optional<double> spread;
    std::optional<double> shift;
};

// Symmetric Chamfer distance: sum of squared nearest-neighbor distances in
// both directions, each direction divided by its own cloud's cardinality.
// Order-invariant and symmetric; cardinalities may differ.
double chamfer(const PointCloud& p, const PointCloud& q);

// Earth mover distance: mean Euclidean length of the optimal bijection
// between two equal-cardinality clouds, solved exactly by shortest
// augmenting paths (Jonker-Volgenant style). O(n^3); refuses |P| > cap.
double emd(const PointCloud& p, const PointCloud& q, std::size_t solver_cap = 4096);

// Intersection over union of the two solid voxelizations on a shared grid:
// the union bounding box padded by one cell on every side.
double iou_solid(const PointCloud& p, const PointCloud& q, int resolution);

// Correspondence distraction: template points are bucketed into grid cells
// over the template bounding box; for every cell holding >= 2 points the
// covariance trace of the matching reconstructed points is taken, and the
// mean over such cells is returned. recon must be index-aligned with the
// template.
double spread(const SphereTemplate& tmpl, const PointCloud& recon,
              int grid_resolution = 8);

// Mean Euclidean displacement between index-aligned template and
// reconstruction.
double shift(const SphereTemplate& tmpl, const PointCloud& recon);

}  // namespace cloudsphere
