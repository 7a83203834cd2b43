#pragma once

#include "cloudsphere/losses.hpp"

#include <cstdint>
#include <string>

namespace cloudsphere {

enum class ScheduleMode { SequentialThenJoint, JointOnly };
enum class StepSchedule { Constant, Cosine };

// Everything a fit run depends on. Defaults reproduce the reference setup:
// 4096-point clouds, supervision levels {1024, 256, 64, 16}, default stage
// weights, Adam at 1e-2.
struct FitConfig {
    std::vector<std::size_t> centroid_counts = {1024, 256, 64, 16};  // N^1..N^K
    double sigma_factor = 0.25;
    LossWeights weights;  // empty = LossWeights::defaults(K+1)
    std::size_t k_reg = 8;
    std::size_t iterations_sequential = 500;  // per sequential phase
    std::size_t iterations_joint = 500;
    double step_size = 1e-2;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    StepSchedule step_schedule = StepSchedule::Cosine;
    ScheduleMode schedule = ScheduleMode::SequentialThenJoint;
    std::uint64_t seed = 0;
    std::size_t template_points = 0;  // 0 = match the target cardinality
    double template_radius = 1.0;

    std::size_t stage_count() const { return centroid_counts.size() + 1; }
    LossWeights resolved_weights() const;
    void validate() const;
};

// One optimizer step of one phase. phase_stage is the live stage during
// sequential phases and kJointPhase once every field is live.
struct IterationRecord {
    static constexpr int kJointPhase = -1;
    int phase_stage = 0;
    std::size_t iteration = 0;
    std::vector<double> cd;   // unweighted Chamfer per stage
    std::vector<double> reg;  // unweighted regularizer per stage
    double objective = 0.0;   // the phase objective at this iterate
    double total = 0.0;       // weighted total loss at this iterate
};

struct FitHistory {
    std::vector<IterationRecord> records;

    // Chamfer of the full reconstruction before any optimization.
    double initial_cd() const;
    double final_cd() const;
    void write_csv(const std::string& path) const;
};

struct FitResult {
    CloudSphereRep rep;
    FitHistory history;
};

// Divergence (non-finite loss) during fitting; carries the history up to the
// failing iterate.
class OptimizationFailure : public std::runtime_error {
  public:
    OptimizationFailure(const std::string& what, FitHistory history)
        : std::runtime_error(what), history(std::move(history)) {}
    FitHistory history;
};

// Coarse-to-fine fit of the offset cascade to a normalized target cloud.
// Builds the supervision pyramid, starts from all-zero offsets, optimizes
// each stage in coarse-to-fine order and then all stages jointly (or jointly
// only), keeping the best-seen iterate of every phase. Deterministic for a
// fixed config.
FitResult fit(const PointCloud& target, const FitConfig& config);

}  // namespace cloudsphere
