#pragma once

#include "cloudsphere/geometry.hpp"
#include "cloudsphere/kdtree.hpp"
#include "cloudsphere/rep.hpp"

namespace cloudsphere {

// Per-stage weights for the fitting objective: alpha scales the Chamfer term,
// beta the topology regularizer, indexed by stage (0 = finest).
struct LossWeights {
    std::vector<double> alpha;
    std::vector<double> beta;

    // Default stage weights alpha = [0.5, 0.2, 0.2, 0.2, 0.2] and
    // beta = [0, 0, 0, 1, 10], cut down to stage_count entries from the
    // coarse end (repeating the coarsest entry when more are needed).
    static LossWeights defaults(std::size_t stage_count);
    void validate(std::size_t stage_count) const;
};

// Directed k-nearest-neighbor graph over the template with edge weights
// exp(-distance). Built once from template coordinates and frozen; the
// regularizer reads displacement differences across its edges.
struct RegGraph {
    struct Edge {
        std::uint32_t neighbor;
        double weight;
    };
    std::vector<std::uint32_t> offsets;  // node i owns edges [offsets[i], offsets[i+1])
    std::vector<Edge> edges;
    std::size_t k_reg = 0;

    std::size_t node_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    static RegGraph build(const SphereTemplate& tmpl, std::size_t k_reg);
};

// Multi-stage objective over a fixed supervision pyramid. Owns exact NN
// indexes for every pyramid level so repeated evaluation during fitting only
// pays for indexes over the moving reconstruction.
class MultiStageLoss {
  public:
    MultiStageLoss(const AbstractionPyramid& pyramid, LossWeights weights,
                   RegGraph graph);

    struct Terms {
        std::vector<double> cd;   // unweighted Chamfer per stage
        std::vector<double> reg;  // unweighted regularizer per stage
        double total = 0.0;       // sum_k alpha_k cd_k + beta_k reg_k

        double stage_objective(const LossWeights& w, std::size_t k) const {
            return w.alpha[k] * cd[k] + w.beta[k] * reg[k];
        }
        bool finite() const;
    };

    Terms evaluate(const CloudSphereRep& rep) const;

    // Terms plus the gradient of the weighted total with respect to every
    // offset field. The stage-k Chamfer term reaches every field m >= k
    // through the reconstruction recursion; the regularizer only touches its
    // own stage.
    Terms evaluate_joint(const CloudSphereRep& rep,
                         std::vector<OffsetField>& grad) const;

    // Terms plus the gradient of alpha_k cd_k + beta_k reg_k with respect to
    // the stage-k field alone (the objective of a sequential phase).
    Terms evaluate_stage(const CloudSphereRep& rep, std::size_t k,
                         OffsetField& grad) const;

    std::size_t stage_count() const { return target_index_.size(); }
    const LossWeights& weights() const { return weights_; }

  private:
    Terms core(const CloudSphereRep& rep, bool want_joint_grad,
               std::size_t live_stage, std::vector<OffsetField>* joint_grad,
               OffsetField* stage_grad) const;

    double cd_stage(const PointCloud& recon, std::size_t k,
                    std::vector<Vec3>* pos_grad) const;
    double reg_stage(const OffsetField& field, std::vector<Vec3>* grad) const;

    std::vector<NnIndex> target_index_;  // one per pyramid level
    LossWeights weights_;
    RegGraph graph_;
};

// One-shot helpers over the same code path as MultiStageLoss.
double loss_cd_stage(const CloudSphereRep& rep, const AbstractionPyramid& pyramid,
                     std::size_t k);
double loss_reg_stage(const CloudSphereRep& rep, const RegGraph& graph,
                      std::size_t k);
double total_loss(const CloudSphereRep& rep, const AbstractionPyramid& pyramid,
                  const LossWeights& weights, const RegGraph& graph);
std::vector<OffsetField> grad_total_loss(const CloudSphereRep& rep,
                                         const AbstractionPyramid& pyramid,
                                         const LossWeights& weights,
                                         const RegGraph& graph);

}  // namespace cloudsphere
