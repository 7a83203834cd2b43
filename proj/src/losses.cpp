#include "cloudsphere/losses.hpp"

#include "cloudsphere/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cloudsphere {

namespace {
constexpr double kRegEps = 1e-12;  // guards the norm in the regularizer gradient
constexpr std::size_t kNoStage = std::numeric_limits<std::size_t>::max();
}  // namespace

LossWeights LossWeights::defaults(std::size_t stage_count) {
    static const std::vector<double> base_alpha = {0.5, 0.2, 0.2, 0.2, 0.2};
    static const std::vector<double> base_beta = {0.0, 0.0, 0.0, 1.0, 10.0};
    LossWeights w;
    for (std::size_t k = 0; k < stage_count; ++k) {
        w.alpha.push_back(k < base_alpha.size() ? base_alpha[k] : base_alpha.back());
        w.beta.push_back(k < base_beta.size() ? base_beta[k] : base_beta.back());
    }
    return w;
}

void LossWeights::validate(std::size_t stage_count) const {
    if (alpha.size() != stage_count || beta.size() != stage_count)
        throw InvalidArgument("loss weights: need exactly " +
                              std::to_string(stage_count) + " alpha/beta entries");
    for (double a : alpha)
        if (!(a >= 0.0)) throw InvalidArgument("loss weights: alpha must be >= 0");
    for (double b : beta)
        if (!(b >= 0.0)) throw InvalidArgument("loss weights: beta must be >= 0");
}

RegGraph RegGraph::build(const SphereTemplate& tmpl, std::size_t k_reg) {
    const std::size_t n = tmpl.size();
    if (n < 2) throw InvalidArgument("reg graph: template needs at least 2 points");
    if (k_reg < 1 || k_reg > n - 1)
        throw InvalidArgument("reg graph: k_reg out of range [1, n-1]");

    RegGraph graph;
    graph.k_reg = k_reg;
    graph.offsets.resize(n + 1);
    graph.edges.reserve(n * k_reg);

    std::vector<std::pair<double, std::uint32_t>> dist;
    dist.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist.emplace_back((tmpl.points[i] - tmpl.points[j]).norm(),
                              static_cast<std::uint32_t>(j));
        }
        std::partial_sort(dist.begin(), dist.begin() + k_reg, dist.end());
        graph.offsets[i] = static_cast<std::uint32_t>(graph.edges.size());
        for (std::size_t e = 0; e < k_reg; ++e)
            graph.edges.push_back({dist[e].second, std::exp(-dist[e].first)});
    }
    graph.offsets[n] = static_cast<std::uint32_t>(graph.edges.size());
    return graph;
}

MultiStageLoss::MultiStageLoss(const AbstractionPyramid& pyramid, LossWeights weights,
                               RegGraph graph)
    : weights_(std::move(weights)), graph_(std::move(graph)) {
    if (pyramid.levels.empty()) throw InvalidArgument("loss: empty pyramid");
    weights_.validate(pyramid.stage_count());
    target_index_.reserve(pyramid.levels.size());
    for (const PointCloud& level : pyramid.levels) target_index_.emplace_back(level);
}

bool MultiStageLoss::Terms::finite() const {
    if (!std::isfinite(total)) return false;
    for (double v : cd)
        if (!std::isfinite(v)) return false;
    for (double v : reg)
        if (!std::isfinite(v)) return false;
    return true;
}

double MultiStageLoss::cd_stage(const PointCloud& recon, std::size_t k,
                                std::vector<Vec3>* pos_grad) const {
    const NnIndex& target_idx = target_index_[k];
    const PointCloud& target = target_idx.points();
    const double inv_r = 1.0 / static_cast<double>(recon.size());
    const double inv_t = 1.0 / static_cast<double>(target.size());

    // forward: reconstruction against the target
    double forward = 0.0;
    for (std::size_t i = 0; i < recon.size(); ++i) {
        const NnIndex::Hit hit = target_idx.nearest(recon[i]);
        forward += hit.sq_dist;
        if (pos_grad)
            (*pos_grad)[i] += 2.0 * inv_r * (recon[i] - target[hit.index]);
    }

    // reverse: every target point pulls its nearest reconstruction point
    const NnIndex recon_idx(recon);
    double reverse = 0.0;
    for (const Vec3& p : target) {
        const NnIndex::Hit hit = recon_idx.nearest(p);
        reverse += hit.sq_dist;
        if (pos_grad)
            (*pos_grad)[hit.index] += 2.0 * inv_t * (recon[hit.index] - p);
    }
    return forward * inv_r + reverse * inv_t;
}

double MultiStageLoss::reg_stage(const OffsetField& field,
                                 std::vector<Vec3>* grad) const {
    double value = 0.0;
    for (std::size_t i = 0; i < graph_.node_count(); ++i) {
        for (std::uint32_t e = graph_.offsets[i]; e < graph_.offsets[i + 1]; ++e) {
            const RegGraph::Edge& edge = graph_.edges[e];
            const Vec3 diff = field[i] - field[edge.neighbor];
            const double nrm = diff.norm();
            value += edge.weight * nrm;
            if (grad) {
                const Vec3 g = (edge.weight / std::max(nrm, kRegEps)) * diff;
                (*grad)[i] += g;
                (*grad)[edge.neighbor] -= g;
            }
        }
    }
    return value;
}

MultiStageLoss::Terms MultiStageLoss::core(const CloudSphereRep& rep,
                                           bool want_joint_grad,
                                           std::size_t live_stage,
                                           std::vector<OffsetField>* joint_grad,
                                           OffsetField* stage_grad) const {
    const std::size_t stages = stage_count();
    if (rep.stage_count() != stages)
        throw InvalidArgument("loss: rep has " + std::to_string(rep.stage_count()) +
                              " stages, pyramid has " + std::to_string(stages));
    if (graph_.node_count() != rep.cardinality())
        throw InvalidArgument("loss: reg graph size differs from template");
    const std::size_t n = rep.cardinality();

    Terms terms;
    terms.cd.resize(stages);
    terms.reg.resize(stages);

    // alpha-scaled position-space Chamfer gradients, one per stage
    std::vector<std::vector<Vec3>> cd_grads;
    if (want_joint_grad) cd_grads.assign(stages, std::vector<Vec3>(n, Vec3::Zero()));

    // walk the recursion downward: recon starts as R^K and gains one field
    // per step until it is R^0
    PointCloud recon = rep.sphere.points;
    for (std::size_t k = stages; k-- > 0;) {
        const OffsetField& field = rep.stages[k];
        for (std::size_t i = 0; i < n; ++i) recon[i] += field[i];

        std::vector<Vec3>* pos_grad = nullptr;
        std::vector<Vec3> live_pos_grad;
        if (want_joint_grad) {
            pos_grad = &cd_grads[k];
        } else if (k == live_stage && stage_grad) {
            live_pos_grad.assign(n, Vec3::Zero());
            pos_grad = &live_pos_grad;
        }

        terms.cd[k] = cd_stage(recon, k, pos_grad);

        std::vector<Vec3> reg_grad_vec;
        std::vector<Vec3>* reg_grad = nullptr;
        const bool want_reg_grad =
            (want_joint_grad || (k == live_stage && stage_grad));
        if (want_reg_grad) {
            reg_grad_vec.assign(n, Vec3::Zero());
            reg_grad = &reg_grad_vec;
        }
        terms.reg[k] = reg_stage(field, reg_grad);

        if (want_joint_grad) {
            for (Vec3& g : cd_grads[k]) g *= weights_.alpha[k];
            if (joint_grad)
                for (std::size_t i = 0; i < n; ++i)
                    (*joint_grad)[k][i] = weights_.beta[k] * reg_grad_vec[i];
        } else if (k == live_stage && stage_grad) {
            for (std::size_t i = 0; i < n; ++i)
                (*stage_grad)[i] = weights_.alpha[k] * live_pos_grad[i] +
                                   weights_.beta[k] * reg_grad_vec[i];
        }
    }

    if (want_joint_grad && joint_grad) {
        // The stage-k Chamfer gradient reaches every field m >= k, so field m
        // collects the prefix sum of the scaled position gradients up to m.
        std::vector<Vec3> running(n, Vec3::Zero());
        for (std::size_t m = 0; m < stages; ++m) {
            for (std::size_t i = 0; i < n; ++i) {
                running[i] += cd_grads[m][i];
                (*joint_grad)[m][i] += running[i];
            }
        }
    }

    terms.total = 0.0;
    for (std::size_t k = 0; k < stages; ++k)
        terms.total += weights_.alpha[k] * terms.cd[k] + weights_.beta[k] * terms.reg[k];
    return terms;
}

MultiStageLoss::Terms MultiStageLoss::evaluate(const CloudSphereRep& rep) const {
    return core(rep, false, kNoStage, nullptr, nullptr);
}

MultiStageLoss::Terms MultiStageLoss::evaluate_joint(
    const CloudSphereRep& rep, std::vector<OffsetField>& grad) const {
    grad.assign(stage_count(), OffsetField(rep.cardinality(), Vec3::Zero()));
    return core(rep, true, kNoStage, &grad, nullptr);
}

MultiStageLoss::Terms MultiStageLoss::evaluate_stage(const CloudSphereRep& rep,
                                                     std::size_t k,
                                                     OffsetField& grad) const {
    if (k >= stage_count())
        throw InvalidArgument("loss: stage out of range");
    grad.assign(rep.cardinality(), Vec3::Zero());
    return core(rep, false, k, nullptr, &grad);
}

double loss_cd_stage(const CloudSphereRep& rep, const AbstractionPyramid& pyramid,
                     std::size_t k) {
    if (k >= pyramid.stage_count())
        throw InvalidArgument("loss_cd_stage: stage out of range");
    return chamfer(reconstruct(rep, k), pyramid.levels[k]);
}

double loss_reg_stage(const CloudSphereRep& rep, const RegGraph& graph,
                      std::size_t k) {
    if (k >= rep.stage_count())
        throw InvalidArgument("loss_reg_stage: stage out of range");
    if (graph.node_count() != rep.cardinality())
        throw InvalidArgument("loss_reg_stage: graph size differs from template");
    double value = 0.0;
    const OffsetField& field = rep.stages[k];
    for (std::size_t i = 0; i < graph.node_count(); ++i)
        for (std::uint32_t e = graph.offsets[i]; e < graph.offsets[i + 1]; ++e)
            value += graph.edges[e].weight *
                     (field[i] - field[graph.edges[e].neighbor]).norm();
    return value;
}

double total_loss(const CloudSphereRep& rep, const AbstractionPyramid& pyramid,
                  const LossWeights& weights, const RegGraph& graph) {
    return MultiStageLoss(pyramid, weights, graph).evaluate(rep).total;
}

std::vector<OffsetField> grad_total_loss(const CloudSphereRep& rep,
                                         const AbstractionPyramid& pyramid,
                                         const LossWeights& weights,
                                         const RegGraph& graph) {
    std::vector<OffsetField> grad;
    MultiStageLoss(pyramid, weights, graph).evaluate_joint(rep, grad);
    return grad;
}

}  // namespace cloudsphere
