#include "cloudsphere/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace cloudsphere {

LossWeights FitConfig::resolved_weights() const {
    if (weights.alpha.empty() && weights.beta.empty())
        return LossWeights::defaults(stage_count());
    return weights;
}

void FitConfig::validate() const {
    for (std::size_t k = 1; k < centroid_counts.size(); ++k)
        if (centroid_counts[k] >= centroid_counts[k - 1])
            throw InvalidArgument("fit config: centroid counts must be strictly decreasing");
    for (std::size_t c : centroid_counts)
        if (c == 0) throw InvalidArgument("fit config: zero centroid count");
    if (!(sigma_factor > 0.0))
        throw InvalidArgument("fit config: sigma_factor must be positive");
    if (!(step_size > 0.0)) throw InvalidArgument("fit config: step size must be positive");
    if (!(template_radius > 0.0))
        throw InvalidArgument("fit config: template radius must be positive");
    if (k_reg < 1) throw InvalidArgument("fit config: k_reg must be >= 1");
    resolved_weights().validate(stage_count());
}

double FitHistory::initial_cd() const {
    if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
    return records.front().cd[0];
}

double FitHistory::final_cd() const {
    if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
    return records.back().cd[0];
}

void FitHistory::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError(path, 0, false, "cannot open for writing");
    const std::size_t stages = records.empty() ? 0 : records.front().cd.size();
    out << "phase,iteration,objective,total";
    for (std::size_t k = 0; k < stages; ++k) out << ",cd_" << k;
    for (std::size_t k = 0; k < stages; ++k) out << ",reg_" << k;
    out << "\n";
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    for (const IterationRecord& r : records) {
        if (r.phase_stage == IterationRecord::kJointPhase)
            out << "joint";
        else
            out << "stage" << r.phase_stage;
        out << "," << r.iteration << "," << num(r.objective) << "," << num(r.total);
        for (double v : r.cd) out << "," << num(v);
        for (double v : r.reg) out << "," << num(v);
        out << "\n";
    }
}

namespace {

// Elementwise Adam over one offset field.
struct AdamState {
    std::vector<Vec3> m;
    std::vector<Vec3> v;
    std::size_t t = 0;

    explicit AdamState(std::size_t n)
        : m(n, Vec3::Zero()), v(n, Vec3::Zero()) {}

    void step(OffsetField& params, const OffsetField& grad, double lr,
              const FitConfig& cfg) {
        ++t;
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
            v[i] = (cfg.adam_beta2 * v[i].array() +
                    (1.0 - cfg.adam_beta2) * grad[i].array().square())
                       .matrix();
            const Eigen::Array3d m_hat = m[i].array() / c1;
            const Eigen::Array3d v_hat = v[i].array() / c2;
            params[i] -=
                (lr * m_hat / (v_hat.sqrt() + cfg.adam_eps)).matrix();
        }
    }
};

double learning_rate(const FitConfig& cfg, std::size_t iter, std::size_t total) {
    if (cfg.step_schedule == StepSchedule::Constant || total <= 1)
        return cfg.step_size;
    // cosine decay to 1% of the base step across the phase
    const double progress = static_cast<double>(iter) / static_cast<double>(total - 1);
    const double floor = 0.01 * cfg.step_size;
    return floor + 0.5 * (cfg.step_size - floor) * (1.0 + std::cos(M_PI * progress));
}

struct Phase {
    int stage = IterationRecord::kJointPhase;  // live stage, or joint
    std::size_t iterations = 0;
};

void run_phase(CloudSphereRep& rep, const MultiStageLoss& loss, const Phase& phase,
               const FitConfig& cfg, FitHistory& history) {
    const bool joint = phase.stage == IterationRecord::kJointPhase;
    const std::size_t n = rep.cardinality();
    const std::size_t stages = rep.stage_count();

    AdamState adam(joint ? n * stages : n);
    std::vector<OffsetField> joint_grad;
    OffsetField stage_grad;
    // flattened view for the joint phase so one Adam state covers all fields
    OffsetField flat_params, flat_grad;

    double best_objective = std::numeric_limits<double>::infinity();
    std::vector<OffsetField> best_stages;

    for (std::size_t iter = 0; iter <= phase.iterations; ++iter) {
        MultiStageLoss::Terms terms;
        if (iter == phase.iterations) {
            terms = loss.evaluate(rep);  // capture the final iterate, no step after
        } else if (joint) {
            terms = loss.evaluate_joint(rep, joint_grad);
        } else {
            terms = loss.evaluate_stage(rep, static_cast<std::size_t>(phase.stage),
                                        stage_grad);
        }

        IterationRecord record;
        record.phase_stage = phase.stage;
        record.iteration = iter;
        record.cd = terms.cd;
        record.reg = terms.reg;
        record.total = terms.total;
        record.objective =
            joint ? terms.total
                  : terms.stage_objective(loss.weights(),
                                          static_cast<std::size_t>(phase.stage));
        history.records.push_back(record);

        if (!terms.finite())
            throw OptimizationFailure("fit diverged: non-finite loss in " +
                                          std::string(joint ? "joint phase"
                                                            : "sequential phase"),
                                      history);

        if (record.objective < best_objective) {
            best_objective = record.objective;
            best_stages = rep.stages;
        }
        if (iter == phase.iterations) break;

        const double lr = learning_rate(cfg, iter, phase.iterations);
        if (joint) {
            flat_params.clear();
            flat_grad.clear();
            for (std::size_t k = 0; k < stages; ++k) {
                flat_params.insert(flat_params.end(), rep.stages[k].begin(),
                                   rep.stages[k].end());
                flat_grad.insert(flat_grad.end(), joint_grad[k].begin(),
                                 joint_grad[k].end());
            }
            adam.step(flat_params, flat_grad, lr, cfg);
            for (std::size_t k = 0; k < stages; ++k)
                std::copy(flat_params.begin() + static_cast<std::ptrdiff_t>(k * n),
                          flat_params.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                          rep.stages[k].begin());
        } else {
            adam.step(rep.stages[static_cast<std::size_t>(phase.stage)], stage_grad,
                      lr, cfg);
        }
    }

    // keep the best-seen iterate of the phase
    rep.stages = std::move(best_stages);
}

}  // namespace

FitResult fit(const PointCloud& target, const FitConfig& config) {
    config.validate();
    if (target.empty()) throw InvalidArgument("fit: empty target");
    if (!is_normalized(target))
        throw InvalidArgument(
            "fit: target must be normalized (centered, max norm 1); run normalize_cloud");

    const std::size_t n_template =
        config.template_points == 0 ? target.size() : config.template_points;
    const SphereTemplate tmpl =
        generate_sphere_template(n_template, config.template_radius);

    const AbstractionPyramid pyramid = build_pyramid(
        target, config.centroid_counts, config.sigma_factor, config.seed);
    const MultiStageLoss loss(pyramid, config.resolved_weights(),
                              RegGraph::build(tmpl, config.k_reg));

    FitResult result;
    result.rep = CloudSphereRep::zero(tmpl, config.stage_count());

    std::vector<Phase> phases;
    if (config.schedule == ScheduleMode::SequentialThenJoint) {
        for (std::size_t k = config.stage_count(); k-- > 0;)
            phases.push_back({static_cast<int>(k), config.iterations_sequential});
    }
    phases.push_back({IterationRecord::kJointPhase, config.iterations_joint});

    for (const Phase& phase : phases)
        run_phase(result.rep, loss, phase, config, result.history);
    return result;
}

}  // namespace cloudsphere
