// Command-line front end: template generation, supervision preprocessing,
// shape fitting, evaluation, correspondence export, offset-blend editing and
// the stage-set ablation table.

#include "cloudsphere/correspond.hpp"
#include "cloudsphere/fit.hpp"
#include "cloudsphere/io.hpp"
#include "cloudsphere/metrics.hpp"
#include "cloudsphere/shapes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cloudsphere;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitOptimization = 3;

std::size_t thread_budget() {
    const char* env = std::getenv("CLOUDSPHERE_THREADS");
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (!env) return hw;
    const long v = std::strtol(env, nullptr, 10);
    return v >= 1 ? std::min<std::size_t>(static_cast<std::size_t>(v), hw) : 1;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) ss << ",";
        ss << values[i];
    }
    return ss.str();
}

// Fitting options shared by fit and ablate. A config file uses the same keys
// as the flags, one `key = value` per line; unknown keys are rejected.
struct FitSettings {
    FitConfig config;
    std::string levels = "1024,256,64,16";
    std::string alpha, beta;
    std::string step_schedule = "cosine", schedule = "sequential-then-joint";

    void apply_entry(const std::string& key, const std::string& value) {
        if (key == "levels")
            levels = value;
        else if (key == "alpha")
            alpha = value;
        else if (key == "beta")
            beta = value;
        else if (key == "sigma_factor")
            config.sigma_factor = std::stod(value);
        else if (key == "k_reg")
            config.k_reg = std::stoull(value);
        else if (key == "iterations_sequential")
            config.iterations_sequential = std::stoull(value);
        else if (key == "iterations_joint")
            config.iterations_joint = std::stoull(value);
        else if (key == "step_size")
            config.step_size = std::stod(value);
        else if (key == "adam_beta1")
            config.adam_beta1 = std::stod(value);
        else if (key == "adam_beta2")
            config.adam_beta2 = std::stod(value);
        else if (key == "adam_eps")
            config.adam_eps = std::stod(value);
        else if (key == "step_schedule")
            step_schedule = value;
        else if (key == "schedule")
            schedule = value;
        else if (key == "seed")
            config.seed = std::stoull(value);
        else if (key == "points")
            config.template_points = std::stoull(value);
        else if (key == "template_radius")
            config.template_radius = std::stod(value);
        else
            throw InvalidArgument("config: unknown key '" + key + "'");
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw FormatError(path, 0, false, "cannot open config");
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw FormatError(path, line_no, false, "expected key = value");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            try {
                apply_entry(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
            } catch (const InvalidArgument& e) {
                throw FormatError(path, line_no, false, e.what());
            }
        }
    }

    FitConfig resolve() {
        config.centroid_counts = parse_count_list(levels);
        if (!alpha.empty()) config.weights.alpha = parse_real_list(alpha);
        if (!beta.empty()) config.weights.beta = parse_real_list(beta);
        if (step_schedule == "constant")
            config.step_schedule = StepSchedule::Constant;
        else if (step_schedule == "cosine")
            config.step_schedule = StepSchedule::Cosine;
        else
            throw InvalidArgument("step_schedule must be constant or cosine");
        if (schedule == "sequential-then-joint")
            config.schedule = ScheduleMode::SequentialThenJoint;
        else if (schedule == "joint-only")
            config.schedule = ScheduleMode::JointOnly;
        else
            throw InvalidArgument("schedule must be sequential-then-joint or joint-only");
        config.validate();
        return config;
    }

    // echo in the same key = value shape load_file reads
    std::string echo() const {
        std::ostringstream out;
        out << "levels = " << levels << "\n";
        if (!alpha.empty()) out << "alpha = " << alpha << "\n";
        if (!beta.empty()) out << "beta = " << beta << "\n";
        out << "sigma_factor = " << config.sigma_factor << "\n";
        out << "k_reg = " << config.k_reg << "\n";
        out << "iterations_sequential = " << config.iterations_sequential << "\n";
        out << "iterations_joint = " << config.iterations_joint << "\n";
        out << "step_size = " << config.step_size << "\n";
        out << "adam_beta1 = " << config.adam_beta1 << "\n";
        out << "adam_beta2 = " << config.adam_beta2 << "\n";
        out << "adam_eps = " << config.adam_eps << "\n";
        out << "step_schedule = " << step_schedule << "\n";
        out << "schedule = " << schedule << "\n";
        out << "seed = " << config.seed << "\n";
        out << "points = " << config.template_points << "\n";
        out << "template_radius = " << config.template_radius << "\n";
        return out.str();
    }

    json to_json() const {
        return json{{"levels", levels},
                    {"alpha", alpha},
                    {"beta", beta},
                    {"sigma_factor", config.sigma_factor},
                    {"k_reg", config.k_reg},
                    {"iterations_sequential", config.iterations_sequential},
                    {"iterations_joint", config.iterations_joint},
                    {"step_size", config.step_size},
                    {"adam_beta1", config.adam_beta1},
                    {"adam_beta2", config.adam_beta2},
                    {"adam_eps", config.adam_eps},
                    {"step_schedule", step_schedule},
                    {"schedule", schedule},
                    {"seed", config.seed},
                    {"points", config.template_points},
                    {"template_radius", config.template_radius}};
    }
};

struct FitFlagRefs {
    CLI::Option* levels = nullptr;
    CLI::Option* alpha = nullptr;
    CLI::Option* beta = nullptr;
    CLI::Option* sigma_factor = nullptr;
    CLI::Option* k_reg = nullptr;
    CLI::Option* iters_sequential = nullptr;
    CLI::Option* iters_joint = nullptr;
    CLI::Option* step = nullptr;
    CLI::Option* step_schedule = nullptr;
    CLI::Option* schedule = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* points = nullptr;
};

FitFlagRefs add_fit_flags(CLI::App* cmd, FitSettings& settings,
                          std::string& config_path) {
    FitFlagRefs refs;
    cmd->add_option("--config", config_path, "config file (key = value lines)");
    refs.levels = cmd->add_option("--stages,--levels", settings.levels,
                                  "comma-separated centroid counts, coarse stages last");
    refs.alpha = cmd->add_option("--alpha", settings.alpha, "per-stage Chamfer weights");
    refs.beta = cmd->add_option("--beta", settings.beta, "per-stage regularizer weights");
    refs.sigma_factor =
        cmd->add_option("--sigma-factor", settings.config.sigma_factor,
                        "splat sigma as a fraction of the FPS spacing");
    refs.k_reg = cmd->add_option("--k-reg", settings.config.k_reg,
                                 "regularizer neighbors");
    refs.iters_sequential =
        cmd->add_option("--iters-sequential", settings.config.iterations_sequential,
                        "iterations per sequential phase");
    refs.iters_joint = cmd->add_option("--iters-joint", settings.config.iterations_joint,
                                       "iterations of the joint phase");
    refs.step = cmd->add_option("--step", settings.config.step_size,
                                "optimizer step size");
    refs.step_schedule = cmd->add_option("--step-schedule", settings.step_schedule,
                                         "constant | cosine");
    refs.schedule = cmd->add_option("--schedule", settings.schedule,
                                    "sequential-then-joint | joint-only");
    refs.seed = cmd->add_option("--seed", settings.config.seed, "random seed");
    refs.points = cmd->add_option("--points", settings.config.template_points,
                                  "template cardinality (0 = match target)");
    return refs;
}

// Config file forms the base; explicitly passed flags win over it.
void merge_config_file(FitSettings& settings, const std::string& path,
                       const FitFlagRefs& refs) {
    FitSettings base;
    base.load_file(path);
    if (refs.levels->count() == 0) settings.levels = base.levels;
    if (refs.alpha->count() == 0) settings.alpha = base.alpha;
    if (refs.beta->count() == 0) settings.beta = base.beta;
    if (refs.sigma_factor->count() == 0)
        settings.config.sigma_factor = base.config.sigma_factor;
    if (refs.k_reg->count() == 0) settings.config.k_reg = base.config.k_reg;
    if (refs.iters_sequential->count() == 0)
        settings.config.iterations_sequential = base.config.iterations_sequential;
    if (refs.iters_joint->count() == 0)
        settings.config.iterations_joint = base.config.iterations_joint;
    if (refs.step->count() == 0) settings.config.step_size = base.config.step_size;
    if (refs.step_schedule->count() == 0) settings.step_schedule = base.step_schedule;
    if (refs.schedule->count() == 0) settings.schedule = base.schedule;
    if (refs.seed->count() == 0) settings.config.seed = base.config.seed;
    if (refs.points->count() == 0)
        settings.config.template_points = base.config.template_points;
    // these have no flag, so the file always decides
    settings.config.adam_beta1 = base.config.adam_beta1;
    settings.config.adam_beta2 = base.config.adam_beta2;
    settings.config.adam_eps = base.config.adam_eps;
    settings.config.template_radius = base.config.template_radius;
}

PointCloud load_input(const std::string& path, const std::string& format) {
    if (format.empty()) return read_cloud(path);
    return read_cloud(path, parse_format(format));
}

// target cloud, normalized, plus the transform for mapping results back
std::pair<PointCloud, NormalizeTransform> load_target(const std::string& path,
                                                      const std::string& format) {
    return normalize_cloud(load_input(path, format));
}

json transform_json(const NormalizeTransform& tf) {
    return json{{"translation", {tf.translation.x(), tf.translation.y(), tf.translation.z()}},
                {"scale", tf.scale}};
}

int run_template(const std::string& output, std::size_t points, double radius,
                 const std::string& format) {
    const SphereTemplate tmpl = generate_sphere_template(points, radius);
    write_cloud(tmpl.points, output,
                format.empty() ? CloudFormat::PlyBinaryLE : parse_format(format));
    std::cout << "template: " << points << " points -> " << output << "\n";
    return 0;
}

int run_preprocess(const std::string& input, const std::string& outdir,
                   FitSettings& settings, const std::string& format) {
    const FitConfig cfg = settings.resolve();
    const auto [target, tf] = load_target(input, format);
    const AbstractionPyramid pyr =
        build_pyramid(target, cfg.centroid_counts, cfg.sigma_factor, cfg.seed);

    fs::create_directories(outdir);
    for (std::size_t k = 0; k < pyr.stage_count(); ++k) {
        const std::string path = outdir + "/level" + std::to_string(k) + ".ply";
        write_cloud(pyr.levels[k], path, CloudFormat::PlyBinaryLE);
    }
    json meta{{"input", input},
              {"cardinality", pyr.cardinality()},
              {"centroid_counts", pyr.centroid_counts},
              {"sigma_per_level", pyr.sigma_per_level},
              {"normalize", transform_json(tf)}};
    std::ofstream(outdir + "/pyramid.json") << meta.dump(2) << "\n";
    std::cout << "preprocess: " << pyr.stage_count() << " levels -> " << outdir << "\n";
    return 0;
}

int run_fit(const std::string& input, const std::string& outdir, FitSettings& settings,
            const std::string& format) {
    const FitConfig cfg = settings.resolve();
    const auto [target, tf] = load_target(input, format);

    const FitResult result = fit(target, cfg);

    fs::create_directories(outdir);
    save_rep(result.rep, outdir + "/rep.csr");
    for (std::size_t k = 0; k < result.rep.stage_count(); ++k)
        write_cloud(reconstruct(result.rep, k),
                    outdir + "/recon_stage" + std::to_string(k) + ".ply",
                    CloudFormat::PlyBinaryLE);
    result.history.write_csv(outdir + "/history.csv");
    std::ofstream(outdir + "/config.txt") << settings.echo();

    json report{{"command", "fit"},
                {"input", input},
                {"config", settings.to_json()},
                {"normalize", transform_json(tf)},
                {"initial_cd", result.history.initial_cd()},
                {"final_cd", result.history.final_cd()},
                {"iterations", result.history.records.size()}};
    std::ofstream(outdir + "/run.json") << report.dump(2) << "\n";

    std::cout << "fit: cd " << result.history.initial_cd() << " -> "
              << result.history.final_cd() << ", outputs in " << outdir << "\n";
    return 0;
}

struct MetricToggles {
    bool cd = true, emd = true, iou = true, spread = true, shift = true;
    int grid_res = 32;
    int spread_grid_res = 8;
    std::size_t emd_cap = 4096;
};

MetricsReport evaluate_rep(const CloudSphereRep& rep, const PointCloud& target,
                           const MetricToggles& toggles) {
    const PointCloud recon = reconstruct(rep, 0);
    MetricsReport report;
    if (toggles.cd) report.cd = chamfer(recon, target);
    if (toggles.emd) {
        if (recon.size() == target.size() && recon.size() <= toggles.emd_cap)
            report.emd = emd(recon, target, toggles.emd_cap);
        else
            std::cerr << "eval: skipping emd (cardinality mismatch or above cap)\n";
    }
    if (toggles.iou) report.iou = iou_solid(recon, target, toggles.grid_res);
    if (toggles.spread)
        report.spread = cloudsphere::spread(rep.sphere, recon, toggles.spread_grid_res);
    if (toggles.shift) report.shift = cloudsphere::shift(rep.sphere, recon);
    return report;
}

json report_json(const MetricsReport& report) {
    auto put = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    json out{{"cd", put(report.cd)},
             {"emd", put(report.emd)},
             {"iou", put(report.iou)},
             {"spread", put(report.spread)},
             {"shift", put(report.shift)}};
    if (report.cd) out["cd_x1000"] = *report.cd * 1000.0;
    if (report.emd) out["emd_x100"] = *report.emd * 100.0;
    return out;
}

std::string report_csv_row(const std::string& label, const MetricsReport& report) {
    std::ostringstream row;
    auto cell = [&](const std::optional<double>& v, double scale) {
        row << ",";
        if (v) row << (*v * scale);
    };
    row << label;
    cell(report.cd, 1000.0);
    cell(report.emd, 100.0);
    cell(report.iou, 1.0);
    cell(report.spread, 1.0);
    cell(report.shift, 1.0);
    return row.str();
}

constexpr const char* kReportCsvHeader = "name,cd_x1000,emd_x100,iou,spread,shift";

int run_eval(const std::string& rep_path, const std::string& input,
             const std::string& outdir, const MetricToggles& toggles,
             const std::string& format) {
    const CloudSphereRep rep = load_rep(rep_path);
    const auto [target, tf] = load_target(input, format);
    const MetricsReport report = evaluate_rep(rep, target, toggles);

    fs::create_directories(outdir);
    std::ofstream(outdir + "/metrics.json") << report_json(report).dump(2) << "\n";
    std::ofstream csv(outdir + "/metrics.csv");
    csv << kReportCsvHeader << "\n"
        << report_csv_row(fs::path(input).stem().string(), report) << "\n";

    std::cout << kReportCsvHeader << "\n"
              << report_csv_row(fs::path(input).stem().string(), report) << "\n";
    return 0;
}

int run_correspond(const std::string& rep_path, const std::string& outdir,
                   const std::string& format) {
    const CloudSphereRep rep = load_rep(rep_path);
    const PointCloud recon = reconstruct(rep, 0);
    const CloudFormat fmt =
        format.empty() ? CloudFormat::PlyBinaryLE : parse_format(format);

    fs::create_directories(outdir);
    const char* names[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        const auto colors = color_code(rep.sphere, static_cast<Axis>(a));
        write_cloud(rep.sphere.points,
                    outdir + "/template_" + names[a] + ".ply", fmt, &colors);
        write_cloud(recon, outdir + "/recon_" + names[a] + ".ply", fmt, &colors);
    }
    std::cout << "correspond: wrote color-coded template and reconstruction for "
                 "x, y, z -> "
              << outdir << "\n";
    return 0;
}

int run_edit(const std::string& source_path, const std::string& target_path,
             const std::string& mask_path, double t, const std::string& stages_text,
             std::size_t smooth_rounds, const std::string& output,
             const std::string& format) {
    const CloudSphereRep source = load_rep(source_path);
    const CloudSphereRep target = load_rep(target_path);
    const PointCloud source_recon = reconstruct(source, 0);

    RegionMask mask = read_mask_file(mask_path, source.sphere, source_recon);
    if (smooth_rounds > 0)
        mask = smooth_mask(mask, RegGraph::build(source.sphere, 8), smooth_rounds);

    PointCloud blended;
    if (stages_text.empty()) {
        blended = blend_offsets(source, target, mask, t);
    } else {
        blended = blend_offsets(source, target, mask, t, parse_count_list(stages_text));
    }
    write_cloud(blended, output,
                format.empty() ? CloudFormat::PlyBinaryLE : parse_format(format));
    std::cout << "edit: blended cloud -> " << output << "\n";
    return 0;
}

int run_ablate(const std::string& input, const std::string& output,
               FitSettings& settings, bool no_emd, int grid_res,
               const std::string& format) {
    FitConfig base = settings.resolve();
    const auto [target, tf] = load_target(input, format);

    const std::vector<std::vector<std::size_t>> stage_sets = {
        {}, {16}, {256, 16}, {1024, 256, 64, 16}};
    const std::vector<std::string> labels = {"{}", "{16}", "{16,256}",
                                             "{16,64,256,1024}"};

    std::vector<MetricsReport> reports(stage_sets.size());
    std::vector<std::string> errors(stage_sets.size());

    auto run_one = [&](std::size_t job) {
        try {
            FitConfig cfg = base;
            cfg.centroid_counts = stage_sets[job];
            cfg.weights = LossWeights{};  // re-derive defaults for this stage count
            const FitResult result = fit(target, cfg);
            MetricToggles toggles;
            toggles.emd = !no_emd;
            toggles.grid_res = grid_res;
            toggles.spread = false;  // spread/shift are not part of this table
            toggles.shift = false;
            reports[job] = evaluate_rep(result.rep, target, toggles);
        } catch (const std::exception& e) {
            errors[job] = e.what();
        }
    };

    const std::size_t workers = std::min(thread_budget(), stage_sets.size());
    if (workers <= 1) {
        for (std::size_t job = 0; job < stage_sets.size(); ++job) run_one(job);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (std::size_t job = next.fetch_add(1); job < stage_sets.size();
                     job = next.fetch_add(1))
                    run_one(job);
            });
        for (std::thread& th : pool) th.join();
    }

    for (std::size_t job = 0; job < stage_sets.size(); ++job)
        if (!errors[job].empty())
            throw InvalidArgument("ablate: stage set " + labels[job] +
                                  " failed: " + errors[job]);

    std::ofstream csv(output);
    if (!csv) throw FormatError(output, 0, false, "cannot open for writing");
    csv << "stage_set,cd_x1000,emd_x100,iou\n";
    std::cout << "stage_set,cd_x1000,emd_x100,iou\n";
    for (std::size_t job = 0; job < stage_sets.size(); ++job) {
        std::ostringstream row;
        row << "\"" << labels[job] << "\"," << (*reports[job].cd * 1000.0) << ",";
        if (reports[job].emd) row << (*reports[job].emd * 100.0);
        row << ",";
        if (reports[job].iou) row << *reports[job].iou;
        csv << row.str() << "\n";
        std::cout << row.str() << "\n";
    }
    return 0;
}

int run_shape(const std::string& name, std::size_t points, std::uint64_t seed,
              const std::string& output, const std::string& format) {
    const PointCloud cloud = make_shape(name, points, seed);
    write_cloud(cloud, output,
                format.empty() ? CloudFormat::PlyBinaryLE : parse_format(format));
    std::cout << "shape: " << name << " with " << points << " points -> " << output
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cloud-sphere shape representation: fit a spherical template to a "
                 "point cloud through a cascade of per-stage offset fields"};
    app.require_subcommand(1);

    std::string input, output, config_path, format, mask_path;
    std::string rep_path, source_path, target_path, stages_text, shape_name;
    std::size_t points = 4096, smooth_rounds = 0;
    std::uint64_t shape_seed = 0;
    double radius = 1.0, t_blend = 1.0;
    MetricToggles toggles;
    FitSettings fit_settings, ablate_settings;
    bool ablate_no_emd = false;

    auto* cmd_template = app.add_subcommand("template", "emit the sphere template");
    cmd_template->add_option("--points", points, "template cardinality");
    cmd_template->add_option("--radius", radius, "sphere radius");
    cmd_template->add_option("--output", output, "output cloud path")->required();
    cmd_template->add_option("--format", format, "xyz | ply-ascii | ply-binary-le");

    auto* cmd_pre = app.add_subcommand(
        "preprocess", "normalize a cloud and emit all supervision pyramid levels");
    cmd_pre->add_option("--input", input, "target point cloud")->required();
    cmd_pre->add_option("--output", output, "output directory")->required();
    cmd_pre->add_option("--format", format, "input format override");
    std::string pre_config;
    const FitFlagRefs pre_refs = add_fit_flags(cmd_pre, fit_settings, pre_config);

    auto* cmd_fit = app.add_subcommand(
        "fit", "fit the offset cascade to a target; writes rep, reconstructions, "
               "history and config echo");
    cmd_fit->add_option("--input", input, "target point cloud")->required();
    cmd_fit->add_option("--output", output, "output directory")->required();
    cmd_fit->add_option("--format", format, "input format override");
    const FitFlagRefs fit_refs = add_fit_flags(cmd_fit, fit_settings, config_path);

    auto* cmd_eval = app.add_subcommand("eval", "metrics for a rep against a target");
    cmd_eval->add_option("--rep", rep_path, "fitted representation file")->required();
    cmd_eval->add_option("--input", input, "target point cloud")->required();
    cmd_eval->add_option("--output", output, "output directory")->required();
    cmd_eval->add_option("--format", format, "input format override");
    cmd_eval->add_option("--grid-res", toggles.grid_res, "IoU voxel resolution");
    cmd_eval->add_option("--spread-grid-res", toggles.spread_grid_res,
                         "spread grid resolution");
    cmd_eval->add_option("--emd-cap", toggles.emd_cap, "exact EMD size cap");
    cmd_eval->add_flag("--no-cd", [&](std::int64_t) { toggles.cd = false; });
    cmd_eval->add_flag("--no-emd", [&](std::int64_t) { toggles.emd = false; });
    cmd_eval->add_flag("--no-iou", [&](std::int64_t) { toggles.iou = false; });
    cmd_eval->add_flag("--no-spread", [&](std::int64_t) { toggles.spread = false; });
    cmd_eval->add_flag("--no-shift", [&](std::int64_t) { toggles.shift = false; });

    auto* cmd_corr = app.add_subcommand(
        "correspond", "color-coded template/reconstruction pairs per axis");
    cmd_corr->add_option("--rep", rep_path, "fitted representation file")->required();
    cmd_corr->add_option("--output", output, "output directory")->required();
    cmd_corr->add_option("--format", format, "output cloud format");

    auto* cmd_edit = app.add_subcommand(
        "edit", "blend masked offset fields from a donor rep into a source rep");
    cmd_edit->add_option("--source", source_path, "source rep")->required();
    cmd_edit->add_option("--target", target_path, "donor rep")->required();
    cmd_edit->add_option("--mask", mask_path, "mask file")->required();
    cmd_edit->add_option("--t", t_blend, "blend amount in [0,1]");
    cmd_edit->add_option("--stages", stages_text,
                         "stage indices to blend (default all)");
    cmd_edit->add_option("--smooth-rounds", smooth_rounds,
                         "mask smoothing rounds over the template graph");
    cmd_edit->add_option("--output", output, "blended cloud path")->required();
    cmd_edit->add_option("--format", format, "output cloud format");

    auto* cmd_ablate = app.add_subcommand(
        "ablate", "fit one target under the canonical stage sets and tabulate");
    cmd_ablate->add_option("--input", input, "target point cloud")->required();
    cmd_ablate->add_option("--output", output, "output csv path")->required();
    cmd_ablate->add_option("--format", format, "input format override");
    cmd_ablate->add_option("--grid-res", toggles.grid_res, "IoU voxel resolution");
    cmd_ablate->add_flag("--no-emd", ablate_no_emd, "skip the EMD column");
    std::string ablate_config;
    const FitFlagRefs ablate_refs = add_fit_flags(cmd_ablate, ablate_settings, ablate_config);

    auto* cmd_shape = app.add_subcommand("shape", "generate a synthetic test shape");
    cmd_shape->add_option("--name", shape_name,
                          "cube | torus | cylinder | lbracket | sphere")
        ->required();
    cmd_shape->add_option("--points", points, "sample count");
    cmd_shape->add_option("--seed", shape_seed, "sampling seed");
    cmd_shape->add_option("--output", output, "output cloud path")->required();
    cmd_shape->add_option("--format", format, "output cloud format");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (cmd_template->parsed()) return run_template(output, points, radius, format);
        if (cmd_pre->parsed()) {
            if (!pre_config.empty()) merge_config_file(fit_settings, pre_config, pre_refs);
            return run_preprocess(input, output, fit_settings, format);
        }
        if (cmd_fit->parsed()) {
            if (!config_path.empty())
                merge_config_file(fit_settings, config_path, fit_refs);
            return run_fit(input, output, fit_settings, format);
        }
        if (cmd_eval->parsed()) return run_eval(rep_path, input, output, toggles, format);
        if (cmd_corr->parsed()) return run_correspond(rep_path, output, format);
        if (cmd_edit->parsed())
            return run_edit(source_path, target_path, mask_path, t_blend, stages_text,
                            smooth_rounds, output, format);
        if (cmd_ablate->parsed()) {
            if (!ablate_config.empty())
                merge_config_file(ablate_settings, ablate_config, ablate_refs);
            return run_ablate(input, output, ablate_settings, ablate_no_emd,
                              toggles.grid_res, format);
        }
        if (cmd_shape->parsed())
            return run_shape(shape_name, points, shape_seed, output, format);
    } catch (const OptimizationFailure& e) {
        std::cerr << "optimization failure: " << e.what() << "\n";
        return kExitOptimization;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
