#include "cloudsphere/fit.hpp"
#include "cloudsphere/metrics.hpp"
#include "cloudsphere/shapes.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace cloudsphere;

namespace {

FitConfig quick_config() {
    FitConfig cfg;
    cfg.centroid_counts = {64, 16};
    cfg.iterations_sequential = 60;
    cfg.iterations_joint = 60;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("fitting the template to itself stays at the optimum") {
    const SphereTemplate tmpl = generate_sphere_template(256, 1.0);
    FitConfig cfg;
    cfg.centroid_counts = {};
    cfg.iterations_sequential = 25;
    cfg.iterations_joint = 25;
    const FitResult result = fit(tmpl.points, cfg);
    CHECK(result.history.final_cd() < 1e-5);
    CHECK(shift(result.rep.sphere, reconstruct(result.rep, 0)) < 1e-3);
}

TEST_CASE("fit reduces chamfer on a cube and keeps phases monotone") {
    const auto [target, tf] = normalize_cloud(make_cube_shell(512, 5));
    const FitConfig cfg = quick_config();
    const FitResult result = fit(target, cfg);

    const double initial = result.history.initial_cd();
    const double final_cd = chamfer(reconstruct(result.rep, 0), target);
    CHECK(final_cd < 0.5 * initial);

    // each phase ends at or below its starting objective
    int phase = result.history.records.front().phase_stage;
    double phase_first = result.history.records.front().objective;
    double phase_last = phase_first;
    for (const IterationRecord& rec : result.history.records) {
        if (rec.phase_stage != phase) {
            CHECK(phase_last <= phase_first + 1e-12);
            phase = rec.phase_stage;
            phase_first = rec.objective;
        }
        phase_last = rec.objective;
    }
    CHECK(phase_last <= phase_first + 1e-12);

    // history covers sequential phases coarse to fine, then joint
    CHECK(result.history.records.front().phase_stage == 2);
    CHECK(result.history.records.back().phase_stage == IterationRecord::kJointPhase);
}

TEST_CASE("fit is deterministic for a fixed seed") {
    const auto [target, tf] = normalize_cloud(make_torus(256, 11));
    FitConfig cfg;
    cfg.centroid_counts = {16};
    cfg.iterations_sequential = 30;
    cfg.iterations_joint = 30;
    cfg.seed = 3;

    const FitResult a = fit(target, cfg);
    const FitResult b = fit(target, cfg);
    REQUIRE(a.rep.stage_count() == b.rep.stage_count());
    for (std::size_t k = 0; k < a.rep.stage_count(); ++k)
        for (std::size_t i = 0; i < a.rep.cardinality(); ++i)
            for (int axis = 0; axis < 3; ++axis)
                CHECK(a.rep.stages[k][i][axis] == b.rep.stages[k][i][axis]);

    // and the serialized files are byte-identical
    save_rep(a.rep, "fit_det_a.csr");
    save_rep(b.rep, "fit_det_b.csr");
    std::ifstream fa("fit_det_a.csr", std::ios::binary);
    std::ifstream fb("fit_det_b.csr", std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)),
                              std::istreambuf_iterator<char>());
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)),
                              std::istreambuf_iterator<char>());
    CHECK(bytes_a == bytes_b);
    std::remove("fit_det_a.csr");
    std::remove("fit_det_b.csr");
}

TEST_CASE("fit validates inputs and surfaces divergence") {
    PointCloud not_normalized = make_cube_shell(128, 2);  // max norm sqrt(3)
    CHECK_THROWS_AS(fit(not_normalized, quick_config()), InvalidArgument);

    FitConfig bad = quick_config();
    bad.centroid_counts = {16, 64};
    const auto [target, tf] = normalize_cloud(make_cube_shell(128, 2));
    CHECK_THROWS_AS(fit(target, bad), InvalidArgument);

    FitConfig exploding = quick_config();
    exploding.centroid_counts = {};
    exploding.step_size = 1e300;
    exploding.iterations_joint = 10;
    exploding.iterations_sequential = 10;
    try {
        fit(target, exploding);
        FAIL("expected OptimizationFailure");
    } catch (const OptimizationFailure& e) {
        CHECK(!e.history.records.empty());
    }
}

TEST_CASE("history csv lists one row per iterate") {
    const auto [target, tf] = normalize_cloud(make_cube_shell(128, 4));
    FitConfig cfg;
    cfg.centroid_counts = {16};
    cfg.iterations_sequential = 5;
    cfg.iterations_joint = 5;
    const FitResult result = fit(target, cfg);
    // 2 sequential phases? no: stages = K+1 = 2, so phases = 2 sequential + joint
    // each phase records iterations + 1 rows
    const std::size_t expected = 3 * (5 + 1);
    CHECK(result.history.records.size() == expected);

    result.history.write_csv("fit_history_test.csv");
    std::ifstream in("fit_history_test.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "phase,iteration,objective,total,cd_0,cd_1,reg_0,reg_1");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == expected);
    std::remove("fit_history_test.csv");
}
