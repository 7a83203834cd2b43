#include "cloudsphere/losses.hpp"
#include "cloudsphere/metrics.hpp"
#include "cloudsphere/shapes.hpp"

#include <doctest.h>

#include <cstdio>
#include <random>

using namespace cloudsphere;

namespace {

CloudSphereRep random_rep(std::size_t n, std::size_t stages, std::uint64_t seed,
                          double magnitude = 0.2) {
    CloudSphereRep rep = CloudSphereRep::zero(generate_sphere_template(n, 1.0), stages);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-magnitude, magnitude);
    for (OffsetField& field : rep.stages)
        for (Vec3& d : field) d = Vec3(u(rng), u(rng), u(rng));
    return rep;
}

// Full double sum over ordered pairs, straight off the definition.
double reg_bruteforce(const SphereTemplate& tmpl, const OffsetField& field) {
    double sum = 0.0;
    for (std::size_t i = 0; i < tmpl.size(); ++i)
        for (std::size_t j = 0; j < tmpl.size(); ++j) {
            if (i == j) continue;
            const double w = std::exp(-(tmpl.points[i] - tmpl.points[j]).norm());
            sum += w * (field[i] - field[j]).norm();
        }
    return sum;
}

}  // namespace

TEST_CASE("reconstruct walks the offset cascade") {
    const SphereTemplate tmpl = generate_sphere_template(16, 1.0);

    CloudSphereRep zero = CloudSphereRep::zero(tmpl, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const PointCloud r = reconstruct(zero, k);
        for (std::size_t i = 0; i < tmpl.size(); ++i)
            CHECK((r[i] - tmpl.points[i]).norm() == 0.0);
    }

    CloudSphereRep single = CloudSphereRep::zero(tmpl, 1);
    for (Vec3& d : single.stages[0]) d = Vec3(0.5, 0, 0);
    const PointCloud moved = reconstruct(single, 0);
    for (std::size_t i = 0; i < tmpl.size(); ++i)
        CHECK((moved[i] - tmpl.points[i] - Vec3(0.5, 0, 0)).norm() <= 1e-15);

    // two stages on a 4-point template, by hand
    const SphereTemplate small = generate_sphere_template(4, 1.0);
    CloudSphereRep rep = CloudSphereRep::zero(small, 2);
    const Vec3 u(0.1, -0.2, 0.3), v(-0.4, 0.5, 0.6);
    for (Vec3& d : rep.stages[1]) d = u;
    for (Vec3& d : rep.stages[0]) d = v;
    const PointCloud r1 = reconstruct(rep, 1);
    const PointCloud r0 = reconstruct(rep, 0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK((r1[i] - (small.points[i] + u)).norm() <= 1e-15);
        CHECK((r0[i] - (small.points[i] + u + v)).norm() <= 1e-15);
    }

    CHECK_THROWS_AS(reconstruct(rep, 2), InvalidArgument);
}

TEST_CASE("residual decomposition identity") {
    const CloudSphereRep rep = random_rep(64, 4, 5);
    for (std::size_t k = 0; k + 1 < rep.stage_count(); ++k) {
        const PointCloud rk = reconstruct(rep, k);
        const PointCloud rk1 = reconstruct(rep, k + 1);
        for (std::size_t i = 0; i < rep.cardinality(); ++i)
            CHECK((rk[i] - rk1[i] - rep.stages[k][i]).norm() <= 1e-14);
    }
}

TEST_CASE("rep serialization round-trips bit-exactly") {
    const CloudSphereRep rep = random_rep(48, 3, 9);
    const std::string path = "test_rep_roundtrip.csr";
    save_rep(rep, path);
    const CloudSphereRep back = load_rep(path);

    REQUIRE(back.cardinality() == rep.cardinality());
    REQUIRE(back.stage_count() == rep.stage_count());
    CHECK(back.sphere.radius == rep.sphere.radius);
    for (std::size_t i = 0; i < rep.cardinality(); ++i)
        for (int a = 0; a < 3; ++a)
            CHECK(back.sphere.points[i][a] == rep.sphere.points[i][a]);
    for (std::size_t k = 0; k < rep.stage_count(); ++k)
        for (std::size_t i = 0; i < rep.cardinality(); ++i)
            for (int a = 0; a < 3; ++a)
                CHECK(back.stages[k][i][a] == rep.stages[k][i][a]);

    // corrupt the magic
    {
        std::FILE* f = std::fopen(path.c_str(), "r+b");
        REQUIRE(f);
        std::fputc('X', f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_rep(path), FormatError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_rep(path), FormatError);
}

TEST_CASE("reg graph weights and structure") {
    const SphereTemplate tmpl = generate_sphere_template(32, 1.0);
    const RegGraph graph = RegGraph::build(tmpl, 5);
    CHECK(graph.node_count() == 32);
    CHECK(graph.edges.size() == 32 * 5);
    for (const RegGraph::Edge& e : graph.edges) {
        CHECK(e.weight > 0.0);
        CHECK(e.weight <= 1.0);
    }
    CHECK_THROWS_AS(RegGraph::build(tmpl, 0), InvalidArgument);
    CHECK_THROWS_AS(RegGraph::build(tmpl, 32), InvalidArgument);
}

TEST_CASE("regularizer value cases") {
    // uniform field vanishes
    const SphereTemplate tmpl = generate_sphere_template(16, 1.0);
    CloudSphereRep rep = CloudSphereRep::zero(tmpl, 1);
    for (Vec3& d : rep.stages[0]) d = Vec3(0.7, -0.1, 0.4);
    const RegGraph full = RegGraph::build(tmpl, tmpl.size() - 1);
    CHECK(loss_reg_stage(rep, full, 0) == 0.0);

    // two points at distance 1: both directed pairs contribute e^{-1}
    SphereTemplate pair;
    pair.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    pair.radius = 1.0;
    CloudSphereRep rep2;
    rep2.sphere = pair;
    rep2.stages = {OffsetField{Vec3(0, 0, 0), Vec3(1, 0, 0)}};
    const RegGraph g2 = RegGraph::build(pair, 1);
    CHECK(loss_reg_stage(rep2, g2, 0) ==
          doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));

    // full graph equals the brute-force ordered double sum
    const SphereTemplate six = generate_sphere_template(6, 1.0);
    const CloudSphereRep rep6 = random_rep(6, 1, 21);
    const RegGraph g6 = RegGraph::build(six, 5);
    CHECK(loss_reg_stage(rep6, g6, 0) ==
          doctest::Approx(reg_bruteforce(six, rep6.stages[0])).epsilon(1e-12));
}

TEST_CASE("regularizer is invariant to uniform translation of a stage") {
    CloudSphereRep rep = random_rep(40, 2, 31);
    const RegGraph graph = RegGraph::build(rep.sphere, 8);
    const double before = loss_reg_stage(rep, graph, 1);
    for (Vec3& d : rep.stages[1]) d += Vec3(12.3, -4.5, 0.06);
    const double after = loss_reg_stage(rep, graph, 1);
    CHECK(std::abs(before - after) <= 1e-12 * std::max(1.0, before));
}

TEST_CASE("stage chamfer loss agrees with the metrics module") {
    const auto [target, tf] = normalize_cloud(make_cube_shell(256, 3));
    const AbstractionPyramid pyr = build_pyramid(target, {64, 16}, 0.25, 7);
    const CloudSphereRep rep = CloudSphereRep::zero(generate_sphere_template(256, 1.0),
                                                    pyr.stage_count());

    for (std::size_t k = 0; k < pyr.stage_count(); ++k) {
        const double direct = chamfer(reconstruct(rep, k), pyr.levels[k]);
        CHECK(loss_cd_stage(rep, pyr, k) == doctest::Approx(direct).epsilon(1e-12));
    }

    // exact morph: offsets carry the template onto the level point-for-point
    CloudSphereRep morph = rep;
    for (std::size_t i = 0; i < morph.cardinality(); ++i)
        morph.stages[1][i] = pyr.levels[1][i] - morph.sphere.points[i];
    CHECK(loss_cd_stage(morph, pyr, 1) <= 1e-24);
}

TEST_CASE("total loss composition and zero-offset identity") {
    const auto [target, tf] = normalize_cloud(make_torus(512, 8));
    const AbstractionPyramid pyr = build_pyramid(target, {128, 16}, 0.25, 3);
    const SphereTemplate tmpl = generate_sphere_template(512, 1.0);
    const RegGraph graph = RegGraph::build(tmpl, 8);
    const CloudSphereRep zero = CloudSphereRep::zero(tmpl, pyr.stage_count());

    const LossWeights defaults = LossWeights::defaults(5);
    CHECK(defaults.alpha == std::vector<double>{0.5, 0.2, 0.2, 0.2, 0.2});
    CHECK(defaults.beta == std::vector<double>{0.0, 0.0, 0.0, 1.0, 10.0});

    LossWeights weights = LossWeights::defaults(pyr.stage_count());
    double expected = 0.0;
    for (std::size_t k = 0; k < pyr.stage_count(); ++k)
        expected += weights.alpha[k] * chamfer(tmpl.points, pyr.levels[k]);
    CHECK(total_loss(zero, pyr, weights, graph) ==
          doctest::Approx(expected).epsilon(1e-12));

    LossWeights off;
    off.alpha.assign(pyr.stage_count(), 0.0);
    off.beta.assign(pyr.stage_count(), 0.0);
    CHECK(total_loss(zero, pyr, off, graph) == 0.0);

    // single-stage reduction
    const AbstractionPyramid flat = build_pyramid(target, {}, 0.25, 3);
    LossWeights single;
    single.alpha = {1.0};
    single.beta = {0.0};
    const CloudSphereRep zero1 = CloudSphereRep::zero(tmpl, 1);
    CHECK(total_loss(zero1, flat, single, graph) ==
          doctest::Approx(loss_cd_stage(zero1, flat, 0)).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at the global minimum") {
    // target is the template itself, no abstraction levels, zero offsets
    const SphereTemplate tmpl = generate_sphere_template(128, 1.0);
    AbstractionPyramid pyr;
    pyr.levels = {tmpl.points};
    pyr.centroid_counts = {tmpl.size()};
    pyr.sigma_per_level = {0.0};
    LossWeights w;
    w.alpha = {0.5};
    w.beta = {1.0};
    const RegGraph graph = RegGraph::build(tmpl, 8);
    const CloudSphereRep zero = CloudSphereRep::zero(tmpl, 1);
    const auto grad = grad_total_loss(zero, pyr, w, graph);
    for (const OffsetField& field : grad)
        for (const Vec3& g : field) CHECK(g.lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("uniform offset field has zero regularizer gradient") {
    const SphereTemplate tmpl = generate_sphere_template(48, 1.0);
    AbstractionPyramid pyr;
    pyr.levels = {tmpl.points};
    pyr.centroid_counts = {tmpl.size()};
    pyr.sigma_per_level = {0.0};
    LossWeights w;
    w.alpha = {0.0};
    w.beta = {2.5};
    const RegGraph graph = RegGraph::build(tmpl, 6);
    CloudSphereRep rep = CloudSphereRep::zero(tmpl, 1);
    for (Vec3& d : rep.stages[0]) d = Vec3(0.3, 0.3, -0.2);
    const auto grad = grad_total_loss(rep, pyr, w, graph);
    for (const Vec3& g : grad[0]) CHECK(g.norm() == 0.0);
}

TEST_CASE("analytic gradient matches central finite differences") {
    const std::size_t n = 32;
    const auto [target, tf] = normalize_cloud(make_cube_shell(n, 17));
    const AbstractionPyramid pyr = build_pyramid(target, {16, 8}, 0.25, 4);
    const SphereTemplate tmpl = generate_sphere_template(n, 1.0);
    const RegGraph graph = RegGraph::build(tmpl, 4);
    const LossWeights w = LossWeights::defaults(pyr.stage_count());
    const MultiStageLoss loss(pyr, w, graph);

    CloudSphereRep rep = random_rep(n, pyr.stage_count(), 23, 0.15);
    rep.sphere = tmpl;

    std::vector<OffsetField> grad;
    loss.evaluate_joint(rep, grad);

    const double h = 1e-5;
    std::size_t checked = 0, passed = 0;
    for (std::size_t k = 0; k < rep.stage_count(); ++k) {
        for (std::size_t i = 0; i < n; i += 3) {  // sample coordinates
            for (int a = 0; a < 3; ++a) {
                CloudSphereRep plus = rep, minus = rep;
                plus.stages[k][i][a] += h;
                minus.stages[k][i][a] -= h;
                const double fd =
                    (loss.evaluate(plus).total - loss.evaluate(minus).total) /
                    (2.0 * h);
                const double an = grad[k][i][a];
                ++checked;
                if (std::abs(an - fd) <= 1e-4 * std::max({std::abs(an), std::abs(fd), 1e-6}))
                    ++passed;
            }
        }
    }
    // a handful of coordinates may sit near assignment ties
    CHECK(passed >= checked * 99 / 100);
}
