#include "cloudsphere/correspond.hpp"
#include "cloudsphere/metrics.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

using namespace cloudsphere;

namespace {

CloudSphereRep random_rep(std::size_t n, std::size_t stages, std::uint64_t seed) {
    CloudSphereRep rep = CloudSphereRep::zero(generate_sphere_template(n, 1.0), stages);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (OffsetField& field : rep.stages)
        for (Vec3& d : field) d = Vec3(u(rng), u(rng), u(rng));
    return rep;
}

}  // namespace

TEST_CASE("correspondence displacements recompose the reconstruction") {
    const CloudSphereRep zero = CloudSphereRep::zero(generate_sphere_template(32, 1.0), 2);
    for (const Vec3& d : correspondence(zero).displacement) CHECK(d.norm() == 0.0);

    CloudSphereRep uniform = zero;
    const Vec3 u(0.2, -0.1, 0.05);
    for (Vec3& d : uniform.stages[0]) d = u;
    for (const Vec3& d : correspondence(uniform).displacement)
        CHECK((d - u).norm() <= 1e-15);

    const CloudSphereRep rep = random_rep(64, 3, 5);
    const Correspondence corr = correspondence(rep);
    const PointCloud recon = reconstruct(rep, 0);
    for (std::size_t i = 0; i < rep.cardinality(); ++i) {
        CHECK(corr.index_map[i] == i);
        CHECK((rep.sphere.points[i] + corr.displacement[i] - recon[i]).norm() < 1e-12);
    }

    // shift from the correspondence equals the metric
    double mean = 0.0;
    for (const Vec3& d : corr.displacement) mean += d.norm();
    mean /= static_cast<double>(corr.displacement.size());
    CHECK(std::abs(mean - shift(rep.sphere, recon)) <= 1e-12);
}

TEST_CASE("color ramp endpoints and symmetry") {
    const SphereTemplate tmpl = generate_sphere_template(200, 1.0);
    const std::vector<double> ramp = color_ramp(tmpl, Axis::X);
    std::size_t arg_max = 0;
    for (std::size_t i = 1; i < tmpl.size(); ++i)
        if (tmpl.points[i].x() > tmpl.points[arg_max].x()) arg_max = i;
    CHECK(ramp[arg_max] == doctest::Approx(1.0));

    // a template mirrored in y gets mirror-symmetric ramp values
    SphereTemplate sym;
    sym.radius = 1.0;
    sym.points = {Vec3(0, -1, 0), Vec3(0, 1, 0), Vec3(0, -0.5, 0.5),
                  Vec3(0, 0.5, 0.5)};
    const std::vector<double> yr = color_ramp(sym, Axis::Y);
    CHECK(yr[0] + yr[1] == doctest::Approx(1.0));
    CHECK(yr[2] + yr[3] == doctest::Approx(1.0));

    // colors follow template indices, so any index-aligned cloud inherits them
    const auto colors = color_code(tmpl, Axis::Z);
    const auto again = color_code(tmpl, Axis::Z);
    REQUIRE(colors.size() == tmpl.size());
    for (std::size_t i = 0; i < colors.size(); ++i) {
        CHECK(colors[i].r == again[i].r);
        CHECK(colors[i].g == again[i].g);
        CHECK(colors[i].b == again[i].b);
    }
}

TEST_CASE("blend endpoints, locality and linearity") {
    const CloudSphereRep source = random_rep(96, 3, 11);
    CloudSphereRep target = random_rep(96, 3, 12);
    target.sphere = source.sphere;  // shared template

    const RegionMask full = RegionMask::all(source.cardinality());
    const PointCloud at0 = blend_offsets(source, target, full, 0.0);
    const PointCloud src = reconstruct(source, 0);
    for (std::size_t i = 0; i < src.size(); ++i)
        CHECK((at0[i] - src[i]).norm() <= 1e-12);

    const PointCloud at1 = blend_offsets(source, target, full, 1.0);
    const PointCloud tgt = reconstruct(target, 0);
    for (std::size_t i = 0; i < tgt.size(); ++i)
        CHECK((at1[i] - tgt[i]).norm() <= 1e-12);

    // half mask: unmasked points identical to the source reconstruction
    RegionMask half = RegionMask::none(source.cardinality());
    for (std::size_t i = 0; i < half.size(); i += 2) half.selected[i] = 1;
    const PointCloud mixed = blend_offsets(source, target, half, 1.0);
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        if (half.selected[i]) {
            CHECK((mixed[i] - tgt[i]).norm() <= 1e-12);
        } else {
            CHECK(mixed[i].x() == src[i].x());
            CHECK(mixed[i].y() == src[i].y());
            CHECK(mixed[i].z() == src[i].z());
        }
    }

    // affine in t
    const PointCloud mid = blend_offsets(source, target, full, 0.5);
    for (std::size_t i = 0; i < mid.size(); ++i)
        CHECK((mid[i] - 0.5 * (at0[i] + at1[i])).norm() <= 1e-12);

    // stage subset: only the chosen stage moves
    const PointCloud coarse_only = blend_offsets(source, target, full, 1.0, {2});
    CloudSphereRep expected = source;
    expected.stages[2] = target.stages[2];
    const PointCloud want = reconstruct(expected, 0);
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK((coarse_only[i] - want[i]).norm() <= 1e-12);

    CloudSphereRep other = random_rep(48, 3, 13);
    CHECK_THROWS_AS(blend_offsets(source, other, full, 0.5), InvalidArgument);
    CHECK_THROWS_AS(blend_offsets(source, target, full, 1.5), InvalidArgument);
    CHECK_THROWS_AS(blend_offsets(source, target, full, 1.0, {7}), InvalidArgument);
}

TEST_CASE("co-edit applies one donor across many shapes") {
    const CloudSphereRep donor = random_rep(64, 2, 21);
    std::vector<CloudSphereRep> reps;
    for (std::uint64_t s = 0; s < 3; ++s) {
        CloudSphereRep rep = random_rep(64, 2, 30 + s);
        rep.sphere = donor.sphere;
        reps.push_back(std::move(rep));
    }

    const RegionMask empty = RegionMask::none(64);
    const auto untouched = co_edit(reps, donor, empty, 1.0);
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const PointCloud own = reconstruct(reps[r], 0);
        for (std::size_t i = 0; i < own.size(); ++i)
            CHECK((untouched[r][i] - own[i]).norm() == 0.0);
    }

    // box mask over the donor arm region: masked points land on the donor
    RegionMask region = RegionMask::none(64);
    for (std::size_t i = 0; i < 64; ++i)
        if (donor.sphere.points[i].z() > 0.5) region.selected[i] = 1;
    const auto edited = co_edit(reps, donor, region, 1.0);
    const PointCloud donor_recon = reconstruct(donor, 0);
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const PointCloud own = reconstruct(reps[r], 0);
        for (std::size_t i = 0; i < 64; ++i) {
            if (region.selected[i])
                CHECK((edited[r][i] - donor_recon[i]).norm() <= 1e-12);
            else
                CHECK((edited[r][i] - own[i]).norm() == 0.0);
        }
    }

    // single-element sequence reduces to blend_offsets
    const auto single = co_edit({reps[0]}, donor, region, 0.7);
    const PointCloud direct = blend_offsets(reps[0], donor, region, 0.7);
    for (std::size_t i = 0; i < 64; ++i)
        CHECK((single[0][i] - direct[i]).norm() == 0.0);
}

TEST_CASE("mask smoothing keeps weights in range and softens seams") {
    const SphereTemplate tmpl = generate_sphere_template(128, 1.0);
    const RegGraph graph = RegGraph::build(tmpl, 6);
    RegionMask mask = RegionMask::none(128);
    for (std::size_t i = 0; i < 128; ++i)
        if (tmpl.points[i].x() > 0.0) mask.selected[i] = 1;

    const RegionMask smooth = smooth_mask(mask, graph, 2);
    REQUIRE(smooth.soft.has_value());
    bool has_fraction = false;
    for (std::size_t i = 0; i < 128; ++i) {
        const double w = smooth.weight(i);
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        if (w > 0.01 && w < 0.99) has_fraction = true;
    }
    CHECK(has_fraction);
}

TEST_CASE("mask files parse indices and boxes") {
    const SphereTemplate tmpl = generate_sphere_template(64, 1.0);
    const CloudSphereRep rep = random_rep(64, 2, 41);
    const PointCloud recon = reconstruct(rep, 0);

    {
        std::ofstream out("mask_test.txt");
        out << "# comment line\n";
        out << "3\n";
        out << "10\n";
        out << "box -2 -2 0.8 2 2 2 template\n";
        out << "box -5 -5 -5 5 5 5 recon\n";
    }
    const RegionMask mask = read_mask_file("mask_test.txt", tmpl, recon);
    CHECK(mask.selected[3] == 1);
    CHECK(mask.selected[10] == 1);
    for (std::size_t i = 0; i < 64; ++i) CHECK(mask.selected[i] == 1);  // recon box covers all

    {
        std::ofstream out("mask_test.txt");
        out << "box 0 0 0 1\n";
    }
    CHECK_THROWS_AS(read_mask_file("mask_test.txt", tmpl, recon), FormatError);
    {
        std::ofstream out("mask_test.txt");
        out << "999\n";
    }
    CHECK_THROWS_AS(read_mask_file("mask_test.txt", tmpl, recon), FormatError);
    {
        std::ofstream out("mask_test.txt");
        out << "box 0 0 0 1 1 1 nowhere\n";
    }
    CHECK_THROWS_AS(read_mask_file("mask_test.txt", tmpl, recon), FormatError);
    std::remove("mask_test.txt");
}
