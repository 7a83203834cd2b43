#include "cloudsphere/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

using namespace cloudsphere;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) cloud.emplace_back(u(rng), u(rng), u(rng));
    return cloud;
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("xyz reading") {
    TempFile f("io_test.xyz");
    {
        std::ofstream out(f.path);
        out << "0 0 0\n1 0 0\n";
    }
    const PointCloud cloud = read_cloud(f.path, CloudFormat::Xyz);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud[1].x() == 1.0);

    {
        std::ofstream out(f.path);
        out << "0 0\n";
    }
    CHECK_THROWS_AS(read_cloud(f.path, CloudFormat::Xyz), FormatError);
    {
        std::ofstream out(f.path);
        out << "\n\n";
    }
    CHECK_THROWS_AS(read_cloud(f.path, CloudFormat::Xyz), DegenerateInput);
}

TEST_CASE("ascii ply with extra properties and foreign elements") {
    TempFile f("io_test.ply");
    {
        std::ofstream out(f.path);
        out << "ply\nformat ascii 1.0\ncomment made elsewhere\n"
            << "element vertex 3\n"
            << "property float x\nproperty float y\nproperty float z\n"
            << "property float nx\nproperty float ny\nproperty float nz\n"
            << "element face 1\nproperty list uchar int vertex_indices\n"
            << "end_header\n"
            << "0 0 0 1 0 0\n"
            << "1 0 0 1 0 0\n"
            << "0 1 0 1 0 0\n"
            << "3 0 1 2\n";
    }
    const PointCloud cloud = read_cloud(f.path, CloudFormat::PlyAscii);
    REQUIRE(cloud.size() == 3);
    CHECK(cloud[2].y() == 1.0);

    // format sniffing picks the PLY path
    const PointCloud sniffed = read_cloud(f.path);
    CHECK(sniffed.size() == 3);

    // declared binary when it is ascii
    CHECK_THROWS_AS(read_cloud(f.path, CloudFormat::PlyBinaryLE), FormatError);
}

TEST_CASE("round trips preserve coordinates") {
    const PointCloud cloud = random_cloud(4096, 5);

    for (CloudFormat format :
         {CloudFormat::Xyz, CloudFormat::PlyAscii, CloudFormat::PlyBinaryLE}) {
        TempFile f(std::string("io_roundtrip.") + format_name(format));
        write_cloud(cloud, f.path, format);
        const PointCloud back = read_cloud(f.path, format);
        REQUIRE(back.size() == cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i)
            CHECK((back[i] - cloud[i]).norm() <= 1e-12);
    }

    // binary is bit-exact
    TempFile f("io_roundtrip_exact.ply");
    write_cloud(cloud, f.path, CloudFormat::PlyBinaryLE);
    const PointCloud back = read_cloud(f.path);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(back[i].x() == cloud[i].x());
        CHECK(back[i].y() == cloud[i].y());
        CHECK(back[i].z() == cloud[i].z());
    }
}

TEST_CASE("colored output carries one color per vertex") {
    const PointCloud cloud = random_cloud(16, 9);
    std::vector<RgbColor> colors(cloud.size(), RgbColor{200, 10, 30});

    for (CloudFormat format : {CloudFormat::PlyAscii, CloudFormat::PlyBinaryLE}) {
        TempFile f("io_colors.ply");
        write_cloud(cloud, f.path, format, &colors);
        // color properties are declared exactly once per vertex
        std::ifstream in(f.path, std::ios::binary);
        std::string header, line;
        while (std::getline(in, line) && line != "end_header") header += line + "\n";
        CHECK(header.find("property uchar red") != std::string::npos);
        // coordinates still read back
        const PointCloud back = read_cloud(f.path, format);
        REQUIRE(back.size() == cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i)
            CHECK((back[i] - cloud[i]).norm() <= 1e-12);
    }

    std::vector<RgbColor> short_colors(cloud.size() - 1);
    CHECK_THROWS_AS(write_cloud(cloud, "io_colors.ply", CloudFormat::PlyAscii,
                                &short_colors),
                    InvalidArgument);
    CHECK_THROWS_AS(write_cloud(cloud, "io_colors.xyz", CloudFormat::Xyz, &colors),
                    InvalidArgument);
    std::remove("io_colors.ply");
}

TEST_CASE("binary ply with list elements and truncation errors") {
    const PointCloud cloud = random_cloud(5, 2);
    TempFile f("io_binary.ply");
    {
        std::ofstream out(f.path, std::ios::binary);
        out << "ply\nformat binary_little_endian 1.0\n"
            << "element vertex " << cloud.size() << "\n"
            << "property double x\nproperty double y\nproperty double z\n"
            << "element face 2\nproperty list uchar uint vertex_indices\n"
            << "end_header\n";
        for (const Vec3& p : cloud) {
            const double xyz[3] = {p.x(), p.y(), p.z()};
            out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
        }
        for (int face = 0; face < 2; ++face) {
            const std::uint8_t count = 3;
            const std::uint32_t idx[3] = {0, 1, 2};
            out.write(reinterpret_cast<const char*>(&count), 1);
            out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
        }
    }
    const PointCloud back = read_cloud(f.path);
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK(back[i].x() == cloud[i].x());

    // chop the body
    {
        std::ifstream in(f.path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 30));
    }
    CHECK_THROWS_AS(read_cloud(f.path), FormatError);
}

TEST_CASE("format names round-trip") {
    for (CloudFormat format :
         {CloudFormat::Xyz, CloudFormat::PlyAscii, CloudFormat::PlyBinaryLE})
        CHECK(parse_format(format_name(format)) == format);
    CHECK_THROWS_AS(parse_format("obj"), InvalidArgument);
}
