#include "cloudsphere/rep.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace cloudsphere {

static_assert(std::endian::native == std::endian::little,
              "rep serialization assumes a little-endian host");

namespace {
constexpr char kMagic[8] = {'C', 'L', 'O', 'U', 'D', 'S', 'P', 'H'};
constexpr std::uint32_t kVersion = 1;

std::size_t stream_offset(std::ifstream& in) {
    const auto pos = in.tellg();
    return pos < 0 ? 0 : static_cast<std::size_t>(pos);
}

void check_consistent(const CloudSphereRep& rep) {
    if (rep.stages.empty())
        throw InvalidArgument("rep: needs at least one offset field");
    for (const OffsetField& field : rep.stages)
        if (field.size() != rep.sphere.size())
            throw InvalidArgument("rep: offset field cardinality differs from template");
}

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& value, const std::string& path) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw FormatError(path, stream_offset(in), true, "truncated rep file");
}

void write_points(std::ofstream& out, const std::vector<Vec3>& pts) {
    for (const Vec3& p : pts) {
        write_raw(out, p.x());
        write_raw(out, p.y());
        write_raw(out, p.z());
    }
}

void read_points(std::ifstream& in, std::vector<Vec3>& pts, std::size_t n,
                 const std::string& path) {
    pts.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double xyz[3];
        in.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
        if (!in) throw FormatError(path, stream_offset(in), true, "truncated rep file");
        pts[i] = Vec3(xyz[0], xyz[1], xyz[2]);
    }
}
}  // namespace

CloudSphereRep CloudSphereRep::zero(SphereTemplate tmpl, std::size_t stage_count) {
    if (stage_count == 0)
        throw InvalidArgument("rep: stage count must be at least 1");
    CloudSphereRep rep;
    const std::size_t n = tmpl.size();
    rep.sphere = std::move(tmpl);
    rep.stages.assign(stage_count, OffsetField(n, Vec3::Zero()));
    return rep;
}

PointCloud reconstruct(const CloudSphereRep& rep, std::size_t down_to_stage) {
    check_consistent(rep);
    if (down_to_stage >= rep.stage_count())
        throw InvalidArgument("reconstruct: stage " + std::to_string(down_to_stage) +
                              " out of range");
    PointCloud out = rep.sphere.points;
    for (std::size_t k = rep.max_stage() + 1; k-- > down_to_stage;) {
        const OffsetField& field = rep.stages[k];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += field[i];
    }
    return out;
}

void save_rep(const CloudSphereRep& rep, const std::string& path) {
    check_consistent(rep);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path, 0, true, "cannot open for writing");

    out.write(kMagic, sizeof(kMagic));
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint64_t>(rep.cardinality()));
    write_raw(out, static_cast<std::uint32_t>(rep.max_stage()));
    write_raw(out, rep.sphere.radius);
    write_points(out, rep.sphere.points);
    for (std::size_t k = rep.max_stage() + 1; k-- > 0;)  // coarsest first
        write_points(out, rep.stages[k]);
    if (!out) throw FormatError(path, 0, true, "write failed");
}

CloudSphereRep load_rep(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path, 0, true, "cannot open");

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError(path, 0, true, "not a cloud-sphere rep file");

    std::uint32_t version = 0;
    read_raw(in, version, path);
    if (version != kVersion)
        throw FormatError(path, 8, true,
                          "unsupported version " + std::to_string(version));

    std::uint64_t n = 0;
    std::uint32_t max_stage = 0;
    double radius = 0.0;
    read_raw(in, n, path);
    read_raw(in, max_stage, path);
    read_raw(in, radius, path);
    if (n == 0 || radius <= 0.0)
        throw FormatError(path, 12, true, "invalid header values");

    CloudSphereRep rep;
    rep.sphere.radius = radius;
    read_points(in, rep.sphere.points, n, path);
    rep.stages.resize(max_stage + 1);
    for (std::size_t k = max_stage + 1; k-- > 0;)
        read_points(in, rep.stages[k], n, path);
    return rep;
}

}  // namespace cloudsphere
