#include "cloudsphere/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cloudsphere {

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path, 0, false, "cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::size_t ply_type_size(const std::string& type, const std::string& path,
                          std::size_t line_no) {
    if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
    if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
    if (type == "int" || type == "int32" || type == "uint" || type == "uint32" ||
        type == "float" || type == "float32")
        return 4;
    if (type == "double" || type == "float64") return 8;
    throw FormatError(path, line_no, false, "unknown property type '" + type + "'");
}

struct PlyProperty {
    std::string name;
    std::string type;
    bool is_list = false;
    std::string count_type;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

struct PlyHeader {
    bool binary = false;
    std::vector<PlyElement> elements;
    std::size_t body_offset = 0;  // bytes
    std::size_t body_line = 0;    // first body line, 1-based
};

PlyHeader parse_ply_header(const std::string& data, const std::string& path) {
    PlyHeader header;
    std::size_t pos = 0;
    std::size_t line_no = 0;

    auto next_line = [&]() -> std::string {
        if (pos >= data.size())
            throw FormatError(path, line_no, false, "unexpected end of header");
        const std::size_t nl = data.find('\n', pos);
        std::string line = data.substr(pos, nl == std::string::npos ? std::string::npos
                                                                    : nl - pos);
        pos = nl == std::string::npos ? data.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    if (next_line() != "ply") throw FormatError(path, 1, false, "missing 'ply' magic");

    bool format_seen = false;
    bool done = false;
    while (!done) {
        const std::string line = next_line();
        std::istringstream ss(line);
        std::string keyword;
        ss >> keyword;
        if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) {
            continue;
        } else if (keyword == "format") {
            std::string kind, version;
            ss >> kind >> version;
            if (kind == "ascii")
                header.binary = false;
            else if (kind == "binary_little_endian")
                header.binary = true;
            else
                throw FormatError(path, line_no, false,
                                  "unsupported PLY format '" + kind + "'");
            format_seen = true;
        } else if (keyword == "element") {
            PlyElement elem;
            if (!(ss >> elem.name >> elem.count))
                throw FormatError(path, line_no, false, "malformed element line");
            header.elements.push_back(std::move(elem));
        } else if (keyword == "property") {
            if (header.elements.empty())
                throw FormatError(path, line_no, false, "property before any element");
            PlyProperty prop;
            std::string first;
            ss >> first;
            if (first == "list") {
                prop.is_list = true;
                if (!(ss >> prop.count_type >> prop.type >> prop.name))
                    throw FormatError(path, line_no, false, "malformed list property");
                ply_type_size(prop.count_type, path, line_no);
            } else {
                prop.type = first;
                if (!(ss >> prop.name))
                    throw FormatError(path, line_no, false, "malformed property line");
            }
            ply_type_size(prop.type, path, line_no);
            header.elements.back().properties.push_back(std::move(prop));
        } else if (keyword == "end_header") {
            done = true;
        } else {
            throw FormatError(path, line_no, false,
                              "unexpected header keyword '" + keyword + "'");
        }
    }
    if (!format_seen) throw FormatError(path, line_no, false, "missing format line");
    header.body_offset = pos;
    header.body_line = line_no + 1;
    return header;
}

double parse_scalar(const char* ptr, const std::string& type) {
    if (type == "float" || type == "float32") {
        float v;
        std::memcpy(&v, ptr, sizeof(v));
        return static_cast<double>(v);
    }
    double v;
    std::memcpy(&v, ptr, sizeof(v));
    return v;
}

std::uint64_t parse_count(const char* ptr, const std::string& type) {
    std::uint64_t v = 0;
    const std::size_t size = (type == "char" || type == "int8" || type == "uchar" ||
                              type == "uint8")
                                 ? 1
                             : (type == "short" || type == "int16" ||
                                type == "ushort" || type == "uint16")
                                 ? 2
                                 : 4;
    std::memcpy(&v, ptr, size);
    return v;
}

PointCloud read_ply(const std::string& data, const std::string& path, bool expect_binary) {
    const PlyHeader header = parse_ply_header(data, path);
    if (header.binary != expect_binary)
        throw FormatError(path, 0, false,
                          std::string("expected ") +
                              (expect_binary ? "binary" : "ascii") +
                              " PLY but the header says otherwise");

    PointCloud cloud;
    std::size_t pos = header.body_offset;
    std::size_t line_no = header.body_line;

    for (const PlyElement& elem : header.elements) {
        const bool is_vertex = elem.name == "vertex";
        int xyz_col[3] = {-1, -1, -1};
        if (is_vertex) {
            for (std::size_t c = 0; c < elem.properties.size(); ++c) {
                const PlyProperty& prop = elem.properties[c];
                const bool is_float = prop.type == "float" || prop.type == "float32" ||
                                      prop.type == "double" || prop.type == "float64";
                if (prop.name == "x" && is_float && !prop.is_list) xyz_col[0] = static_cast<int>(c);
                if (prop.name == "y" && is_float && !prop.is_list) xyz_col[1] = static_cast<int>(c);
                if (prop.name == "z" && is_float && !prop.is_list) xyz_col[2] = static_cast<int>(c);
            }
            if (xyz_col[0] < 0 || xyz_col[1] < 0 || xyz_col[2] < 0)
                throw FormatError(path, header.body_line - 1, false,
                                  "vertex element lacks float x/y/z properties");
            cloud.reserve(elem.count);
        }

        if (!header.binary) {
            for (std::size_t r = 0; r < elem.count; ++r) {
                if (pos >= data.size())
                    throw FormatError(path, line_no, false, "unexpected end of file");
                const std::size_t nl = data.find('\n', pos);
                std::string line = data.substr(
                    pos, nl == std::string::npos ? std::string::npos : nl - pos);
                pos = nl == std::string::npos ? data.size() : nl + 1;
                if (!is_vertex) {
                    ++line_no;
                    continue;
                }
                std::istringstream ss(line);
                Vec3 p;
                double value;
                int filled = 0;
                for (std::size_t c = 0; c < elem.properties.size() && filled < 3; ++c) {
                    if (elem.properties[c].is_list) break;  // lists end fixed columns
                    if (!(ss >> value))
                        throw FormatError(path, line_no, false, "malformed vertex line");
                    for (int a = 0; a < 3; ++a)
                        if (static_cast<int>(c) == xyz_col[a]) {
                            p[a] = value;
                            ++filled;
                        }
                }
                if (filled != 3)
                    throw FormatError(path, line_no, false, "vertex line lacks x/y/z");
                cloud.push_back(p);
                ++line_no;
            }
        } else {
            for (std::size_t r = 0; r < elem.count; ++r) {
                Vec3 p = Vec3::Zero();
                for (std::size_t c = 0; c < elem.properties.size(); ++c) {
                    const PlyProperty& prop = elem.properties[c];
                    if (prop.is_list) {
                        const std::size_t csize = ply_type_size(prop.count_type, path, 0);
                        if (pos + csize > data.size())
                            throw FormatError(path, pos, true, "truncated list count");
                        const std::uint64_t count =
                            parse_count(data.data() + pos, prop.count_type);
                        pos += csize;
                        const std::size_t isize = ply_type_size(prop.type, path, 0);
                        if (pos + count * isize > data.size())
                            throw FormatError(path, pos, true, "truncated list body");
                        pos += count * isize;
                        continue;
                    }
                    const std::size_t size = ply_type_size(prop.type, path, 0);
                    if (pos + size > data.size())
                        throw FormatError(path, pos, true, "truncated element body");
                    if (is_vertex)
                        for (int a = 0; a < 3; ++a)
                            if (static_cast<int>(c) == xyz_col[a])
                                p[a] = parse_scalar(data.data() + pos, prop.type);
                    pos += size;
                }
                if (is_vertex) cloud.push_back(p);
            }
        }
    }

    if (cloud.empty()) throw DegenerateInput(path + ": PLY holds no vertices");
    return cloud;
}

PointCloud read_xyz(const std::string& data, const std::string& path) {
    PointCloud cloud;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < data.size()) {
        const std::size_t nl = data.find('\n', pos);
        std::string line =
            data.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? data.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ss(line);
        Vec3 p;
        if (!(ss >> p.x() >> p.y() >> p.z()))
            throw FormatError(path, line_no, false, "expected three coordinates");
        cloud.push_back(p);
    }
    if (cloud.empty()) throw DegenerateInput(path + ": no points");
    return cloud;
}

}  // namespace

PointCloud read_cloud(const std::string& path, CloudFormat format) {
    const std::string data = slurp(path);
    switch (format) {
        case CloudFormat::Xyz: return read_xyz(data, path);
        case CloudFormat::PlyAscii: return read_ply(data, path, false);
        case CloudFormat::PlyBinaryLE: return read_ply(data, path, true);
    }
    throw InvalidArgument("read_cloud: bad format enum");
}

PointCloud read_cloud(const std::string& path) {
    const std::string data = slurp(path);
    if (data.rfind("ply", 0) == 0) {
        const PlyHeader header = parse_ply_header(data, path);
        return read_ply(data, path, header.binary);
    }
    return read_xyz(data, path);
}

void write_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format,
                 const std::vector<RgbColor>* colors) {
    if (cloud.empty()) throw InvalidArgument("write_cloud: empty cloud");
    if (colors && colors->size() != cloud.size())
        throw InvalidArgument("write_cloud: color count differs from vertex count");
    if (colors && format == CloudFormat::Xyz)
        throw InvalidArgument("write_cloud: xyz format cannot carry colors");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path, 0, false, "cannot open for writing");

    char buf[96];
    if (format == CloudFormat::Xyz) {
        for (const Vec3& p : cloud) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
            out << buf;
        }
    } else {
        out << "ply\nformat "
            << (format == CloudFormat::PlyAscii ? "ascii" : "binary_little_endian")
            << " 1.0\n";
        out << "element vertex " << cloud.size() << "\n";
        out << "property double x\nproperty double y\nproperty double z\n";
        if (colors)
            out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
        out << "end_header\n";

        if (format == CloudFormat::PlyAscii) {
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const Vec3& p = cloud[i];
                std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", p.x(), p.y(),
                              p.z());
                out << buf;
                if (colors)
                    out << ' ' << static_cast<int>((*colors)[i].r) << ' '
                        << static_cast<int>((*colors)[i].g) << ' '
                        << static_cast<int>((*colors)[i].b);
                out << "\n";
            }
        } else {
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const double xyz[3] = {cloud[i].x(), cloud[i].y(), cloud[i].z()};
                out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
                if (colors) {
                    const std::uint8_t rgb[3] = {(*colors)[i].r, (*colors)[i].g,
                                                 (*colors)[i].b};
                    out.write(reinterpret_cast<const char*>(rgb), sizeof(rgb));
                }
            }
        }
    }
    if (!out) throw FormatError(path, 0, false, "write failed");
}

const char* format_name(CloudFormat format) {
    switch (format) {
        case CloudFormat::Xyz: return "xyz";
        case CloudFormat::PlyAscii: return "ply-ascii";
        case CloudFormat::PlyBinaryLE: return "ply-binary-le";
    }
    return "?";
}

CloudFormat parse_format(const std::string& name) {
    if (name == "xyz") return CloudFormat::Xyz;
    if (name == "ply-ascii") return CloudFormat::PlyAscii;
    if (name == "ply-binary-le" || name == "ply") return CloudFormat::PlyBinaryLE;
    throw InvalidArgument("unknown cloud format '" + name +
                          "' (expected xyz, ply-ascii or ply-binary-le)");
}

}  // namespace cloudsphere
