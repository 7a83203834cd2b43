#pragma once

#include "cloudsphere/types.hpp"

#include <string>

namespace cloudsphere {

enum class CloudFormat { Xyz, PlyAscii, PlyBinaryLE };

// Reads a point cloud. Xyz expects three coordinates per line (extra columns
// ignored); PLY needs float or double x,y,z vertex properties and skips all
// other properties and elements. Throws FormatError with a line or byte
// position on parse failure, DegenerateInput when the file holds no points.
PointCloud read_cloud(const std::string& path, CloudFormat format);

// Sniffs the format: PLY magic decides between the PLY variants, anything
// else is read as xyz.
PointCloud read_cloud(const std::string& path);

// Writes a point cloud; coordinates are 64-bit so binary round-trips are
// exact. Optional per-vertex colors are emitted as uchar red/green/blue in
// the PLY formats and are rejected for xyz.
void write_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format,
                 const std::vector<RgbColor>* colors = nullptr);

const char* format_name(CloudFormat format);
CloudFormat parse_format(const std::string& name);  // "xyz" | "ply-ascii" | "ply-binary-le"

}  // namespace cloudsphere
