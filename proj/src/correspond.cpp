#include "cloudsphere/correspond.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cloudsphere {

Correspondence correspondence(const CloudSphereRep& rep) {
    const PointCloud recon = reconstruct(rep, 0);
    Correspondence corr;
    corr.index_map.resize(rep.cardinality());
    corr.displacement.resize(rep.cardinality());
    for (std::size_t i = 0; i < rep.cardinality(); ++i) {
        corr.index_map[i] = i;
        corr.displacement[i] = recon[i] - rep.sphere.points[i];
    }
    return corr;
}

std::vector<double> color_ramp(const SphereTemplate& tmpl, Axis axis) {
    if (tmpl.size() == 0) throw InvalidArgument("color_ramp: empty template");
    const int a = static_cast<int>(axis);
    double lo = tmpl.points[0][a], hi = tmpl.points[0][a];
    for (const Vec3& p : tmpl.points) {
        lo = std::min(lo, p[a]);
        hi = std::max(hi, p[a]);
    }
    std::vector<double> ramp(tmpl.size());
    if (hi <= lo) {
        std::fill(ramp.begin(), ramp.end(), 0.5);
        return ramp;
    }
    for (std::size_t i = 0; i < tmpl.size(); ++i)
        ramp[i] = (tmpl.points[i][a] - lo) / (hi - lo);
    return ramp;
}

RgbColor rainbow_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    // blue -> cyan -> green -> yellow -> red
    const double r = std::clamp(1.5 - std::abs(4.0 * t - 3.0), 0.0, 1.0);
    const double g = std::clamp(1.5 - std::abs(4.0 * t - 2.0), 0.0, 1.0);
    const double b = std::clamp(1.5 - std::abs(4.0 * t - 1.0), 0.0, 1.0);
    auto byte = [](double v) {
        return static_cast<std::uint8_t>(std::lround(v * 255.0));
    };
    return RgbColor{byte(r), byte(g), byte(b)};
}

std::vector<RgbColor> color_code(const SphereTemplate& tmpl, Axis axis) {
    const std::vector<double> ramp = color_ramp(tmpl, axis);
    std::vector<RgbColor> colors(ramp.size());
    for (std::size_t i = 0; i < ramp.size(); ++i) colors[i] = rainbow_color(ramp[i]);
    return colors;
}

namespace {

void check_shared_template(const CloudSphereRep& a, const CloudSphereRep& b) {
    if (a.cardinality() != b.cardinality() || a.sphere.radius != b.sphere.radius)
        throw InvalidArgument("blend: representations use different templates");
    for (std::size_t i = 0; i < a.cardinality(); ++i)
        if (a.sphere.points[i] != b.sphere.points[i])
            throw InvalidArgument("blend: representations use different templates");
}

std::vector<std::size_t> all_stage_indices(const CloudSphereRep& rep) {
    std::vector<std::size_t> stages(rep.stage_count());
    for (std::size_t k = 0; k < stages.size(); ++k) stages[k] = k;
    return stages;
}

}  // namespace

PointCloud blend_offsets(const CloudSphereRep& source, const CloudSphereRep& target,
                         const RegionMask& mask, double t,
                         const std::vector<std::size_t>& stages) {
    check_shared_template(source, target);
    if (mask.size() != source.cardinality())
        throw InvalidArgument("blend: mask length differs from template");
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("blend: t must be in [0,1]");
    for (std::size_t k : stages)
        if (k >= source.stage_count() || k >= target.stage_count())
            throw InvalidArgument("blend: stage index out of range");

    CloudSphereRep blended = source;
    for (std::size_t k : stages) {
        OffsetField& field = blended.stages[k];
        const OffsetField& from = source.stages[k];
        const OffsetField& to = target.stages[k];
        for (std::size_t i = 0; i < field.size(); ++i) {
            const double tw = t * mask.weight(i);
            field[i] = (1.0 - tw) * from[i] + tw * to[i];
        }
    }
    return reconstruct(blended, 0);
}

PointCloud blend_offsets(const CloudSphereRep& source, const CloudSphereRep& target,
                         const RegionMask& mask, double t) {
    return blend_offsets(source, target, mask, t, all_stage_indices(source));
}

std::vector<PointCloud> co_edit(const std::vector<CloudSphereRep>& reps,
                                const CloudSphereRep& donor, const RegionMask& mask,
                                double t) {
    std::vector<PointCloud> out;
    out.reserve(reps.size());
    for (const CloudSphereRep& rep : reps)
        out.push_back(blend_offsets(rep, donor, mask, t));
    return out;
}

RegionMask smooth_mask(const RegionMask& mask, const RegGraph& graph,
                       std::size_t rounds) {
    if (mask.size() != graph.node_count())
        throw InvalidArgument("smooth_mask: mask length differs from graph");
    std::vector<double> w(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) w[i] = mask.weight(i);

    std::vector<double> next(w.size());
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            double acc = w[i];
            double denom = 1.0;
            for (std::uint32_t e = graph.offsets[i]; e < graph.offsets[i + 1]; ++e) {
                acc += graph.edges[e].weight * w[graph.edges[e].neighbor];
                denom += graph.edges[e].weight;
            }
            next[i] = acc / denom;
        }
        w.swap(next);
    }

    RegionMask out;
    out.selected.assign(mask.size(), 0);
    for (std::size_t i = 0; i < w.size(); ++i) out.selected[i] = w[i] > 0.5 ? 1 : 0;
    out.soft = std::move(w);
    return out;
}

RegionMask read_mask_file(const std::string& path, const SphereTemplate& tmpl,
                          const PointCloud& recon) {
    if (recon.size() != tmpl.size())
        throw InvalidArgument("read_mask_file: reconstruction differs from template");
    std::ifstream in(path);
    if (!in) throw FormatError(path, 0, false, "cannot open");

    RegionMask mask = RegionMask::none(tmpl.size());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream ss(line);
        std::string head;
        ss >> head;
        if (head == "box") {
            Box3 box;
            if (!(ss >> box.min.x() >> box.min.y() >> box.min.z() >> box.max.x() >>
                  box.max.y() >> box.max.z()))
                throw FormatError(path, line_no, false, "malformed box line");
            std::string space = "template";
            ss >> space;
            const PointCloud* ref = nullptr;
            if (space == "template")
                ref = &tmpl.points;
            else if (space == "recon")
                ref = &recon;
            else
                throw FormatError(path, line_no, false,
                                  "box space must be 'template' or 'recon'");
            for (std::size_t i = 0; i < ref->size(); ++i)
                if (box.contains((*ref)[i])) mask.selected[i] = 1;
        } else {
            std::size_t index = 0;
            try {
                std::size_t pos = 0;
                index = std::stoull(head, &pos);
                if (pos != head.size()) throw std::invalid_argument(head);
            } catch (const std::exception&) {
                throw FormatError(path, line_no, false,
                                  "expected a template index or a box line");
            }
            if (index >= tmpl.size())
                throw FormatError(path, line_no, false,
                                  "index " + std::to_string(index) + " out of range");
            mask.selected[index] = 1;
        }
    }
    return mask;
}

}  // namespace cloudsphere
