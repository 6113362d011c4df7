#include "mobdyn/emit.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace mobdyn {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void require_samples(const Trajectory& traj) {
    if (traj.empty()) throw std::invalid_argument("emit: empty trajectory");
}

double chordal_to_infinity(const ExtPoint& z) {
    return chordal_dist(z, ExtPoint::infinity());
}

}  // namespace

std::string trajectory_json(const Trajectory& traj, const RunMeta& meta) {
    require_samples(traj);
    std::string out = "{\"meta\":{\"seed\":" + std::to_string(meta.seed) + ",\"model\":" +
                      nlohmann::json(meta.model).dump() + ",\"eps\":" + num(meta.eps) + ",\"R\":" + num(meta.radius) +
                      "},\"samples\":[";
    bool first = true;
    for (const TrajectorySample& s : traj.samples()) {
        if (!first) out += ',';
        first = false;
        const bool inf = s.z.is_infinite();
        out += "{\"t\":" + num(s.t) + ",\"re\":" + num(inf ? 0.0 : s.z.re()) + ",\"im\":" + num(inf ? 0.0 : s.z.im()) +
               ",\"infinite\":" + (inf ? "true" : "false") + "}";
    }
    out += "]}\n";
    return out;
}

ParsedTrajectory parse_trajectory_json(const std::string& text) {
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        const auto& m = j.at("meta");
        RunMeta meta{m.at("seed").get<std::uint64_t>(), m.at("model").get<std::string>(), m.at("eps").get<double>(),
                     m.at("R").get<double>()};
        std::vector<TrajectorySample> samples;
        for (const auto& s : j.at("samples")) {
            const double t = s.at("t").get<double>();
            samples.push_back({t, s.at("infinite").get<bool>() ? ExtPoint::infinity()
                                                               : ExtPoint(s.at("re").get<double>(), s.at("im").get<double>())});
        }
        return {std::move(meta), Trajectory(std::move(samples))};
    } catch (const nlohmann::json::exception& e) {
        throw EmitError(std::string("parse_trajectory_json: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw EmitError(std::string("parse_trajectory_json: ") + e.what());
    }
}

std::string trajectory_svg(const Trajectory& traj) {
    require_samples(traj);
    const double w = kSvgHalfWidth;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + num(-w) + " " + num(-w) + " " +
                      num(2 * w) + " " + num(2 * w) + "\" width=\"600\" height=\"600\">\n";
    out += "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"0.02\">\n";
    out += "<line class=\"gamma\" x1=\"" + num(-w) + "\" y1=\"0\" x2=\"" + num(w) + "\" y2=\"0\" stroke=\"#888\"/>\n";
    out += "<circle class=\"unit\" cx=\"0\" cy=\"0\" r=\"1\" stroke=\"#bbb\"/>\n";
    out += "<circle class=\"ref\" cx=\"0\" cy=\"0\" r=\"0.05\" fill=\"#000\"/>\n";
    out += "<circle class=\"ref\" cx=\"1\" cy=\"0\" r=\"0.05\" fill=\"#000\"/>\n";

    std::string points;
    const auto flush = [&] {
        if (!points.empty()) out += "<polyline class=\"path\" stroke=\"#c00\" points=\"" + points + "\"/>\n";
        points.clear();
    };
    bool clipped = false;
    for (const TrajectorySample& s : traj.samples()) {
        if (chordal_to_infinity(s.z) < kSvgInfinityClip) {
            flush();
            // One marker per excursion: direction of escape, pinned to the viewport edge.
            if (!clipped && s.z.is_finite()) {
                const cplx u = s.z.value() / std::abs(s.z.value());
                const double k = 0.95 * w / std::max(std::abs(u.real()), std::abs(u.imag()));
                out += "<circle class=\"infinity\" cx=\"" + num(k * u.real()) + "\" cy=\"" + num(k * u.imag()) +
                       "\" r=\"0.06\" stroke=\"#00c\"/>\n";
            }
            clipped = true;
            continue;
        }
        clipped = false;
        if (!points.empty()) points += ' ';
        points += num(s.z.re()) + "," + num(s.z.im());
    }
    flush();
    out += "</g>\n</svg>\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw EmitError("cannot open " + path + " for writing");
    f << text;
    f.flush();
    if (!f) throw EmitError("failed writing " + path);
}

}  // namespace mobdyn
