#pragma once

#include "mobdyn/trajectory.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mobdyn {

struct RunMeta {
    std::uint64_t seed = 1;
    std::string model = "shear";
    double eps = 0.5;
    double radius = 4.0;
    friend bool operator==(const RunMeta&, const RunMeta&) = default;
};

class EmitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {"meta":{"seed","model","eps","R"},"samples":[{"t","re","im","infinite"}]}
// with every number at 17 significant digits, so parsing gives back the same
// doubles. Throws std::invalid_argument for an empty trajectory.
std::string trajectory_json(const Trajectory& traj, const RunMeta& meta);

struct ParsedTrajectory {
    RunMeta meta;
    Trajectory traj;
};

// Throws EmitError on malformed input or a schema mismatch.
ParsedTrajectory parse_trajectory_json(const std::string& text);

inline constexpr double kSvgHalfWidth = 4.0;
// Samples this close to infinity (chordally) break the polyline and leave a
// marker on the viewport edge.
inline constexpr double kSvgInfinityClip = 0.02;

// Polyline in the planar chart over the fixed viewport [-4, 4]^2 with the
// y-axis pointing up, plus the real axis, the unit circle and 0, 1 marked.
// Throws std::invalid_argument for an empty trajectory.
std::string trajectory_svg(const Trajectory& traj);

// Throws EmitError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mobdyn
