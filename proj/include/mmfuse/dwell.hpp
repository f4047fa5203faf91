#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmfuse/core_types.hpp"

namespace mmfuse {

/// Hand-object dwell detection parameters (wrist path length per window).
struct DwellParams {
    double window_s = 1.0;
    double displacement_threshold_mm = 100.0;
};

/// Frames [start_frame, end_frame] during which every window had a path
/// length below the threshold.
struct DwellEvent {
    std::size_t start_frame = 0;
    std::size_t end_frame = 0;
    Vec3 centroid = Vec3::Zero();
    std::optional<std::string> matched_target;
};

/// A window spans W = round(window_s * frame_rate) inter-frame steps
/// (W + 1 frames) and slides with stride 1. Its path displacement is the
/// sum of the W step lengths. Runs of consecutive flagged windows merge
/// into one event; the centroid is the mean position over the event.
std::vector<DwellEvent> detect_dwell_intervals(std::span<const Vec3> trajectory, double frame_rate,
                                               const DwellParams& params = {});

struct Target {
    std::string id;
    Vec3 center = Vec3::Zero();
};

struct MatchReport {
    std::vector<DwellEvent> events;  // with matched_target filled in
    std::size_t matched = 0;
    double hit_rate = 0.0;  // matched / events; 0 when there are no events
};

/// An event matches a target when its centroid lies inside the axis-aligned
/// cube of side box_side centred on the target (boundary inclusive). With
/// several candidate boxes the nearest centre wins.
MatchReport match_targets(std::vector<DwellEvent> events, std::span<const Target> targets,
                          double box_side = 0.2);

}  // namespace mmfuse
