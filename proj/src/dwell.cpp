#include "mmfuse/dwell.hpp"

#include <cmath>
#include <limits>

#include "mmfuse/errors.hpp"

namespace mmfuse {

std::vector<DwellEvent> detect_dwell_intervals(std::span<const Vec3> trajectory, double frame_rate,
                                               const DwellParams& params) {
    if (!(frame_rate > 0)) throw InputError("dwell: frame rate must be positive");
    if (!(params.window_s > 0) || !(params.displacement_threshold_mm > 0))
        throw InputError("dwell: window and threshold must be positive");
    const auto steps = static_cast<std::size_t>(std::lround(params.window_s * frame_rate));
    if (steps == 0) throw InputError("dwell: window shorter than one frame");
    if (trajectory.size() < steps + 1)
        throw InputError("dwell: trajectory shorter than the window (" + std::to_string(trajectory.size()) +
                         " frames, need " + std::to_string(steps + 1) + ")");

    const double threshold_m = params.displacement_threshold_mm / 1000.0;
    std::vector<double> step_len(trajectory.size() - 1);
    for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
        step_len[i] = (trajectory[i + 1] - trajectory[i]).norm();
    }

    const std::size_t n_windows = trajectory.size() - steps;
    std::vector<bool> flagged(n_windows);
    for (std::size_t s = 0; s < n_windows; ++s) {
        // Summed directly per window so every window sees the same rounding.
        double path = 0;
        for (std::size_t i = s; i < s + steps; ++i) path += step_len[i];
        flagged[s] = path < threshold_m;
    }

    std::vector<DwellEvent> events;
    for (std::size_t s = 0; s < n_windows;) {
        if (!flagged[s]) {
            ++s;
            continue;
        }
        std::size_t last = s;
        while (last + 1 < n_windows && flagged[last + 1]) ++last;
        DwellEvent ev;
        ev.start_frame = s;
        ev.end_frame = last + steps;
        for (std::size_t f = ev.start_frame; f <= ev.end_frame; ++f) ev.centroid += trajectory[f];
        ev.centroid /= static_cast<double>(ev.end_frame - ev.start_frame + 1);
        events.push_back(std::move(ev));
        s = last + 1;
    }
    return events;
}

MatchReport match_targets(std::vector<DwellEvent> events, std::span<const Target> targets, double box_side) {
    if (targets.empty()) throw InputError("match_targets: no targets");
    if (!(box_side > 0)) throw InputError("match_targets: box side must be positive");
    const double half = box_side / 2.0;

    MatchReport report;
    for (auto& ev : events) {
        ev.matched_target.reset();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : targets) {
            const Vec3 d = ev.centroid - t.center;
            if (d.cwiseAbs().maxCoeff() <= half && d.norm() < best) {
                best = d.norm();
                ev.matched_target = t.id;
            }
        }
        if (ev.matched_target) ++report.matched;
    }
    report.hit_rate = events.empty() ? 0.0 : static_cast<double>(report.matched) / static_cast<double>(events.size());
    report.events = std::move(events);
    return report;
}

}  // namespace mmfuse
