#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmfuse/core_types.hpp"

namespace mmfuse {

/// Point reflector in the world frame. Amplitude is the linear echo
/// amplitude at the receiver (no path loss is applied).
struct Scatterer {
    Vec3 position = Vec3::Zero();
    double amplitude = 1.0;
    Vec3 velocity = Vec3::Zero();
};

/// Snapshot of the world for one frame.
struct Scene {
    std::vector<Scatterer> scatterers;
    double noise_std = 0.0;  // E|n|^2 = noise_std^2 per complex sample
    std::uint64_t seed = 0;

    void validate() const;
};

/// Raised when a scatterer falls outside the unambiguous range/velocity
/// interval. The echo is still generated, so aliasing is reproducible.
struct SimWarning {
    std::size_t scatterer = 0;
    std::string message;
};

/// One frame of complex I-Q samples indexed [chirp loop][tx slot][rx][sample].
class RawFrame {
public:
    RawFrame() = default;
    explicit RawFrame(const RadarConfig& config);

    int num_loops() const { return loops_; }
    int num_tx() const { return tx_; }
    int num_rx() const { return rx_; }
    int num_samples() const { return samples_; }

    std::size_t offset(int loop, int tx, int rx) const {
        return ((static_cast<std::size_t>(loop) * static_cast<std::size_t>(tx_) +
                 static_cast<std::size_t>(tx)) *
                    static_cast<std::size_t>(rx_) +
                static_cast<std::size_t>(rx)) *
               static_cast<std::size_t>(samples_);
    }
    cplx& at(int loop, int tx, int rx, int sample) {
        return data_[offset(loop, tx, rx) + static_cast<std::size_t>(sample)];
    }
    const cplx& at(int loop, int tx, int rx, int sample) const {
        return data_[offset(loop, tx, rx) + static_cast<std::size_t>(sample)];
    }
    std::span<const cplx> chirp(int loop, int tx, int rx) const {
        return {data_.data() + offset(loop, tx, rx), static_cast<std::size_t>(samples_)};
    }

    std::span<cplx> samples() { return data_; }
    std::span<const cplx> samples() const { return data_; }

    bool matches(const RadarConfig& config) const;

    double timestamp = 0.0;
    std::size_t frame_index = 0;
    std::vector<SimWarning> warnings;

private:
    int loops_ = 0, tx_ = 0, rx_ = 0, samples_ = 0;
    std::vector<cplx> data_;
};

/// Synthesises the beat signal of a point-scatterer scene as seen by one radar.
///
/// Per scatterer, virtual antenna and chirp the echo is
///   A exp(j (2 pi f_b t_fast + 4 pi r / lambda + 2 pi (2 v_r / lambda) t_slow
///            + pi (mu_a az_units + mu_b el_units)))
/// with f_b = 2 slope r / c and t_slow the start time of the chirp (so each
/// Tx slot within a loop carries its own Doppler phase). Geometry is taken
/// at the frame start and held for the frame. Noise is circular complex
/// Gaussian seeded from (scene.seed, frame_index, pose.role).
RawFrame simulate_frame(const Scene& scene, const RadarConfig& config, const RadarPose& pose,
                        std::size_t frame_index);

/// A scatterer whose position either advances with constant velocity or
/// follows keyframes (linear interpolation by frame index, held constant
/// outside the keyframed span).
struct TrackedScatterer {
    struct Keyframe {
        double frame = 0;
        Vec3 position = Vec3::Zero();
    };

    Scatterer initial;
    std::vector<Keyframe> keyframes;  // sorted by frame; empty = constant velocity

    Scatterer at_frame(double frame, double frame_period) const;
};

struct SceneTrajectory {
    std::vector<TrackedScatterer> scatterers;
    double noise_std = 0.0;
    std::uint64_t seed = 0;

    Scene at_frame(std::size_t frame, double frame_period) const;
};

struct DualSequence {
    std::vector<RawFrame> horizontal;
    std::vector<RawFrame> vertical;
};

/// Frames for both radars of the rig generated from the same world scene.
DualSequence simulate_sequence(const SceneTrajectory& trajectory, const RadarConfig& config,
                               const Rig& rig, std::size_t num_frames);

/// Radial velocity of a scatterer as seen by a radar (positive = receding).
double radial_velocity(const Scatterer& s, const RadarPose& pose);

}  // namespace mmfuse
