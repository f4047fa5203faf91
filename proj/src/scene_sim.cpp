#include "mmfuse/scene_sim.hpp"

#include <cmath>
#include <random>

#include "mmfuse/errors.hpp"

namespace mmfuse {

void Scene::validate() const {
    if (!(noise_std >= 0)) throw InputError("scene: noise_std must be >= 0");
    for (const auto& s : scatterers) {
        if (!(s.amplitude >= 0)) throw InputError("scene: scatterer amplitude must be >= 0");
        if (!s.position.allFinite() || !s.velocity.allFinite())
            throw InputError("scene: scatterer position/velocity must be finite");
    }
}

RawFrame::RawFrame(const RadarConfig& config)
    : loops_(config.chirps_per_frame),
      tx_(config.num_tx),
      rx_(config.num_rx),
      samples_(config.adc_samples_per_chirp),
      data_(static_cast<std::size_t>(loops_) * static_cast<std::size_t>(tx_) *
            static_cast<std::size_t>(rx_) * static_cast<std::size_t>(samples_)) {}

bool RawFrame::matches(const RadarConfig& config) const {
    return loops_ == config.chirps_per_frame && tx_ == config.num_tx && rx_ == config.num_rx &&
           samples_ == config.adc_samples_per_chirp;
}

double radial_velocity(const Scatterer& s, const RadarPose& pose) {
    const Vec3 los = s.position - pose.translation;
    const double r = los.norm();
    if (r == 0) return 0.0;
    return s.velocity.dot(los / r);
}

RawFrame simulate_frame(const Scene& scene, const RadarConfig& config, const RadarPose& pose,
                        std::size_t frame_index) {
    scene.validate();
    const DerivedParams p = derive_params(config);
    const ArrayGeometry geom = ArrayGeometry::iwr6843isk();

    RawFrame frame(config);
    frame.frame_index = frame_index;
    frame.timestamp = static_cast<double>(frame_index) * config.frame_period;

    const int n_samples = config.adc_samples_per_chirp;
    const double slot_period = config.ramp_time + config.idle_time;
    std::vector<cplx> tone(static_cast<std::size_t>(n_samples));

    for (std::size_t si = 0; si < scene.scatterers.size(); ++si) {
        const Scatterer& s = scene.scatterers[si];
        const Vec3 local = pose.to_local(s.position);
        const double r = local.norm();
        const double v_r = radial_velocity(s, pose);

        if (!(r > 0) || r >= p.max_unambiguous_range) {
            frame.warnings.push_back({si, "range " + std::to_string(r) +
                                              " m outside unambiguous interval"});
        }
        if (std::abs(v_r) >= p.max_unambiguous_velocity) {
            frame.warnings.push_back({si, "radial velocity " + std::to_string(v_r) +
                                              " m/s beyond unambiguous velocity"});
        }
        if (r == 0 || s.amplitude == 0) continue;

        const Vec3 u = local / r;
        const double mu_a = u.x();
        const double mu_b = u.z();

        const double f_beat = 2.0 * p.slope * r / kSpeedOfLight;
        for (int n = 0; n < n_samples; ++n) {
            tone[static_cast<std::size_t>(n)] =
                std::polar(1.0, 2.0 * kPi * f_beat * n / p.sample_rate);
        }

        const double carrier = 4.0 * kPi * r / p.carrier_wavelength;
        const double doppler_rate = 2.0 * kPi * 2.0 * v_r / p.carrier_wavelength;  // rad/s

        for (int loop = 0; loop < config.chirps_per_frame; ++loop) {
            for (int tx = 0; tx < config.num_tx; ++tx) {
                const double t_slow = loop * p.chirp_loop_period + tx * slot_period;
                for (int rx = 0; rx < config.num_rx; ++rx) {
                    const auto& e = geom.element(geom.virtual_index(tx, rx));
                    const double spatial = kPi * (mu_a * e.az_units + mu_b * e.el_units);
                    const cplx coef = std::polar(s.amplitude, carrier + doppler_rate * t_slow + spatial);
                    cplx* out = &frame.at(loop, tx, rx, 0);
                    for (int n = 0; n < n_samples; ++n) out[n] += coef * tone[static_cast<std::size_t>(n)];
                }
            }
        }
    }

    if (scene.noise_std > 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(scene.seed & 0xffffffffu),
                          static_cast<std::uint32_t>(scene.seed >> 32),
                          static_cast<std::uint32_t>(frame_index & 0xffffffffu),
                          static_cast<std::uint32_t>(frame_index >> 32),
                          static_cast<std::uint32_t>(pose.role == RadarRole::horizontal ? 0 : 1)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> gauss(0.0, scene.noise_std / std::sqrt(2.0));
        for (auto& x : frame.samples()) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            x += cplx(re, im);
        }
    }
    return frame;
}

Scatterer TrackedScatterer::at_frame(double frame, double frame_period) const {
    Scatterer s = initial;
    if (keyframes.empty()) {
        s.position = initial.position + initial.velocity * (frame * frame_period);
        return s;
    }
    if (keyframes.size() == 1 || frame <= keyframes.front().frame) {
        s.position = keyframes.front().position;
        s.velocity = Vec3::Zero();
        return s;
    }
    if (frame >= keyframes.back().frame) {
        s.position = keyframes.back().position;
        s.velocity = Vec3::Zero();
        return s;
    }
    std::size_t k = 1;
    while (keyframes[k].frame <= frame) ++k;
    const auto& a = keyframes[k - 1];
    const auto& b = keyframes[k];
    const double span = b.frame - a.frame;
    const double w = (frame - a.frame) / span;
    s.position = (1.0 - w) * a.position + w * b.position;
    s.velocity = (b.position - a.position) / (span * frame_period);
    return s;
}

Scene SceneTrajectory::at_frame(std::size_t frame, double frame_period) const {
    Scene scene;
    scene.noise_std = noise_std;
    scene.seed = seed;
    scene.scatterers.reserve(scatterers.size());
    for (const auto& t : scatterers) {
        scene.scatterers.push_back(t.at_frame(static_cast<double>(frame), frame_period));
    }
    return scene;
}

DualSequence simulate_sequence(const SceneTrajectory& trajectory, const RadarConfig& config,
                               const Rig& rig, std::size_t num_frames) {
    rig.validate();
    DualSequence seq;
    seq.horizontal.reserve(num_frames);
    seq.vertical.reserve(num_frames);
    for (std::size_t f = 0; f < num_frames; ++f) {
        const Scene scene = trajectory.at_frame(f, config.frame_period);
        seq.horizontal.push_back(simulate_frame(scene, config, rig.horizontal, f));
        seq.vertical.push_back(simulate_frame(scene, config, rig.vertical, f));
    }
    return seq;
}

}  // namespace mmfuse
