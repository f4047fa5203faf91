#include "mmfuse/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "mmfuse/errors.hpp"

namespace mmfuse {

namespace {

void require(bool ok, const char* invariant) {
    if (!ok) throw ConfigError(std::string("radar config: ") + invariant);
}

}  // namespace

void RadarConfig::validate() const {
    require(num_tx > 0 && num_rx > 0, "num_tx and num_rx must be positive");
    require(num_tx * num_rx == kNumVirtual, "num_tx * num_rx must equal 12 (3x4 virtual array)");
    require(adc_samples_per_chirp > 0, "adc_samples_per_chirp must be positive");
    require(chirps_per_frame > 1, "chirps_per_frame must be at least 2");
    require(end_freq > start_freq, "end_freq must exceed start_freq");
    require(start_freq > 0, "start_freq must be positive");
    require(frame_period > 0 && ramp_time > 0 && idle_time > 0, "all times must be positive");
    require(range_fft_size >= adc_samples_per_chirp, "range_fft_size must be >= adc_samples_per_chirp");
    require(doppler_fft_size >= chirps_per_frame, "doppler_fft_size must be >= chirps_per_frame");
    require(num_tx * (ramp_time + idle_time) * chirps_per_frame <= frame_period,
            "chirp train must fit within frame_period");
}

DerivedParams derive_params(const RadarConfig& config) {
    config.validate();
    DerivedParams p;
    p.bandwidth = config.end_freq - config.start_freq;
    p.slope = p.bandwidth / config.ramp_time;
    p.sample_rate = config.adc_samples_per_chirp / config.ramp_time;
    p.carrier_wavelength = kSpeedOfLight / (0.5 * (config.start_freq + config.end_freq));
    p.chirp_loop_period = config.num_tx * (config.ramp_time + config.idle_time);
    p.range_bin = kSpeedOfLight * p.sample_rate / (2.0 * p.slope * config.range_fft_size);
    // Bin spacing of the (possibly zero-padded) Doppler FFT; equals the
    // chirps_per_frame resolution when the FFT is not padded.
    p.velocity_bin = p.carrier_wavelength / (2.0 * config.doppler_fft_size * p.chirp_loop_period);
    p.max_unambiguous_velocity = p.carrier_wavelength / (4.0 * p.chirp_loop_period);
    p.max_unambiguous_range = kSpeedOfLight * p.sample_rate / (2.0 * p.slope);
    p.range_fft_size = config.range_fft_size;
    p.doppler_fft_size = config.doppler_fft_size;
    return p;
}

ArrayGeometry ArrayGeometry::iwr6843isk() {
    ArrayGeometry g;
    for (int n = 0; n < kNumVirtual; ++n) {
        g.elements_[static_cast<std::size_t>(n)] =
            n < 8 ? VirtualElement{n, 0} : VirtualElement{n - 6, 1};
    }
    // slot 0 = TX1 (row az 0..3), slot 1 = TX2 (elevated, az 2..5), slot 2 = TX3 (row az 4..7)
    constexpr std::array<int, 3> slot_base{0, 8, 4};
    for (int tx = 0; tx < 3; ++tx) {
        for (int rx = 0; rx < 4; ++rx) {
            const int n = slot_base[static_cast<std::size_t>(tx)] + rx;
            g.tx_rx_[static_cast<std::size_t>(tx)][static_cast<std::size_t>(rx)] = n;
            g.tx_of_[static_cast<std::size_t>(n)] = tx;
        }
    }
    return g;
}

std::array<int, 8> ArrayGeometry::azimuth_row() const {
    std::array<int, 8> row{};
    for (int n = 0; n < kNumVirtual; ++n) {
        const auto& e = element(n);
        if (e.el_units == 0) row[static_cast<std::size_t>(e.az_units)] = n;
    }
    return row;
}

std::array<int, 4> ArrayGeometry::elevated_row() const {
    std::array<int, 4> row{};
    std::size_t k = 0;
    for (int n = 0; n < kNumVirtual; ++n) {
        if (element(n).el_units == 1) row[k++] = n;
    }
    std::sort(row.begin(), row.end(), [this](int a, int b) {
        return element(a).az_units < element(b).az_units;
    });
    return row;
}

AngleGrid build_angle_grid() {
    return AngleGrid{
        {-70, -60, -50, -40, -30, -25, -20, -15, -10, -5, 0, 5, 10, 15, 20, 25, 30, 40, 50, 60, 70},
        {-70, -50, -30, -20, -10, 0, 10, 20, 30, 50, 70},
    };
}

std::size_t AngleGrid::nearest(std::span<const double> axis, double value_deg) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (std::abs(axis[i] - value_deg) < std::abs(axis[best] - value_deg)) best = i;
    }
    return best;
}

void Roi::validate() const {
    if (!(range_min > 0)) throw RoiError("roi: range_min must be positive");
    if (!(range_max > range_min)) throw RoiError("roi: range_max must exceed range_min");
    if (explicit_bin_count && *explicit_bin_count <= 0)
        throw RoiError("roi: explicit_bin_count must be positive");
}

BinRange roi_bins(const Roi& roi, const DerivedParams& params) {
    roi.validate();
    // Bin k is centred at k * range_bin. The small slack absorbs rounding
    // when a boundary falls exactly on a bin centre.
    constexpr double eps = 1e-9;
    const int lo = static_cast<int>(std::ceil(roi.range_min / params.range_bin - eps));
    int hi = static_cast<int>(std::floor(roi.range_max / params.range_bin + eps));
    hi = std::min(hi, params.range_fft_size - 1);
    if (hi < lo) {
        throw RoiError("roi: no range bins between " + std::to_string(roi.range_min) + " m and " +
                       std::to_string(roi.range_max) + " m");
    }
    if (roi.explicit_bin_count) {
        const int count = *roi.explicit_bin_count;
        if (lo + count > params.range_fft_size)
            throw RoiError("roi: explicit_bin_count exceeds the sampled range");
        return {lo, count};
    }
    return {lo, hi - lo + 1};
}

std::string_view to_string(RadarRole role) {
    return role == RadarRole::horizontal ? "horizontal" : "vertical";
}

void RadarPose::validate() const {
    const Mat3 gram = rotation.transpose() * rotation;
    if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
        throw ConfigError("extrinsics: rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-9)
        throw ConfigError("extrinsics: rotation determinant must be +1");
    if (!translation.allFinite()) throw ConfigError("extrinsics: translation must be finite");
}

Rig Rig::from_poses(std::span<const RadarPose> poses) {
    if (poses.size() != 2) throw ConfigError("rig: exactly two radars required");
    const auto n_h = std::count_if(poses.begin(), poses.end(),
                                   [](const RadarPose& p) { return p.role == RadarRole::horizontal; });
    if (n_h != 1) throw ConfigError("rig: exactly one horizontal and one vertical radar required");
    Rig rig;
    for (const auto& p : poses) {
        (p.role == RadarRole::horizontal ? rig.horizontal : rig.vertical) = p;
    }
    rig.validate();
    return rig;
}

Rig Rig::default_rig(double pitch_deg, double baseline, double height) {
    const Mat3 pitch = Eigen::AngleAxisd(-deg2rad(pitch_deg), Vec3::UnitX()).toRotationMatrix();
    const Mat3 roll = Eigen::AngleAxisd(deg2rad(90.0), Vec3::UnitY()).toRotationMatrix();
    Rig rig;
    rig.horizontal = {RadarRole::horizontal, pitch, Vec3(0.0, 0.0, height)};
    rig.vertical = {RadarRole::vertical, pitch * roll, Vec3(baseline, 0.0, height)};
    return rig;
}

void Rig::validate() const {
    if (horizontal.role != RadarRole::horizontal || vertical.role != RadarRole::vertical)
        throw ConfigError("rig: exactly one horizontal and one vertical radar required");
    horizontal.validate();
    vertical.validate();
}

Vec3 direction_from_angles(double theta_deg, double phi_deg) {
    const double t = deg2rad(theta_deg);
    const double p = deg2rad(phi_deg);
    return {std::sin(t) * std::cos(p), std::cos(t) * std::cos(p), std::sin(p)};
}

}  // namespace mmfuse
