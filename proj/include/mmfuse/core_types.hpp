#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace mmfuse {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Number of virtual antennas of the 3 Tx x 4 Rx TDM-MIMO array.
inline constexpr int kNumVirtual = 12;

/// Acquisition settings of one FMCW radar. Defaults are the IWR6843ISK
/// profile used for seated upper-body capture (60-64 GHz, 20 Hz frames).
struct RadarConfig {
    int num_tx = 3;
    int num_rx = 4;
    int adc_samples_per_chirp = 225;
    int chirps_per_frame = 128;  // per Tx
    double frame_period = 0.050;
    double start_freq = 60e9;
    double end_freq = 64e9;
    double ramp_time = 58e-6;
    double idle_time = 7e-6;
    int range_fft_size = 256;
    int doppler_fft_size = 128;

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;

    int num_virtual() const { return num_tx * num_rx; }

    bool operator==(const RadarConfig&) const = default;
};

/// Closed-form FMCW quantities derived from a RadarConfig.
struct DerivedParams {
    double bandwidth = 0;                 // Hz
    double slope = 0;                     // Hz/s
    double sample_rate = 0;               // Hz
    double carrier_wavelength = 0;        // m, at the centre frequency
    double chirp_loop_period = 0;         // s, one pass over all Tx
    double range_bin = 0;                 // m per range-FFT bin
    double velocity_bin = 0;              // m/s per Doppler-FFT bin
    double max_unambiguous_velocity = 0;  // m/s
    double max_unambiguous_range = 0;     // m, complex baseband sampling
    int range_fft_size = 0;
    int doppler_fft_size = 0;
};

DerivedParams derive_params(const RadarConfig& config);

/// Position of a virtual antenna in half-wavelength units.
struct VirtualElement {
    int az_units = 0;
    int el_units = 0;
};

/// Virtual-array layout of the IWR6843ISK.
///
/// Element n (0-based) sits at (n, 0) for n < 8 and at (n - 6, 1) for
/// n >= 8, giving an 8-element azimuth row and a 4-element row one
/// half-wavelength higher. Tx slots fire in order TX1, TX2, TX3 within
/// a chirp loop; TX2 is the elevated transmitter, so slot 1 feeds the
/// upper row.
class ArrayGeometry {
public:
    static ArrayGeometry iwr6843isk();

    std::span<const VirtualElement, kNumVirtual> elements() const { return elements_; }
    const VirtualElement& element(int n) const { return elements_[static_cast<std::size_t>(n)]; }

    /// Virtual index of the (tx slot, rx) pair.
    int virtual_index(int tx, int rx) const {
        return tx_rx_[static_cast<std::size_t>(tx)][static_cast<std::size_t>(rx)];
    }
    /// Tx slot that feeds virtual element n.
    int tx_slot(int n) const { return tx_of_[static_cast<std::size_t>(n)]; }

    /// Indices of the 8-element azimuth row, ordered by az_units.
    std::array<int, 8> azimuth_row() const;
    /// Indices of the 4-element elevated row, ordered by az_units.
    std::array<int, 4> elevated_row() const;

private:
    std::array<VirtualElement, kNumVirtual> elements_{};
    std::array<std::array<int, 4>, 3> tx_rx_{};
    std::array<int, kNumVirtual> tx_of_{};
};

/// Non-uniform direction grid for the intensity spectrum. theta is sampled
/// along the array's long (8-element) axis, phi along the short one.
struct AngleGrid {
    std::vector<double> theta_deg;
    std::vector<double> phi_deg;

    std::size_t size() const { return theta_deg.size() * phi_deg.size(); }

    /// Index of the grid value closest to the given angle.
    static std::size_t nearest(std::span<const double> axis, double value_deg);
};

AngleGrid build_angle_grid();

/// Radial span containing the subject.
struct Roi {
    double range_min = 0.4;
    double range_max = 1.8;
    std::optional<int> explicit_bin_count;

    void validate() const;
};

/// Contiguous range-bin span [first, first + count).
struct BinRange {
    int first = 0;
    int count = 0;

    int last() const { return first + count - 1; }
    bool operator==(const BinRange&) const = default;
};

BinRange roi_bins(const Roi& roi, const DerivedParams& params);

enum class RadarRole { horizontal, vertical };

std::string_view to_string(RadarRole role);

/// Pose of one radar: p_world = rotation * p_local + translation.
///
/// Radar-local axes: x along the 8-element azimuth row, y on boresight,
/// z along the elevation offset. A vertically mounted radar carries a 90
/// degree roll in its rotation, which is what swaps the meaning of its
/// theta/phi axes in the world frame.
struct RadarPose {
    RadarRole role = RadarRole::horizontal;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    void validate() const;

    Vec3 to_world(const Vec3& local) const { return rotation * local + translation; }
    Vec3 to_local(const Vec3& world) const { return rotation.transpose() * (world - translation); }
};

/// Dual-radar mounting: one horizontal and one vertical radar.
struct Rig {
    RadarPose horizontal;
    RadarPose vertical{RadarRole::vertical, Mat3::Identity(), Vec3::Zero()};

    /// Builds the rig from an unordered pair; throws ConfigError unless
    /// exactly one pose of each role is present.
    static Rig from_poses(std::span<const RadarPose> poses);

    /// Radar H at (0, 0, height) pitched down by pitch_deg, radar V offset
    /// by baseline along world x, same pitch, rolled 90 degrees about its
    /// boresight. World axes: x right, y forward, z up.
    static Rig default_rig(double pitch_deg = 20.0, double baseline = 0.15, double height = 1.5);

    const RadarPose& pose(RadarRole role) const {
        return role == RadarRole::horizontal ? horizontal : vertical;
    }

    void validate() const;
};

/// Unit direction in radar-local coordinates for grid angles (degrees).
Vec3 direction_from_angles(double theta_deg, double phi_deg);

/// Radar-local point at range r along (theta, phi).
inline Vec3 polar_to_local(double range, double theta_deg, double phi_deg) {
    return range * direction_from_angles(theta_deg, phi_deg);
}

}  // namespace mmfuse
