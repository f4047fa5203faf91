#pragma once

#include <vector>

#include "mmfuse/core_types.hpp"
#include "mmfuse/point_cloud.hpp"
#include "mmfuse/range_processing.hpp"

namespace mmfuse {

inline constexpr int kDefaultAngleFftSize = 64;

/// Doppler spectrum per antenna, laid out [antenna][doppler bin][range bin].
/// The Doppler axis is FFT-shifted: bin zero_doppler_index() holds 0 m/s.
class RangeDopplerMap {
public:
    RangeDopplerMap() = default;
    RangeDopplerMap(int num_antennas, int num_doppler, BinRange bins, double bin_size,
                    double velocity_bin, int num_tx)
        : antennas_(num_antennas),
          doppler_(num_doppler),
          bins_(bins),
          bin_size_(bin_size),
          velocity_bin_(velocity_bin),
          num_tx_(num_tx),
          values_(static_cast<std::size_t>(num_antennas) * static_cast<std::size_t>(num_doppler) *
                  static_cast<std::size_t>(bins.count)) {}

    int num_antennas() const { return antennas_; }
    int num_doppler() const { return doppler_; }
    int num_bins() const { return bins_.count; }
    BinRange bins() const { return bins_; }
    double bin_size() const { return bin_size_; }
    double velocity_bin() const { return velocity_bin_; }
    int num_tx() const { return num_tx_; }
    int zero_doppler_index() const { return doppler_ / 2; }
    double velocity(int doppler_bin) const { return (doppler_bin - zero_doppler_index()) * velocity_bin_; }

    std::size_t index(int antenna, int doppler, int bin) const {
        return (static_cast<std::size_t>(antenna) * static_cast<std::size_t>(doppler_) +
                static_cast<std::size_t>(doppler)) *
                   static_cast<std::size_t>(bins_.count) +
               static_cast<std::size_t>(bin);
    }
    cplx& at(int antenna, int doppler, int bin) { return values_[index(antenna, doppler, bin)]; }
    const cplx& at(int antenna, int doppler, int bin) const { return values_[index(antenna, doppler, bin)]; }

    std::span<const cplx> values() const { return values_; }
    double energy() const;

private:
    int antennas_ = 0, doppler_ = 0;
    BinRange bins_;
    double bin_size_ = 0, velocity_bin_ = 0;
    int num_tx_ = 0;
    std::vector<cplx> values_;
};

/// FFT across chirp loops per (antenna, range bin), scaled by
/// 1/sqrt(doppler_fft_size) so energy is preserved, then shifted. The
/// zero-Doppler bin is zeroed unless null_zero_doppler is false.
RangeDopplerMap range_doppler_map(const RangeMap& roi_map, const RadarConfig& config,
                                  bool null_zero_doppler = true);

/// Angle, power and velocity of one range-Doppler cell.
struct DopplerCell {
    double mu_a = 0;  // sin(theta) cos(phi)
    double mu_b = 0;  // sin(phi)
    double azimuth_deg = 0;
    double elevation_deg = 0;
    double power = 0;
    double velocity = 0;
};

/// Cells laid out [doppler bin][range bin].
struct DopplerCells {
    int num_doppler = 0;
    BinRange bins;
    double bin_size = 0;
    std::vector<DopplerCell> cells;

    std::size_t index(int doppler, int bin) const {
        return static_cast<std::size_t>(doppler) * static_cast<std::size_t>(bins.count) +
               static_cast<std::size_t>(bin);
    }
    const DopplerCell& at(int doppler, int bin) const { return cells[index(doppler, bin)]; }
    std::vector<std::size_t> shape() const {
        return {static_cast<std::size_t>(num_doppler), static_cast<std::size_t>(bins.count)};
    }
    std::vector<double> powers() const;
};

/// Per cell: Tx-slot Doppler compensation, zero-padded angle FFT over the
/// 8-element row (peak gives mu_a, |peak|^2 gives power), and mu_b from
/// the phase difference between the upper row and the overlapping part of
/// the lower row, both beamformed at the azimuth peak.
DopplerCells angle_power_velocity(const RangeDopplerMap& rd, const ArrayGeometry& geometry,
                                  int angle_fft_size = kDefaultAngleFftSize);

/// One world-frame point per cell, in cell order.
PointCloud doppler_dense_cloud(const DopplerCells& cells, const RadarPose& pose);

}  // namespace mmfuse
