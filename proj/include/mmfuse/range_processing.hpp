#pragma once

#include <optional>
#include <vector>

#include "mmfuse/core_types.hpp"
#include "mmfuse/scene_sim.hpp"

namespace mmfuse {

enum class WindowKind { rectangular, hann };

/// Range-FFT output laid out as [virtual antenna][chirp loop][range bin].
/// Range bins are absolute bins first_bin .. first_bin + num_bins - 1.
class RangeMap {
public:
    RangeMap() = default;
    RangeMap(int num_antennas, int num_chirps, BinRange bins, double bin_size)
        : antennas_(num_antennas),
          chirps_(num_chirps),
          bins_(bins),
          bin_size_(bin_size),
          values_(static_cast<std::size_t>(num_antennas) * static_cast<std::size_t>(num_chirps) *
                  static_cast<std::size_t>(bins.count)) {}

    int num_antennas() const { return antennas_; }
    int num_chirps() const { return chirps_; }
    int num_bins() const { return bins_.count; }
    BinRange bins() const { return bins_; }
    int first_bin() const { return bins_.first; }
    double bin_size() const { return bin_size_; }
    double bin_range(int local_bin) const { return (bins_.first + local_bin) * bin_size_; }

    std::size_t index(int antenna, int chirp, int bin) const {
        return (static_cast<std::size_t>(antenna) * static_cast<std::size_t>(chirps_) +
                static_cast<std::size_t>(chirp)) *
                   static_cast<std::size_t>(bins_.count) +
               static_cast<std::size_t>(bin);
    }
    cplx& at(int antenna, int chirp, int bin) { return values_[index(antenna, chirp, bin)]; }
    const cplx& at(int antenna, int chirp, int bin) const { return values_[index(antenna, chirp, bin)]; }

    std::span<cplx> values() { return values_; }
    std::span<const cplx> values() const { return values_; }

    double energy() const;

private:
    int antennas_ = 0, chirps_ = 0;
    BinRange bins_;
    double bin_size_ = 0;
    std::vector<cplx> values_;
};

/// Per-chirp range FFT of every (tx, rx) channel, placed at its virtual
/// antenna index. Zero-padded to config.range_fft_size. With `keep`, only
/// those bins are stored (same values as slicing the full map).
RangeMap range_fft(const RawFrame& frame, const RadarConfig& config,
                   WindowKind window = WindowKind::rectangular, std::optional<BinRange> keep = std::nullopt);

/// Subtracts, per (antenna, bin), the mean over chirp loops.
RangeMap dc_clutter_removal(RangeMap map);

/// Restricts the map to the ROI bins. The map must already contain them.
RangeMap roi_slice(const RangeMap& map, const Roi& roi, const DerivedParams& params);

}  // namespace mmfuse
