#include "mmfuse/range_processing.hpp"

#include <cmath>
#include <numeric>

#include "mmfuse/errors.hpp"
#include "mmfuse/fft.hpp"

namespace mmfuse {

double RangeMap::energy() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0,
                           [](double acc, const cplx& v) { return acc + std::norm(v); });
}

RangeMap range_fft(const RawFrame& frame, const RadarConfig& config, WindowKind window,
                   std::optional<BinRange> keep) {
    config.validate();
    if (!frame.matches(config)) throw InputError("range_fft: frame dimensions do not match config");

    const DerivedParams p = derive_params(config);
    const ArrayGeometry geom = ArrayGeometry::iwr6843isk();
    const int n_fft = config.range_fft_size;
    const int n_samples = config.adc_samples_per_chirp;

    std::vector<double> taper(static_cast<std::size_t>(n_samples), 1.0);
    if (window == WindowKind::hann) {
        for (int n = 0; n < n_samples; ++n) {
            taper[static_cast<std::size_t>(n)] =
                0.5 - 0.5 * std::cos(2.0 * kPi * n / (n_samples - 1));
        }
    }

    const BinRange bins = keep.value_or(BinRange{0, n_fft});
    if (bins.first < 0 || bins.count < 1 || bins.last() >= n_fft)
        throw RoiError("range_fft: requested bins outside 0.." + std::to_string(n_fft - 1));

    RangeMap map(kNumVirtual, config.chirps_per_frame, bins, p.range_bin);
    std::vector<cplx> in(static_cast<std::size_t>(n_samples));
    std::vector<cplx> out(static_cast<std::size_t>(n_fft));
    for (int loop = 0; loop < config.chirps_per_frame; ++loop) {
        for (int tx = 0; tx < config.num_tx; ++tx) {
            for (int rx = 0; rx < config.num_rx; ++rx) {
                const auto chirp = frame.chirp(loop, tx, rx);
                for (int n = 0; n < n_samples; ++n) {
                    in[static_cast<std::size_t>(n)] =
                        chirp[static_cast<std::size_t>(n)] * taper[static_cast<std::size_t>(n)];
                }
                fft::forward(in, out);
                const int antenna = geom.virtual_index(tx, rx);
                const auto first = out.begin() + bins.first;
                std::copy(first, first + bins.count, &map.at(antenna, loop, 0));
            }
        }
    }
    return map;
}

RangeMap dc_clutter_removal(RangeMap map) {
    const int chirps = map.num_chirps();
    std::vector<cplx> mean(static_cast<std::size_t>(map.num_bins()));
    for (int a = 0; a < map.num_antennas(); ++a) {
        std::fill(mean.begin(), mean.end(), cplx{});
        for (int c = 0; c < chirps; ++c) {
            for (int b = 0; b < map.num_bins(); ++b) mean[static_cast<std::size_t>(b)] += map.at(a, c, b);
        }
        for (auto& m : mean) m /= static_cast<double>(chirps);
        for (int c = 0; c < chirps; ++c) {
            for (int b = 0; b < map.num_bins(); ++b) map.at(a, c, b) -= mean[static_cast<std::size_t>(b)];
        }
    }
    return map;
}

RangeMap roi_slice(const RangeMap& map, const Roi& roi, const DerivedParams& params) {
    const BinRange want = roi_bins(roi, params);
    const BinRange have = map.bins();
    if (want.first < have.first || want.last() > have.last()) {
        throw RoiError("roi_slice: ROI bins " + std::to_string(want.first) + ".." +
                       std::to_string(want.last()) + " not contained in map bins " +
                       std::to_string(have.first) + ".." + std::to_string(have.last()));
    }
    if (want == have) return map;

    RangeMap out(map.num_antennas(), map.num_chirps(), want, map.bin_size());
    const int skip = want.first - have.first;
    for (int a = 0; a < map.num_antennas(); ++a) {
        for (int c = 0; c < map.num_chirps(); ++c) {
            const cplx* src = &map.at(a, c, skip);
            std::copy(src, src + want.count, &out.at(a, c, 0));
        }
    }
    return out;
}

}  // namespace mmfuse
