#include "mmfuse/doppler_processor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "mmfuse/errors.hpp"
#include "mmfuse/fft.hpp"

namespace mmfuse {

double RangeDopplerMap::energy() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0,
                           [](double acc, const cplx& v) { return acc + std::norm(v); });
}

std::vector<double> DopplerCells::powers() const {
    std::vector<double> out(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) out[i] = cells[i].power;
    return out;
}

RangeDopplerMap range_doppler_map(const RangeMap& roi_map, const RadarConfig& config,
                                  bool null_zero_doppler) {
    if (roi_map.num_chirps() != config.chirps_per_frame)
        throw InputError("range_doppler_map: chirp count does not match config");
    const DerivedParams p = derive_params(config);
    const int n_dop = config.doppler_fft_size;
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_dop));

    RangeDopplerMap rd(roi_map.num_antennas(), n_dop, roi_map.bins(), roi_map.bin_size(),
                       p.velocity_bin, config.num_tx);
    std::vector<cplx> in(static_cast<std::size_t>(roi_map.num_chirps()));
    std::vector<cplx> out(static_cast<std::size_t>(n_dop));
    for (int a = 0; a < roi_map.num_antennas(); ++a) {
        for (int b = 0; b < roi_map.num_bins(); ++b) {
            for (int c = 0; c < roi_map.num_chirps(); ++c) in[static_cast<std::size_t>(c)] = roi_map.at(a, c, b);
            fft::forward(in, out);
            fft::shift(out);
            for (int d = 0; d < n_dop; ++d) rd.at(a, d, b) = out[static_cast<std::size_t>(d)] * norm;
            if (null_zero_doppler) rd.at(a, rd.zero_doppler_index(), b) = cplx{};
        }
    }
    return rd;
}

DopplerCells angle_power_velocity(const RangeDopplerMap& rd, const ArrayGeometry& geometry,
                                  int angle_fft_size) {
    if (rd.num_antennas() != kNumVirtual) throw InputError("angle_power_velocity: expected 12 antennas");
    if (angle_fft_size < 8) throw ParameterError("angle_power_velocity: angle_fft_size must be >= 8");

    const auto row = geometry.azimuth_row();
    const auto upper = geometry.elevated_row();
    const int n_ang = angle_fft_size;
    const int n_dop = rd.num_doppler();

    // twiddle[m][a] = exp(-j 2 pi k a / N) with k = m - N/2 (shifted bin order)
    std::vector<cplx> twiddle(static_cast<std::size_t>(n_ang) * 8);
    for (int m = 0; m < n_ang; ++m) {
        const int k = m - n_ang / 2;
        for (int a = 0; a < 8; ++a) {
            twiddle[static_cast<std::size_t>(m * 8 + a)] = std::polar(1.0, -2.0 * kPi * k * a / n_ang);
        }
    }

    DopplerCells out;
    out.num_doppler = n_dop;
    out.bins = rd.bins();
    out.bin_size = rd.bin_size();
    out.cells.resize(static_cast<std::size_t>(n_dop) * static_cast<std::size_t>(rd.num_bins()));

    std::array<cplx, kNumVirtual> v{};
    std::array<cplx, kNumVirtual> comp{};
    for (int d = 0; d < n_dop; ++d) {
        const int k_d = d - rd.zero_doppler_index();
        for (int n = 0; n < kNumVirtual; ++n) {
            const int slot = geometry.tx_slot(n);
            comp[static_cast<std::size_t>(n)] =
                std::polar(1.0, -2.0 * kPi * k_d * slot / (static_cast<double>(n_dop) * rd.num_tx()));
        }
        for (int b = 0; b < rd.num_bins(); ++b) {
            for (int n = 0; n < kNumVirtual; ++n) {
                v[static_cast<std::size_t>(n)] = rd.at(n, d, b) * comp[static_cast<std::size_t>(n)];
            }

            int best = 0;
            double best_pow = -1.0;
            for (int m = 0; m < n_ang; ++m) {
                const cplx* tw = &twiddle[static_cast<std::size_t>(m * 8)];
                cplx acc{};
                for (int a = 0; a < 8; ++a) acc += v[static_cast<std::size_t>(row[static_cast<std::size_t>(a)])] * tw[a];
                const double pw = std::norm(acc);
                if (pw > best_pow) {
                    best_pow = pw;
                    best = m;
                }
            }
            double mu_a = 2.0 * (best - n_ang / 2) / n_ang;

            // Upper row vs the lower-row elements at the same az positions.
            cplx lower{}, upper_sum{};
            for (int e : upper) {
                const int az = geometry.element(e).az_units;
                const cplx steer = std::polar(1.0, -kPi * mu_a * az);
                lower += v[static_cast<std::size_t>(row[static_cast<std::size_t>(az)])] * steer;
                upper_sum += v[static_cast<std::size_t>(e)] * steer;
            }
            double mu_b = std::arg(upper_sum * std::conj(lower)) / kPi;

            const double horiz = mu_a * mu_a + mu_b * mu_b;
            if (horiz > 1.0) {
                const double s = std::sqrt(horiz);
                mu_a /= s;
                mu_b /= s;
            }
            DopplerCell& cell = out.cells[out.index(d, b)];
            cell.mu_a = mu_a;
            cell.mu_b = mu_b;
            const double boresight = std::sqrt(std::max(0.0, 1.0 - mu_a * mu_a - mu_b * mu_b));
            cell.azimuth_deg = rad2deg(std::atan2(mu_a, boresight));
            cell.elevation_deg = rad2deg(std::asin(std::clamp(mu_b, -1.0, 1.0)));
            cell.power = best_pow;
            cell.velocity = rd.velocity(d);
        }
    }
    return out;
}

PointCloud doppler_dense_cloud(const DopplerCells& cells, const RadarPose& pose) {
    PointCloud cloud;
    cloud.kind = CloudKind::doppler;
    cloud.points.resize(cells.cells.size());
    for (int d = 0; d < cells.num_doppler; ++d) {
        for (int b = 0; b < cells.bins.count; ++b) {
            const std::size_t i = cells.index(d, b);
            const DopplerCell& c = cells.cells[i];
            const double range = (cells.bins.first + b) * cells.bin_size;
            const double boresight = std::sqrt(std::max(0.0, 1.0 - c.mu_a * c.mu_a - c.mu_b * c.mu_b));
            CloudPoint& pt = cloud.points[i];
            pt.position = pose.to_world(range * Vec3(c.mu_a, boresight, c.mu_b));
            pt.value = c.power;
            pt.velocity = c.velocity;
            pt.grid_index = i;
            pt.source = pose.role;
        }
    }
    return cloud;
}

}  // namespace mmfuse
