#pragma once

#include <vector>

#include <Eigen/Core>

#include "mmfuse/core_types.hpp"
#include "mmfuse/point_cloud.hpp"
#include "mmfuse/range_processing.hpp"

namespace mmfuse {

using SteeringVector = Eigen::Matrix<cplx, kNumVirtual, 1>;
using CorrMatrix = Eigen::Matrix<cplx, kNumVirtual, kNumVirtual>;

inline constexpr double kDefaultLoading = 0.03;

/// a(n) = exp(j pi (mu_a az_units(n) + mu_b el_units(n))),
/// mu_a = sin(theta) cos(phi), mu_b = sin(phi).
SteeringVector steering_vector(double theta_deg, double phi_deg, const ArrayGeometry& geometry);

/// Sample correlation matrices per ROI range bin, diagonally loaded with
/// alpha * trace(R) / 12. Bins whose trace is zero cannot be regularised
/// and are listed in singular_bins (local bin indices).
struct CorrelationSet {
    std::vector<CorrMatrix> matrices;
    double alpha = kDefaultLoading;
    BinRange bins;
    double bin_size = 0;
    std::vector<int> singular_bins;

    bool singular() const { return !singular_bins.empty(); }
};

CorrelationSet correlation_matrices(const RangeMap& roi_map, double alpha = kDefaultLoading);

/// MVDR intensity spectrum IS(theta, phi, r) = 1 / (a^H R^-1 a), stored
/// [theta][phi][range] to match the angle grid ordering.
class IntensityGrid {
public:
    IntensityGrid() = default;
    IntensityGrid(const AngleGrid& grid, BinRange bins, double bin_size)
        : grid_(grid),
          bins_(bins),
          bin_size_(bin_size),
          values_(grid.size() * static_cast<std::size_t>(bins.count), 0.0) {}

    std::size_t num_theta() const { return grid_.theta_deg.size(); }
    std::size_t num_phi() const { return grid_.phi_deg.size(); }
    std::size_t num_range() const { return static_cast<std::size_t>(bins_.count); }
    const AngleGrid& angles() const { return grid_; }
    BinRange bins() const { return bins_; }
    double bin_size() const { return bin_size_; }

    std::size_t index(std::size_t t, std::size_t p, std::size_t r) const {
        return (t * num_phi() + p) * num_range() + r;
    }
    double& at(std::size_t t, std::size_t p, std::size_t r) { return values_[index(t, p, r)]; }
    double at(std::size_t t, std::size_t p, std::size_t r) const { return values_[index(t, p, r)]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<std::size_t> shape() const { return {num_theta(), num_phi(), num_range()}; }

    /// Radar-local position of a flat grid index.
    Vec3 local_position(std::size_t flat) const;

private:
    AngleGrid grid_;
    BinRange bins_;
    double bin_size_ = 0;
    std::vector<double> values_;
};

/// Throws SingularMatrixError (with the absolute range bin) if any R_i
/// cannot be factorised.
IntensityGrid mvdr_spectrum(const CorrelationSet& corr, const AngleGrid& grid,
                            const ArrayGeometry& geometry);

/// One point per grid node, in the world frame, in grid order.
PointCloud intensity_dense_cloud(const IntensityGrid& grid, const RadarPose& pose);

}  // namespace mmfuse
