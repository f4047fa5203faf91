#include "mmfuse/intensity_beamformer.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "mmfuse/errors.hpp"

namespace mmfuse {

SteeringVector steering_vector(double theta_deg, double phi_deg, const ArrayGeometry& geometry) {
    const double mu_a = std::sin(deg2rad(theta_deg)) * std::cos(deg2rad(phi_deg));
    const double mu_b = std::sin(deg2rad(phi_deg));
    SteeringVector a;
    for (int n = 0; n < kNumVirtual; ++n) {
        const auto& e = geometry.element(n);
        a(n) = std::polar(1.0, kPi * (mu_a * e.az_units + mu_b * e.el_units));
    }
    return a;
}

CorrelationSet correlation_matrices(const RangeMap& roi_map, double alpha) {
    if (roi_map.num_antennas() != kNumVirtual)
        throw InputError("correlation_matrices: expected 12 virtual antennas");
    if (!(alpha >= 0)) throw ParameterError("correlation_matrices: alpha must be >= 0");

    CorrelationSet set;
    set.alpha = alpha;
    set.bins = roi_map.bins();
    set.bin_size = roi_map.bin_size();
    set.matrices.resize(static_cast<std::size_t>(roi_map.num_bins()));

    const int n_snap = roi_map.num_chirps();
    Eigen::Matrix<cplx, kNumVirtual, Eigen::Dynamic> y(kNumVirtual, n_snap);
    for (int b = 0; b < roi_map.num_bins(); ++b) {
        for (int a = 0; a < kNumVirtual; ++a) {
            for (int c = 0; c < n_snap; ++c) y(a, c) = roi_map.at(a, c, b);
        }
        CorrMatrix& r = set.matrices[static_cast<std::size_t>(b)];
        // Lower triangle, mirrored, so R is exactly Hermitian.
        for (int i = 0; i < kNumVirtual; ++i) {
            for (int j = 0; j <= i; ++j) {
                cplx acc{};
                for (int c = 0; c < n_snap; ++c) acc += y(i, c) * std::conj(y(j, c));
                acc /= static_cast<double>(n_snap);
                r(i, j) = acc;
                r(j, i) = std::conj(acc);
            }
            r(i, i) = cplx(r(i, i).real(), 0.0);
        }
        const double trace = r.diagonal().real().sum();
        if (!(trace > 0)) {
            set.singular_bins.push_back(b);
            continue;
        }
        const double loading = alpha * trace / kNumVirtual;
        for (int i = 0; i < kNumVirtual; ++i) r(i, i) += loading;
    }
    return set;
}

Vec3 IntensityGrid::local_position(std::size_t flat) const {
    const std::size_t r = flat % num_range();
    const std::size_t p = (flat / num_range()) % num_phi();
    const std::size_t t = flat / (num_range() * num_phi());
    const double range = (bins_.first + static_cast<int>(r)) * bin_size_;
    return polar_to_local(range, grid_.theta_deg[t], grid_.phi_deg[p]);
}

IntensityGrid mvdr_spectrum(const CorrelationSet& corr, const AngleGrid& grid,
                            const ArrayGeometry& geometry) {
    if (corr.singular()) {
        throw SingularMatrixError(static_cast<std::size_t>(corr.bins.first + corr.singular_bins.front()));
    }
    const std::size_t n_dir = grid.size();
    Eigen::Matrix<cplx, kNumVirtual, Eigen::Dynamic> steer(kNumVirtual, static_cast<Eigen::Index>(n_dir));
    for (std::size_t t = 0; t < grid.theta_deg.size(); ++t) {
        for (std::size_t p = 0; p < grid.phi_deg.size(); ++p) {
            steer.col(static_cast<Eigen::Index>(t * grid.phi_deg.size() + p)) =
                steering_vector(grid.theta_deg[t], grid.phi_deg[p], geometry);
        }
    }

    IntensityGrid out(grid, corr.bins, corr.bin_size);
    const std::size_t n_range = out.num_range();
    Eigen::LLT<CorrMatrix> llt;
    for (std::size_t b = 0; b < corr.matrices.size(); ++b) {
        const std::size_t abs_bin = static_cast<std::size_t>(corr.bins.first) + b;
        llt.compute(corr.matrices[b]);
        if (llt.info() != Eigen::Success) throw SingularMatrixError(abs_bin);
        const Eigen::Matrix<cplx, kNumVirtual, Eigen::Dynamic> x = llt.solve(steer);
        for (std::size_t d = 0; d < n_dir; ++d) {
            const auto col = static_cast<Eigen::Index>(d);
            const double denom = steer.col(col).dot(x.col(col)).real();  // a^H R^-1 a
            if (!(denom > 0) || !std::isfinite(denom)) throw SingularMatrixError(abs_bin);
            out.values()[d * n_range + b] = 1.0 / denom;
        }
    }
    return out;
}

PointCloud intensity_dense_cloud(const IntensityGrid& grid, const RadarPose& pose) {
    PointCloud cloud;
    cloud.kind = CloudKind::intensity;
    cloud.points.resize(grid.values().size());
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        CloudPoint& pt = cloud.points[i];
        pt.position = pose.to_world(grid.local_position(i));
        pt.value = grid.values()[i];
        pt.grid_index = i;
        pt.source = pose.role;
    }
    return cloud;
}

}  // namespace mmfuse
