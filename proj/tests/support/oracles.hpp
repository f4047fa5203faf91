#pragma once

// Reference implementations used only to cross-check the library. Each one
// takes the slow, obvious route and shares no code with src/.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "mmfuse/core_types.hpp"
#include "mmfuse/scene_sim.hpp"

namespace mmfuse::oracle {

/// Scatterer at radar-local polar (r, theta, phi) with the given radial
/// velocity, expressed in the world frame of `pose`.
inline Scatterer scatterer_at(const RadarPose& pose, double range, double theta_deg, double phi_deg,
                              double radial_velocity = 0.0, double amplitude = 1.0) {
    const double t = theta_deg * kPi / 180.0, p = phi_deg * kPi / 180.0;
    const Vec3 dir(std::sin(t) * std::cos(p), std::cos(t) * std::cos(p), std::sin(p));
    Scatterer s;
    s.position = pose.rotation * (range * dir) + pose.translation;
    s.velocity = pose.rotation * (radial_velocity * dir);
    s.amplitude = amplitude;
    return s;
}

/// Cell-averaging CFAR by exhaustive enumeration: every cell, every
/// window offset, no prefix sums.
inline std::vector<bool> cfar_mask(const std::vector<double>& values, const std::vector<std::size_t>& shape,
                                   const std::vector<int>& guard, const std::vector<int>& train, double factor) {
    const std::size_t dims = shape.size();
    std::vector<std::size_t> stride(dims, 1);
    for (std::size_t d = dims - 1; d-- > 0;) stride[d] = stride[d + 1] * shape[d + 1];

    const auto coords = [&](std::size_t flat) {
        std::vector<long> c(dims);
        for (std::size_t d = 0; d < dims; ++d) c[d] = static_cast<long>((flat / stride[d]) % shape[d]);
        return c;
    };

    std::vector<bool> mask(values.size(), false);
    for (std::size_t cell = 0; cell < values.size(); ++cell) {
        const auto c = coords(cell);
        bool peak = true;
        double sum = 0;
        std::size_t count = 0;
        for (std::size_t other = 0; other < values.size(); ++other) {
            if (other == cell) continue;
            const auto o = coords(other);
            long cheb = 0;
            bool in_outer = true, in_guard = true;
            for (std::size_t d = 0; d < dims; ++d) {
                const long diff = std::labs(o[d] - c[d]);
                cheb = std::max(cheb, diff);
                if (diff > guard[d] + train[d]) in_outer = false;
                if (diff > guard[d]) in_guard = false;
            }
            if (cheb == 1 && !(values[cell] > values[other])) peak = false;
            if (in_outer && !in_guard) {
                sum += values[other];
                ++count;
            }
        }
        if (peak && count > 0 && values[cell] > factor * (sum / static_cast<double>(count))) mask[cell] = true;
    }
    return mask;
}

/// k nearest reference indices ordered by (squared distance, index).
inline std::vector<std::size_t> knn(const std::vector<Vec3>& ref, const Vec3& q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < ref.size(); ++i) all.emplace_back((ref[i] - q).squaredNorm(), i);
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k && i < all.size(); ++i) out.push_back(all[i].second);
    return out;
}

/// Euclidean distance by explicit components.
inline double dist(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Frames as vectors of joint positions (meters); results in mm.
using Frames = std::vector<std::vector<Eigen::Vector3d>>;

inline double mpjpe_mm(const Frames& pred, const Frames& gt) {
    double total = 0;
    for (std::size_t f = 0; f < gt.size(); ++f) {
        double frame = 0;
        for (std::size_t j = 0; j < gt[f].size(); ++j) frame += dist(pred[f][j], gt[f][j]);
        total += frame / static_cast<double>(gt[f].size());
    }
    return 1000.0 * total / static_cast<double>(gt.size());
}

/// Similarity alignment by Horn's unit-quaternion method.
inline std::vector<Eigen::Vector3d> horn_align(const std::vector<Eigen::Vector3d>& src,
                                               const std::vector<Eigen::Vector3d>& dst) {
    const double n = static_cast<double>(src.size());
    Eigen::Vector3d ms = Eigen::Vector3d::Zero(), md = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        ms += src[i] / n;
        md += dst[i] / n;
    }
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    double src_ss = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        S += (src[i] - ms) * (dst[i] - md).transpose();
        src_ss += (src[i] - ms).squaredNorm();
    }
    const double sxx = S(0, 0), sxy = S(0, 1), sxz = S(0, 2);
    const double syx = S(1, 0), syy = S(1, 1), syz = S(1, 2);
    const double szx = S(2, 0), szy = S(2, 1), szz = S(2, 2);
    Eigen::Matrix4d N;
    N << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
         syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
         szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
         sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(N);
    const Eigen::Vector4d q = es.eigenvectors().col(3);
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Eigen::Matrix3d R;
    R << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
    double num = 0;
    for (std::size_t i = 0; i < src.size(); ++i) num += (dst[i] - md).dot(R * (src[i] - ms));
    const double s = num / src_ss;
    std::vector<Eigen::Vector3d> out;
    for (const auto& p : src) out.push_back(s * R * (p - ms) + md);
    return out;
}

inline double pa_mpjpe_mm(const Frames& pred, const Frames& gt) {
    Frames aligned;
    for (std::size_t f = 0; f < gt.size(); ++f) aligned.push_back(horn_align(pred[f], gt[f]));
    return mpjpe_mm(aligned, gt);
}

inline double pck(const Frames& pred, const Frames& gt, double threshold_mm) {
    std::size_t hit = 0, total = 0;
    for (std::size_t f = 0; f < gt.size(); ++f) {
        for (std::size_t j = 0; j < gt[f].size(); ++j) {
            hit += 1000.0 * dist(pred[f][j], gt[f][j]) < threshold_mm ? 1 : 0;
            ++total;
        }
    }
    return static_cast<double>(hit) / static_cast<double>(total);
}

inline double joint_loss_mm(const Frames& pred, const Frames& gt) {
    double total = 0;
    for (std::size_t f = 0; f < gt.size(); ++f) {
        double sq = 0;
        for (std::size_t j = 0; j < gt[f].size(); ++j) {
            for (int a = 0; a < 3; ++a) {
                const double d = 1000.0 * (pred[f][j][a] - gt[f][j][a]);
                sq += d * d;
            }
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(gt.size());
}

/// Dwell windows by direct summation: true for window starts whose W-step
/// path length is below the threshold.
inline std::vector<bool> dwell_windows(const std::vector<Eigen::Vector3d>& traj, std::size_t steps,
                                       double threshold_mm) {
    std::vector<bool> flags;
    if (traj.size() <= steps) return flags;
    for (std::size_t s = 0; s + steps < traj.size(); ++s) {
        double path = 0;
        for (std::size_t i = s; i < s + steps; ++i) path += dist(traj[i + 1], traj[i]);
        flags.push_back(1000.0 * path < threshold_mm);
    }
    return flags;
}

}  // namespace mmfuse::oracle
