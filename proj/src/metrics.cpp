#include "mmfuse/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "mmfuse/errors.hpp"

namespace mmfuse {

namespace {

constexpr double kMmPerM = 1000.0;

void check_pair(const JointSequence& pred, const JointSequence& gt) {
    pred.validate();
    gt.validate();
    if (pred.num_frames() != gt.num_frames())
        throw InputError("metrics: frame counts differ (" + std::to_string(pred.num_frames()) + " vs " +
                         std::to_string(gt.num_frames()) + ")");
    if (pred.joint_ids != gt.joint_ids) throw InputError("metrics: joint sets differ");
    if (gt.num_frames() == 0) throw InputError("metrics: empty sequences");
}

double mean_distance(const JointFrame& a, const JointFrame& b) {
    return (a - b).colwise().norm().mean();
}

}  // namespace

std::optional<int> joint_id_from_name(std::string_view name) {
    for (int i = 0; i < kNumJoints; ++i) {
        if (kJointNames[static_cast<std::size_t>(i)] == name) return i;
    }
    return std::nullopt;
}

void JointSequence::validate() const {
    if (joint_ids.empty()) throw InputError("joint sequence: no joints");
    for (std::size_t f = 0; f < frames.size(); ++f) {
        if (frames[f].cols() != static_cast<Eigen::Index>(joint_ids.size()))
            throw InputError("joint sequence: frame " + std::to_string(f) + " has wrong joint count");
        if (!frames[f].allFinite())
            throw InputError("joint sequence: non-finite position in frame " + std::to_string(f));
    }
}

double mpjpe(const JointSequence& pred, const JointSequence& gt) {
    check_pair(pred, gt);
    double total = 0;
    for (std::size_t f = 0; f < gt.num_frames(); ++f) total += mean_distance(pred.frames[f], gt.frames[f]);
    return kMmPerM * total / static_cast<double>(gt.num_frames());
}

JointFrame Similarity::apply(const JointFrame& x) const {
    return ((scale * rotation) * x).colwise() + translation;
}

Similarity procrustes_align(const JointFrame& source, const JointFrame& target, std::size_t frame) {
    if (source.cols() != target.cols() || source.cols() < 3) throw DegenerateError(frame);
    const Vec3 mu_x = source.rowwise().mean();
    const Vec3 mu_y = target.rowwise().mean();
    const JointFrame x = source.colwise() - mu_x;
    const JointFrame y = target.colwise() - mu_y;

    // Rank check: the second singular value of each centred set must be
    // non-negligible relative to its extent.
    for (const JointFrame* set : {&x, &y}) {
        const Eigen::JacobiSVD<JointFrame> svd(*set);
        const auto sv = svd.singularValues();
        if (!(sv(0) > 0) || sv(1) <= 1e-9 * sv(0)) throw DegenerateError(frame);
    }

    const Mat3 cov = y * x.transpose();
    const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) d(2, 2) = -1;

    Similarity s;
    s.rotation = svd.matrixU() * d * svd.matrixV().transpose();
    s.scale = (svd.singularValues().asDiagonal() * d).trace() / x.squaredNorm();
    s.translation = mu_y - s.scale * s.rotation * mu_x;
    return s;
}

double pa_mpjpe(const JointSequence& pred, const JointSequence& gt) {
    check_pair(pred, gt);
    double total = 0;
    for (std::size_t f = 0; f < gt.num_frames(); ++f) {
        const Similarity s = procrustes_align(pred.frames[f], gt.frames[f], f);
        total += mean_distance(s.apply(pred.frames[f]), gt.frames[f]);
    }
    return kMmPerM * total / static_cast<double>(gt.num_frames());
}

double pck(const JointSequence& pred, const JointSequence& gt, double threshold_mm) {
    check_pair(pred, gt);
    std::size_t hits = 0, total = 0;
    for (std::size_t f = 0; f < gt.num_frames(); ++f) {
        const Eigen::RowVectorXd d = (pred.frames[f] - gt.frames[f]).colwise().norm() * kMmPerM;
        hits += static_cast<std::size_t>((d.array() < threshold_mm).count());
        total += static_cast<std::size_t>(d.size());
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

double joint_mse_loss(const JointSequence& pred, const JointSequence& gt) {
    check_pair(pred, gt);
    double total = 0;
    for (std::size_t f = 0; f < gt.num_frames(); ++f) total += (pred.frames[f] - gt.frames[f]).norm();
    return kMmPerM * total / static_cast<double>(gt.num_frames());
}

}  // namespace mmfuse
