#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mmfuse/core_types.hpp"

namespace mmfuse {

inline constexpr int kNumJoints = 14;

/// Upper-body joint names; a joint id is an index into this list.
inline constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "pelvis",      "spine1",         "spine2",        "spine3",       "neck",
    "head",        "left_collar",    "right_collar",  "left_shoulder", "right_shoulder",
    "left_elbow",  "right_elbow",    "left_wrist",    "right_wrist",
};

std::optional<int> joint_id_from_name(std::string_view name);

using JointFrame = Eigen::Matrix3Xd;  // one column per joint, meters

/// Per-frame joint positions. All frames share joint_ids (column order).
struct JointSequence {
    std::vector<int> joint_ids;
    std::vector<JointFrame> frames;
    double frame_rate = 20.0;

    std::size_t num_frames() const { return frames.size(); }
    void validate() const;
};

/// Mean per-joint position error in mm, averaged over frames.
double mpjpe(const JointSequence& pred, const JointSequence& gt);

/// Similarity transform (s, R, t) minimising sum ||s R x_i + t - y_i||^2.
struct Similarity {
    double scale = 1.0;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    JointFrame apply(const JointFrame& x) const;
};

/// Least-squares similarity aligning `source` onto `target` (SVD-based).
/// Throws DegenerateError (with `frame`) if either set has rank < 2.
Similarity procrustes_align(const JointFrame& source, const JointFrame& target, std::size_t frame = 0);

/// MPJPE after per-frame similarity Procrustes alignment of pred to gt.
double pa_mpjpe(const JointSequence& pred, const JointSequence& gt);

/// Fraction of (frame, joint) pairs with error strictly below threshold_mm.
double pck(const JointSequence& pred, const JointSequence& gt, double threshold_mm = 15.0);

/// (1/F) sum_f ||P_f - P_gt||_F over the stacked joint matrix, in mm.
double joint_mse_loss(const JointSequence& pred, const JointSequence& gt);

}  // namespace mmfuse
