#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "mmfuse/dwell.hpp"
#include "mmfuse/errors.hpp"
#include "mmfuse/metrics.hpp"
#include "support/oracles.hpp"

using namespace mmfuse;

namespace {

JointSequence random_sequence(std::mt19937& rng, std::size_t frames, double spread = 0.3) {
    std::normal_distribution<double> g(0, spread);
    JointSequence s;
    for (int j = 0; j < kNumJoints; ++j) s.joint_ids.push_back(j);
    for (std::size_t f = 0; f < frames; ++f) {
        JointFrame m(3, kNumJoints);
        for (int j = 0; j < kNumJoints; ++j) m.col(j) = Vec3(g(rng), g(rng) + 2.0, g(rng) + 1.0);
        s.frames.push_back(m);
    }
    return s;
}

JointSequence perturbed(const JointSequence& gt, std::mt19937& rng, double sigma) {
    std::normal_distribution<double> g(0, sigma);
    JointSequence p = gt;
    for (auto& f : p.frames)
        for (int j = 0; j < f.cols(); ++j) f.col(j) += Vec3(g(rng), g(rng), g(rng));
    return p;
}

oracle::Frames to_frames(const JointSequence& s) {
    oracle::Frames out;
    for (const auto& f : s.frames) {
        std::vector<Eigen::Vector3d> v;
        for (int j = 0; j < f.cols(); ++j) v.push_back(f.col(j));
        out.push_back(v);
    }
    return out;
}

Mat3 random_rotation(std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    return q.normalized().toRotationMatrix();
}

}  // namespace

// ---- Pose metrics ----------------------------------------------------------

TEST(Metrics, IdenticalSequencesAreZeroError) {
    std::mt19937 rng(1);
    const JointSequence gt = random_sequence(rng, 5);
    EXPECT_EQ(mpjpe(gt, gt), 0.0);
    EXPECT_NEAR(pa_mpjpe(gt, gt), 0.0, 1e-9);
    EXPECT_EQ(pck(gt, gt), 1.0);
    EXPECT_EQ(joint_mse_loss(gt, gt), 0.0);
}

TEST(Metrics, UniformOffsetGivesOffsetEverywhere) {
    std::mt19937 rng(2);
    const JointSequence gt = random_sequence(rng, 4);
    JointSequence pred = gt;
    for (auto& f : pred.frames) f.colwise() += Vec3(0.01, 0, 0);
    EXPECT_NEAR(mpjpe(pred, gt), 10.0, 1e-9);
    EXPECT_NEAR(pa_mpjpe(pred, gt), 0.0, 1e-9);
    EXPECT_EQ(pck(pred, gt, 15.0), 1.0);
    EXPECT_EQ(pck(pred, gt, 5.0), 0.0);
    EXPECT_NEAR(joint_mse_loss(pred, gt), 10.0 * std::sqrt(14.0), 1e-9);
}

TEST(Metrics, PckThresholdIsStrict) {
    std::mt19937 rng(3);
    const JointSequence gt = random_sequence(rng, 1);
    JointSequence pred = gt;
    pred.frames[0].col(0) += Vec3(0, 0, 0.015);  // exactly 15 mm after scaling
    pred.frames[0].col(1) += Vec3(0, 0, 0.0149);
    const double expected = oracle::pck(to_frames(pred), to_frames(gt), 15.0);
    EXPECT_EQ(pck(pred, gt, 15.0), expected);
}

TEST(Metrics, AgreeWithOraclesOnRandomData) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const JointSequence gt = random_sequence(rng, 6);
        const JointSequence pred = perturbed(gt, rng, 0.02);
        const auto P = to_frames(pred), G = to_frames(gt);
        EXPECT_NEAR(mpjpe(pred, gt), oracle::mpjpe_mm(P, G), 1e-9);
        EXPECT_NEAR(pa_mpjpe(pred, gt), oracle::pa_mpjpe_mm(P, G), 1e-6);
        EXPECT_EQ(pck(pred, gt, 25.0), oracle::pck(P, G, 25.0));
        EXPECT_NEAR(joint_mse_loss(pred, gt), oracle::joint_loss_mm(P, G), 1e-9);
    }
}

TEST(Metrics, PaInvariantToSimilarityOfPrediction) {
    std::mt19937 rng(5);
    const JointSequence gt = random_sequence(rng, 3);
    const JointSequence pred = perturbed(gt, rng, 0.03);
    JointSequence moved = pred;
    const Mat3 r = random_rotation(rng);
    for (auto& f : moved.frames) f = ((2.5 * r) * f).colwise() + Vec3(1, -2, 0.5);
    EXPECT_NEAR(pa_mpjpe(moved, gt), pa_mpjpe(pred, gt), 1e-6);
}

TEST(Metrics, AlignmentNeverIncreasesSquaredError) {
    // Procrustes minimises the summed squared error, so the aligned sum of
    // squares can never exceed the unaligned one.
    std::mt19937 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const JointSequence gt = random_sequence(rng, 1);
        const JointSequence pred = perturbed(gt, rng, 0.05);
        const Similarity s = procrustes_align(pred.frames[0], gt.frames[0]);
        const double aligned = (s.apply(pred.frames[0]) - gt.frames[0]).squaredNorm();
        const double raw = (pred.frames[0] - gt.frames[0]).squaredNorm();
        EXPECT_LE(aligned, raw + 1e-12);
    }
}

TEST(Metrics, ProcrustesRecoversKnownTransform) {
    std::mt19937 rng(7);
    const JointSequence gt = random_sequence(rng, 1);
    const Mat3 r = random_rotation(rng);
    const JointFrame src = gt.frames[0];
    const JointFrame dst = ((0.7 * r) * src).colwise() + Vec3(0.2, 0.1, -0.3);
    const Similarity s = procrustes_align(src, dst);
    EXPECT_NEAR(s.scale, 0.7, 1e-9);
    EXPECT_LT((s.rotation - r).norm(), 1e-9);
    EXPECT_NEAR(s.rotation.determinant(), 1.0, 1e-12);
    EXPECT_LT((s.apply(src) - dst).norm(), 1e-9);
}

TEST(Metrics, DegenerateAndMismatchedInputs) {
    JointSequence a;
    a.joint_ids = {0, 1, 2};
    JointFrame collinear(3, 3);
    collinear << 0, 1, 2, 0, 0, 0, 0, 0, 0;
    a.frames = {collinear};
    try {
        pa_mpjpe(a, a);
        FAIL() << "expected DegenerateError";
    } catch (const DegenerateError& e) {
        EXPECT_EQ(e.frame(), 0u);
    }
    std::mt19937 rng(8);
    const JointSequence x = random_sequence(rng, 2), y = random_sequence(rng, 3);
    EXPECT_THROW(mpjpe(x, y), InputError);
    JointSequence z = x;
    z.joint_ids[0] = 5;
    EXPECT_THROW(mpjpe(x, z), InputError);
}

// ---- Dwell detection -------------------------------------------------------

namespace {

std::vector<Vec3> line_then_hold(std::size_t moving, std::size_t hold, std::size_t moving_after, double speed_mps,
                                 double fps, std::mt19937* jitter_rng = nullptr, double jitter = 0.0) {
    std::vector<Vec3> out;
    Vec3 p(0, 1, 1);
    std::normal_distribution<double> g(0, jitter);
    const auto push = [&](const Vec3& base) {
        Vec3 q = base;
        if (jitter_rng) q += Vec3(g(*jitter_rng), g(*jitter_rng), g(*jitter_rng));
        out.push_back(q);
    };
    for (std::size_t i = 0; i < moving; ++i, p.x() += speed_mps / fps) push(p);
    for (std::size_t i = 0; i < hold; ++i) push(p);
    for (std::size_t i = 0; i < moving_after; ++i) {
        p.y() += speed_mps / fps;
        push(p);
    }
    return out;
}

}  // namespace

TEST(Dwell, StationaryTrajectoryIsOneEvent) {
    const std::vector<Vec3> traj(40, Vec3(0.1, 1.0, 0.8));
    const auto ev = detect_dwell_intervals(traj, 20.0);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_EQ(ev[0].start_frame, 0u);
    EXPECT_EQ(ev[0].end_frame, 39u);
    EXPECT_LT((ev[0].centroid - traj[0]).norm(), 1e-12);
}

TEST(Dwell, FastMotionHasNoEvents) {
    const auto traj = line_then_hold(60, 0, 0, 0.5, 20.0);
    EXPECT_TRUE(detect_dwell_intervals(traj, 20.0).empty());
}

TEST(Dwell, HoldBetweenMotionsIsFound) {
    const auto traj = line_then_hold(30, 30, 30, 0.8, 20.0);
    const auto ev = detect_dwell_intervals(traj, 20.0);
    ASSERT_EQ(ev.size(), 1u);
    // Hold covers frames 30..59 plus the last moving frame's position.
    EXPECT_GE(ev[0].start_frame, 25u);
    EXPECT_LE(ev[0].start_frame, 30u);
    EXPECT_GE(ev[0].end_frame, 59u);
    EXPECT_LE(ev[0].end_frame, 62u);
}

TEST(Dwell, MatchesWindowOracle) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto traj = line_then_hold(20 + trial, 25, 20, 0.4 + 0.05 * trial, 20.0, &rng, 0.002);
        const auto flags = oracle::dwell_windows(traj, 20, 100.0);
        const auto ev = detect_dwell_intervals(traj, 20.0);
        // Rebuild per-window flags from the events.
        std::vector<bool> from_events(flags.size(), false);
        for (const auto& e : ev)
            for (std::size_t s = e.start_frame; s + 20 <= e.end_frame; ++s) from_events[s] = true;
        EXPECT_EQ(from_events, flags) << trial;
    }
}

TEST(Dwell, InvariantUnderRigidMotion) {
    std::mt19937 rng(12);
    const auto traj = line_then_hold(25, 30, 25, 0.6, 20.0, &rng, 0.001);
    const Mat3 r = random_rotation(rng);
    std::vector<Vec3> moved;
    for (const auto& p : traj) moved.push_back(r * p + Vec3(3, -1, 2));
    const auto a = detect_dwell_intervals(traj, 20.0);
    const auto b = detect_dwell_intervals(moved, 20.0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].start_frame, b[i].start_frame);
        EXPECT_EQ(a[i].end_frame, b[i].end_frame);
        EXPECT_LT((r * a[i].centroid + Vec3(3, -1, 2) - b[i].centroid).norm(), 1e-9);
    }
}

TEST(Dwell, InputErrors) {
    const std::vector<Vec3> short_traj(10, Vec3::Zero());
    EXPECT_THROW(detect_dwell_intervals(short_traj, 20.0), InputError);
    EXPECT_THROW(detect_dwell_intervals(short_traj, 0.0), InputError);
    EXPECT_THROW(detect_dwell_intervals(short_traj, 20.0, {0.0, 100.0}), InputError);
    EXPECT_THROW(detect_dwell_intervals(short_traj, 20.0, {0.01, 100.0}), InputError);
    EXPECT_NO_THROW(detect_dwell_intervals(short_traj, 20.0, {0.25, 100.0}));
}

TEST(MatchTargets, BoxContainmentAndNearestWins) {
    std::vector<DwellEvent> ev(4);
    ev[0].centroid = Vec3(0.05, 1.0, 1.0);   // inside a only
    ev[1].centroid = Vec3(0.0, 1.125, 1.0);  // on the boundary of a
    ev[2].centroid = Vec3(0.5, 0.5, 0.5);    // nowhere
    ev[3].centroid = Vec3(0.11, 1.0, 1.0);   // inside both, nearer b
    const std::vector<Target> targets{{"a", Vec3(0, 1, 1)}, {"b", Vec3(0.2, 1, 1)}};
    const MatchReport r = match_targets(ev, targets, 0.25);
    EXPECT_EQ(r.events[0].matched_target, "a");
    EXPECT_EQ(r.events[1].matched_target, "a");
    EXPECT_FALSE(r.events[2].matched_target.has_value());
    EXPECT_EQ(r.events[3].matched_target, "b");
    EXPECT_EQ(r.matched, 3u);
    EXPECT_DOUBLE_EQ(r.hit_rate, 0.75);

    const MatchReport none = match_targets({}, targets);
    EXPECT_EQ(none.hit_rate, 0.0);
    EXPECT_THROW(match_targets(ev, {}, 0.2), InputError);
    EXPECT_THROW(match_targets(ev, targets, 0.0), InputError);
}
