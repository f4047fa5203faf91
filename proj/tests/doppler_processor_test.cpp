#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mmfuse/doppler_processor.hpp"
#include "support/oracles.hpp"

using namespace mmfuse;

namespace {

const RadarConfig kConfig{};
const ArrayGeometry kGeom = ArrayGeometry::iwr6843isk();
const DerivedParams kParams = derive_params(kConfig);

RangeMap roi_map(const Scene& s, const RadarPose& pose = {}, Roi roi = {}) {
    return range_fft(simulate_frame(s, kConfig, pose, 0), kConfig, WindowKind::rectangular,
                     roi_bins(roi, kParams));
}

Scene single(double r, double theta, double phi, double v, double noise = 0.0, std::uint64_t seed = 1) {
    Scene s;
    s.noise_std = noise;
    s.seed = seed;
    s.scatterers.push_back(oracle::scatterer_at({}, r, theta, phi, v));
    return s;
}

std::size_t strongest(const DopplerCells& cells) {
    const auto p = cells.powers();
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

TEST(RangeDoppler, StaticSourceIsNulled) {
    const RangeDopplerMap rd = range_doppler_map(roi_map(single(1.0, 0, 0, 0)), kConfig);
    double peak = 0;
    for (const auto& x : rd.values()) peak = std::max(peak, std::abs(x));
    EXPECT_LT(peak, 1e-9);
}

TEST(RangeDoppler, UnitVelocityLandsTenBinsUp) {
    Roi r;
    r.explicit_bin_count = 30;
    const RangeDopplerMap rd = range_doppler_map(roi_map(single(1.0, 0, 0, 1.0), {}, r), kConfig);
    EXPECT_EQ(rd.num_doppler(), 128);
    EXPECT_EQ(rd.num_bins(), 30);
    int best = 0;
    for (int d = 0; d < 128; ++d)
        if (std::abs(rd.at(0, d, 17)) > std::abs(rd.at(0, best, 17))) best = d;
    EXPECT_EQ(best - rd.zero_doppler_index(), 10);
    EXPECT_NEAR(rd.velocity(best), 10 * kParams.velocity_bin, 1e-12);
}

TEST(RangeDoppler, EnergyPreservedWithoutNulling) {
    const RangeMap m = roi_map(single(1.1, 10, 5, 0.7, 0.3, 8));
    const RangeDopplerMap rd = range_doppler_map(m, kConfig, false);
    EXPECT_NEAR(rd.energy(), m.energy(), 1e-9 * m.energy());
}

TEST(RangeDoppler, OppositeVelocitiesMirror) {
    for (double v : {0.5, 1.3, 2.9}) {
        const auto peak_bin = [&](double vel) {
            const RangeDopplerMap rd = range_doppler_map(roi_map(single(1.0, 0, 0, vel)), kConfig);
            int best = 0;
            const int b = 30 - rd.bins().first;
            for (int d = 0; d < rd.num_doppler(); ++d)
                if (std::abs(rd.at(3, d, b)) > std::abs(rd.at(3, best, b))) best = d;
            return best - rd.zero_doppler_index();
        };
        EXPECT_EQ(peak_bin(v), -peak_bin(-v)) << v;
    }
}

TEST(AnglePowerVelocity, BoresightCentred) {
    Roi r;
    r.explicit_bin_count = 30;
    const RangeDopplerMap rd = range_doppler_map(roi_map(single(1.0, 0, 0, 1.0), {}, r), kConfig);
    const DopplerCells cells = angle_power_velocity(rd, kGeom);
    EXPECT_EQ(cells.cells.size(), 3840u);
    const DopplerCell& c = cells.cells[strongest(cells)];
    EXPECT_NEAR(c.mu_a, 0.0, 1e-12);
    EXPECT_NEAR(c.elevation_deg, 0.0, 1.0);
    EXPECT_NEAR(c.velocity, 10 * kParams.velocity_bin, 1e-12);
}

TEST(AnglePowerVelocity, AzimuthWithinOneAngleBin) {
    for (double theta : {-45.0, -30.0, -12.0, 7.0, 30.0, 55.0}) {
        const RangeDopplerMap rd = range_doppler_map(roi_map(single(1.2, theta, 0, 0.8)), kConfig);
        const DopplerCells cells = angle_power_velocity(rd, kGeom);
        const DopplerCell& c = cells.cells[strongest(cells)];
        EXPECT_LE(std::abs(c.mu_a - std::sin(deg2rad(theta))), 1.0 / 32 + 1e-12) << theta;
    }
}

TEST(AnglePowerVelocity, ElevationRecovered) {
    for (double phi : {-20.0, -8.0, 10.0, 20.0}) {
        const RangeDopplerMap rd = range_doppler_map(roi_map(single(1.0, 0, phi, -0.9)), kConfig);
        const DopplerCells cells = angle_power_velocity(rd, kGeom);
        EXPECT_NEAR(cells.cells[strongest(cells)].elevation_deg, phi, 5.0) << phi;
    }
}

TEST(AnglePowerVelocity, ZeroInputHasZeroPower) {
    RangeDopplerMap rd(12, 128, {13, 10}, kParams.range_bin, kParams.velocity_bin, 3);
    const DopplerCells cells = angle_power_velocity(rd, kGeom);
    for (const auto& c : cells.cells) {
        EXPECT_EQ(c.power, 0.0);
        EXPECT_TRUE(std::isfinite(c.mu_a));
        EXPECT_TRUE(std::isfinite(c.mu_b));
    }
}

TEST(AnglePowerVelocity, VelocityWithinOneBinAcrossRange) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> vel(-5, 5);
    for (int i = 0; i < 12; ++i) {
        double v = vel(rng);
        if (std::abs(v) < 0.3) v += 0.5;
        const RangeDopplerMap rd = range_doppler_map(roi_map(single(1.0, 15, 5, v, 0.05, 50 + i)), kConfig);
        const DopplerCells cells = angle_power_velocity(rd, kGeom);
        EXPECT_LE(std::abs(cells.cells[strongest(cells)].velocity - v), kParams.velocity_bin) << v;
    }
}

TEST(DopplerCloud, PointsInCellOrderAndWorldFrame) {
    const Rig rig = Rig::default_rig();
    Scene s;
    s.scatterers.push_back(oracle::scatterer_at(rig.horizontal, 1.0, 0, 0, 1.0));
    const RangeMap m = range_fft(simulate_frame(s, kConfig, rig.horizontal, 0), kConfig, WindowKind::rectangular,
                                 roi_bins(Roi{}, kParams));
    const DopplerCells cells = angle_power_velocity(range_doppler_map(m, kConfig), kGeom);
    const PointCloud cloud = doppler_dense_cloud(cells, rig.horizontal);
    ASSERT_EQ(cloud.size(), cells.cells.size());
    EXPECT_EQ(cloud.kind, CloudKind::doppler);
    const std::size_t best = strongest(cells);
    EXPECT_EQ(cloud.points[best].value, cells.cells[best].power);
    EXPECT_LT((cloud.points[best].position - s.scatterers[0].position).norm(), 0.05);
    EXPECT_EQ(cloud.points[best].velocity, cells.cells[best].velocity);
}
