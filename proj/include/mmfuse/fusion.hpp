#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmfuse/core_types.hpp"
#include "mmfuse/doppler_processor.hpp"
#include "mmfuse/intensity_beamformer.hpp"
#include "mmfuse/point_cloud.hpp"
#include "mmfuse/range_processing.hpp"
#include "mmfuse/scene_sim.hpp"

namespace mmfuse {

/// Multiplies each target point's value by the mean value of its k nearest
/// reference points. Positions and velocities are left untouched.
PointCloud masked_refinement(const PointCloud& target, const PointCloud& reference, std::size_t k);

/// Cell-averaging CFAR with a local-peak requirement. Per-dimension guard
/// and training half-widths are given in grid dimension order.
struct CfarParams {
    std::vector<int> guard_cells;
    std::vector<int> training_cells;
    double threshold_factor = 2.0;

    static CfarParams uniform(std::size_t dims, int guard = 1, int training = 2, double factor = 2.0);

    /// CA-CFAR scaling for a target false-alarm probability with
    /// `num_training` exponential-noise training cells, expressed as a
    /// multiple of the training mean: N (pfa^(-1/N) - 1).
    static double threshold_for_pfa(double pfa, std::size_t num_training);
};

/// Row-major N-D grid of real values (last dimension fastest).
struct GridView {
    std::span<const double> values;
    std::vector<std::size_t> shape;
};

struct Detection {
    std::size_t index = 0;  // flat row-major cell index
    double value = 0;
};

/// A cell is detected iff value > threshold_factor * mean(training cells)
/// and value is strictly greater than every in-bounds immediate neighbour
/// (3^N - 1 of them). The training window is the (guard + training) box
/// minus the guard box, clipped at the grid borders. Detections are
/// returned in ascending index order.
std::vector<Detection> grid_cfar(const GridView& grid, const CfarParams& params);

/// Exactly k cells: detections by value descending (ties by ascending
/// index), topped up with the best non-detected cells in the same order.
std::vector<Detection> top_k_keypoints(std::span<const Detection> detections, std::size_t k,
                                       const GridView& grid);

/// z-score over all values (population variance). Constant input maps to 0.
void gaussian_normalize(std::span<double> values);

struct FusionParams {
    double alpha = kDefaultLoading;
    std::size_t knn_k = 8;
    CfarParams intensity_cfar = CfarParams::uniform(3);
    CfarParams doppler_cfar = CfarParams::uniform(2);
    std::size_t intensity_top_k = 256;
    std::size_t doppler_top_k = 64;
    WindowKind window = WindowKind::rectangular;
    int angle_fft_size = kDefaultAngleFftSize;
};

/// Everything needed to turn a pair of raw frames into fused clouds.
struct PipelineConfig {
    RadarConfig radar;
    Roi roi;
    Rig rig = Rig::default_rig();
    FusionParams fusion;

    void validate() const;
};

/// Per-radar dense products. Cloud point i corresponds to grid cell i.
struct DenseClouds {
    IntensityGrid intensity_grid;
    PointCloud intensity;
    DopplerCells doppler_cells;
    PointCloud doppler;
};

/// Range FFT, ROI, MVDR intensity branch and Doppler branch for one radar.
DenseClouds dense_clouds(const RawFrame& frame, const PipelineConfig& config, const RadarPose& pose);

struct FusedFrame {
    PointCloud intensity;  // intensity_top_k points per radar
    PointCloud doppler;    // doppler_top_k points per radar
};

/// Refines each radar's dense clouds against the other radar's unrefined
/// clouds, trims with CFAR + top-k per radar, merges, and z-scores the
/// intensity / power channels. Velocities stay in m/s.
FusedFrame fuse_dense(const DenseClouds& h, const DenseClouds& v, const PipelineConfig& config,
                      std::size_t frame_index);

/// Full pipeline for one synchronised frame pair. The two radar branches
/// run concurrently.
FusedFrame fuse_frame(const RawFrame& raw_h, const RawFrame& raw_v, const PipelineConfig& config);

}  // namespace mmfuse
