#include "mmfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include "mmfuse/errors.hpp"
#include "mmfuse/kd_tree.hpp"

namespace mmfuse {

PointCloud masked_refinement(const PointCloud& target, const PointCloud& reference, std::size_t k) {
    if (reference.points.empty()) throw InputError("masked_refinement: reference cloud is empty");
    if (k == 0 || k > reference.points.size())
        throw ParameterError("masked_refinement: k must be in [1, reference size]");
    if (target.kind != reference.kind) throw InputError("masked_refinement: cloud kinds differ");

    std::vector<Vec3> ref_pos(reference.points.size());
    for (std::size_t i = 0; i < ref_pos.size(); ++i) ref_pos[i] = reference.points[i].position;
    const KdTree tree(ref_pos);

    PointCloud out = target;
    std::vector<std::size_t> nn, prev;
    for (auto& pt : out.points) {
        // Consecutive grid cells are neighbours in space; the previous
        // answer seeds a tight search bound.
        tree.nearest(pt.position, k, nn, prev);
        prev.swap(nn);
        const auto& found = prev;
        double sum = 0;
        for (std::size_t idx : found) sum += reference.points[idx].value;
        pt.value *= sum / static_cast<double>(found.size());
    }
    return out;
}

CfarParams CfarParams::uniform(std::size_t dims, int guard, int training, double factor) {
    return {std::vector<int>(dims, guard), std::vector<int>(dims, training), factor};
}

double CfarParams::threshold_for_pfa(double pfa, std::size_t num_training) {
    if (!(pfa > 0 && pfa < 1) || num_training == 0)
        throw ParameterError("cfar: pfa must be in (0, 1) with at least one training cell");
    const double n = static_cast<double>(num_training);
    return n * (std::pow(pfa, -1.0 / n) - 1.0);
}

namespace {

std::size_t product(const std::vector<std::size_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::size_t{1}, std::multiplies<>());
}

void check_grid(const GridView& grid) {
    if (grid.shape.empty()) throw ParameterError("cfar: grid has no dimensions");
    if (product(grid.shape) != grid.values.size())
        throw ParameterError("cfar: grid values do not match shape");
}

// Inclusive-exclusive N-D prefix sums: prefix[i] = sum of cells with all
// coordinates < i (shape + 1 per dimension).
class PrefixSum {
public:
    explicit PrefixSum(const GridView& grid) : shape_(grid.shape) {
        const std::size_t dims = shape_.size();
        pshape_.resize(dims);
        for (std::size_t d = 0; d < dims; ++d) pshape_[d] = shape_[d] + 1;
        strides_.assign(dims, 1);
        for (std::size_t d = dims - 1; d-- > 0;) strides_[d] = strides_[d + 1] * pshape_[d + 1];
        sums_.assign(product(pshape_), 0.0L);

        std::vector<std::size_t> idx(dims, 0);
        for (std::size_t flat = 0; flat < grid.values.size(); ++flat) {
            std::size_t p = 0;
            for (std::size_t d = 0; d < dims; ++d) p += (idx[d] + 1) * strides_[d];
            sums_[p] = grid.values[flat];
            increment(idx, shape_);
        }
        for (std::size_t d = 0; d < dims; ++d) {
            // cumulative sum along dimension d
            for (std::size_t p = 0; p < sums_.size(); ++p) {
                const std::size_t coord = (p / strides_[d]) % pshape_[d];
                if (coord > 0) sums_[p] += sums_[p - strides_[d]];
            }
        }
    }

    /// Sum over the half-open box [lo, hi).
    long double box(const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) const {
        const std::size_t dims = shape_.size();
        long double total = 0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << dims); ++mask) {
            std::size_t p = 0;
            int lows = 0;
            for (std::size_t d = 0; d < dims; ++d) {
                if (mask & (std::size_t{1} << d)) {
                    p += lo[d] * strides_[d];
                    ++lows;
                } else {
                    p += hi[d] * strides_[d];
                }
            }
            total += (lows % 2 ? -1.0L : 1.0L) * sums_[p];
        }
        return total;
    }

    static void increment(std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
        for (std::size_t d = shape.size(); d-- > 0;) {
            if (++idx[d] < shape[d]) return;
            idx[d] = 0;
        }
    }

private:
    std::vector<std::size_t> shape_, pshape_, strides_;
    std::vector<long double> sums_;
};

}  // namespace

std::vector<Detection> grid_cfar(const GridView& grid, const CfarParams& params) {
    check_grid(grid);
    const std::size_t dims = grid.shape.size();
    if (params.guard_cells.size() != dims || params.training_cells.size() != dims)
        throw ParameterError("cfar: guard/training sizes must match grid dimensions");
    if (!(params.threshold_factor > 1.0)) throw ParameterError("cfar: threshold_factor must exceed 1");
    for (std::size_t d = 0; d < dims; ++d) {
        const int g = params.guard_cells[d], t = params.training_cells[d];
        if (g < 0 || t < 1) throw ParameterError("cfar: guard >= 0 and training >= 1 required");
        const std::size_t extent = 2 * static_cast<std::size_t>(g + t) + 1;
        if (extent > grid.shape[d]) {
            throw ParameterError("cfar: window extent " + std::to_string(extent) +
                                 " exceeds grid size " + std::to_string(grid.shape[d]) +
                                 " in dimension " + std::to_string(d));
        }
    }

    const PrefixSum prefix(grid);
    std::vector<std::size_t> strides(dims, 1);
    for (std::size_t d = dims - 1; d-- > 0;) strides[d] = strides[d + 1] * grid.shape[d + 1];

    // Offsets of the 3^N - 1 immediate neighbours.
    std::vector<std::vector<int>> neighbours;
    {
        std::vector<int> off(dims, -1);
        for (;;) {
            if (std::any_of(off.begin(), off.end(), [](int o) { return o != 0; })) neighbours.push_back(off);
            std::size_t d = dims;
            while (d-- > 0) {
                if (++off[d] <= 1) break;
                off[d] = -1;
            }
            if (d == static_cast<std::size_t>(-1)) break;
        }
    }

    std::vector<Detection> out;
    std::vector<std::size_t> idx(dims, 0);
    std::vector<std::size_t> outer_lo(dims), outer_hi(dims), inner_lo(dims), inner_hi(dims);
    for (std::size_t flat = 0; flat < grid.values.size(); ++flat, PrefixSum::increment(idx, grid.shape)) {
        const double value = grid.values[flat];

        bool peak = true;
        for (const auto& off : neighbours) {
            std::size_t n = flat;
            bool inside = true;
            for (std::size_t d = 0; d < dims && inside; ++d) {
                const auto c = static_cast<std::ptrdiff_t>(idx[d]) + off[d];
                if (c < 0 || c >= static_cast<std::ptrdiff_t>(grid.shape[d])) inside = false;
                else n = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n) + off[d] * static_cast<std::ptrdiff_t>(strides[d]));
            }
            if (inside && !(value > grid.values[n])) {
                peak = false;
                break;
            }
        }
        if (!peak) continue;

        std::size_t outer_count = 1, inner_count = 1;
        for (std::size_t d = 0; d < dims; ++d) {
            const auto c = static_cast<std::ptrdiff_t>(idx[d]);
            const auto g = static_cast<std::ptrdiff_t>(params.guard_cells[d]);
            const auto w = g + static_cast<std::ptrdiff_t>(params.training_cells[d]);
            const auto n = static_cast<std::ptrdiff_t>(grid.shape[d]);
            outer_lo[d] = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, c - w));
            outer_hi[d] = static_cast<std::size_t>(std::min(n, c + w + 1));
            inner_lo[d] = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, c - g));
            inner_hi[d] = static_cast<std::size_t>(std::min(n, c + g + 1));
            outer_count *= outer_hi[d] - outer_lo[d];
            inner_count *= inner_hi[d] - inner_lo[d];
        }
        const std::size_t train_count = outer_count - inner_count;
        if (train_count == 0) continue;
        const long double train_sum = prefix.box(outer_lo, outer_hi) - prefix.box(inner_lo, inner_hi);
        const long double mean = train_sum / static_cast<long double>(train_count);
        if (static_cast<long double>(value) > static_cast<long double>(params.threshold_factor) * mean) {
            out.push_back({flat, value});
        }
    }
    return out;
}

namespace {

bool ranks_before(const Detection& a, const Detection& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
}

}  // namespace

std::vector<Detection> top_k_keypoints(std::span<const Detection> detections, std::size_t k,
                                       const GridView& grid) {
    check_grid(grid);
    if (k > grid.values.size()) throw ParameterError("top_k: k exceeds the number of grid cells");

    std::vector<Detection> ranked(detections.begin(), detections.end());
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    if (ranked.size() >= k) {
        ranked.resize(k);
        return ranked;
    }

    std::vector<bool> taken(grid.values.size(), false);
    for (const auto& d : ranked) taken[d.index] = true;
    std::vector<Detection> rest;
    rest.reserve(grid.values.size() - ranked.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        if (!taken[i]) rest.push_back({i, grid.values[i]});
    }
    const std::size_t need = k - ranked.size();
    std::partial_sort(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(need), rest.end(), ranks_before);
    ranked.insert(ranked.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(need));
    return ranked;
}

void gaussian_normalize(std::span<double> values) {
    if (values.empty()) return;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    const double sd = std::sqrt(var);
    for (double& v : values) v = sd > 0 ? (v - mean) / sd : 0.0;
}

void PipelineConfig::validate() const {
    radar.validate();
    roi.validate();
    rig.validate();
    if (fusion.knn_k == 0) throw ConfigError("fusion: knn_k must be positive");
    if (fusion.intensity_cfar.guard_cells.size() != 3 || fusion.intensity_cfar.training_cells.size() != 3)
        throw ConfigError("fusion: intensity CFAR needs 3 per-dimension entries");
    if (fusion.doppler_cfar.guard_cells.size() != 2 || fusion.doppler_cfar.training_cells.size() != 2)
        throw ConfigError("fusion: doppler CFAR needs 2 per-dimension entries");
    if (!(fusion.alpha >= 0)) throw ConfigError("fusion: alpha must be >= 0");
}

DenseClouds dense_clouds(const RawFrame& frame, const PipelineConfig& config, const RadarPose& pose) {
    const DerivedParams params = derive_params(config.radar);
    const ArrayGeometry geometry = ArrayGeometry::iwr6843isk();

    const RangeMap roi_map = range_fft(frame, config.radar, config.fusion.window, roi_bins(config.roi, params));

    DenseClouds out;
    const CorrelationSet corr = correlation_matrices(dc_clutter_removal(roi_map), config.fusion.alpha);
    out.intensity_grid = mvdr_spectrum(corr, build_angle_grid(), geometry);
    out.intensity = intensity_dense_cloud(out.intensity_grid, pose);
    out.intensity.frame_index = frame.frame_index;

    const RangeDopplerMap rd = range_doppler_map(roi_map, config.radar);
    out.doppler_cells = angle_power_velocity(rd, geometry, config.fusion.angle_fft_size);
    out.doppler = doppler_dense_cloud(out.doppler_cells, pose);
    out.doppler.frame_index = frame.frame_index;
    return out;
}

namespace {

// CFAR + top-k on the refined values laid out on the source grid.
void append_keypoints(const PointCloud& refined, const std::vector<std::size_t>& shape,
                      const CfarParams& cfar, std::size_t k, PointCloud& merged) {
    std::vector<double> values(refined.points.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = refined.points[i].value;
    const GridView view{values, shape};
    const auto detections = grid_cfar(view, cfar);
    for (const auto& d : top_k_keypoints(detections, k, view)) merged.points.push_back(refined.points[d.index]);
}

}  // namespace

FusedFrame fuse_dense(const DenseClouds& h, const DenseClouds& v, const PipelineConfig& config,
                      std::size_t frame_index) {
    const auto& fp = config.fusion;
    FusedFrame out;
    out.intensity.kind = CloudKind::intensity;
    out.doppler.kind = CloudKind::doppler;
    out.intensity.frame_index = out.doppler.frame_index = frame_index;
    out.intensity.points.reserve(2 * fp.intensity_top_k);
    out.doppler.points.reserve(2 * fp.doppler_top_k);

    // Each radar is refined against the other's unrefined cloud. The four
    // refinements are independent.
    PointCloud h_int, v_int, h_dop, v_dop;
    const auto refine_h_int = [&] { h_int = masked_refinement(h.intensity, v.intensity, fp.knn_k); };
    const auto refine_v_int = [&] { v_int = masked_refinement(v.intensity, h.intensity, fp.knn_k); };
    const auto refine_h_dop = [&] { h_dop = masked_refinement(h.doppler, v.doppler, fp.knn_k); };
    const auto refine_v_dop = [&] { v_dop = masked_refinement(v.doppler, h.doppler, fp.knn_k); };
    if (std::thread::hardware_concurrency() > 1) {
        auto a = std::async(std::launch::async, refine_v_int);
        auto b = std::async(std::launch::async, refine_h_dop);
        auto c = std::async(std::launch::async, refine_v_dop);
        refine_h_int();
        a.get();
        b.get();
        c.get();
    } else {
        refine_h_int();
        refine_v_int();
        refine_h_dop();
        refine_v_dop();
    }

    append_keypoints(h_int, h.intensity_grid.shape(), fp.intensity_cfar, fp.intensity_top_k, out.intensity);
    append_keypoints(v_int, v.intensity_grid.shape(), fp.intensity_cfar, fp.intensity_top_k, out.intensity);
    append_keypoints(h_dop, h.doppler_cells.shape(), fp.doppler_cfar, fp.doppler_top_k, out.doppler);
    append_keypoints(v_dop, v.doppler_cells.shape(), fp.doppler_cfar, fp.doppler_top_k, out.doppler);

    for (auto* cloud : {&out.intensity, &out.doppler}) {
        std::vector<double> values(cloud->points.size());
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = cloud->points[i].value;
        gaussian_normalize(values);
        for (std::size_t i = 0; i < values.size(); ++i) cloud->points[i].value = values[i];
    }
    return out;
}

FusedFrame fuse_frame(const RawFrame& raw_h, const RawFrame& raw_v, const PipelineConfig& config) {
    config.validate();
    if (raw_h.frame_index != raw_v.frame_index)
        throw InputError("fuse_frame: frame index mismatch (" + std::to_string(raw_h.frame_index) +
                         " vs " + std::to_string(raw_v.frame_index) + ")");
    if (!raw_h.matches(config.radar) || !raw_v.matches(config.radar))
        throw InputError("fuse_frame: frame dimensions do not match config");

    DenseClouds h, v;
    if (std::thread::hardware_concurrency() > 1) {
        auto fut = std::async(std::launch::async,
                              [&] { return dense_clouds(raw_v, config, config.rig.vertical); });
        h = dense_clouds(raw_h, config, config.rig.horizontal);
        v = fut.get();
    } else {
        h = dense_clouds(raw_h, config, config.rig.horizontal);
        v = dense_clouds(raw_v, config, config.rig.vertical);
    }
    return fuse_dense(h, v, config, raw_h.frame_index);
}

}  // namespace mmfuse
