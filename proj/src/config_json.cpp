#include "mmfuse/config_json.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "mmfuse/errors.hpp"

namespace mmfuse {

using nlohmann::json;

namespace {

void require_object(const json& j, std::string_view what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
}

void reject_unknown(const json& j, std::string_view what, std::initializer_list<std::string_view> allowed) {
    require_object(j, what);
    for (const auto& item : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || item.key() == a;
        if (!ok) throw ConfigError(std::string(what) + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view what) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": bad value for '" + key + "': " + e.what());
    }
}

Vec3 vec3(const json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + ": expected [x, y, z]");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_number()) throw ConfigError(std::string(what) + ": expected numbers");
        v[i] = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

CfarParams cfar_from_json(const json& j, std::size_t dims, std::string_view what) {
    reject_unknown(j, what, {"guard_cells", "training_cells", "threshold_factor", "pfa"});
    CfarParams p = CfarParams::uniform(dims);
    read(j, "guard_cells", p.guard_cells, what);
    read(j, "training_cells", p.training_cells, what);
    if (p.guard_cells.size() != dims || p.training_cells.size() != dims)
        throw ConfigError(std::string(what) + ": expected " + std::to_string(dims) + " per-dimension entries");
    if (j.contains("threshold_factor") && j.contains("pfa"))
        throw ConfigError(std::string(what) + ": give threshold_factor or pfa, not both");
    read(j, "threshold_factor", p.threshold_factor, what);
    if (j.contains("pfa")) {
        double pfa = 0;
        read(j, "pfa", pfa, what);
        std::size_t outer = 1, inner = 1;
        for (std::size_t d = 0; d < dims; ++d) {
            outer *= static_cast<std::size_t>(2 * (p.guard_cells[d] + p.training_cells[d]) + 1);
            inner *= static_cast<std::size_t>(2 * p.guard_cells[d] + 1);
        }
        try {
            p.threshold_factor = CfarParams::threshold_for_pfa(pfa, outer - inner);
        } catch (const ParameterError& e) {
            throw ConfigError(std::string(what) + ": " + e.what());
        }
    }
    return p;
}

}  // namespace

RadarConfig radar_config_from_json(const json& j) {
    constexpr std::string_view what = "radar config";
    reject_unknown(j, what,
                   {"num_tx", "num_rx", "adc_samples_per_chirp", "chirps_per_frame", "frame_period",
                    "start_freq", "end_freq", "ramp_time", "idle_time", "range_fft_size", "doppler_fft_size"});
    RadarConfig c;
    read(j, "num_tx", c.num_tx, what);
    read(j, "num_rx", c.num_rx, what);
    read(j, "adc_samples_per_chirp", c.adc_samples_per_chirp, what);
    read(j, "chirps_per_frame", c.chirps_per_frame, what);
    read(j, "frame_period", c.frame_period, what);
    read(j, "start_freq", c.start_freq, what);
    read(j, "end_freq", c.end_freq, what);
    read(j, "ramp_time", c.ramp_time, what);
    read(j, "idle_time", c.idle_time, what);
    read(j, "range_fft_size", c.range_fft_size, what);
    read(j, "doppler_fft_size", c.doppler_fft_size, what);
    c.validate();
    return c;
}

json to_json(const RadarConfig& c) {
    return json{{"num_tx", c.num_tx},
                {"num_rx", c.num_rx},
                {"adc_samples_per_chirp", c.adc_samples_per_chirp},
                {"chirps_per_frame", c.chirps_per_frame},
                {"frame_period", c.frame_period},
                {"start_freq", c.start_freq},
                {"end_freq", c.end_freq},
                {"ramp_time", c.ramp_time},
                {"idle_time", c.idle_time},
                {"range_fft_size", c.range_fft_size},
                {"doppler_fft_size", c.doppler_fft_size}};
}

Roi roi_from_json(const json& j) {
    constexpr std::string_view what = "roi";
    reject_unknown(j, what, {"range_min", "range_max", "explicit_bin_count"});
    Roi r;
    read(j, "range_min", r.range_min, what);
    read(j, "range_max", r.range_max, what);
    if (j.contains("explicit_bin_count") && !j.at("explicit_bin_count").is_null()) {
        int n = 0;
        read(j, "explicit_bin_count", n, what);
        r.explicit_bin_count = n;
    }
    try {
        r.validate();
    } catch (const RoiError& e) {
        throw ConfigError(e.what());
    }
    return r;
}

Rig rig_from_json(const json& j) {
    constexpr std::string_view what = "rig";
    reject_unknown(j, what, {"radars", "pitch_deg", "baseline", "height"});
    if (!j.contains("radars")) {
        double pitch = 20.0, baseline = 0.15, height = 1.5;
        read(j, "pitch_deg", pitch, what);
        read(j, "baseline", baseline, what);
        read(j, "height", height, what);
        return Rig::default_rig(pitch, baseline, height);
    }
    if (j.size() != 1) throw ConfigError("rig: 'radars' cannot be combined with parametric keys");
    const json& arr = j.at("radars");
    if (!arr.is_array()) throw ConfigError("rig: 'radars' must be an array");
    std::vector<RadarPose> poses;
    for (const auto& r : arr) {
        reject_unknown(r, "rig radar", {"role", "rotation", "translation"});
        RadarPose pose;
        std::string role = "horizontal";
        read(r, "role", role, "rig radar");
        if (role == "horizontal") pose.role = RadarRole::horizontal;
        else if (role == "vertical") pose.role = RadarRole::vertical;
        else throw ConfigError("rig radar: role must be 'horizontal' or 'vertical'");
        if (r.contains("rotation")) {
            const json& rot = r.at("rotation");
            if (!rot.is_array() || rot.size() != 3) throw ConfigError("rig radar: rotation must be 3x3");
            for (int i = 0; i < 3; ++i) pose.rotation.row(i) = vec3(rot[static_cast<std::size_t>(i)], "rig radar rotation").transpose();
        }
        if (r.contains("translation")) pose.translation = vec3(r.at("translation"), "rig radar translation");
        poses.push_back(pose);
    }
    return Rig::from_poses(poses);
}

FusionParams fusion_params_from_json(const json& j) {
    constexpr std::string_view what = "fusion";
    reject_unknown(j, what,
                   {"alpha", "knn_k", "intensity_cfar", "doppler_cfar", "intensity_top_k", "doppler_top_k",
                    "window", "angle_fft_size"});
    FusionParams f;
    read(j, "alpha", f.alpha, what);
    read(j, "knn_k", f.knn_k, what);
    read(j, "intensity_top_k", f.intensity_top_k, what);
    read(j, "doppler_top_k", f.doppler_top_k, what);
    read(j, "angle_fft_size", f.angle_fft_size, what);
    if (j.contains("intensity_cfar")) f.intensity_cfar = cfar_from_json(j.at("intensity_cfar"), 3, "intensity_cfar");
    if (j.contains("doppler_cfar")) f.doppler_cfar = cfar_from_json(j.at("doppler_cfar"), 2, "doppler_cfar");
    if (j.contains("window")) {
        std::string w;
        read(j, "window", w, what);
        if (w == "rectangular") f.window = WindowKind::rectangular;
        else if (w == "hann") f.window = WindowKind::hann;
        else throw ConfigError("fusion: window must be 'rectangular' or 'hann'");
    }
    return f;
}

PipelineConfig pipeline_config_from_json(const json& j) {
    reject_unknown(j, "config", {"radar", "roi", "rig", "fusion"});
    PipelineConfig c;
    if (j.contains("radar")) c.radar = radar_config_from_json(j.at("radar"));
    if (j.contains("roi")) c.roi = roi_from_json(j.at("roi"));
    if (j.contains("rig")) c.rig = rig_from_json(j.at("rig"));
    if (j.contains("fusion")) c.fusion = fusion_params_from_json(j.at("fusion"));
    c.validate();
    return c;
}

SceneTrajectory scene_from_json(const json& j) {
    constexpr std::string_view what = "scene";
    reject_unknown(j, what, {"noise_std", "seed", "scatterers"});
    SceneTrajectory t;
    read(j, "noise_std", t.noise_std, what);
    read(j, "seed", t.seed, what);
    if (!(t.noise_std >= 0)) throw ConfigError("scene: noise_std must be >= 0");
    if (j.contains("scatterers")) {
        const json& arr = j.at("scatterers");
        if (!arr.is_array()) throw ConfigError("scene: 'scatterers' must be an array");
        for (const auto& s : arr) {
            reject_unknown(s, "scatterer", {"position", "amplitude", "velocity", "keyframes"});
            TrackedScatterer ts;
            if (s.contains("position")) ts.initial.position = vec3(s.at("position"), "scatterer position");
            if (s.contains("velocity")) ts.initial.velocity = vec3(s.at("velocity"), "scatterer velocity");
            read(s, "amplitude", ts.initial.amplitude, "scatterer");
            if (!(ts.initial.amplitude >= 0)) throw ConfigError("scatterer: amplitude must be >= 0");
            if (s.contains("keyframes")) {
                if (s.contains("velocity"))
                    throw ConfigError("scatterer: keyframed scatterers derive velocity; drop 'velocity'");
                for (const auto& k : s.at("keyframes")) {
                    reject_unknown(k, "keyframe", {"frame", "position"});
                    if (!k.contains("frame") || !k.contains("position"))
                        throw ConfigError("keyframe: 'frame' and 'position' are required");
                    TrackedScatterer::Keyframe kf;
                    read(k, "frame", kf.frame, "keyframe");
                    kf.position = vec3(k.at("position"), "keyframe position");
                    if (!ts.keyframes.empty() && !(kf.frame > ts.keyframes.back().frame))
                        throw ConfigError("keyframe: frames must be strictly increasing");
                    ts.keyframes.push_back(kf);
                }
            } else if (!s.contains("position")) {
                throw ConfigError("scatterer: 'position' or 'keyframes' required");
            }
            t.scatterers.push_back(std::move(ts));
        }
    }
    return t;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace mmfuse
