#include "mmfuse/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmfuse/config_json.hpp"
#include "mmfuse/csv_io.hpp"
#include "mmfuse/dwell.hpp"
#include "mmfuse/errors.hpp"
#include "mmfuse/fusion.hpp"
#include "mmfuse/metrics.hpp"
#include "mmfuse/raw_io.hpp"
#include "mmfuse/scene_sim.hpp"

namespace mmfuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Text output written next to its destination and renamed on commit, so a
/// failed command never leaves a partial file behind.
class AtomicTextFile {
public:
    explicit AtomicTextFile(fs::path path) : path_(std::move(path)), tmp_(path_) {
        tmp_ += ".partial";
        out_.open(tmp_, std::ios::trunc);
        if (!out_) throw std::runtime_error("cannot open " + tmp_.string());
    }
    ~AtomicTextFile() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            fs::remove(tmp_, ec);
        }
    }
    AtomicTextFile(const AtomicTextFile&) = delete;
    AtomicTextFile& operator=(const AtomicTextFile&) = delete;

    std::ostream& stream() { return out_; }

    void commit() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed: " + tmp_.string());
        fs::rename(tmp_, path_);
        committed_ = true;
    }

private:
    fs::path path_, tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

void emit_json(const json& doc, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << doc.dump(2) << '\n';
        return;
    }
    AtomicTextFile file(path);
    file.stream() << doc.dump(2) << '\n';
    file.commit();
}

PipelineConfig load_pipeline(const std::string& path) {
    if (path.empty()) return {};
    return pipeline_config_from_json(load_json_file(path));
}

struct SimulateArgs {
    std::string scene, config, out_h, out_v;
    std::size_t frames = 10;
    std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& err) {
    SceneTrajectory traj = scene_from_json(load_json_file(a.scene));
    if (a.seed) traj.seed = *a.seed;
    const PipelineConfig cfg = load_pipeline(a.config);
    if (a.frames == 0) throw InputError("simulate: --frames must be >= 1");
    if (a.frames > std::numeric_limits<std::uint32_t>::max()) throw InputError("simulate: too many frames");

    const auto frame_at = [&](std::size_t f, const RadarPose& pose) {
        return simulate_frame(traj.at_frame(f, cfg.radar.frame_period), cfg.radar, pose, f);
    };

    // Pass 1 fixes each file's quantisation scale from its peak; pass 2
    // regenerates (deterministically) and streams the frames out.
    double peak_h = 0, peak_v = 0;
    std::set<std::string> warned;
    for (std::size_t f = 0; f < a.frames; ++f) {
        for (const RadarPose* pose : {&cfg.rig.horizontal, &cfg.rig.vertical}) {
            const RawFrame frame = frame_at(f, *pose);
            double& peak = pose->role == RadarRole::horizontal ? peak_h : peak_v;
            peak = std::max(peak, peak_component(frame));
            for (const auto& w : frame.warnings) {
                const std::string msg = std::string(to_string(pose->role)) + ": scatterer " + std::to_string(w.scatterer) +
                                        ": " + w.message;
                if (warned.insert(msg).second) err << "warning: " << msg << '\n';
            }
        }
    }

    const auto n = static_cast<std::uint32_t>(a.frames);
    RawFileWriter wh(a.out_h, cfg.radar, choose_scale(peak_h), n);
    RawFileWriter wv(a.out_v, cfg.radar, choose_scale(peak_v), n);
    for (std::size_t f = 0; f < a.frames; ++f) {
        wh.write_frame(frame_at(f, cfg.rig.horizontal));
        wv.write_frame(frame_at(f, cfg.rig.vertical));
    }
    wh.close();
    wv.close();
    return kExitOk;
}

struct ProcessArgs {
    std::string in_h, in_v, config, out;
};

int cmd_process(const ProcessArgs& a) {
    RawFileReader rh(a.in_h);
    RawFileReader rv(a.in_v);
    if (!(rh.header().config == rv.header().config))
        throw InputError("process: the two raw files were recorded with different radar configs");
    if (rh.frame_count() != rv.frame_count())
        throw InputError("process: frame counts differ (" + std::to_string(rh.frame_count()) + " vs " +
                         std::to_string(rv.frame_count()) + ")");

    PipelineConfig cfg;
    if (!a.config.empty()) {
        const json doc = load_json_file(a.config);
        cfg = pipeline_config_from_json(doc);
        if (doc.contains("radar") && !(cfg.radar == rh.header().config))
            throw InputError("process: radar config does not match the raw files");
    }
    cfg.radar = rh.header().config;
    cfg.validate();

    AtomicTextFile out(a.out);
    write_cloud_csv_header(out.stream());
    for (std::size_t f = 0; f < rh.frame_count(); ++f) {
        write_cloud_csv_rows(out.stream(), fuse_frame(rh.read_frame(f), rv.read_frame(f), cfg));
    }
    out.commit();
    return kExitOk;
}

struct EvalArgs {
    std::string pred, gt, out;
    double threshold_mm = 15.0;
};

int cmd_eval_pose(const EvalArgs& a, std::ostream& out) {
    const JointSequence pred = read_joint_csv(fs::path(a.pred));
    const JointSequence gt = read_joint_csv(fs::path(a.gt));
    json doc{{"frames", gt.num_frames()},
             {"joints", gt.joint_ids.size()},
             {"mpjpe_mm", mpjpe(pred, gt)},
             {"pa_mpjpe_mm", pa_mpjpe(pred, gt)},
             {"pck", pck(pred, gt, a.threshold_mm)},
             {"pck_threshold_mm", a.threshold_mm},
             {"joint_mse_loss_mm", joint_mse_loss(pred, gt)}};
    emit_json(doc, a.out, out);
    return kExitOk;
}

struct InteractArgs {
    std::string trajectory, targets, joint = "right_wrist", out;
    double fps = 20.0, window_s = 1.0, threshold_mm = 100.0, box = 0.2;
};

int cmd_interact(const InteractArgs& a, std::ostream& out) {
    const auto joint = joint_id_from_name(a.joint);
    if (!joint) throw InputError("interact: unknown joint '" + a.joint + "'");
    if (!(a.fps > 0)) throw InputError("interact: --fps must be positive");
    const JointSequence seq = read_joint_csv(fs::path(a.trajectory), a.fps);
    const std::vector<Target> targets = read_targets_csv(fs::path(a.targets));
    const std::vector<Vec3> traj = joint_trajectory(seq, *joint);

    const auto events = detect_dwell_intervals(traj, a.fps, {a.window_s, a.threshold_mm});
    const MatchReport report = match_targets(events, targets, a.box);

    json ev = json::array();
    for (const auto& e : report.events) {
        ev.push_back({{"start_frame", e.start_frame},
                      {"end_frame", e.end_frame},
                      {"centroid", {e.centroid.x(), e.centroid.y(), e.centroid.z()}},
                      {"target", e.matched_target ? json(*e.matched_target) : json(nullptr)}});
    }
    json doc{{"joint", a.joint},
             {"frames", traj.size()},
             {"events", ev},
             {"matched", report.matched},
             {"hit_rate", report.hit_rate}};
    emit_json(doc, a.out, out);
    return kExitOk;
}

int cmd_inspect(const std::string& in, std::ostream& out) {
    RawFileReader reader(in);
    const auto& h = reader.header();
    const DerivedParams d = derive_params(h.config);
    out << "version        " << h.version << '\n'
        << "frames         " << h.frame_count << '\n'
        << "scale          " << format_double(h.scale) << '\n'
        << "frame bytes    " << h.frame_bytes() << '\n'
        << "config         " << to_json(h.config).dump() << '\n'
        << "range bin (m)  " << format_double(d.range_bin) << '\n'
        << "velocity bin   " << format_double(d.velocity_bin) << '\n'
        << "frame  energy  peak\n";
    for (std::size_t f = 0; f < reader.frame_count(); ++f) {
        const RawFrame frame = reader.read_frame(f);
        double energy = 0;
        for (const auto& x : frame.samples()) energy += std::norm(x);
        out << f << "  " << format_double(energy) << "  " << format_double(peak_component(frame)) << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual-radar point-cloud toolkit", "mmfuse"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate a scene into a pair of raw files");
    s->add_option("--scene", sim.scene, "Scene JSON")->required();
    s->add_option("--config", sim.config, "Pipeline config JSON (radar + rig)");
    s->add_option("--frames", sim.frames, "Number of frames");
    s->add_option("--seed", sim.seed, "Override the scene noise seed");
    s->add_option("--out-h", sim.out_h, "Horizontal radar output")->required();
    s->add_option("--out-v", sim.out_v, "Vertical radar output")->required();

    ProcessArgs proc;
    auto* p = app.add_subcommand("process", "Fuse a raw file pair into point clouds");
    p->add_option("--in-h", proc.in_h, "Horizontal radar raw file")->required();
    p->add_option("--in-v", proc.in_v, "Vertical radar raw file")->required();
    p->add_option("--config", proc.config, "Pipeline config JSON");
    p->add_option("--out", proc.out, "Output CSV")->required();

    EvalArgs ev;
    auto* e = app.add_subcommand("eval-pose", "Pose metrics for predicted vs ground-truth joints");
    e->add_option("--pred", ev.pred, "Predicted joint CSV")->required();
    e->add_option("--gt", ev.gt, "Ground-truth joint CSV")->required();
    e->add_option("--threshold", ev.threshold_mm, "PCK threshold in mm");
    e->add_option("--out", ev.out, "Report JSON (default: stdout)");

    InteractArgs ia;
    auto* i = app.add_subcommand("interact", "Detect dwell events and match them to targets");
    i->add_option("--trajectory", ia.trajectory, "Joint CSV")->required();
    i->add_option("--targets", ia.targets, "Targets CSV")->required();
    i->add_option("--joint", ia.joint, "Joint to track");
    i->add_option("--fps", ia.fps, "Frame rate");
    i->add_option("--window", ia.window_s, "Window length in seconds");
    i->add_option("--threshold-mm", ia.threshold_mm, "Path-length threshold in mm");
    i->add_option("--box", ia.box, "Target box side in meters");
    i->add_option("--out", ia.out, "Report JSON (default: stdout)");

    std::string inspect_in;
    auto* n = app.add_subcommand("inspect", "Print a raw file's header and per-frame energy");
    n->add_option("--in", inspect_in, "Raw file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_simulate(sim, err);
        if (p->parsed()) return cmd_process(proc);
        if (e->parsed()) return cmd_eval_pose(ev, out);
        if (i->parsed()) return cmd_interact(ia, out);
        if (n->parsed()) return cmd_inspect(inspect_in, out);
    } catch (const FormatError& ex) {
        err << "error: " << ex.what() << " (byte offset " << ex.offset() << ")\n";
        return kExitData;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace mmfuse::cli
