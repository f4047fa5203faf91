#include "mmfuse/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "mmfuse/errors.hpp"

namespace mmfuse {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// Line reader that tracks the byte offset of the current line.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    bool next(std::vector<std::string_view>& fields) {
        for (;;) {
            line_offset_ = offset_;
            if (!std::getline(in_, line_)) return false;
            offset_ += line_.size() + 1;
            if (trim(line_).empty()) continue;
            fields = split(line_);
            return true;
        }
    }

    void expect_header(const char* header) {
        std::vector<std::string_view> fields;
        if (!next(fields)) throw FormatError("missing CSV header", 0);
        std::string joined;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) joined += ',';
            joined += fields[i];
        }
        if (joined != header) throw FormatError("expected CSV header '" + std::string(header) + "'", line_offset_);
    }

    [[noreturn]] void fail(const std::string& what) const { throw FormatError(what, line_offset_); }

    double number(std::string_view s) const {
        double v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
            fail("invalid number '" + std::string(s) + "'");
        return v;
    }

    std::size_t index(std::string_view s) const {
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("invalid index '" + std::string(s) + "'");
        return v;
    }

private:
    std::istream& in_;
    std::string line_;
    std::uint64_t offset_ = 0, line_offset_ = 0;
};

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_cloud_csv_header(std::ostream& out) { out << kCloudCsvHeader << '\n'; }

void write_cloud_csv_rows(std::ostream& out, const FusedFrame& frame) {
    for (const auto* cloud : {&frame.intensity, &frame.doppler}) {
        const bool doppler = cloud->kind == CloudKind::doppler;
        for (const auto& p : cloud->points) {
            out << cloud->frame_index << ',' << (doppler ? "doppler" : "intensity") << ','
                << format_double(p.position.x()) << ',' << format_double(p.position.y()) << ','
                << format_double(p.position.z()) << ',' << format_double(p.value) << ',';
            if (doppler) out << format_double(p.velocity);
            out << '\n';
        }
    }
}

std::vector<CloudCsvRow> read_cloud_csv(std::istream& in) {
    CsvReader csv(in);
    csv.expect_header(kCloudCsvHeader);
    std::vector<CloudCsvRow> rows;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 7) csv.fail("expected 7 fields");
        CloudCsvRow r;
        r.frame = csv.index(f[0]);
        if (f[1] == "intensity") r.kind = CloudKind::intensity;
        else if (f[1] == "doppler") r.kind = CloudKind::doppler;
        else csv.fail("unknown cloud kind '" + std::string(f[1]) + "'");
        r.position = {csv.number(f[2]), csv.number(f[3]), csv.number(f[4])};
        r.v0 = csv.number(f[5]);
        if (r.kind == CloudKind::doppler) r.v1 = csv.number(f[6]);
        else if (!f[6].empty()) csv.fail("intensity rows must leave v1 empty");
        rows.push_back(r);
    }
    return rows;
}

JointSequence read_joint_csv(std::istream& in, double frame_rate) {
    CsvReader csv(in);
    csv.expect_header(kJointCsvHeader);
    std::map<std::size_t, std::map<int, Vec3>> frames;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 5) csv.fail("expected 5 fields");
        const std::size_t frame = csv.index(f[0]);
        int joint = -1;
        if (auto named = joint_id_from_name(f[1])) {
            joint = *named;
        } else {
            const std::size_t idx = csv.index(f[1]);
            if (idx >= static_cast<std::size_t>(kNumJoints)) csv.fail("joint index out of range");
            joint = static_cast<int>(idx);
        }
        const Vec3 pos{csv.number(f[2]), csv.number(f[3]), csv.number(f[4])};
        if (!frames[frame].emplace(joint, pos).second) csv.fail("duplicate joint in frame " + std::to_string(frame));
    }
    if (frames.empty()) throw FormatError("no joint rows", 0);

    JointSequence seq;
    seq.frame_rate = frame_rate;
    for (const auto& [id, _] : frames.begin()->second) seq.joint_ids.push_back(id);
    for (const auto& [frame, joints] : frames) {
        std::vector<int> ids;
        for (const auto& [id, _] : joints) ids.push_back(id);
        if (ids != seq.joint_ids) throw InputError("joint csv: frame " + std::to_string(frame) + " has a different joint set");
        JointFrame m(3, static_cast<Eigen::Index>(ids.size()));
        Eigen::Index c = 0;
        for (const auto& [id, pos] : joints) m.col(c++) = pos;
        seq.frames.push_back(std::move(m));
    }
    return seq;
}

JointSequence read_joint_csv(const std::filesystem::path& path, double frame_rate) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string(), 0);
    return read_joint_csv(in, frame_rate);
}

void write_joint_csv(std::ostream& out, const JointSequence& seq) {
    out << kJointCsvHeader << '\n';
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        for (std::size_t j = 0; j < seq.joint_ids.size(); ++j) {
            const auto col = seq.frames[f].col(static_cast<Eigen::Index>(j));
            out << f << ',' << kJointNames[static_cast<std::size_t>(seq.joint_ids[j])] << ','
                << format_double(col.x()) << ',' << format_double(col.y()) << ',' << format_double(col.z()) << '\n';
        }
    }
}

std::vector<Vec3> joint_trajectory(const JointSequence& seq, int joint_id) {
    const auto it = std::find(seq.joint_ids.begin(), seq.joint_ids.end(), joint_id);
    if (it == seq.joint_ids.end()) throw InputError("joint not present in sequence");
    const auto col = static_cast<Eigen::Index>(it - seq.joint_ids.begin());
    std::vector<Vec3> out;
    out.reserve(seq.frames.size());
    for (const auto& f : seq.frames) out.emplace_back(f.col(col));
    return out;
}

std::vector<Target> read_targets_csv(std::istream& in) {
    CsvReader csv(in);
    csv.expect_header(kTargetCsvHeader);
    std::vector<Target> targets;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (f.size() != 4) csv.fail("expected 4 fields");
        if (f[0].empty()) csv.fail("empty target id");
        targets.push_back({std::string(f[0]), {csv.number(f[1]), csv.number(f[2]), csv.number(f[3])}});
    }
    return targets;
}

std::vector<Target> read_targets_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string(), 0);
    return read_targets_csv(in);
}

}  // namespace mmfuse
