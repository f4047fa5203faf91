#include "mmfuse/raw_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>

#include "mmfuse/config_json.hpp"
#include "mmfuse/errors.hpp"

namespace mmfuse {

namespace {

void put_u32(std::vector<char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::vector<char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

std::int16_t quantize(double v, double scale) {
    const double q = std::nearbyint(v / scale);
    return static_cast<std::int16_t>(std::clamp(q, -32767.0, 32767.0));
}

// Reads exactly n bytes at the current position or throws a truncation error.
void read_exact(std::ifstream& in, char* dst, std::size_t n, std::uint64_t offset, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw FormatError(std::string("truncated ") + what, offset + static_cast<std::uint64_t>(in.gcount()));
    }
}

}  // namespace

std::uint64_t RawFileHeader::frame_bytes() const {
    return static_cast<std::uint64_t>(config.chirps_per_frame) * static_cast<std::uint64_t>(config.num_tx) *
           static_cast<std::uint64_t>(config.num_rx) * static_cast<std::uint64_t>(config.adc_samples_per_chirp) * 4u;
}

double choose_scale(double peak) {
    if (!(peak > 0) || !std::isfinite(peak)) return 1.0;
    double s = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(peak / 32767.0))));
    while (peak / s > 32767.0) s *= 2.0;
    while (peak / (s / 2.0) <= 32767.0) s /= 2.0;
    return s;
}

double peak_component(const RawFrame& frame) {
    double peak = 0;
    for (const auto& x : frame.samples()) peak = std::max({peak, std::abs(x.real()), std::abs(x.imag())});
    return peak;
}

double peak_component(std::span<const RawFrame> frames) {
    double peak = 0;
    for (const auto& f : frames) peak = std::max(peak, peak_component(f));
    return peak;
}

RawFileWriter::RawFileWriter(std::filesystem::path path, const RadarConfig& config, double scale,
                             std::uint32_t frame_count)
    : path_(std::move(path)), config_(config), scale_(scale), declared_(frame_count) {
    config_.validate();
    if (!(scale_ > 0) || !std::isfinite(scale_)) throw InputError("raw writer: scale must be positive");
    tmp_path_ = path_;
    tmp_path_ += ".partial";
    out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("raw writer: cannot open " + tmp_path_.string());

    const std::string cfg = to_json(config_).dump();
    std::vector<char> head(kRawMagic, kRawMagic + 4);
    put_u32(head, kRawVersion);
    put_u32(head, static_cast<std::uint32_t>(cfg.size()));
    head.insert(head.end(), cfg.begin(), cfg.end());
    put_u64(head, std::bit_cast<std::uint64_t>(scale_));
    put_u32(head, declared_);
    out_.write(head.data(), static_cast<std::streamsize>(head.size()));
}

RawFileWriter::~RawFileWriter() {
    if (!closed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void RawFileWriter::write_frame(const RawFrame& frame) {
    if (closed_) throw std::logic_error("raw writer: already closed");
    if (!frame.matches(config_)) throw InputError("raw writer: frame dimensions do not match config");
    if (written_ >= declared_) throw InputError("raw writer: more frames than declared");
    const auto samples = frame.samples();
    std::vector<char> bytes(samples.size() * 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto re = static_cast<std::uint16_t>(quantize(samples[i].real(), scale_));
        const auto im = static_cast<std::uint16_t>(quantize(samples[i].imag(), scale_));
        bytes[4 * i + 0] = static_cast<char>(re & 0xffu);
        bytes[4 * i + 1] = static_cast<char>(re >> 8);
        bytes[4 * i + 2] = static_cast<char>(im & 0xffu);
        bytes[4 * i + 3] = static_cast<char>(im >> 8);
    }
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out_) throw std::runtime_error("raw writer: write failed");
    ++written_;
}

void RawFileWriter::close() {
    if (closed_) return;
    if (written_ != declared_) {
        throw InputError("raw writer: wrote " + std::to_string(written_) + " of " + std::to_string(declared_) +
                         " declared frames");
    }
    out_.close();
    if (!out_) throw std::runtime_error("raw writer: flush failed");
    std::filesystem::rename(tmp_path_, path_);
    closed_ = true;
}

RawFileReader::RawFileReader(const std::filesystem::path& path) {
    in_.open(path, std::ios::binary);
    if (!in_) throw FormatError("cannot open " + path.string(), 0);

    std::array<char, 12> fixed{};
    read_exact(in_, fixed.data(), fixed.size(), 0, "header");
    if (std::memcmp(fixed.data(), kRawMagic, 4) != 0) throw FormatError("bad magic, expected \"SUPR\"", 0);
    const auto* u = reinterpret_cast<const unsigned char*>(fixed.data());
    header_.version = static_cast<std::uint32_t>(get_le(u + 4, 4));
    if (header_.version != kRawVersion)
        throw FormatError("unsupported version " + std::to_string(header_.version), 4);
    const auto cfg_len = static_cast<std::uint32_t>(get_le(u + 8, 4));

    const auto file_size = static_cast<std::uint64_t>(std::filesystem::file_size(path));
    if (12u + static_cast<std::uint64_t>(cfg_len) + 12u > file_size)
        throw FormatError("config block length exceeds file size", 8);
    std::string cfg(cfg_len, '\0');
    read_exact(in_, cfg.data(), cfg_len, 12, "config block");
    try {
        header_.config = radar_config_from_json(nlohmann::json::parse(cfg));
    } catch (const std::exception& e) {
        throw FormatError(std::string("invalid config block: ") + e.what(), 12);
    }

    const std::uint64_t tail_offset = 12u + cfg_len;
    std::array<char, 12> tail{};
    read_exact(in_, tail.data(), tail.size(), tail_offset, "header");
    const auto* t = reinterpret_cast<const unsigned char*>(tail.data());
    header_.scale = std::bit_cast<double>(get_le(t, 8));
    if (!(header_.scale > 0) || !std::isfinite(header_.scale))
        throw FormatError("invalid scale factor", tail_offset);
    header_.frame_count = static_cast<std::uint32_t>(get_le(t + 8, 4));
    header_.payload_offset = tail_offset + 12u;

    const std::uint64_t expected = header_.payload_offset + header_.frame_count * header_.frame_bytes();
    if (file_size < expected) throw FormatError("truncated payload", file_size);
    if (file_size > expected) throw FormatError("trailing bytes after declared frames", expected);
}

RawFrame RawFileReader::read_frame(std::size_t index) {
    if (index >= header_.frame_count) throw InputError("raw reader: frame index out of range");
    const std::uint64_t offset = header_.payload_offset + index * header_.frame_bytes();
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offset));
    std::vector<char> bytes(header_.frame_bytes());
    read_exact(in_, bytes.data(), bytes.size(), offset, "frame");

    RawFrame frame(header_.config);
    frame.frame_index = index;
    frame.timestamp = static_cast<double>(index) * header_.config.frame_period;
    auto samples = frame.samples();
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto re = static_cast<std::int16_t>(static_cast<std::uint16_t>(get_le(b + 4 * i, 2)));
        const auto im = static_cast<std::int16_t>(static_cast<std::uint16_t>(get_le(b + 4 * i + 2, 2)));
        samples[i] = cplx(re * header_.scale, im * header_.scale);
    }
    return frame;
}

void write_raw(const std::filesystem::path& path, std::span<const RawFrame> frames, const RadarConfig& config) {
    RawFileWriter writer(path, config, choose_scale(peak_component(frames)),
                         static_cast<std::uint32_t>(frames.size()));
    for (const auto& f : frames) writer.write_frame(f);
    writer.close();
}

std::vector<RawFrame> read_raw(const std::filesystem::path& path, RadarConfig* config) {
    RawFileReader reader(path);
    if (config) *config = reader.header().config;
    std::vector<RawFrame> frames;
    frames.reserve(reader.frame_count());
    for (std::size_t i = 0; i < reader.frame_count(); ++i) frames.push_back(reader.read_frame(i));
    return frames;
}

}  // namespace mmfuse
