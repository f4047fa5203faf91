#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "mmfuse/core_types.hpp"
#include "mmfuse/scene_sim.hpp"

namespace mmfuse {

// Raw capture file, all integers little-endian:
//
//   "SUPR"            4 bytes magic
//   version           u32 (currently 1)
//   config_length     u32
//   config            config_length bytes of RadarConfig JSON
//   scale             f64, volts-per-count style factor: value = count * scale
//   frame_count       u32
//   payload           frame_count frames, each [loop][tx][rx][sample] of
//                     (I, Q) signed 16-bit pairs
//
// Timestamps are not stored; frame i is at i * frame_period.

inline constexpr char kRawMagic[4] = {'S', 'U', 'P', 'R'};
inline constexpr std::uint32_t kRawVersion = 1;

struct RawFileHeader {
    std::uint32_t version = kRawVersion;
    RadarConfig config;
    double scale = 1.0;
    std::uint32_t frame_count = 0;
    std::uint64_t payload_offset = 0;

    std::uint64_t frame_bytes() const;
};

/// Power-of-two quantisation step that maps `peak` into 16-bit range. A
/// power of two keeps re-quantisation of already-quantised data exact.
double choose_scale(double peak);

/// Largest |I| or |Q| over the frames.
double peak_component(std::span<const RawFrame> frames);
double peak_component(const RawFrame& frame);

/// Streams frames to `path`. Output goes to a temporary file that is
/// renamed into place by close(); on any failure nothing is left behind.
class RawFileWriter {
public:
    RawFileWriter(std::filesystem::path path, const RadarConfig& config, double scale,
                  std::uint32_t frame_count);
    ~RawFileWriter();
    RawFileWriter(const RawFileWriter&) = delete;
    RawFileWriter& operator=(const RawFileWriter&) = delete;

    void write_frame(const RawFrame& frame);
    /// Verifies the declared frame count and commits the file.
    void close();

private:
    std::filesystem::path path_, tmp_path_;
    RadarConfig config_;
    double scale_;
    std::uint32_t declared_, written_ = 0;
    std::ofstream out_;
    bool closed_ = false;
};

/// Random-access reader; the header is validated against the file size
/// on open.
class RawFileReader {
public:
    explicit RawFileReader(const std::filesystem::path& path);

    const RawFileHeader& header() const { return header_; }
    std::size_t frame_count() const { return header_.frame_count; }

    RawFrame read_frame(std::size_t index);

private:
    std::ifstream in_;
    RawFileHeader header_;
};

/// Writes the frames with a scale chosen from their peak component.
void write_raw(const std::filesystem::path& path, std::span<const RawFrame> frames, const RadarConfig& config);

std::vector<RawFrame> read_raw(const std::filesystem::path& path, RadarConfig* config = nullptr);

}  // namespace mmfuse
