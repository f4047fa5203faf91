#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmfuse/dwell.hpp"
#include "mmfuse/fusion.hpp"
#include "mmfuse/metrics.hpp"

namespace mmfuse {

// Point clouds: header `frame,kind,x,y,z,v0,v1`; kind is "intensity" or
// "doppler"; v0 = normalised intensity/power, v1 = velocity in m/s
// (empty for intensity rows).
inline constexpr const char* kCloudCsvHeader = "frame,kind,x,y,z,v0,v1";

void write_cloud_csv_header(std::ostream& out);
void write_cloud_csv_rows(std::ostream& out, const FusedFrame& frame);

struct CloudCsvRow {
    std::size_t frame = 0;
    CloudKind kind = CloudKind::intensity;
    Vec3 position = Vec3::Zero();
    double v0 = 0;
    double v1 = 0;
};

std::vector<CloudCsvRow> read_cloud_csv(std::istream& in);

// Joints: header `frame,joint_id,x,y,z`, meters. joint_id is a name from
// kJointNames or its integer index; output always uses names.
inline constexpr const char* kJointCsvHeader = "frame,joint_id,x,y,z";

JointSequence read_joint_csv(std::istream& in, double frame_rate = 20.0);
JointSequence read_joint_csv(const std::filesystem::path& path, double frame_rate = 20.0);
void write_joint_csv(std::ostream& out, const JointSequence& seq);

/// Positions of one joint across the sequence.
std::vector<Vec3> joint_trajectory(const JointSequence& seq, int joint_id);

// Targets: header `id,x,y,z`, meters.
inline constexpr const char* kTargetCsvHeader = "id,x,y,z";

std::vector<Target> read_targets_csv(std::istream& in);
std::vector<Target> read_targets_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace mmfuse
