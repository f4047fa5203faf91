#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmfuse {

/// Invalid radar/pipeline configuration. The message names the violated invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Region of interest that selects no range bins.
class RoiError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed in-memory input (dimension mismatch, empty reference cloud, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bad algorithm parameter (CFAR window, top-k count, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed file contents. Carries the byte offset at which parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// A correlation matrix that cannot be inverted, even after diagonal loading.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(std::size_t range_bin)
        : std::runtime_error("singular correlation matrix at range bin " +
                             std::to_string(range_bin)),
          range_bin_(range_bin) {}

    std::size_t range_bin() const noexcept { return range_bin_; }

private:
    std::size_t range_bin_;
};

/// Joint set with fewer than two independent directions (coincident or collinear).
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(std::size_t frame)
        : std::runtime_error("degenerate joint set in frame " + std::to_string(frame)),
          frame_(frame) {}

    std::size_t frame() const noexcept { return frame_; }

private:
    std::size_t frame_;
};

}  // namespace mmfuse
