#pragma once

#include <stdexcept>
#include <string>

namespace vmc {

// Thrown when the OLS design matrix is rank deficient (e.g. a constant
// utilization column). Carries the offending column so callers can report it.
struct SingularFit : std::runtime_error {
    explicit SingularFit(std::string column_name)
        : std::runtime_error("singular fit: column '" + column_name +
                             "' is linearly dependent"),
          column(std::move(column_name)) {}

    std::string column;
};

// Thrown when no swarm position or history sample qualifies as a threshold
// (no cpu strictly below 1 for the upper, or none strictly above 0 for the
// lower).
struct NoValidThreshold : std::runtime_error {
    NoValidThreshold() : std::runtime_error("no valid threshold candidate") {}
};

// Trace parsing problems. `line` is 1-based; 0 means the problem is
// structural (spans the whole file) rather than tied to one row.
struct TraceFormatError : std::runtime_error {
    TraceFormatError(std::size_t line_no, const std::string& what_arg)
        : std::runtime_error("trace line " + std::to_string(line_no) + ": " +
                             what_arg),
          line(line_no) {}

    explicit TraceFormatError(const std::string& what_arg)
        : std::runtime_error("trace: " + what_arg), line(0) {}

    std::size_t line;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vmc
