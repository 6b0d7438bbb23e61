#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vmcsim/domain.hpp"

namespace vmc {

struct WorkloadTrace {
    double interval_seconds = 300.0;
    std::vector<int> vm_ids;                             // ascending
    std::vector<std::vector<UtilizationSample>> series;  // [vm index][interval]

    std::size_t n_intervals() const {
        return series.empty() ? 0 : series.front().size();
    }

    friend bool operator==(const WorkloadTrace&, const WorkloadTrace&) = default;
};

struct TraceLoadResult {
    WorkloadTrace trace;
    std::size_t clamped_values = 0;
};

// CSV with header `time,vm_id,cpu,ram,bw`. Rows may come in any order;
// utilizations outside [0,1] are clamped and tallied. Throws
// TraceFormatError on malformed rows or ragged/non-uniform time grids.
TraceLoadResult load_trace(std::istream& in);

void write_trace_csv(const WorkloadTrace& trace, std::ostream& out);

// Every sample is drawn uniformly from [mean-spread, mean+spread] clamped to
// [0,1], one draw per resource. Draw order: interval-major, then VM, then
// cpu/ram/bw, so a fixed seed pins the whole trace.
WorkloadTrace generate_random_workload(std::uint64_t seed, int n_vms,
                                       int n_intervals, double mean,
                                       double spread);

}  // namespace vmc
