#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "vmcsim/domain.hpp"

namespace vmc {

struct MigrationRecord {
    int vm = 0;
    int source = 0;
    int dest = 0;
    double seconds = 0.0;                   // transfer duration
    double degradation_mips_seconds = 0.0;  // contribution to the VM's C_d

    friend bool operator==(const MigrationRecord&,
                           const MigrationRecord&) = default;
};

// Everything the metrics need, captured per interval. Vectors indexed by
// host are always full-length (inactive hosts carry zeros / nullopt).
struct IntervalEvent {
    double clock = 0.0;  // interval start, s
    std::vector<std::optional<LoadState>> verdicts;
    std::vector<MigrationRecord> migrations;
    std::vector<int> activated;
    std::vector<int> deactivated;
    std::vector<double> host_power_w;          // 0 when inactive
    std::vector<std::uint8_t> host_active;     // accrued Tai this interval
    std::vector<std::uint8_t> host_full_util;  // accrued Toi this interval
    std::size_t breached_vm_intervals = 0;  // residents of over-capacity hosts
    std::size_t total_vm_intervals = 0;
    std::vector<int> clamped_hosts;  // raw demand exceeded capacity
    std::vector<int> fallback_fit_hosts;
    std::vector<int> fallback_threshold_hosts;
    std::vector<int> warmup_hosts;
    std::vector<int> failed_evacuations;

    friend bool operator==(const IntervalEvent&, const IntervalEvent&) = default;
};

}  // namespace vmc
