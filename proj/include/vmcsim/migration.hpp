#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "vmcsim/domain.hpp"

namespace vmc {

struct MigrationPlan {
    struct Move {
        int vm = 0;
        int source = 0;
        int dest = 0;
    };
    std::vector<Move> moves;
    std::set<int> deactivations;
    std::set<int> failed_evacuations;
};

// Planner-side view of a host: spec plus tentative resource totals that the
// planner mutates as it assigns VMs.
struct HostLoadView {
    int index = 0;
    HostSpec spec;
    bool active = false;
    std::optional<LoadState> verdict;
    double cpu_mips = 0.0;
    double ram_mb = 0.0;
    double bw_mbs = 0.0;
    double measured_cpu_util = 0.0;  // utilization at verdict time
};

// Planner-side view of a VM: current demands plus its cpu utilization
// window (used by the correlation selector).
struct VmLoadView {
    double cpu_mips = 0.0;
    double ram_mb = 0.0;
    double bw_mbs = 0.0;
    std::vector<double> cpu_history;
};

// Pearson correlation; 0 for short series or (numerically) zero variance.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

// The candidate whose cpu series correlates most with the sum of the other
// candidates' series. Single candidate wins by default; ties (including the
// all-zero-correlation degenerate case) go to the smallest VM id.
int select_vm_max_correlation(const std::vector<int>& candidates,
                              const std::map<int, VmLoadView>& vms);

// Repeatedly picks the max-correlation VM and re-checks the verdict on the
// host's utilization with the picked VMs subtracted, until the host stops
// looking overloaded or runs out of VMs. Returns the removal order.
std::vector<int> drain_overloaded(
    const std::vector<int>& residents, const std::map<int, VmLoadView>& vms,
    const std::function<UtilizationSample(const std::vector<int>& removed)>&
        utilization_without,
    const std::function<bool(const UtilizationSample&)>& still_overloaded);

struct PlacementRequest {
    int vm = 0;
    double cpu_mips = 0.0;
    double ram_mb = 0.0;
    double bw_mbs = 0.0;
    int source_host = -1;  // -1: initial placement, no exclusion
};

struct PlacementOutcome {
    std::map<int, int> assignment;  // vm id -> host index
    std::vector<int> unplaced;
};

// Power-aware best-fit decreasing. Requests are sorted by cpu demand
// descending (ties by vm id); each goes to the candidate host with the
// smallest power increase that still fits cpu/ram/bw. Candidates never
// include the request's source, Overloaded hosts, or hosts already marked
// for deactivation; inactive hosts qualify only when allow_wake is set.
// Host views are mutated as requests land (demand added, host woken).
PlacementOutcome place_vms(std::vector<PlacementRequest> requests,
                           std::vector<HostLoadView>& hosts,
                           const std::set<int>& deactivation_marked,
                           bool allow_wake);

// Full interval plan: drain every Overloaded host and re-place the drained
// VMs (waking hosts if needed), then evacuate Underloaded hosts in ascending
// measured-utilization order, all-or-nothing, never waking hosts and never
// touching a host that already received a move this plan.
MigrationPlan plan_migrations(
    std::vector<HostLoadView> hosts,
    std::vector<std::vector<int>> residents,
    const std::map<int, VmLoadView>& vms,
    const std::function<bool(int host, const UtilizationSample&)>&
        still_overloaded);

}  // namespace vmc
