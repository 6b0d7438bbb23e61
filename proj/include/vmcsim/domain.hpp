#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace vmc {

// Utilization fractions for one entity (VM or host) at one interval.
struct UtilizationSample {
    double cpu = 0.0;
    double ram = 0.0;
    double bw = 0.0;

    friend bool operator==(const UtilizationSample&,
                           const UtilizationSample&) = default;
};

struct HostSpec {
    double mips_capacity = 0.0;  // MIPS
    double ram_capacity = 0.0;   // MB
    double bw_capacity = 0.0;    // MB/s
    double power_idle = 0.0;     // W
    double power_max = 0.0;      // W
    std::string name;
};

struct VmSpec {
    int id = 0;
    double mips_request = 0.0;
    double ram_request = 0.0;
    double bw_request = 0.0;
};

enum class LoadState { Overloaded, Underloaded, Normal };

const char* to_string(LoadState state);

struct HostState {
    HostSpec spec;
    bool active = false;
    std::vector<int> resident_vms;           // kept sorted ascending
    std::vector<UtilizationSample> history;  // oldest first, sliding window
    double total_active_seconds = 0.0;
    double total_full_utilization_seconds = 0.0;

    // Appends a sample, dropping the oldest entries beyond `window`.
    void push_history(const UtilizationSample& sample, std::size_t window);
    void add_vm(int vm);
    void remove_vm(int vm);
    bool hosts_vm(int vm) const;
};

struct ClusterState {
    std::vector<HostState> hosts;
    std::map<int, int> vm_assignment;  // VM id -> host index
    double clock = 0.0;                // s
};

// Returns one finding per violated invariant; empty means the cluster is
// consistent.
std::vector<std::string> validate_cluster(const ClusterState& cluster);

// Linear draw between idle and peak as cpu utilization goes 0 -> 1.
inline double host_power(const HostSpec& spec, double cpu_utilization) {
    return spec.power_idle +
           (spec.power_max - spec.power_idle) * cpu_utilization;
}

inline double clamp01(double x) {
    if (x < 0.0) return 0.0;
    if (x > 1.0) return 1.0;
    return x;
}

}  // namespace vmc
