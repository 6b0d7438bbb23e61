#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "vmcsim/detection.hpp"
#include "vmcsim/domain.hpp"
#include "vmcsim/events.hpp"
#include "vmcsim/metrics.hpp"
#include "vmcsim/migration.hpp"
#include "vmcsim/workload.hpp"

namespace vmc {

struct EngineConfig {
    double interval_seconds = 300.0;  // superseded by the trace's stride
    double migration_bw_fraction = 0.5;
    double migration_degradation = 0.1;
    int history_window = 12;
    std::vector<HostSpec> host_specs;
    DetectorConfig detector;
    std::uint64_t seed = 1;
    int n_threads = 1;  // >1 runs the detection sweep under OpenMP
};

// RAM transferred at the reserved slice of the source link.
inline double migration_time(double ram_in_use_mb, double bw_capacity,
                             double migration_bw_fraction) {
    return ram_in_use_mb / (bw_capacity * migration_bw_fraction);
}

// Alternating catalog of the two default host types.
std::vector<HostSpec> default_host_fleet(std::size_t n);

// Cycles four fixed VM shapes over the given ids.
std::vector<VmSpec> default_vm_fleet(std::span<const int> vm_ids);

class Simulation {
  public:
    Simulation(EngineConfig config, WorkloadTrace trace,
               std::vector<VmSpec> vms);

    // Initial placement from first-interval demands. Throws when any VM fits
    // nowhere, listing the stranded VMs.
    void initialize();

    bool done() const { return next_interval_ >= trace_.n_intervals(); }
    IntervalEvent step_once();
    const ClusterState& cluster() const { return cluster_; }
    double interval_seconds() const { return trace_.interval_seconds; }

    // Folds the event log into the final metrics.
    SimulationResult finish();

  private:
    UtilizationSample host_utilization(std::size_t h, bool* clamped) const;
    void apply_plan(const MigrationPlan& plan, IntervalEvent& event);

    EngineConfig config_;
    WorkloadTrace trace_;
    std::vector<VmSpec> vms_;
    std::map<int, std::size_t> vm_index_;         // id -> trace/vms_ index
    std::map<int, VmLoadView> vm_views_;          // demand + cpu window
    ClusterState cluster_;
    std::vector<IntervalEvent> events_;
    std::size_t next_interval_ = 0;
    bool initialized_ = false;
};

SimulationResult run_simulation(const EngineConfig& config,
                                const WorkloadTrace& trace,
                                const std::vector<VmSpec>& vms);

}  // namespace vmc
