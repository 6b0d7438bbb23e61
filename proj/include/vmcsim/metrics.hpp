#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vmcsim/domain.hpp"
#include "vmcsim/events.hpp"

namespace vmc {

struct SimulationResult {
    double energy_kwh = 0.0;
    double sla_violation_pct = 0.0;  // capacity-breach definition
    double slatah = 0.0;
    double pdm = 0.0;
    double slav = 0.0;
    double esv = 0.0;
    std::size_t migrations = 0;
    std::vector<IntervalEvent> events;

    // Inputs kept so the metrics can be recomputed from the event log alone.
    double interval_seconds = 0.0;
    std::vector<VmSpec> vms;
    std::size_t n_hosts = 0;
};

// Mean of Toi/Tai over hosts that were ever active (Tai > 0). Throws
// UndefinedMetric when no host ever ran.
double slatah(std::span<const std::pair<double, double>> toi_tai);

// Mean of C_d/C_r over all VMs; never-migrated VMs contribute 0. Throws
// UndefinedMetric on an empty VM set.
double pdm(std::span<const std::pair<double, double>> cd_cr);

inline double slav(double slatah_value, double pdm_value) {
    return slatah_value * pdm_value;
}

inline double esv(double energy_kwh, double slav_value) {
    return energy_kwh * slav_value;
}

// 100 * breached VM-intervals / total VM-intervals.
double sla_violation_pct(std::span<const IntervalEvent> events);

// Sum of per-host power draw over every interval, converted to kWh.
double total_energy_kwh(std::span<const IntervalEvent> events,
                        double interval_seconds);

// Derives every metric from the event log; the engine stores exactly this.
SimulationResult compute_metrics(std::vector<IntervalEvent> events,
                                 double interval_seconds,
                                 std::vector<VmSpec> vms, std::size_t n_hosts);

}  // namespace vmc
