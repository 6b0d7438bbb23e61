#include "vmcsim/metrics.hpp"

#include <map>

#include "vmcsim/errors.hpp"

namespace vmc {

double slatah(std::span<const std::pair<double, double>> toi_tai) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& [toi, tai] : toi_tai) {
        if (tai <= 0.0) continue;  // never-active hosts are excluded
        sum += toi / tai;
        ++counted;
    }
    if (counted == 0) throw UndefinedMetric("slatah: no host was ever active");
    return sum / double(counted);
}

double pdm(std::span<const std::pair<double, double>> cd_cr) {
    if (cd_cr.empty()) throw UndefinedMetric("pdm: no VMs");
    double sum = 0.0;
    for (const auto& [cd, cr] : cd_cr) {
        if (cd == 0.0) continue;
        sum += cd / cr;
    }
    return sum / double(cd_cr.size());
}

double sla_violation_pct(std::span<const IntervalEvent> events) {
    std::size_t breached = 0, total = 0;
    for (const IntervalEvent& e : events) {
        breached += e.breached_vm_intervals;
        total += e.total_vm_intervals;
    }
    if (total == 0) return 0.0;
    return 100.0 * double(breached) / double(total);
}

double total_energy_kwh(std::span<const IntervalEvent> events,
                        double interval_seconds) {
    double joules = 0.0;
    for (const IntervalEvent& e : events) {
        for (double p : e.host_power_w) joules += p * interval_seconds;
    }
    return joules / 3.6e6;
}

SimulationResult compute_metrics(std::vector<IntervalEvent> events,
                                 double interval_seconds,
                                 std::vector<VmSpec> vms,
                                 std::size_t n_hosts) {
    SimulationResult result;

    std::vector<std::pair<double, double>> toi_tai(n_hosts, {0.0, 0.0});
    for (const IntervalEvent& e : events) {
        for (std::size_t h = 0; h < n_hosts && h < e.host_active.size(); ++h) {
            if (e.host_active[h]) toi_tai[h].second += interval_seconds;
            if (e.host_full_util[h]) toi_tai[h].first += interval_seconds;
        }
    }

    std::map<int, double> degradation;  // C_d per VM
    std::size_t migrations = 0;
    for (const IntervalEvent& e : events) {
        migrations += e.migrations.size();
        for (const MigrationRecord& m : e.migrations)
            degradation[m.vm] += m.degradation_mips_seconds;
    }

    const double lifetime = double(events.size()) * interval_seconds;
    std::vector<std::pair<double, double>> cd_cr;
    cd_cr.reserve(vms.size());
    for (const VmSpec& vm : vms) {
        auto it = degradation.find(vm.id);
        double cd = it == degradation.end() ? 0.0 : it->second;
        cd_cr.emplace_back(cd, vm.mips_request * lifetime);
    }

    result.energy_kwh = total_energy_kwh(events, interval_seconds);
    result.sla_violation_pct = sla_violation_pct(events);
    result.slatah = slatah(toi_tai);
    result.pdm = pdm(cd_cr);
    result.slav = slav(result.slatah, result.pdm);
    result.esv = esv(result.energy_kwh, result.slav);
    result.migrations = migrations;
    result.events = std::move(events);
    result.interval_seconds = interval_seconds;
    result.vms = std::move(vms);
    result.n_hosts = n_hosts;
    return result;
}

}  // namespace vmc
