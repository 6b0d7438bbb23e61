#include "vmcsim/migration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vmc {

double pearson_correlation(std::span<const double> a,
                           std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(n);
    mb /= double(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    // Constant series only look non-constant through rounding noise; treat
    // them as zero correlation rather than dividing by ~0.
    const double tiny = 1e-20 * double(n);
    if (saa <= tiny || sbb <= tiny) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

int select_vm_max_correlation(const std::vector<int>& candidates,
                              const std::map<int, VmLoadView>& vms) {
    if (candidates.empty())
        throw std::invalid_argument("select_vm_max_correlation: empty host");
    if (candidates.size() == 1) return candidates.front();

    std::vector<int> order(candidates);
    std::sort(order.begin(), order.end());

    int best_vm = order.front();
    double best_corr = -std::numeric_limits<double>::infinity();
    for (int vm : order) {
        const std::vector<double>& own = vms.at(vm).cpu_history;
        std::vector<double> rest(own.size(), 0.0);
        for (int other : order) {
            if (other == vm) continue;
            const std::vector<double>& h = vms.at(other).cpu_history;
            for (std::size_t i = 0; i < rest.size() && i < h.size(); ++i)
                rest[i] += h[i];
        }
        double corr = pearson_correlation(own, rest);
        if (corr > best_corr) {
            best_corr = corr;
            best_vm = vm;
        }
    }
    return best_vm;
}

std::vector<int> drain_overloaded(
    const std::vector<int>& residents, const std::map<int, VmLoadView>& vms,
    const std::function<UtilizationSample(const std::vector<int>& removed)>&
        utilization_without,
    const std::function<bool(const UtilizationSample&)>& still_overloaded) {
    std::vector<int> remaining(residents);
    std::vector<int> removed;
    while (!remaining.empty()) {
        if (!still_overloaded(utilization_without(removed))) break;
        int pick = select_vm_max_correlation(remaining, vms);
        removed.push_back(pick);
        remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
    }
    return removed;
}

namespace {

bool fits(const HostLoadView& host, const PlacementRequest& r) {
    return host.cpu_mips + r.cpu_mips <= host.spec.mips_capacity &&
           host.ram_mb + r.ram_mb <= host.spec.ram_capacity &&
           host.bw_mbs + r.bw_mbs <= host.spec.bw_capacity;
}

double power_increase(const HostLoadView& host, double extra_mips) {
    double before =
        host.active
            ? host_power(host.spec,
                         clamp01(host.cpu_mips / host.spec.mips_capacity))
            : 0.0;
    double after = host_power(
        host.spec,
        clamp01((host.cpu_mips + extra_mips) / host.spec.mips_capacity));
    return after - before;
}

}  // namespace

PlacementOutcome place_vms(std::vector<PlacementRequest> requests,
                           std::vector<HostLoadView>& hosts,
                           const std::set<int>& deactivation_marked,
                           bool allow_wake) {
    std::stable_sort(requests.begin(), requests.end(),
                     [](const PlacementRequest& a, const PlacementRequest& b) {
                         if (a.cpu_mips != b.cpu_mips)
                             return a.cpu_mips > b.cpu_mips;
                         return a.vm < b.vm;
                     });

    PlacementOutcome outcome;
    for (const PlacementRequest& r : requests) {
        HostLoadView* best = nullptr;
        double best_increase = 0.0;
        for (HostLoadView& host : hosts) {
            if (host.index == r.source_host) continue;
            if (host.verdict == LoadState::Overloaded) continue;
            if (deactivation_marked.count(host.index)) continue;
            if (!host.active && !allow_wake) continue;
            if (!fits(host, r)) continue;
            double increase = power_increase(host, r.cpu_mips);
            if (!best || increase < best_increase) {
                best = &host;
                best_increase = increase;
            }
        }
        if (!best) {
            outcome.unplaced.push_back(r.vm);
            continue;
        }
        best->cpu_mips += r.cpu_mips;
        best->ram_mb += r.ram_mb;
        best->bw_mbs += r.bw_mbs;
        best->active = true;
        outcome.assignment[r.vm] = best->index;
    }
    return outcome;
}

MigrationPlan plan_migrations(
    std::vector<HostLoadView> hosts, std::vector<std::vector<int>> residents,
    const std::map<int, VmLoadView>& vms,
    const std::function<bool(int host, const UtilizationSample&)>&
        still_overloaded) {
    MigrationPlan plan;
    std::vector<bool> received(hosts.size(), false);

    auto demand_of = [&](int vm) -> const VmLoadView& { return vms.at(vm); };

    // Phase 1: drain overloaded hosts, then re-place the drained VMs in one
    // power-aware batch. Unplaceable VMs simply stay put.
    std::vector<PlacementRequest> drained;
    for (std::size_t h = 0; h < hosts.size(); ++h) {
        if (hosts[h].verdict != LoadState::Overloaded) continue;

        auto utilization_without =
            [&](const std::vector<int>& removed) -> UtilizationSample {
            double cpu = 0.0, ram = 0.0, bw = 0.0;
            for (int vm : residents[h]) {
                if (std::find(removed.begin(), removed.end(), vm) !=
                    removed.end())
                    continue;
                const VmLoadView& d = demand_of(vm);
                cpu += d.cpu_mips;
                ram += d.ram_mb;
                bw += d.bw_mbs;
            }
            const HostSpec& spec = hosts[h].spec;
            return {clamp01(cpu / spec.mips_capacity),
                    clamp01(ram / spec.ram_capacity),
                    clamp01(bw / spec.bw_capacity)};
        };
        std::vector<int> removal = drain_overloaded(
            residents[h], vms, utilization_without,
            [&](const UtilizationSample& s) {
                return still_overloaded(int(h), s);
            });
        for (int vm : removal) {
            const VmLoadView& d = demand_of(vm);
            drained.push_back({vm, d.cpu_mips, d.ram_mb, d.bw_mbs, int(h)});
            hosts[h].cpu_mips -= d.cpu_mips;
            hosts[h].ram_mb -= d.ram_mb;
            hosts[h].bw_mbs -= d.bw_mbs;
            residents[h].erase(
                std::find(residents[h].begin(), residents[h].end(), vm));
        }
    }
    if (!drained.empty()) {
        PlacementOutcome placed = place_vms(drained, hosts, {}, true);
        for (const PlacementRequest& r : drained) {
            auto it = placed.assignment.find(r.vm);
            if (it == placed.assignment.end()) {
                // Cancelled: restore the VM on its source host.
                const VmLoadView& d = demand_of(r.vm);
                HostLoadView& src = hosts[std::size_t(r.source_host)];
                src.cpu_mips += d.cpu_mips;
                src.ram_mb += d.ram_mb;
                src.bw_mbs += d.bw_mbs;
                residents[std::size_t(r.source_host)].push_back(r.vm);
                continue;
            }
            plan.moves.push_back({r.vm, r.source_host, it->second});
            received[std::size_t(it->second)] = true;
            residents[std::size_t(it->second)].push_back(r.vm);
        }
        for (auto& list : residents) std::sort(list.begin(), list.end());
    }

    // Phase 2: evacuate underloaded hosts, emptiest first, all-or-nothing.
    std::vector<std::size_t> underloaded;
    for (std::size_t h = 0; h < hosts.size(); ++h) {
        if (hosts[h].active && hosts[h].verdict == LoadState::Underloaded)
            underloaded.push_back(h);
    }
    std::sort(underloaded.begin(), underloaded.end(),
              [&](std::size_t a, std::size_t b) {
                  if (hosts[a].measured_cpu_util != hosts[b].measured_cpu_util)
                      return hosts[a].measured_cpu_util <
                             hosts[b].measured_cpu_util;
                  return a < b;
              });

    for (std::size_t h : underloaded) {
        if (received[h]) continue;  // keep each VM to one move per plan
        if (residents[h].empty()) {
            plan.deactivations.insert(int(h));
            hosts[h].active = false;
            continue;
        }
        std::vector<PlacementRequest> reqs;
        for (int vm : residents[h]) {
            const VmLoadView& d = demand_of(vm);
            reqs.push_back({vm, d.cpu_mips, d.ram_mb, d.bw_mbs, int(h)});
        }
        std::vector<HostLoadView> snapshot = hosts;
        PlacementOutcome placed =
            place_vms(reqs, hosts, plan.deactivations, false);
        if (!placed.unplaced.empty()) {
            hosts = std::move(snapshot);
            plan.failed_evacuations.insert(int(h));
            continue;
        }
        for (const auto& [vm, dest] : placed.assignment) {
            plan.moves.push_back({vm, int(h), dest});
            received[std::size_t(dest)] = true;
        }
        hosts[h].cpu_mips = 0.0;
        hosts[h].ram_mb = 0.0;
        hosts[h].bw_mbs = 0.0;
        hosts[h].active = false;
        residents[h].clear();
        plan.deactivations.insert(int(h));
    }

    return plan;
}

}  // namespace vmc
