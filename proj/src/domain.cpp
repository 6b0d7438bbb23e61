#include "vmcsim/domain.hpp"

#include <algorithm>

namespace vmc {

const char* to_string(LoadState state) {
    switch (state) {
        case LoadState::Overloaded: return "overloaded";
        case LoadState::Underloaded: return "underloaded";
        case LoadState::Normal: return "normal";
    }
    return "?";
}

void HostState::push_history(const UtilizationSample& sample,
                             std::size_t window) {
    history.push_back(sample);
    if (window > 0 && history.size() > window) {
        history.erase(history.begin(),
                      history.begin() + (history.size() - window));
    }
}

void HostState::add_vm(int vm) {
    auto it = std::lower_bound(resident_vms.begin(), resident_vms.end(), vm);
    if (it == resident_vms.end() || *it != vm) resident_vms.insert(it, vm);
}

void HostState::remove_vm(int vm) {
    auto it = std::lower_bound(resident_vms.begin(), resident_vms.end(), vm);
    if (it != resident_vms.end() && *it == vm) resident_vms.erase(it);
}

bool HostState::hosts_vm(int vm) const {
    return std::binary_search(resident_vms.begin(), resident_vms.end(), vm);
}

std::vector<std::string> validate_cluster(const ClusterState& cluster) {
    std::vector<std::string> findings;
    auto report = [&](std::string msg) { findings.push_back(std::move(msg)); };

    // How many resident lists mention each VM.
    std::map<int, std::vector<int>> seen_on;
    for (std::size_t h = 0; h < cluster.hosts.size(); ++h) {
        const HostState& host = cluster.hosts[h];
        if (!host.active && !host.resident_vms.empty()) {
            report("inactive host occupied: host " + std::to_string(h) +
                   " holds " + std::to_string(host.resident_vms.size()) +
                   " vms");
        }
        if (host.total_full_utilization_seconds >
            host.total_active_seconds + 1e-9) {
            report("accounting: host " + std::to_string(h) +
                   " full-utilization seconds exceed active seconds");
        }
        for (std::size_t i = 0; i < host.history.size(); ++i) {
            const UtilizationSample& s = host.history[i];
            if (s.cpu < 0 || s.cpu > 1 || s.ram < 0 || s.ram > 1 ||
                s.bw < 0 || s.bw > 1) {
                report("history out of range: host " + std::to_string(h) +
                       " sample " + std::to_string(i));
            }
        }
        for (int vm : host.resident_vms) seen_on[vm].push_back(int(h));
    }

    for (const auto& [vm, hosts] : seen_on) {
        if (hosts.size() > 1) {
            std::string msg = "duplicate assignment: vm " + std::to_string(vm) +
                              " appears on hosts";
            for (int h : hosts) msg += " " + std::to_string(h);
            report(std::move(msg));
        }
        auto it = cluster.vm_assignment.find(vm);
        if (it == cluster.vm_assignment.end()) {
            report("unassigned resident: vm " + std::to_string(vm) +
                   " on host " + std::to_string(hosts.front()) +
                   " missing from vm_assignment");
        }
    }

    for (const auto& [vm, h] : cluster.vm_assignment) {
        if (h < 0 || std::size_t(h) >= cluster.hosts.size()) {
            report("bad host index: vm " + std::to_string(vm) + " -> " +
                   std::to_string(h));
            continue;
        }
        if (!cluster.hosts[h].hosts_vm(vm)) {
            report("assignment mismatch: vm " + std::to_string(vm) +
                   " assigned to host " + std::to_string(h) +
                   " but not resident there");
        }
    }

    return findings;
}

}  // namespace vmc
