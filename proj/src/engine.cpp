#include "vmcsim/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "vmcsim/errors.hpp"

namespace vmc {

std::vector<HostSpec> default_host_fleet(std::size_t n) {
    const HostSpec g4{3720.0, 4096.0, 1024.0, 86.0, 117.0, "hp-ml110-g4"};
    const HostSpec g5{5320.0, 4096.0, 1024.0, 93.7, 135.0, "hp-ml110-g5"};
    std::vector<HostSpec> fleet;
    fleet.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        fleet.push_back(i % 2 == 0 ? g4 : g5);
    return fleet;
}

std::vector<VmSpec> default_vm_fleet(std::span<const int> vm_ids) {
    static const double kShapes[4][3] = {
        {2500.0, 870.0, 100.0},
        {2000.0, 1740.0, 100.0},
        {1000.0, 1740.0, 100.0},
        {500.0, 613.0, 100.0},
    };
    std::vector<VmSpec> fleet;
    fleet.reserve(vm_ids.size());
    for (std::size_t i = 0; i < vm_ids.size(); ++i) {
        const double* shape = kShapes[i % 4];
        fleet.push_back({vm_ids[i], shape[0], shape[1], shape[2]});
    }
    return fleet;
}

Simulation::Simulation(EngineConfig config, WorkloadTrace trace,
                       std::vector<VmSpec> vms)
    : config_(std::move(config)),
      trace_(std::move(trace)),
      vms_(std::move(vms)) {
    if (trace_.n_intervals() == 0) throw ConfigError("engine: empty trace");
    if (!(trace_.interval_seconds > 0.0))
        throw ConfigError("engine: interval_seconds must be > 0");
    if (!(config_.migration_bw_fraction > 0.0 &&
          config_.migration_bw_fraction <= 1.0))
        throw ConfigError("engine: migration_bw_fraction outside (0,1]");
    if (!(config_.migration_degradation > 0.0 &&
          config_.migration_degradation <= 1.0))
        throw ConfigError("engine: migration_degradation outside (0,1]");
    if (config_.history_window < 1)
        throw ConfigError("engine: history_window < 1");
    if (config_.host_specs.empty()) throw ConfigError("engine: no hosts");
    for (const HostSpec& spec : config_.host_specs) {
        if (!(spec.mips_capacity > 0.0 && spec.ram_capacity > 0.0 &&
              spec.bw_capacity > 0.0))
            throw ConfigError("engine: host capacities must be > 0");
        if (spec.power_idle < 0.0 || spec.power_idle > spec.power_max)
            throw ConfigError("engine: need 0 <= power_idle <= power_max");
    }
    config_.interval_seconds = trace_.interval_seconds;

    std::sort(vms_.begin(), vms_.end(),
              [](const VmSpec& a, const VmSpec& b) { return a.id < b.id; });
    if (vms_.size() != trace_.vm_ids.size())
        throw ConfigError("engine: VM catalog does not match trace VM count");
    for (std::size_t i = 0; i < vms_.size(); ++i) {
        const VmSpec& vm = vms_[i];
        if (vm.id != trace_.vm_ids[i])
            throw ConfigError("engine: VM catalog ids do not match trace ids");
        if (!(vm.mips_request > 0.0 && vm.ram_request > 0.0 &&
              vm.bw_request > 0.0))
            throw ConfigError("engine: VM requests must be > 0");
        vm_index_[vm.id] = i;
    }
}

void Simulation::initialize() {
    cluster_ = {};
    cluster_.hosts.resize(config_.host_specs.size());
    for (std::size_t h = 0; h < cluster_.hosts.size(); ++h) {
        cluster_.hosts[h] = {};
        cluster_.hosts[h].spec = config_.host_specs[h];
    }
    vm_views_.clear();
    events_.clear();
    next_interval_ = 0;

    std::vector<HostLoadView> views(cluster_.hosts.size());
    for (std::size_t h = 0; h < views.size(); ++h) {
        views[h].index = int(h);
        views[h].spec = cluster_.hosts[h].spec;
    }

    std::vector<PlacementRequest> requests;
    requests.reserve(vms_.size());
    for (std::size_t i = 0; i < vms_.size(); ++i) {
        const VmSpec& vm = vms_[i];
        const UtilizationSample& s = trace_.series[i][0];
        requests.push_back({vm.id, s.cpu * vm.mips_request,
                            s.ram * vm.ram_request, s.bw * vm.bw_request, -1});
        vm_views_[vm.id] = {};
    }

    PlacementOutcome outcome = place_vms(requests, views, {}, true);
    if (!outcome.unplaced.empty()) {
        std::string msg = "engine: initial placement failed for vms";
        for (int vm : outcome.unplaced) msg += " " + std::to_string(vm);
        throw std::runtime_error(msg);
    }
    for (const auto& [vm, h] : outcome.assignment) {
        cluster_.vm_assignment[vm] = h;
        cluster_.hosts[std::size_t(h)].add_vm(vm);
        cluster_.hosts[std::size_t(h)].active = true;
    }
    initialized_ = true;
}

UtilizationSample Simulation::host_utilization(std::size_t h,
                                               bool* clamped) const {
    const HostState& host = cluster_.hosts[h];
    double cpu = 0.0, ram = 0.0, bw = 0.0;
    for (int vm : host.resident_vms) {
        const VmLoadView& d = vm_views_.at(vm);
        cpu += d.cpu_mips;
        ram += d.ram_mb;
        bw += d.bw_mbs;
    }
    if (clamped) {
        *clamped = cpu > host.spec.mips_capacity ||
                   ram > host.spec.ram_capacity || bw > host.spec.bw_capacity;
    }
    return {clamp01(cpu / host.spec.mips_capacity),
            clamp01(ram / host.spec.ram_capacity),
            clamp01(bw / host.spec.bw_capacity)};
}

IntervalEvent Simulation::step_once() {
    if (!initialized_) throw std::logic_error("engine: step before initialize");
    if (done()) throw std::logic_error("engine: trace exhausted");

    const std::size_t k = next_interval_;
    const double dt = trace_.interval_seconds;
    const std::size_t n_hosts = cluster_.hosts.size();
    const std::size_t window = std::size_t(config_.history_window);

    IntervalEvent event;
    event.clock = cluster_.clock;
    event.verdicts.assign(n_hosts, std::nullopt);
    event.host_power_w.assign(n_hosts, 0.0);
    event.host_active.assign(n_hosts, 0);
    event.host_full_util.assign(n_hosts, 0);

    // Current per-VM demands and cpu windows.
    for (std::size_t i = 0; i < vms_.size(); ++i) {
        const VmSpec& vm = vms_[i];
        const UtilizationSample& s = trace_.series[i][k];
        VmLoadView& view = vm_views_[vm.id];
        view.cpu_mips = s.cpu * vm.mips_request;
        view.ram_mb = s.ram * vm.ram_request;
        view.bw_mbs = s.bw * vm.bw_request;
        view.cpu_history.push_back(s.cpu);
        if (view.cpu_history.size() > window) {
            view.cpu_history.erase(
                view.cpu_history.begin(),
                view.cpu_history.begin() +
                    std::ptrdiff_t(view.cpu_history.size() - window));
        }
    }

    // Host utilizations and the pre-migration accrual: a migration planned
    // this interval only reshapes the next one.
    for (std::size_t h = 0; h < n_hosts; ++h) {
        HostState& host = cluster_.hosts[h];
        if (!host.active) continue;
        bool clamped = false;
        UtilizationSample util = host_utilization(h, &clamped);
        host.push_history(util, window);
        if (clamped) event.clamped_hosts.push_back(int(h));

        host.total_active_seconds += dt;
        event.host_active[h] = 1;
        if (util.cpu >= 1.0 - 1e-9) {
            host.total_full_utilization_seconds += dt;
            event.host_full_util[h] = 1;
        }
        event.host_power_w[h] = host_power(host.spec, util.cpu);

        double raw_cpu = 0.0;
        for (int vm : host.resident_vms) raw_cpu += vm_views_.at(vm).cpu_mips;
        if (raw_cpu > host.spec.mips_capacity)
            event.breached_vm_intervals += host.resident_vms.size();
    }
    event.total_vm_intervals = vms_.size();

    // Detection sweep (the per-host data-parallel kernel).
    std::vector<std::optional<DetectionResult>> results =
        config_.n_threads > 1
            ? detect_all_openmp(cluster_.hosts, config_.detector, config_.seed,
                                k, config_.n_threads)
            : detect_all_serial(cluster_.hosts, config_.detector, config_.seed,
                                k);
    for (std::size_t h = 0; h < n_hosts; ++h) {
        if (!results[h]) continue;
        event.verdicts[h] = results[h]->state;
        if (results[h]->fallback_fit) event.fallback_fit_hosts.push_back(int(h));
        if (results[h]->fallback_thresholds)
            event.fallback_threshold_hosts.push_back(int(h));
        if (results[h]->warmup) event.warmup_hosts.push_back(int(h));
    }

    // Baselines know only Overloaded/Normal; underload is cluster-wide: the
    // least-utilized active host, as long as it would not be the only one.
    if (config_.detector.kind != DetectorKind::MrMoslo) {
        std::size_t active_count = 0;
        for (const HostState& host : cluster_.hosts)
            if (host.active) ++active_count;
        if (active_count >= 2) {
            int pick = -1;
            double best = 2.0;
            for (std::size_t h = 0; h < n_hosts; ++h) {
                if (!cluster_.hosts[h].active) continue;
                if (event.verdicts[h] == LoadState::Overloaded) continue;
                double cpu = cluster_.hosts[h].history.back().cpu;
                if (cpu < best) {
                    best = cpu;
                    pick = int(h);
                }
            }
            if (pick >= 0) event.verdicts[std::size_t(pick)] = LoadState::Underloaded;
        }
    }

    // Plan against frozen verdicts/models; no threshold re-optimization
    // mid-plan.
    std::vector<HostLoadView> views(n_hosts);
    std::vector<std::vector<int>> residents(n_hosts);
    for (std::size_t h = 0; h < n_hosts; ++h) {
        HostState& host = cluster_.hosts[h];
        views[h].index = int(h);
        views[h].spec = host.spec;
        views[h].active = host.active;
        views[h].verdict = event.verdicts[h];
        double cpu = 0.0, ram = 0.0, bw = 0.0;
        for (int vm : host.resident_vms) {
            const VmLoadView& d = vm_views_.at(vm);
            cpu += d.cpu_mips;
            ram += d.ram_mb;
            bw += d.bw_mbs;
        }
        views[h].cpu_mips = cpu;
        views[h].ram_mb = ram;
        views[h].bw_mbs = bw;
        views[h].measured_cpu_util =
            host.active && !host.history.empty() ? host.history.back().cpu : 0.0;
        residents[h] = host.resident_vms;
    }

    auto still_overloaded = [&](int h, const UtilizationSample& s) -> bool {
        const std::optional<DetectionResult>& r = results[std::size_t(h)];
        if (!r) return false;
        switch (config_.detector.kind) {
            case DetectorKind::MrMoslo: {
                double p = r->model
                               ? predict_utilization(*r->model, s)
                               : regression_target(s, config_.detector.weights);
                return r->thresholds && p >= r->thresholds->th_upper;
            }
            case DetectorKind::Thr:
                return s.cpu >= config_.detector.static_threshold;
            case DetectorKind::Iqr:
            case DetectorKind::Mad:
                return !r->warmup && s.cpu >= r->baseline_threshold;
            case DetectorKind::Lr: {
                if (r->warmup) return false;
                const HostState& host = cluster_.hosts[std::size_t(h)];
                std::vector<double> cpu(host.history.size());
                for (std::size_t i = 0; i < cpu.size(); ++i)
                    cpu[i] = host.history[i].cpu;
                cpu.back() = s.cpu;
                return config_.detector.safety * lr_predict_next(cpu) >= 1.0;
            }
        }
        return false;
    };

    MigrationPlan plan =
        plan_migrations(std::move(views), std::move(residents), vm_views_,
                        still_overloaded);
    apply_plan(plan, event);

    std::vector<std::string> findings = validate_cluster(cluster_);
    if (!findings.empty() || cluster_.vm_assignment.size() != vms_.size()) {
        throw std::logic_error("engine: cluster invariant broken after step: " +
                               (findings.empty() ? "missing vms"
                                                 : findings.front()));
    }

    cluster_.clock += dt;
    ++next_interval_;
    events_.push_back(event);
    return event;
}

void Simulation::apply_plan(const MigrationPlan& plan, IntervalEvent& event) {
    for (const MigrationPlan::Move& move : plan.moves) {
        HostState& src = cluster_.hosts[std::size_t(move.source)];
        HostState& dst = cluster_.hosts[std::size_t(move.dest)];
        const VmLoadView& d = vm_views_.at(move.vm);

        MigrationRecord record;
        record.vm = move.vm;
        record.source = move.source;
        record.dest = move.dest;
        record.seconds = migration_time(d.ram_mb, src.spec.bw_capacity,
                                        config_.migration_bw_fraction);
        record.degradation_mips_seconds =
            config_.migration_degradation * d.cpu_mips * record.seconds;
        event.migrations.push_back(record);

        src.remove_vm(move.vm);
        if (!dst.active) {
            dst.active = true;
            event.activated.push_back(move.dest);
        }
        dst.add_vm(move.vm);
        cluster_.vm_assignment[move.vm] = move.dest;
    }
    for (int h : plan.deactivations) {
        HostState& host = cluster_.hosts[std::size_t(h)];
        if (!host.resident_vms.empty()) {
            throw std::logic_error(
                "engine: plan deactivates an occupied host " +
                std::to_string(h));
        }
        host.active = false;
        host.history.clear();  // a relit host starts with a fresh window
        event.deactivated.push_back(h);
    }
    event.failed_evacuations.assign(plan.failed_evacuations.begin(),
                                    plan.failed_evacuations.end());
}

SimulationResult Simulation::finish() {
    return compute_metrics(events_, trace_.interval_seconds, vms_,
                           cluster_.hosts.size());
}

SimulationResult run_simulation(const EngineConfig& config,
                                const WorkloadTrace& trace,
                                const std::vector<VmSpec>& vms) {
    Simulation sim(config, trace, vms);
    sim.initialize();
    while (!sim.done()) sim.step_once();
    return sim.finish();
}

}  // namespace vmc
