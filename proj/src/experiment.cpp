#include "vmcsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "vmcsim/errors.hpp"
#include "vmcsim/util.hpp"

namespace vmc {

namespace {

constexpr std::uint64_t kWorkloadSalt = 0x574B4C44;  // "WKLD"

void check_experiment(const ExperimentConfig& cfg) {
    if (cfg.hosts < 1) throw ConfigError("hosts must be >= 1");
    if (cfg.trace_path.empty()) {
        if (cfg.vms < 1) throw ConfigError("vms must be >= 1");
        if (cfg.tasks < 1) throw ConfigError("tasks must be >= 1");
        if (!(cfg.interval_seconds > 0.0))
            throw ConfigError("interval must be > 0");
        if (!(cfg.workload_mean > 0.0 && cfg.workload_mean < 1.0))
            throw ConfigError("mean must lie in (0,1)");
        if (cfg.workload_spread < 0.0) throw ConfigError("spread must be >= 0");
    }
    if (cfg.seeds.empty()) throw ConfigError("need at least one seed");
    if (cfg.detectors.empty()) throw ConfigError("need at least one detector");
    auto weight_ok = [](double w) { return w > 0.0 && w <= 1.0; };
    if (!weight_ok(cfg.weights.w1) || !weight_ok(cfg.weights.w2) ||
        !weight_ok(cfg.weights.w3))
        throw ConfigError("weights must lie in (0,1]");
    if (cfg.history_window < 1) throw ConfigError("window must be >= 1");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
}

WorkloadTrace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return load_trace(in).trace;
}

ReportRow to_row(DetectorKind kind, std::uint64_t seed,
                 const SimulationResult& r) {
    ReportRow row;
    row.detector = kind;
    row.seed = seed;
    row.energy_kwh = r.energy_kwh;
    row.sla_pct = r.sla_violation_pct;
    row.slatah = r.slatah;
    row.pdm = r.pdm;
    row.slav = r.slav;
    row.esv = r.esv;
    row.migrations = r.migrations;
    return row;
}

}  // namespace

WorkloadTrace experiment_trace(const ExperimentConfig& config,
                               std::uint64_t seed) {
    if (!config.trace_path.empty()) return load_trace_file(config.trace_path);
    int intervals = int((config.tasks + config.vms - 1) / config.vms);
    WorkloadTrace trace = generate_random_workload(
        derive_seed(seed, kWorkloadSalt), config.vms, intervals,
        config.workload_mean, config.workload_spread);
    trace.interval_seconds = config.interval_seconds;
    return trace;
}

Report run_experiment(const ExperimentConfig& config) {
    check_experiment(config);

    std::vector<std::uint64_t> seeds(config.seeds);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    const DetectorKind kAll[] = {DetectorKind::MrMoslo, DetectorKind::Thr,
                                 DetectorKind::Iqr, DetectorKind::Mad,
                                 DetectorKind::Lr};
    std::vector<DetectorKind> detectors;
    for (DetectorKind kind : kAll) {
        if (std::find(config.detectors.begin(), config.detectors.end(), kind) !=
            config.detectors.end())
            detectors.push_back(kind);
    }

    // One trace per seed, shared by every detector.
    std::vector<WorkloadTrace> traces;
    traces.reserve(seeds.size());
    for (std::uint64_t seed : seeds)
        traces.push_back(experiment_trace(config, seed));

    Report report;
    for (DetectorKind kind : detectors) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            EngineConfig engine;
            engine.interval_seconds = traces[i].interval_seconds;
            engine.history_window = config.history_window;
            engine.host_specs = default_host_fleet(std::size_t(config.hosts));
            engine.detector = DetectorConfig::defaults_for(kind);
            engine.detector.weights = config.weights;
            engine.seed = seeds[i];
            engine.n_threads = config.threads;
            std::vector<VmSpec> vms = default_vm_fleet(traces[i].vm_ids);
            try {
                SimulationResult result =
                    run_simulation(engine, traces[i], vms);
                report.rows.push_back(to_row(kind, seeds[i], result));
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string("run failed (detector ") +
                                         to_string(kind) + ", seed " +
                                         std::to_string(seeds[i]) +
                                         "): " + e.what());
            }
        }
    }
    return report;
}

void emit_report_csv(const Report& report, std::ostream& out) {
    out << "detector,seed,energy_kwh,sla_pct,slatah,pdm,slav,esv,migrations\n";
    for (const ReportRow& r : report.rows) {
        out << to_string(r.detector) << ',' << r.seed << ','
            << format_g17(r.energy_kwh) << ',' << format_g17(r.sla_pct) << ','
            << format_g17(r.slatah) << ',' << format_g17(r.pdm) << ','
            << format_g17(r.slav) << ',' << format_g17(r.esv) << ','
            << r.migrations << '\n';
    }
}

void emit_report_json(const Report& report, std::ostream& out) {
    out << "{\n  \"schema_version\": 1,\n  \"rows\": [";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ReportRow& r = report.rows[i];
        out << (i == 0 ? "\n" : ",\n");
        out << "    {\"detector\": \"" << to_string(r.detector)
            << "\", \"seed\": " << r.seed
            << ", \"energy_kwh\": " << format_g17(r.energy_kwh)
            << ", \"sla_pct\": " << format_g17(r.sla_pct)
            << ", \"slatah\": " << format_g17(r.slatah)
            << ", \"pdm\": " << format_g17(r.pdm)
            << ", \"slav\": " << format_g17(r.slav)
            << ", \"esv\": " << format_g17(r.esv)
            << ", \"migrations\": " << r.migrations << "}";
    }
    out << (report.rows.empty() ? "]" : "\n  ]") << "\n}\n";
}

namespace {

ResourceWeights parse_weights(const std::string& text) {
    ResourceWeights w;
    std::istringstream in(text);
    char c1 = 0, c2 = 0;
    if (!(in >> w.w1 >> c1 >> w.w2 >> c2 >> w.w3) || c1 != ',' || c2 != ',' ||
        !(in >> std::ws).eof()) {
        throw ConfigError("weights must look like w1,w2,w3");
    }
    return w;
}

std::vector<DetectorKind> parse_detectors(
    const std::vector<std::string>& names) {
    std::vector<DetectorKind> kinds;
    for (const std::string& name : names) {
        auto kind = detector_from_string(name);
        if (!kind) throw ConfigError("unknown detector: " + name);
        kinds.push_back(*kind);
    }
    return kinds;
}

std::string trim_blanks(const std::string& s) {
    auto from = s.find_first_not_of(" \t\r");
    if (from == std::string::npos) return "";
    return s.substr(from, s.find_last_not_of(" \t\r") - from + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) parts.push_back(item);
    return parts;
}

[[noreturn]] void bad_config_value(const std::string& key,
                                   const std::string& text) {
    throw ConfigError("config key " + key + ": bad value '" + text + "'");
}

int config_int(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != text.size()) bad_config_value(key, text);
    return value;
}

double config_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != text.size()) bad_config_value(key, text);
    return value;
}

std::uint64_t config_u64(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
        value = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != text.size() || text.find('-') != std::string::npos)
        bad_config_value(key, text);
    return value;
}

// Picks the series to operate on for the fit/thresholds subcommands.
const std::vector<UtilizationSample>& select_series(const WorkloadTrace& trace,
                                                    int vm) {
    if (vm < 0) {
        if (trace.vm_ids.size() != 1)
            throw ConfigError("trace has several vms; pick one with --vm");
        return trace.series.front();
    }
    auto it = std::find(trace.vm_ids.begin(), trace.vm_ids.end(), vm);
    if (it == trace.vm_ids.end())
        throw ConfigError("vm " + std::to_string(vm) + " not in trace");
    return trace.series[std::size_t(it - trace.vm_ids.begin())];
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

int run_command(const ExperimentConfig& cfg) {
    Report report = run_experiment(cfg);
    auto emit = [&](std::ostream& out) {
        if (cfg.format == OutputFormat::Csv)
            emit_report_csv(report, out);
        else
            emit_report_json(report, out);
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + cfg.out_path);
    };
    if (cfg.out_path == "-") {
        emit(std::cout);
    } else {
        std::ofstream out = open_output(cfg.out_path);
        emit(out);
    }
    return 0;
}

int fit_command(const std::string& trace_path, int vm,
                const ResourceWeights& weights) {
    WorkloadTrace trace = load_trace_file(trace_path);
    const std::vector<UtilizationSample>& series = select_series(trace, vm);
    if (series.size() < 5)
        throw std::runtime_error("series too short to fit (need >= 5 samples)");
    std::vector<TrainingRow> rows(series.size() - 1);
    for (std::size_t t = 0; t + 1 < series.size(); ++t) {
        rows[t].sample = series[t];
        rows[t].target = regression_target(series[t + 1], weights);
    }
    RegressionModel model = fit_ols(rows);
    std::cout << "b0 " << format_g17(model.b0) << "\n"
              << "b1 " << format_g17(model.b1) << "\n"
              << "b2 " << format_g17(model.b2) << "\n"
              << "b3 " << format_g17(model.b3) << "\n"
              << "n " << model.n_samples << "\n";
    return 0;
}

int thresholds_command(const std::string& trace_path, int vm,
                       std::uint64_t seed, int iterations) {
    WorkloadTrace trace = load_trace_file(trace_path);
    const std::vector<UtilizationSample>& series = select_series(trace, vm);
    MosloConfig moslo;
    moslo.rng_seed = seed;
    if (iterations >= 0) moslo.max_iterations = iterations;
    Rng rng(moslo.rng_seed);
    ThresholdPair pair = select_thresholds(series, moslo, rng);
    std::cout << "th_low " << format_g17(pair.th_low) << "\n"
              << "th_upper " << format_g17(pair.th_upper) << "\n";
    return 0;
}

int gen_command(int vms, int tasks, double interval, std::uint64_t seed,
                double mean, double spread, const std::string& out_path) {
    if (vms < 1) throw ConfigError("vms must be >= 1");
    if (tasks < 1) throw ConfigError("tasks must be >= 1");
    if (!(interval > 0.0)) throw ConfigError("interval must be > 0");
    int intervals = int((tasks + vms - 1) / vms);
    WorkloadTrace trace =
        generate_random_workload(seed, vms, intervals, mean, spread);
    trace.interval_seconds = interval;
    if (out_path == "-") {
        write_trace_csv(trace, std::cout);
    } else {
        std::ofstream out = open_output(out_path);
        write_trace_csv(trace, out);
        if (!out) throw std::runtime_error("write failed: " + out_path);
    }
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"datacenter VM-consolidation simulator"};
    app.require_subcommand(1);

    // --- run ---
    ExperimentConfig cfg;
    std::vector<std::string> detector_names = {"mr-moslo"};
    std::string weights_text;
    std::string format_name = "csv";

    CLI::App* run = app.add_subcommand("run", "simulate and emit a report");
    std::string config_path;
    run->add_option("--config", config_path,
                    "flat key=value config file; flags win");
    auto* hosts_opt = run->add_option("--hosts", cfg.hosts, "host count")
                          ->check(CLI::PositiveNumber)
                          ->capture_default_str();
    auto* vms_opt = run->add_option("--vms", cfg.vms, "VM count (synthetic)")
                        ->check(CLI::PositiveNumber)
                        ->capture_default_str();
    auto* tasks_opt =
        run->add_option("--tasks", cfg.tasks,
                        "synthetic VM-interval rows; intervals = ceil(tasks/vms)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    auto* detector_opt =
        run->add_option("--detector", detector_names,
                        "detector(s): mr-moslo|thr|iqr|mad|lr (repeatable; "
                        "report rows follow this listed order)")
            ->delimiter(',')
            ->check(CLI::IsMember({"mr-moslo", "thr", "iqr", "mad", "lr"}));
    auto* weights_opt = run->add_option("--weights", weights_text,
                                        "load-score weights w1,w2,w3");
    auto* interval_opt =
        run->add_option("--interval", cfg.interval_seconds,
                        "scheduling interval, seconds (synthetic)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    auto* seed_opt = run->add_option("--seed", cfg.seeds,
                                     "run seed (repeatable)")
                         ->delimiter(',');
    auto* trace_opt = run->add_option("--trace", cfg.trace_path,
                                      "workload trace CSV (replaces synthetic "
                                      "generation)");
    auto* out_opt = run->add_option("--out", cfg.out_path,
                                    "report path, - for stdout")
                        ->capture_default_str();
    auto* format_opt = run->add_option("--format", format_name, "report format")
                           ->check(CLI::IsMember({"csv", "json"}))
                           ->capture_default_str();
    auto* mean_opt = run->add_option("--mean", cfg.workload_mean,
                                     "synthetic utilization band center")
                         ->capture_default_str();
    auto* spread_opt = run->add_option("--spread", cfg.workload_spread,
                                       "synthetic utilization band half-width")
                           ->capture_default_str();
    auto* window_opt = run->add_option("--window", cfg.history_window,
                                       "history window, intervals")
                           ->check(CLI::PositiveNumber)
                           ->capture_default_str();
    auto* threads_opt = run->add_option("--threads", cfg.threads,
                                        "detection sweep threads (OpenMP when "
                                        "> 1)")
                            ->check(CLI::PositiveNumber)
                            ->capture_default_str();
    trace_opt->excludes(vms_opt, tasks_opt, interval_opt, mean_opt, spread_opt);

    // CLI11 only reads config files attached to the top-level app, so the
    // run.--config file is applied by hand: one key=value per line, '#'
    // comments, command-line flags taking precedence.
    auto apply_config_file = [&](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file: " + path);
        bool file_synth = false;
        auto fresh = [](const CLI::Option* opt) { return opt->count() == 0; };
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string text = trim_blanks(line);
            if (text.empty() || text[0] == '#') continue;
            auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected key=value");
            std::string key = trim_blanks(text.substr(0, eq));
            std::string value = trim_blanks(text.substr(eq + 1));
            if (key == "hosts") {
                if (fresh(hosts_opt)) cfg.hosts = config_int(key, value);
            } else if (key == "vms") {
                file_synth = true;
                if (fresh(vms_opt)) cfg.vms = config_int(key, value);
            } else if (key == "tasks") {
                file_synth = true;
                if (fresh(tasks_opt)) cfg.tasks = config_int(key, value);
            } else if (key == "interval") {
                file_synth = true;
                if (fresh(interval_opt))
                    cfg.interval_seconds = config_double(key, value);
            } else if (key == "mean") {
                file_synth = true;
                if (fresh(mean_opt)) cfg.workload_mean = config_double(key, value);
            } else if (key == "spread") {
                file_synth = true;
                if (fresh(spread_opt))
                    cfg.workload_spread = config_double(key, value);
            } else if (key == "seed") {
                if (fresh(seed_opt)) {
                    cfg.seeds.clear();
                    for (const std::string& item : split_list(value))
                        cfg.seeds.push_back(config_u64(key, item));
                }
            } else if (key == "detector") {
                if (fresh(detector_opt)) detector_names = split_list(value);
            } else if (key == "weights") {
                if (fresh(weights_opt)) weights_text = value;
            } else if (key == "trace") {
                if (fresh(trace_opt)) cfg.trace_path = value;
            } else if (key == "out") {
                if (fresh(out_opt)) cfg.out_path = value;
            } else if (key == "format") {
                if (value != "csv" && value != "json")
                    bad_config_value(key, value);
                if (fresh(format_opt)) format_name = value;
            } else if (key == "window") {
                if (fresh(window_opt)) cfg.history_window = config_int(key, value);
            } else if (key == "threads") {
                if (fresh(threads_opt)) cfg.threads = config_int(key, value);
            } else {
                throw ConfigError("config file: unknown key '" + key + "'");
            }
        }
        bool synth = file_synth || vms_opt->count() || tasks_opt->count() ||
                     interval_opt->count() || mean_opt->count() ||
                     spread_opt->count();
        if (!cfg.trace_path.empty() && synth)
            throw ConfigError("trace excludes vms/tasks/interval/mean/spread");
    };

    // --- fit ---
    std::string fit_trace;
    int fit_vm = -1;
    std::string fit_weights_text;
    CLI::App* fit = app.add_subcommand(
        "fit", "fit the load-prediction regression on one trace series");
    fit->add_option("--trace", fit_trace, "trace CSV")->required();
    fit->add_option("--vm", fit_vm, "vm id (required when several)");
    fit->add_option("--weights", fit_weights_text, "w1,w2,w3");

    // --- thresholds ---
    std::string thr_trace;
    int thr_vm = -1;
    std::uint64_t thr_seed = 1;
    int thr_iterations = -1;
    CLI::App* thresholds = app.add_subcommand(
        "thresholds", "run the threshold search on one trace series");
    thresholds->add_option("--trace", thr_trace, "trace CSV")->required();
    thresholds->add_option("--vm", thr_vm, "vm id (required when several)");
    thresholds->add_option("--seed", thr_seed, "search seed")
        ->capture_default_str();
    thresholds->add_option("--iterations", thr_iterations,
                           "swarm iterations (default from config)");

    // --- gen ---
    int gen_vms = 30, gen_tasks = 500;
    double gen_interval = 300.0, gen_mean = 0.5, gen_spread = 0.4;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "-";
    CLI::App* gen =
        app.add_subcommand("gen", "emit a synthetic workload trace CSV");
    gen->add_option("--vms", gen_vms, "VM count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--tasks", gen_tasks, "VM-interval rows")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--interval", gen_interval, "seconds between samples")
        ->capture_default_str();
    gen->add_option("--seed", gen_seed, "generator seed")
        ->capture_default_str();
    gen->add_option("--mean", gen_mean, "band center")->capture_default_str();
    gen->add_option("--spread", gen_spread, "band half-width")
        ->capture_default_str();
    gen->add_option("--out", gen_out, "trace path, - for stdout")
        ->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("vmcsim");
    for (const std::string& arg : args) argv.push_back(arg.c_str());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            if (!config_path.empty()) apply_config_file(config_path);
            cfg.detectors = parse_detectors(detector_names);
            if (!weights_text.empty()) cfg.weights = parse_weights(weights_text);
            cfg.format = format_name == "json" ? OutputFormat::Json
                                               : OutputFormat::Csv;
            return run_command(cfg);
        }
        if (fit->parsed()) {
            ResourceWeights w;
            if (!fit_weights_text.empty()) w = parse_weights(fit_weights_text);
            return fit_command(fit_trace, fit_vm, w);
        }
        if (thresholds->parsed()) {
            return thresholds_command(thr_trace, thr_vm, thr_seed,
                                      thr_iterations);
        }
        if (gen->parsed()) {
            return gen_command(gen_vms, gen_tasks, gen_interval, gen_seed,
                               gen_mean, gen_spread, gen_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace vmc
