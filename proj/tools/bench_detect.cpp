// Times the per-host detection sweep: serial reference vs the OpenMP kernel,
// checking that both produce identical results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vmcsim/detection.hpp"
#include "vmcsim/engine.hpp"
#include "vmcsim/rng.hpp"

namespace {

std::vector<vmc::HostState> synthetic_hosts(int n_hosts, int window,
                                            std::uint64_t seed) {
    std::vector<vmc::HostSpec> specs =
        vmc::default_host_fleet(std::size_t(n_hosts));
    std::vector<vmc::HostState> hosts(specs.size());
    vmc::Rng rng(seed);
    for (std::size_t h = 0; h < hosts.size(); ++h) {
        hosts[h].spec = specs[h];
        hosts[h].active = true;
        for (int t = 0; t < window; ++t) {
            vmc::UtilizationSample s{rng.uniform(), rng.uniform(),
                                     rng.uniform()};
            hosts[h].push_history(s, std::size_t(window));
        }
    }
    return hosts;
}

double time_ms(const std::function<void()>& fn, int repeats) {
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() /
           double(repeats);
}

}  // namespace

int main(int argc, char** argv) {
    int n_hosts = 200;
    int window = 12;
    int repeats = 5;
    int threads = 0;  // 0 = OpenMP default
    std::uint64_t seed = 1;
    std::string detector_name = "mr-moslo";

    CLI::App app{"detection sweep benchmark: serial reference vs OpenMP"};
    app.add_option("--hosts", n_hosts, "host count")->capture_default_str();
    app.add_option("--window", window, "history samples per host")
        ->capture_default_str();
    app.add_option("--repeats", repeats, "timing repetitions")
        ->capture_default_str();
    app.add_option("--threads", threads, "OpenMP threads (0 = default)")
        ->capture_default_str();
    app.add_option("--seed", seed, "history seed")->capture_default_str();
    app.add_option("--detector", detector_name, "detector to sweep")
        ->check(CLI::IsMember({"mr-moslo", "thr", "iqr", "mad", "lr"}));
    CLI11_PARSE(app, argc, argv);

    auto kind = vmc::detector_from_string(detector_name);
    vmc::DetectorConfig config = vmc::DetectorConfig::defaults_for(*kind);
    std::vector<vmc::HostState> hosts =
        synthetic_hosts(n_hosts, window, seed);

    std::vector<std::optional<vmc::DetectionResult>> serial, parallel;
    double serial_ms = time_ms(
        [&] { serial = vmc::detect_all_serial(hosts, config, seed, 0); },
        repeats);
    double parallel_ms = time_ms(
        [&] {
            parallel =
                vmc::detect_all_openmp(hosts, config, seed, 0, threads);
        },
        repeats);

    bool identical = serial.size() == parallel.size();
    for (std::size_t h = 0; identical && h < serial.size(); ++h) {
        identical = serial[h].has_value() == parallel[h].has_value() &&
                    (!serial[h] || same_result(*serial[h], *parallel[h]));
    }

    std::printf("hosts        %d\n", n_hosts);
    std::printf("detector     %s\n", detector_name.c_str());
    std::printf("serial       %.3f ms\n", serial_ms);
    std::printf("openmp       %.3f ms\n", parallel_ms);
    std::printf("speedup      %.2fx\n",
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
    std::printf("identical    %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
