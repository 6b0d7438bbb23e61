#include "vmcsim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "vmcsim/errors.hpp"
#include "vmcsim/rng.hpp"
#include "vmcsim/util.hpp"

namespace vmc {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(std::string_view text, std::size_t line_no,
                    const char* what) {
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() ||
        !std::isfinite(value)) {
        throw TraceFormatError(line_no, std::string("bad ") + what + " '" +
                                            std::string(text) + "'");
    }
    return value;
}

int parse_vm_id(std::string_view text, std::size_t line_no) {
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw TraceFormatError(
            line_no, "bad vm_id '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

TraceLoadResult load_trace(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw TraceFormatError("empty input");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time,vm_id,cpu,ram,bw") {
        throw TraceFormatError(line_no, "expected header time,vm_id,cpu,ram,bw");
    }

    TraceLoadResult result;
    // cells[vm][time] = sample
    std::map<int, std::map<double, UtilizationSample>> cells;

    auto clamp_count = [&result](double v) {
        if (v < 0.0 || v > 1.0) {
            ++result.clamped_values;
            return clamp01(v);
        }
        return v;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != 5) {
            throw TraceFormatError(line_no,
                                   "expected 5 fields, got " +
                                       std::to_string(fields.size()));
        }
        double time = parse_double(fields[0], line_no, "time");
        if (time < 0.0) throw TraceFormatError(line_no, "negative time");
        int vm = parse_vm_id(fields[1], line_no);
        UtilizationSample s;
        s.cpu = clamp_count(parse_double(fields[2], line_no, "cpu"));
        s.ram = clamp_count(parse_double(fields[3], line_no, "ram"));
        s.bw = clamp_count(parse_double(fields[4], line_no, "bw"));
        auto [it, inserted] = cells[vm].emplace(time, s);
        if (!inserted) {
            throw TraceFormatError(line_no, "duplicate cell for vm " +
                                                std::to_string(vm));
        }
    }
    if (cells.empty()) throw TraceFormatError("no data rows");

    // Every VM must cover exactly the same time set.
    const auto& reference = cells.begin()->second;
    for (const auto& [vm, by_time] : cells) {
        if (by_time.size() != reference.size() ||
            !std::equal(by_time.begin(), by_time.end(), reference.begin(),
                        [](const auto& a, const auto& b) {
                            return a.first == b.first;
                        })) {
            throw TraceFormatError("ragged series: vm " + std::to_string(vm) +
                                   " covers a different time set than vm " +
                                   std::to_string(cells.begin()->first));
        }
    }

    std::vector<double> times;
    times.reserve(reference.size());
    for (const auto& [t, s] : reference) times.push_back(t);

    double interval = 300.0;
    if (times.size() == 1) {
        if (times[0] > 0.0) interval = times[0];
    } else {
        interval = times[1] - times[0];
        if (interval <= 0.0) throw TraceFormatError("non-increasing time grid");
        for (std::size_t i = 1; i < times.size(); ++i) {
            double gap = times[i] - times[i - 1];
            if (std::abs(gap - interval) > 1e-9 * std::max(1.0, interval)) {
                throw TraceFormatError(
                    "uneven time grid: gap " + format_g17(gap) + " vs stride " +
                    format_g17(interval));
            }
        }
    }

    WorkloadTrace& trace = result.trace;
    trace.interval_seconds = interval;
    for (const auto& [vm, by_time] : cells) {
        trace.vm_ids.push_back(vm);
        std::vector<UtilizationSample> seq;
        seq.reserve(by_time.size());
        for (const auto& [t, s] : by_time) seq.push_back(s);
        trace.series.push_back(std::move(seq));
    }
    return result;
}

void write_trace_csv(const WorkloadTrace& trace, std::ostream& out) {
    out << "time,vm_id,cpu,ram,bw\n";
    for (std::size_t t = 0; t < trace.n_intervals(); ++t) {
        double time = double(t) * trace.interval_seconds;
        for (std::size_t v = 0; v < trace.vm_ids.size(); ++v) {
            const UtilizationSample& s = trace.series[v][t];
            out << format_g17(time) << ',' << trace.vm_ids[v] << ','
                << format_g17(s.cpu) << ',' << format_g17(s.ram) << ','
                << format_g17(s.bw) << '\n';
        }
    }
}

WorkloadTrace generate_random_workload(std::uint64_t seed, int n_vms,
                                       int n_intervals, double mean,
                                       double spread) {
    if (n_vms < 1) throw ConfigError("generate_random_workload: n_vms < 1");
    if (n_intervals < 1)
        throw ConfigError("generate_random_workload: n_intervals < 1");
    if (!(mean > 0.0 && mean < 1.0))
        throw ConfigError("generate_random_workload: mean outside (0,1)");
    if (spread < 0.0)
        throw ConfigError("generate_random_workload: negative spread");

    WorkloadTrace trace;
    trace.vm_ids.resize(std::size_t(n_vms));
    for (int v = 0; v < n_vms; ++v) trace.vm_ids[std::size_t(v)] = v;
    trace.series.assign(std::size_t(n_vms), {});
    for (auto& seq : trace.series) seq.reserve(std::size_t(n_intervals));

    Rng rng(seed);
    auto draw = [&]() {
        return clamp01(mean + (2.0 * rng.uniform() - 1.0) * spread);
    };
    for (int t = 0; t < n_intervals; ++t) {
        for (int v = 0; v < n_vms; ++v) {
            UtilizationSample s;
            s.cpu = draw();
            s.ram = draw();
            s.bw = draw();
            trace.series[std::size_t(v)].push_back(s);
        }
    }
    return trace;
}

}  // namespace vmc
