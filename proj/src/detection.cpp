#include "vmcsim/detection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "vmcsim/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vmc {

namespace {

bool same_double(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::vector<double> cpu_series(std::span<const UtilizationSample> history) {
    std::vector<double> cpu(history.size());
    for (std::size_t i = 0; i < history.size(); ++i) cpu[i] = history[i].cpu;
    return cpu;
}

}  // namespace

const char* to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::MrMoslo: return "mr-moslo";
        case DetectorKind::Thr: return "thr";
        case DetectorKind::Iqr: return "iqr";
        case DetectorKind::Mad: return "mad";
        case DetectorKind::Lr: return "lr";
    }
    return "?";
}

std::optional<DetectorKind> detector_from_string(std::string_view name) {
    if (name == "mr-moslo") return DetectorKind::MrMoslo;
    if (name == "thr") return DetectorKind::Thr;
    if (name == "iqr") return DetectorKind::Iqr;
    if (name == "mad") return DetectorKind::Mad;
    if (name == "lr") return DetectorKind::Lr;
    return std::nullopt;
}

DetectorConfig DetectorConfig::defaults_for(DetectorKind kind) {
    DetectorConfig cfg;
    cfg.kind = kind;
    switch (kind) {
        case DetectorKind::MrMoslo: break;
        case DetectorKind::Thr: cfg.static_threshold = 0.8; break;
        case DetectorKind::Iqr: cfg.safety = 1.5; break;
        case DetectorKind::Mad: cfg.safety = 2.5; break;
        case DetectorKind::Lr: cfg.safety = 1.2; break;
    }
    return cfg;
}

bool same_result(const DetectionResult& a, const DetectionResult& b) {
    if (a.state != b.state) return false;
    if (!same_double(a.predicted, b.predicted)) return false;
    if (a.thresholds.has_value() != b.thresholds.has_value()) return false;
    if (a.thresholds &&
        (!same_double(a.thresholds->th_low, b.thresholds->th_low) ||
         !same_double(a.thresholds->th_upper, b.thresholds->th_upper)))
        return false;
    if (!same_double(a.baseline_threshold, b.baseline_threshold)) return false;
    if (a.model.has_value() != b.model.has_value()) return false;
    if (a.model && (!same_double(a.model->b0, b.model->b0) ||
                    !same_double(a.model->b1, b.model->b1) ||
                    !same_double(a.model->b2, b.model->b2) ||
                    !same_double(a.model->b3, b.model->b3) ||
                    a.model->n_samples != b.model->n_samples))
        return false;
    return a.fallback_fit == b.fallback_fit &&
           a.fallback_thresholds == b.fallback_thresholds &&
           a.warmup == b.warmup;
}

LoadState classify_predicted(double predicted,
                             const ThresholdPair& thresholds) {
    if (predicted >= thresholds.th_upper) return LoadState::Overloaded;
    if (predicted <= thresholds.th_low) return LoadState::Underloaded;
    return LoadState::Normal;
}

DetectionResult detect_mr_moslo(std::span<const UtilizationSample> history,
                                const DetectorConfig& config, Rng& rng) {
    DetectionResult result;
    const UtilizationSample& latest = history.back();

    // One-step-ahead pairing: sample[t] predicts the load target of t+1.
    if (history.size() >= 5) {
        std::vector<TrainingRow> rows(history.size() - 1);
        for (std::size_t t = 0; t + 1 < history.size(); ++t) {
            rows[t].sample = history[t];
            rows[t].target = regression_target(history[t + 1], config.weights);
        }
        try {
            result.model = fit_ols(rows);
        } catch (const SingularFit&) {
        }
    }
    if (result.model) {
        result.predicted = predict_utilization(*result.model, latest);
    } else {
        result.predicted = regression_target(latest, config.weights);
        result.fallback_fit = true;
    }

    try {
        result.thresholds = select_thresholds(history, config.moslo, rng);
    } catch (const NoValidThreshold&) {
        result.thresholds = ThresholdPair{0.1, 0.9};
        result.fallback_thresholds = true;
    }

    result.state = classify_predicted(result.predicted, *result.thresholds);
    return result;
}

DetectionResult detect_thr(std::span<const UtilizationSample> history,
                           double static_threshold) {
    DetectionResult result;
    result.predicted = history.back().cpu;
    result.baseline_threshold = static_threshold;
    result.state = result.predicted >= static_threshold ? LoadState::Overloaded
                                                        : LoadState::Normal;
    return result;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    double h = double(sorted.size() - 1) * p;
    std::size_t lo = std::size_t(h);
    if (lo >= sorted.size() - 1) return sorted.back();
    double frac = h - double(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

DetectionResult detect_iqr(std::span<const UtilizationSample> history,
                           double safety) {
    DetectionResult result;
    result.predicted = history.back().cpu;
    if (history.size() < 4) {
        result.warmup = true;
        return result;
    }
    std::vector<double> cpu = cpu_series(history);
    std::sort(cpu.begin(), cpu.end());
    double iqr = quantile_sorted(cpu, 0.75) - quantile_sorted(cpu, 0.25);
    result.baseline_threshold = 1.0 - safety * iqr;
    result.state = result.predicted >= result.baseline_threshold
                       ? LoadState::Overloaded
                       : LoadState::Normal;
    return result;
}

DetectionResult detect_mad(std::span<const UtilizationSample> history,
                           double safety) {
    DetectionResult result;
    result.predicted = history.back().cpu;
    if (history.size() < 4) {
        result.warmup = true;
        return result;
    }
    std::vector<double> cpu = cpu_series(history);
    std::sort(cpu.begin(), cpu.end());
    double median = quantile_sorted(cpu, 0.5);
    std::vector<double> deviation(cpu.size());
    for (std::size_t i = 0; i < cpu.size(); ++i)
        deviation[i] = std::abs(cpu[i] - median);
    std::sort(deviation.begin(), deviation.end());
    double mad = quantile_sorted(deviation, 0.5);
    result.baseline_threshold = 1.0 - safety * mad;
    result.state = result.predicted >= result.baseline_threshold
                       ? LoadState::Overloaded
                       : LoadState::Normal;
    return result;
}

double lr_predict_next(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n == 1) return values[0];
    double t_mean = double(n - 1) / 2.0;
    double y_mean = 0.0;
    for (double y : values) y_mean += y;
    y_mean /= double(n);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double dt = double(t) - t_mean;
        num += dt * (values[t] - y_mean);
        den += dt * dt;
    }
    double slope = den > 0.0 ? num / den : 0.0;
    double intercept = y_mean - slope * t_mean;
    return intercept + slope * double(n);
}

DetectionResult detect_lr(std::span<const UtilizationSample> history,
                          double safety) {
    DetectionResult result;
    if (history.size() < 3) {
        result.predicted = history.back().cpu;
        result.warmup = true;
        return result;
    }
    std::vector<double> cpu = cpu_series(history);
    result.predicted = lr_predict_next(cpu);
    result.state = safety * result.predicted >= 1.0 ? LoadState::Overloaded
                                                    : LoadState::Normal;
    return result;
}

DetectionResult detect(std::span<const UtilizationSample> history,
                       const DetectorConfig& config, Rng& rng) {
    switch (config.kind) {
        case DetectorKind::MrMoslo:
            return detect_mr_moslo(history, config, rng);
        case DetectorKind::Thr:
            return detect_thr(history, config.static_threshold);
        case DetectorKind::Iqr:
            return detect_iqr(history, config.safety);
        case DetectorKind::Mad:
            return detect_mad(history, config.safety);
        case DetectorKind::Lr:
            return detect_lr(history, config.safety);
    }
    return {};
}

std::vector<std::optional<DetectionResult>> detect_all_serial(
    const std::vector<HostState>& hosts, const DetectorConfig& config,
    std::uint64_t run_seed, std::uint64_t interval_index) {
    std::vector<std::optional<DetectionResult>> results(hosts.size());
    for (std::size_t h = 0; h < hosts.size(); ++h) {
        if (!hosts[h].active || hosts[h].history.empty()) continue;
        Rng rng(derive_seed(run_seed, h, interval_index));
        results[h] = detect(hosts[h].history, config, rng);
    }
    return results;
}

std::vector<std::optional<DetectionResult>> detect_all_openmp(
    const std::vector<HostState>& hosts, const DetectorConfig& config,
    std::uint64_t run_seed, std::uint64_t interval_index, int n_threads) {
    std::vector<std::optional<DetectionResult>> results(hosts.size());
    const std::int64_t n = std::int64_t(hosts.size());
#ifndef _OPENMP
    (void)n_threads;
#else
#pragma omp parallel for schedule(dynamic) \
    num_threads(n_threads > 0 ? n_threads : omp_get_max_threads())
#endif
    for (std::int64_t h = 0; h < n; ++h) {
        const HostState& host = hosts[std::size_t(h)];
        if (!host.active || host.history.empty()) continue;
        Rng rng(derive_seed(run_seed, std::uint64_t(h), interval_index));
        results[std::size_t(h)] = detect(host.history, config, rng);
    }
    return results;
}

}  // namespace vmc
