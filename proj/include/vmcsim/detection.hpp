#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vmcsim/domain.hpp"
#include "vmcsim/moslo.hpp"
#include "vmcsim/regression.hpp"
#include "vmcsim/rng.hpp"

namespace vmc {

enum class DetectorKind { MrMoslo, Thr, Iqr, Mad, Lr };

const char* to_string(DetectorKind kind);
std::optional<DetectorKind> detector_from_string(std::string_view name);

struct DetectorConfig {
    DetectorKind kind = DetectorKind::MrMoslo;
    double static_threshold = 0.8;  // THR
    double safety = 1.0;            // IQR/MAD/LR
    MosloConfig moslo;
    ResourceWeights weights;

    // Documented per-detector defaults: THR 0.8, IQR 1.5, MAD 2.5, LR 1.2.
    static DetectorConfig defaults_for(DetectorKind kind);
};

struct DetectionResult {
    LoadState state = LoadState::Normal;
    // The value compared against a threshold: the regression prediction for
    // mr-moslo, the extrapolated cpu for lr, the latest cpu otherwise.
    double predicted = std::numeric_limits<double>::quiet_NaN();
    std::optional<ThresholdPair> thresholds;  // mr-moslo only
    double baseline_threshold =
        std::numeric_limits<double>::quiet_NaN();  // thr/iqr/mad
    std::optional<RegressionModel> model;          // mr-moslo, real fit only
    bool fallback_fit = false;         // prediction fell back to latest target
    bool fallback_thresholds = false;  // thresholds fell back to (0.1, 0.9)
    bool warmup = false;               // history too short for this detector
};

// True when the two results agree field-for-field (doubles compared by bit
// pattern so NaNs count as equal).
bool same_result(const DetectionResult& a, const DetectionResult& b);

LoadState classify_predicted(double predicted, const ThresholdPair& thresholds);

// Algorithm: one-step-ahead OLS prediction of the load target, thresholds
// from the swarm-augmented ranking rule, then the three-way comparison.
// Degenerate windows never abort: a failed fit predicts the latest target, a
// failed threshold search uses (0.1, 0.9), both flagged.
DetectionResult detect_mr_moslo(std::span<const UtilizationSample> history,
                                const DetectorConfig& config, Rng& rng);

DetectionResult detect_thr(std::span<const UtilizationSample> history,
                           double static_threshold);
DetectionResult detect_iqr(std::span<const UtilizationSample> history,
                           double safety);
DetectionResult detect_mad(std::span<const UtilizationSample> history,
                           double safety);
DetectionResult detect_lr(std::span<const UtilizationSample> history,
                          double safety);

DetectionResult detect(std::span<const UtilizationSample> history,
                       const DetectorConfig& config, Rng& rng);

// Quantile with linear interpolation between closest ranks (h = (n-1)p).
double quantile_sorted(std::span<const double> sorted, double p);

// Least-squares line over indices 0..n-1 evaluated at n.
double lr_predict_next(std::span<const double> values);

// Per-host detection sweep. Inactive (or history-less) hosts yield nullopt.
// Each host draws from its own rng stream derived from (run_seed, host
// index, interval index), which is what makes the parallel variant
// bit-identical to this one.
std::vector<std::optional<DetectionResult>> detect_all_serial(
    const std::vector<HostState>& hosts, const DetectorConfig& config,
    std::uint64_t run_seed, std::uint64_t interval_index);

// Same contract, OpenMP over hosts. n_threads <= 0 means the OpenMP default.
std::vector<std::optional<DetectionResult>> detect_all_openmp(
    const std::vector<HostState>& hosts, const DetectorConfig& config,
    std::uint64_t run_seed, std::uint64_t interval_index, int n_threads);

}  // namespace vmc
