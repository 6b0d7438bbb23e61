#pragma once

#include <cstddef>
#include <span>

#include "vmcsim/domain.hpp"

namespace vmc {

// Per-resource weights of the load score. Keep each in (0,1]; unit weights
// guarantee the score stays >= 1 and the normalized target stays in [0,1).
struct ResourceWeights {
    double w1 = 1.0;  // cpu
    double w2 = 1.0;  // ram
    double w3 = 1.0;  // bw

    friend bool operator==(const ResourceWeights&,
                           const ResourceWeights&) = default;
};

struct RegressionModel {
    double b0 = 0.0;
    double b1 = 0.0;  // cpu
    double b2 = 0.0;  // ram
    double b3 = 0.0;  // bw
    std::size_t n_samples = 0;

    friend bool operator==(const RegressionModel&,
                           const RegressionModel&) = default;
};

struct TrainingRow {
    UtilizationSample sample;
    double target = 0.0;
};

// Y = [w1/(1-cpu)] * [w2/(1-ram)] * [w3/(1-bw)]; utilizations at (or above)
// 1 are pinned to 1 - 1e-6 first so the score stays finite.
double load_score(const UtilizationSample& sample,
                  const ResourceWeights& weights);

// u = 1 - 1/Y clamped to [0, 1-1e-6]. With unit weights and a single busy
// resource this is exactly that resource's utilization.
double regression_target(const UtilizationSample& sample,
                         const ResourceWeights& weights);

// Least-squares fit of target = b0 + b1*cpu + b2*ram + b3*bw via Householder
// QR. Throws SingularFit naming the first linearly dependent column, and
// std::invalid_argument when fewer than 4 rows are supplied.
RegressionModel fit_ols(std::span<const TrainingRow> rows);

// b0 + b1*cpu + b2*ram + b3*bw, deliberately unclamped: callers compare the
// raw prediction against thresholds.
double predict_utilization(const RegressionModel& model,
                           const UtilizationSample& sample);

}  // namespace vmc
