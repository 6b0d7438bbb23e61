#include "vmcsim/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vmcsim/errors.hpp"

namespace vmc {

namespace {

constexpr double kPin = 1.0 - 1e-6;

double pinned(double utilization) {
    return utilization > kPin ? kPin : utilization;
}

}  // namespace

double load_score(const UtilizationSample& sample,
                  const ResourceWeights& weights) {
    return (weights.w1 / (1.0 - pinned(sample.cpu))) *
           (weights.w2 / (1.0 - pinned(sample.ram))) *
           (weights.w3 / (1.0 - pinned(sample.bw)));
}

double regression_target(const UtilizationSample& sample,
                         const ResourceWeights& weights) {
    double u = 1.0 - 1.0 / load_score(sample, weights);
    if (u < 0.0) return 0.0;
    if (u > kPin) return kPin;
    return u;
}

RegressionModel fit_ols(std::span<const TrainingRow> rows) {
    constexpr int kCols = 4;
    static const char* kColumnNames[kCols] = {"intercept", "cpu", "ram", "bw"};

    const std::size_t n = rows.size();
    if (n < kCols) throw std::invalid_argument("fit_ols: need at least 4 rows");

    // Column-major design matrix [1, cpu, ram, bw] and the target vector.
    std::array<std::vector<double>, kCols> a;
    std::vector<double> y(n);
    for (auto& col : a) col.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[0][i] = 1.0;
        a[1][i] = rows[i].sample.cpu;
        a[2][i] = rows[i].sample.ram;
        a[3][i] = rows[i].sample.bw;
        y[i] = rows[i].target;
    }

    std::array<double, kCols> column_norm0{};
    for (int j = 0; j < kCols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[j][i] * a[j][i];
        column_norm0[j] = std::sqrt(s);
    }

    // Householder QR, one reflection per column.
    for (int j = 0; j < kCols; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += a[j][i] * a[j][i];
        norm = std::sqrt(norm);
        if (norm <= 1e-10 * std::max(column_norm0[j], 1e-300)) {
            throw SingularFit(kColumnNames[j]);
        }
        if (a[j][std::size_t(j)] > 0.0) norm = -norm;

        // v = x - norm*e1, normalized implicitly through beta.
        std::vector<double> v(n - std::size_t(j));
        v[0] = a[j][std::size_t(j)] - norm;
        for (std::size_t i = j + 1; i < n; ++i) v[i - std::size_t(j)] = a[j][i];
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        a[j][std::size_t(j)] = norm;  // R diagonal
        for (std::size_t i = j + 1; i < n; ++i) a[j][i] = 0.0;
        if (vtv == 0.0) continue;

        auto reflect = [&](std::vector<double>& col) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i)
                dot += v[i - std::size_t(j)] * col[i];
            double scale = 2.0 * dot / vtv;
            for (std::size_t i = j; i < n; ++i)
                col[i] -= scale * v[i - std::size_t(j)];
        };
        for (int k = j + 1; k < kCols; ++k) reflect(a[k]);
        reflect(y);
    }

    // Back-substitution on the 4x4 upper triangle.
    std::array<double, kCols> b{};
    for (int j = kCols - 1; j >= 0; --j) {
        double s = y[std::size_t(j)];
        for (int k = j + 1; k < kCols; ++k) s -= a[k][std::size_t(j)] * b[k];
        b[j] = s / a[j][std::size_t(j)];
    }

    RegressionModel model;
    model.b0 = b[0];
    model.b1 = b[1];
    model.b2 = b[2];
    model.b3 = b[3];
    model.n_samples = n;
    return model;
}

double predict_utilization(const RegressionModel& model,
                           const UtilizationSample& sample) {
    return model.b0 + model.b1 * sample.cpu + model.b2 * sample.ram +
           model.b3 * sample.bw;
}

}  // namespace vmc
