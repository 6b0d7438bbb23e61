#include <cmath>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "vmcsim/errors.hpp"
#include "vmcsim/regression.hpp"
#include "vmcsim/rng.hpp"

using namespace vmc;

namespace {

// Six well-spread samples; full column rank by construction.
std::vector<TrainingRow> spread_rows(double b0, double b1, double b2,
                                     double b3) {
    std::vector<UtilizationSample> xs = {
        {0.1, 0.2, 0.3}, {0.4, 0.1, 0.5}, {0.7, 0.6, 0.2},
        {0.2, 0.8, 0.6}, {0.5, 0.4, 0.9}, {0.9, 0.3, 0.1},
    };
    std::vector<TrainingRow> rows;
    for (const auto& x : xs)
        rows.push_back({x, b0 + b1 * x.cpu + b2 * x.ram + b3 * x.bw});
    return rows;
}

std::vector<TrainingRow> random_rows(Rng& rng, std::size_t n) {
    std::vector<TrainingRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        UtilizationSample s{rng.uniform(), rng.uniform(), rng.uniform()};
        rows.push_back({s, rng.uniform()});
    }
    return rows;
}

}  // namespace

TEST_CASE("load_score on idle and symmetric points") {
    ResourceWeights unit;
    CHECK(load_score({0, 0, 0}, unit) == doctest::Approx(1.0));
    CHECK(load_score({0.5, 0.5, 0.5}, unit) == doctest::Approx(8.0));
}

TEST_CASE("load_score with non-unit weights") {
    // 0.5/(1-0.9) * 0.3/(1-0.5) * 0.2/(1-0.0) = 5 * 0.6 * 0.2
    CHECK(load_score({0.9, 0.5, 0.0}, {0.5, 0.3, 0.2}) ==
          doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("load_score stays finite at full utilization") {
    ResourceWeights unit;
    double y = load_score({1.0, 1.0, 1.0}, unit);
    CHECK(std::isfinite(y));
    CHECK(y == doctest::Approx(1e18).epsilon(1e-4));
}

TEST_CASE("load_score is monotone in each resource") {
    ResourceWeights unit;
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        UtilizationSample s{rng.uniform() * 0.98, rng.uniform() * 0.98,
                            rng.uniform() * 0.98};
        double base = load_score(s, unit);
        UtilizationSample c = s, r = s, b = s;
        c.cpu += 0.01;
        r.ram += 0.01;
        b.bw += 0.01;
        CHECK(load_score(c, unit) > base);
        CHECK(load_score(r, unit) > base);
        CHECK(load_score(b, unit) > base);
    }
}

TEST_CASE("regression_target examples") {
    ResourceWeights unit;
    // Single busy resource with unit weights reproduces that utilization.
    CHECK(regression_target({0.7, 0, 0}, unit) ==
          doctest::Approx(0.7).epsilon(1e-12));
    CHECK(regression_target({0, 0, 0}, unit) == 0.0);
    // Y = 8 -> 1 - 1/8.
    CHECK(regression_target({0.5, 0.5, 0.5}, unit) ==
          doctest::Approx(0.875).epsilon(1e-12));
}

TEST_CASE("regression_target is clamped to [0, 1 - 1e-6]") {
    // Weights < 1 can push Y below 1, i.e. raw u below 0.
    CHECK(regression_target({0, 0, 0}, {0.5, 0.5, 0.5}) == 0.0);
    ResourceWeights unit;
    CHECK(regression_target({1, 1, 1}, unit) <= 1.0 - 1e-6);
    CHECK(regression_target({1, 1, 1}, unit) == doctest::Approx(1.0 - 1e-6));
}

TEST_CASE("fit_ols recovers exact linear coefficients") {
    auto rows = spread_rows(0.1, 0.5, 0.3, 0.2);
    RegressionModel m = fit_ols(rows);
    CHECK(m.n_samples == rows.size());
    CHECK(m.b0 == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(m.b1 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m.b2 == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(m.b3 == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("fit_ols on a constant target puts everything in the intercept") {
    auto rows = spread_rows(0.4, 0.0, 0.0, 0.0);
    RegressionModel m = fit_ols(rows);
    CHECK(m.b0 == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(m.b1 == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(m.b2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(m.b3 == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("fit_ols agrees with a normal-equations oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        auto rows = random_rows(rng, 4 + rng.below(47));
        oracle::NormalEquationsFit ref;
        try {
            ref = oracle::solve_normal_equations(rows);
        } catch (const std::exception&) {
            continue;  // oracle refused; nothing to compare
        }
        if (ref.min_pivot < 1e-7 * ref.max_pivot) continue;  // ill conditioned
        RegressionModel m = fit_ols(rows);
        double got[4] = {m.b0, m.b1, m.b2, m.b3};
        for (int i = 0; i < 4; ++i) {
            double tol = 1e-9 * std::max(1.0, std::abs(ref.coeffs[i]));
            CHECK(std::abs(got[i] - ref.coeffs[i]) <= tol);
        }
    }
}

TEST_CASE("fit_ols names the first dependent column") {
    SUBCASE("constant cpu column duplicates the intercept") {
        std::vector<TrainingRow> rows;
        Rng rng(5);
        for (int i = 0; i < 6; ++i)
            rows.push_back(
                {{0.5, rng.uniform(), rng.uniform()}, rng.uniform()});
        try {
            fit_ols(rows);
            FAIL("expected SingularFit");
        } catch (const SingularFit& e) {
            CHECK(e.column == "cpu");
        }
    }
    SUBCASE("ram tied to cpu blames ram") {
        std::vector<TrainingRow> rows;
        Rng rng(6);
        for (int i = 0; i < 6; ++i) {
            double c = rng.uniform();
            rows.push_back({{c, c, rng.uniform()}, rng.uniform()});
        }
        try {
            fit_ols(rows);
            FAIL("expected SingularFit");
        } catch (const SingularFit& e) {
            CHECK(e.column == "ram");
        }
    }
}

TEST_CASE("fit_ols rejects under-determined inputs") {
    auto rows = spread_rows(0.1, 0.5, 0.3, 0.2);
    rows.resize(3);
    CHECK_THROWS_AS((void)fit_ols(rows), std::invalid_argument);
}

TEST_CASE("least-squares residuals are orthogonal to the design columns") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        auto rows = random_rows(rng, 12);
        RegressionModel m = fit_ols(rows);
        double dot[4] = {0, 0, 0, 0};
        double scale = 0.0;
        for (const auto& row : rows) {
            double r = row.target - predict_utilization(m, row.sample);
            dot[0] += r;
            dot[1] += r * row.sample.cpu;
            dot[2] += r * row.sample.ram;
            dot[3] += r * row.sample.bw;
            scale += std::abs(row.target);
        }
        for (double d : dot) CHECK(std::abs(d) <= 1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("the fitted plane passes through the sample mean") {
    Rng rng(78);
    auto rows = random_rows(rng, 9);
    RegressionModel m = fit_ols(rows);
    UtilizationSample mean{};
    double target_mean = 0.0;
    for (const auto& row : rows) {
        mean.cpu += row.sample.cpu / double(rows.size());
        mean.ram += row.sample.ram / double(rows.size());
        mean.bw += row.sample.bw / double(rows.size());
        target_mean += row.target / double(rows.size());
    }
    CHECK(predict_utilization(m, mean) ==
          doctest::Approx(target_mean).epsilon(1e-9));
}

TEST_CASE("refitting on own predictions reproduces the model") {
    Rng rng(79);
    auto rows = random_rows(rng, 10);
    RegressionModel m = fit_ols(rows);
    for (auto& row : rows) row.target = predict_utilization(m, row.sample);
    RegressionModel m2 = fit_ols(rows);
    CHECK(m2.b0 == doctest::Approx(m.b0).epsilon(1e-9));
    CHECK(m2.b1 == doctest::Approx(m.b1).epsilon(1e-9));
    CHECK(m2.b2 == doctest::Approx(m.b2).epsilon(1e-9));
    CHECK(m2.b3 == doctest::Approx(m.b3).epsilon(1e-9));
}

TEST_CASE("predict_utilization is the plain affine form, unclamped") {
    RegressionModel m{0.1, 0.5, 0.3, 0.2, 6};
    CHECK(predict_utilization(m, {0.5, 0.5, 0.5}) ==
          doctest::Approx(0.6).epsilon(1e-12));
    RegressionModel hot{1.0, 1.0, 0.0, 0.0, 6};
    CHECK(predict_utilization(hot, {0.9, 0, 0}) ==
          doctest::Approx(1.9));  // may exceed 1
    RegressionModel zero{};
    CHECK(predict_utilization(zero, {0.7, 0.7, 0.7}) == 0.0);
}
