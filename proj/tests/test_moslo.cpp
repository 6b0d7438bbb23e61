#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "vmcsim/errors.hpp"
#include "vmcsim/moslo.hpp"

using namespace vmc;

namespace {

std::vector<UtilizationSample> cpu_only(std::initializer_list<double> cpus) {
    std::vector<UtilizationSample> out;
    for (double c : cpus) out.push_back({c, 0.0, 0.0});
    return out;
}

std::vector<UtilizationSample> random_history(Rng& rng, std::size_t n) {
    std::vector<UtilizationSample> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    return out;
}

}  // namespace

TEST_CASE("fitness weighs cpu twice as heavily as ram and bw") {
    MosloConfig cfg;  // w_cpu 0.5, w_other 0.25
    Objective idle = fitness({0, 0, 0}, cfg);
    CHECK(idle.cpu == 0.0);
    CHECK(idle.ram == 0.0);
    CHECK(idle.bw == 0.0);
    CHECK(idle.scalar == 0.0);

    Objective mid = fitness({0.4, 0.2, 0.1}, cfg);
    CHECK(mid.cpu == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mid.ram == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(mid.bw == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(mid.scalar == doctest::Approx(0.275).epsilon(1e-15));

    Objective full = fitness({1, 1, 1}, cfg);
    CHECK(full.scalar == 1.0);  // 0.5 + 0.25 + 0.25, exact in binary
}

TEST_CASE("rank_utilizations sorts by cpu desc with ram/bw tie-breaks") {
    auto ranked = rank_utilizations(std::vector<UtilizationSample>{
        {0.2, 0.0, 0.0},
        {0.9, 0.1, 0.0},
        {0.9, 0.4, 0.0},
        {0.5, 0.0, 0.7},
        {0.5, 0.0, 0.2},
    });
    REQUIRE(ranked.size() == 5);
    CHECK(ranked[0] == UtilizationSample{0.9, 0.4, 0.0});
    CHECK(ranked[1] == UtilizationSample{0.9, 0.1, 0.0});
    CHECK(ranked[2] == UtilizationSample{0.5, 0.0, 0.7});
    CHECK(ranked[3] == UtilizationSample{0.5, 0.0, 0.2});
    CHECK(ranked[4] == UtilizationSample{0.2, 0.0, 0.0});
}

TEST_CASE("rank_utilizations is stable for exact duplicates") {
    std::vector<UtilizationSample> h = {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
    auto ranked = rank_utilizations(h);
    CHECK(ranked == h);
}

TEST_CASE("velocity_component hand examples") {
    // c*r*(target-current) + eps = 2*0.5*0.2 + 0.01 = 0.21, clamped to 0.15.
    double v = velocity_component(2.0, 0.5, 0.8, 0.6, 0.01, 0.15);
    CHECK(v == 0.15);
    CHECK(0.6 + v == doctest::Approx(0.75).epsilon(1e-15));

    // Zero step constant leaves just the nudge.
    CHECK(velocity_component(0.0, 0.9, 0.8, 0.6, 0.01, 0.15) == 0.01);

    // Negative displacement clamps at the lower bound.
    CHECK(velocity_component(2.0, 1.0, 0.0, 1.0, 0.0, 0.15) == -0.15);

    // Inside the clamp the formula is exact.
    CHECK(velocity_component(2.0, 0.25, 0.8, 0.6, 0.01, 0.5) ==
          2.0 * 0.25 * (0.8 - 0.6) + 0.01);
}

TEST_CASE("respawn_component hand example") {
    double p = respawn_component(0.7, -0.5, 0.1);
    CHECK(p == 0.7 + (-0.5) * 0.1);
    CHECK(p == doctest::Approx(0.65).epsilon(1e-15));
}

TEST_CASE("seed_swarm draws positions from history without evaluating") {
    MosloConfig cfg;
    Rng rng(3);
    auto history = cpu_only({0.1, 0.4, 0.8});
    Swarm swarm = seed_swarm(history, cfg, rng);
    REQUIRE(int(swarm.members.size()) == cfg.population());
    CHECK(swarm.gbest_scalar == std::numeric_limits<double>::infinity());
    CHECK(swarm.iteration == 0);
    for (const Ladybird& lb : swarm.members) {
        CHECK(lb.sbest_scalar == std::numeric_limits<double>::infinity());
        CHECK(lb.stagnation_counter == 0);
        CHECK(lb.velocity[0] == 0.0);
        bool from_history = false;
        for (const auto& h : history)
            if (lb.position == h) from_history = true;
        CHECK(from_history);
    }
}

TEST_CASE("seed_swarm clamps full-utilization picks") {
    MosloConfig cfg;
    Rng rng(4);
    std::vector<UtilizationSample> history = {{1.0, 1.0, 1.0}};
    Swarm swarm = seed_swarm(history, cfg, rng);
    for (const Ladybird& lb : swarm.members) {
        CHECK(lb.position.cpu == 1.0 - 1e-6);
        CHECK(lb.position.ram == 1.0 - 1e-6);
        CHECK(lb.position.bw == 1.0 - 1e-6);
    }
}

TEST_CASE("seed_swarm refuses an empty history") {
    MosloConfig cfg;
    Rng rng(5);
    std::vector<UtilizationSample> empty;
    CHECK_THROWS_AS((void)seed_swarm(empty, cfg, rng), NoValidThreshold);
}

TEST_CASE("gbest never worsens and velocities respect the clamp") {
    MosloConfig cfg;
    cfg.max_iterations = 30;
    Rng outer(2718);
    for (int trial = 0; trial < 50; ++trial) {
        auto history = random_history(outer, 1 + outer.below(12));
        Rng rng(outer.engine()());
        Swarm swarm = seed_swarm(history, cfg, rng);
        double last = std::numeric_limits<double>::infinity();
        for (int it = 0; it < cfg.max_iterations; ++it) {
            step_swarm(swarm, cfg, rng);
            CHECK(swarm.gbest_scalar <= last);
            last = swarm.gbest_scalar;
            for (const Ladybird& lb : swarm.members)
                for (double v : lb.velocity)
                    CHECK(std::abs(v) <= cfg.v_max + 1e-15);
        }
        CHECK(std::isfinite(swarm.gbest_scalar));
    }
}

TEST_CASE("positions stay inside [0, 1 - 1e-6] after every step") {
    MosloConfig cfg;
    Rng rng(31);
    auto history = random_history(rng, 8);
    Swarm swarm = seed_swarm(history, cfg, rng);
    for (int it = 0; it < 40; ++it) {
        step_swarm(swarm, cfg, rng);
        for (const Ladybird& lb : swarm.members) {
            for (double x : {lb.position.cpu, lb.position.ram, lb.position.bw}) {
                CHECK(x >= 0.0);
                CHECK(x <= 1.0 - 1e-6);
            }
        }
    }
}

TEST_CASE("stagnating ladybirds respawn near gbest with zeroed velocity") {
    MosloConfig cfg;
    cfg.n_patches = 1;
    cfg.ladybirds_per_patch = 3;
    cfg.stagnation_limit = 1;
    cfg.neighborhood = 0.05;
    Rng rng(8);
    // Single history point: every ladybird starts at the same position, so
    // after the first improvement nothing can beat its sbest again.
    std::vector<UtilizationSample> history = {{0.5, 0.5, 0.5}};
    Swarm swarm = seed_swarm(history, cfg, rng);
    step_swarm(swarm, cfg, rng);  // first evaluation; counters reset to 0

    // Force everyone back onto the evaluated optimum so the next evaluation
    // cannot improve and the counters hit the limit.
    for (Ladybird& lb : swarm.members) {
        lb.position = swarm.gbest_position;
        lb.velocity[0] = lb.velocity[1] = lb.velocity[2] = 0.123;
    }
    step_swarm(swarm, cfg, rng);

    for (const Ladybird& lb : swarm.members) {
        CHECK(lb.stagnation_counter == 0);  // reset by the respawn
        for (double v : lb.velocity) CHECK(v == 0.0);
        CHECK(std::abs(lb.position.cpu - swarm.gbest_position.cpu) <=
              cfg.neighborhood + 1e-12);
        CHECK(std::abs(lb.position.ram - swarm.gbest_position.ram) <=
              cfg.neighborhood + 1e-12);
        CHECK(std::abs(lb.position.bw - swarm.gbest_position.bw) <=
              cfg.neighborhood + 1e-12);
    }
}

TEST_CASE("select_thresholds reduces to history ranking with zero iterations") {
    MosloConfig cfg;
    cfg.max_iterations = 0;
    Rng rng(cfg.rng_seed);
    auto history = cpu_only({0.0, 0.2, 0.5, 0.9, 1.0});
    ThresholdPair th = select_thresholds(history, cfg, rng);
    CHECK(th.th_upper == 0.9);
    CHECK(th.th_low == 0.2);
}

TEST_CASE("a flat history collapses both thresholds onto the plateau") {
    MosloConfig cfg;
    cfg.max_iterations = 0;
    Rng rng(1);
    auto history = cpu_only({0.5, 0.5, 0.5, 0.5});
    ThresholdPair th = select_thresholds(history, cfg, rng);
    CHECK(th.th_low == 0.5);
    CHECK(th.th_upper == 0.5);
}

TEST_CASE("histories with no cpu in (0,1) have no valid thresholds") {
    MosloConfig cfg;
    cfg.max_iterations = 0;
    Rng rng(1);
    auto history = cpu_only({0.0, 1.0, 0.0, 1.0});
    CHECK_THROWS_AS((void)select_thresholds(history, cfg, rng),
                    NoValidThreshold);
}

TEST_CASE("select_thresholds is deterministic in the seed") {
    MosloConfig cfg;
    Rng outer(12);
    auto history = random_history(outer, 10);
    Rng r1(42), r2(42), r3(43);
    ThresholdPair a = select_thresholds(history, cfg, r1);
    ThresholdPair b = select_thresholds(history, cfg, r2);
    CHECK(a == b);
    (void)select_thresholds(history, cfg, r3);  // different seed still sane
}

TEST_CASE("thresholds come from the candidate pool and satisfy the order") {
    MosloConfig cfg;
    Rng outer(55);
    for (int trial = 0; trial < 100; ++trial) {
        auto history = random_history(outer, 1 + outer.below(12));
        Rng rng(outer.engine()());
        std::vector<UtilizationSample> candidates;
        ThresholdPair th;
        try {
            th = select_thresholds(history, cfg, rng, &candidates);
        } catch (const NoValidThreshold&) {
            continue;
        }
        CHECK(th.th_low > 0.0);
        CHECK(th.th_low <= th.th_upper);
        CHECK(th.th_upper < 1.0);
        bool low_found = false, upper_found = false;
        for (const auto& c : candidates) {
            if (c.cpu == th.th_low) low_found = true;
            if (c.cpu == th.th_upper) upper_found = true;
        }
        CHECK(low_found);
        CHECK(upper_found);
        // Raw history is part of the pool.
        for (const auto& h : history) {
            bool present = false;
            for (const auto& c : candidates)
                if (c == h) present = true;
            CHECK(present);
        }
    }
}

TEST_CASE("invalid configurations are rejected up front") {
    Rng rng(1);
    auto history = cpu_only({0.3, 0.6});

    MosloConfig tiny;
    tiny.n_patches = 1;
    tiny.ladybirds_per_patch = 1;
    CHECK_THROWS_AS((void)select_thresholds(history, tiny, rng), ConfigError);

    MosloConfig weights;
    weights.w_cpu = 0.2;
    weights.w_other = 0.4;
    CHECK_THROWS_AS((void)select_thresholds(history, weights, rng),
                    ConfigError);

    MosloConfig vmax;
    vmax.v_max = 0.0;
    CHECK_THROWS_AS((void)select_thresholds(history, vmax, rng), ConfigError);

    MosloConfig stag;
    stag.stagnation_limit = 0;
    CHECK_THROWS_AS((void)select_thresholds(history, stag, rng), ConfigError);

    MosloConfig negiter;
    negiter.max_iterations = -1;
    CHECK_THROWS_AS((void)select_thresholds(history, negiter, rng),
                    ConfigError);
}
