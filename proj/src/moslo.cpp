#include "vmcsim/moslo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmcsim/errors.hpp"

namespace vmc {

namespace {

constexpr double kLo = 0.0;
constexpr double kHi = 1.0 - 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_position(double x) {
    if (x < kLo) return kLo;
    if (x > kHi) return kHi;
    return x;
}

UtilizationSample clamp_position(UtilizationSample s) {
    s.cpu = clamp_position(s.cpu);
    s.ram = clamp_position(s.ram);
    s.bw = clamp_position(s.bw);
    return s;
}

// Mirror an overshoot back into [kLo, kHi]; one bounce suffices for the
// 2P - gbest construction, the clamp catches pathological inputs.
double reflect(double x) {
    if (x > kHi) x = 2.0 * kHi - x;
    if (x < kLo) x = 2.0 * kLo - x;
    return clamp_position(x);
}

void check_config(const MosloConfig& cfg) {
    if (cfg.population() < 2)
        throw ConfigError("moslo: population n_patches*ladybirds_per_patch < 2");
    if (cfg.max_iterations < 0) throw ConfigError("moslo: max_iterations < 0");
    if (cfg.stagnation_limit < 1) throw ConfigError("moslo: stagnation_limit < 1");
    if (!(cfg.v_max > 0.0)) throw ConfigError("moslo: v_max must be > 0");
    if (!(cfg.w_cpu > cfg.w_other && cfg.w_other > 0.0))
        throw ConfigError("moslo: weights must satisfy w_cpu > w_other > 0");
    if (cfg.neighborhood < 0.0) throw ConfigError("moslo: negative neighborhood");
    if (cfg.step_constant < 0.0) throw ConfigError("moslo: negative step constant");
}

}  // namespace

Objective fitness(const UtilizationSample& position,
                  const MosloConfig& config) {
    Objective obj;
    obj.cpu = config.w_cpu * position.cpu;
    obj.ram = config.w_other * position.ram;
    obj.bw = config.w_other * position.bw;
    obj.scalar = obj.cpu + obj.ram + obj.bw;
    return obj;
}

std::vector<UtilizationSample> rank_utilizations(
    std::span<const UtilizationSample> history) {
    std::vector<UtilizationSample> ranked(history.begin(), history.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const UtilizationSample& a, const UtilizationSample& b) {
                         if (a.cpu != b.cpu) return a.cpu > b.cpu;
                         if (a.ram != b.ram) return a.ram > b.ram;
                         return a.bw > b.bw;
                     });
    return ranked;
}

Swarm seed_swarm(std::span<const UtilizationSample> history,
                 const MosloConfig& config, Rng& rng) {
    check_config(config);
    if (history.empty()) throw NoValidThreshold();

    Swarm swarm;
    swarm.patch_size = config.ladybirds_per_patch;
    swarm.members.resize(std::size_t(config.population()));
    for (Ladybird& bird : swarm.members) {
        const UtilizationSample& pick =
            history[std::size_t(rng.below(history.size()))];
        bird.position = clamp_position(pick);
        bird.sbest_position = bird.position;
        bird.sbest_scalar = kInf;
    }
    swarm.lbest_position.resize(std::size_t(config.n_patches));
    swarm.lbest_scalar.assign(std::size_t(config.n_patches), kInf);
    swarm.gbest_scalar = kInf;
    return swarm;
}

double velocity_component(double c, double r, double target, double current,
                          double eps, double v_max) {
    double v = c * r * (target - current) + eps;
    if (v > v_max) return v_max;
    if (v < -v_max) return -v_max;
    return v;
}

double respawn_component(double gbest, double phi, double omega) {
    return gbest + phi * omega;
}

void step_swarm(Swarm& swarm, const MosloConfig& config, Rng& rng,
                std::vector<UtilizationSample>* evaluated) {
    // Evaluation pass: score the current positions, track the bests.
    for (std::size_t i = 0; i < swarm.members.size(); ++i) {
        Ladybird& bird = swarm.members[i];
        Objective obj = fitness(bird.position, config);
        if (evaluated) evaluated->push_back(bird.position);
        if (obj.scalar < bird.sbest_scalar) {
            bird.sbest_scalar = obj.scalar;
            bird.sbest_position = bird.position;
            bird.stagnation_counter = 0;
        } else {
            ++bird.stagnation_counter;
        }
        std::size_t patch = i / std::size_t(swarm.patch_size);
        if (patch < swarm.lbest_scalar.size() &&
            obj.scalar < swarm.lbest_scalar[patch]) {
            swarm.lbest_scalar[patch] = obj.scalar;
            swarm.lbest_position[patch] = bird.position;
        }
        if (obj.scalar < swarm.gbest_scalar) {
            swarm.gbest_scalar = obj.scalar;
            swarm.gbest_position = bird.position;
        }
    }

    // Move pass. Even iterations explore away from gbest (extensive), odd
    // ones close in on it (intensive).
    const bool extensive = swarm.iteration % 2 == 0;
    const double eps = extensive ? config.eps1 : config.eps2;
    const double g[3] = {swarm.gbest_position.cpu, swarm.gbest_position.ram,
                         swarm.gbest_position.bw};
    for (Ladybird& bird : swarm.members) {
        double p[3] = {bird.position.cpu, bird.position.ram, bird.position.bw};
        if (bird.stagnation_counter >= config.stagnation_limit) {
            for (int k = 0; k < 3; ++k) {
                double phi = rng.uniform(-1.0, 1.0);
                p[k] = clamp_position(
                    respawn_component(g[k], phi, config.neighborhood));
                bird.velocity[k] = 0.0;
            }
            bird.stagnation_counter = 0;
        } else {
            double r = rng.uniform();
            for (int k = 0; k < 3; ++k) {
                double target = extensive ? reflect(p[k] + (p[k] - g[k])) : g[k];
                double v = velocity_component(config.step_constant, r, target,
                                              p[k], eps, config.v_max);
                bird.velocity[k] = v;
                p[k] = clamp_position(p[k] + v);
            }
        }
        bird.position = {p[0], p[1], p[2]};
    }
    ++swarm.iteration;
}

ThresholdPair select_thresholds(std::span<const UtilizationSample> history,
                                const MosloConfig& config, Rng& rng,
                                std::vector<UtilizationSample>* candidates_out) {
    Swarm swarm = seed_swarm(history, config, rng);

    std::vector<UtilizationSample> pool;
    pool.reserve(std::size_t(config.population()) *
                     std::size_t(config.max_iterations) +
                 history.size());
    for (int it = 0; it < config.max_iterations; ++it) {
        step_swarm(swarm, config, rng, &pool);
    }
    pool.insert(pool.end(), history.begin(), history.end());

    std::vector<UtilizationSample> ranked = rank_utilizations(pool);

    ThresholdPair out;
    bool have_upper = false, have_low = false;
    for (const UtilizationSample& s : ranked) {
        if (s.cpu < 1.0) {
            out.th_upper = s.cpu;
            have_upper = true;
            break;
        }
    }
    for (auto it = ranked.rbegin(); it != ranked.rend(); ++it) {
        if (it->cpu > 0.0) {
            out.th_low = it->cpu;
            have_low = true;
            break;
        }
    }
    if (!have_upper || !have_low || out.th_low > out.th_upper ||
        out.th_low <= 0.0 || out.th_upper >= 1.0) {
        throw NoValidThreshold();
    }
    if (candidates_out) *candidates_out = std::move(pool);
    return out;
}

}  // namespace vmc
