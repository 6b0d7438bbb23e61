#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vmcsim/domain.hpp"
#include "vmcsim/rng.hpp"

namespace vmc {

struct MosloConfig {
    int n_patches = 4;
    int ladybirds_per_patch = 5;
    int max_iterations = 20;  // 0 degenerates to pure history ranking
    int stagnation_limit = 5;
    double step_constant = 2.0;  // c
    double v_max = 0.2;
    double eps1 = 1e-3;          // extensive-phase nudge
    double eps2 = 1e-3;          // intensive-phase nudge
    double neighborhood = 0.05;  // omega, respawn radius around gbest
    double w_cpu = 0.5;          // W1
    double w_other = 0.25;       // W, shared by ram and bw
    std::uint64_t rng_seed = 1;

    int population() const { return n_patches * ladybirds_per_patch; }
};

struct Objective {
    double cpu = 0.0;
    double ram = 0.0;
    double bw = 0.0;
    double scalar = 0.0;  // sum of the three parts; lower is better
};

struct ThresholdPair {
    double th_low = 0.0;
    double th_upper = 0.0;

    friend bool operator==(const ThresholdPair&, const ThresholdPair&) = default;
};

struct Ladybird {
    UtilizationSample position;
    double velocity[3] = {0.0, 0.0, 0.0};
    UtilizationSample sbest_position;
    double sbest_scalar = 0.0;  // +inf until first evaluation
    int stagnation_counter = 0;
};

struct Swarm {
    std::vector<Ladybird> members;
    std::vector<UtilizationSample> lbest_position;  // one per patch
    std::vector<double> lbest_scalar;
    UtilizationSample gbest_position;
    double gbest_scalar = 0.0;  // +inf until first evaluation
    int iteration = 0;          // next iteration index; even = extensive
    int patch_size = 1;
};

// Weighted triple (W1*cpu, W*ram, W*bw); the scalar sums the parts.
Objective fitness(const UtilizationSample& position, const MosloConfig& config);

// Descending by cpu; ties by ram desc, bw desc, then original order.
std::vector<UtilizationSample> rank_utilizations(
    std::span<const UtilizationSample> history);

// Positions drawn from history with replacement and clamped into
// [0, 1-1e-6]; nothing is evaluated until the first step.
Swarm seed_swarm(std::span<const UtilizationSample> history,
                 const MosloConfig& config, Rng& rng);

// One iteration: evaluate everyone (appending to `evaluated` if given),
// update sbest/lbest/gbest, then move. Stagnated ladybirds respawn near
// gbest; the rest take the extensive move away from gbest on even
// iterations and the intensive move toward it on odd ones.
void step_swarm(Swarm& swarm, const MosloConfig& config, Rng& rng,
                std::vector<UtilizationSample>* evaluated = nullptr);

// Exposed pieces of the update rule so the arithmetic can be checked in
// isolation.
double velocity_component(double c, double r, double target, double current,
                          double eps, double v_max);
double respawn_component(double gbest, double phi, double omega);

// Swarm-augmented ranking rule: runs the swarm over the history window,
// pools every evaluated position with the raw history, ranks the pool, and
// picks th_upper = highest cpu < 1, th_low = lowest cpu > 0. Throws
// NoValidThreshold when no pooled cpu lies in (0,1). `candidates_out`, when
// given, receives the pooled set.
ThresholdPair select_thresholds(
    std::span<const UtilizationSample> history, const MosloConfig& config,
    Rng& rng, std::vector<UtilizationSample>* candidates_out = nullptr);

}  // namespace vmc
