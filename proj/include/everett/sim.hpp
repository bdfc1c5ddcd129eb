#pragma once

// Monte Carlo realization of the branching topology.
//
// Two views of the same process:
//   outside view  - sample_branch_tree: the whole topology of one particle,
//                   a Poisson stream of branching events on the spine.
//   inside view   - one observer lineage per particle, sampled either by
//                   walking the spine event by event (mechanistic) or by
//                   drawing the geometric branch index and the Erlang time
//                   directly (direct). The two samplers realize the same law
//                   and are cross-validated against each other in the tests.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "everett/analytic.hpp"
#include "everett/rng.hpp"

namespace everett::sim {

enum class Sampler { mechanistic, direct };

inline std::string to_string(Sampler s) {
    return s == Sampler::mechanistic ? "mechanistic" : "direct";
}

inline Sampler sampler_from_string(const std::string& name) {
    if (name == "mechanistic") return Sampler::mechanistic;
    if (name == "direct") return Sampler::direct;
    throw std::invalid_argument("unknown sampler '" + name + "' (expected 'mechanistic' or 'direct')");
}

/// Outside view of one particle: the times of the branching events on the
/// spine, truncated at a finite horizon. Event i creates ground branch B_i.
struct BranchTree {
    std::vector<double> spine_event_times; // strictly increasing, in (0, horizon]
    double horizon = 0.0;
    double lambda_B = 0.0;
    double epsilon = 0.0;
};

/// Inside view of one particle for one observer lineage: the decay is seen
/// at the branch_index-th branching event, at decay_time.
struct ObserverRecord {
    std::uint64_t particle_id = 0;
    std::uint64_t branch_index = 1;
    double decay_time = 0.0;
};

/// Batch configuration for simulate_sample. threads only affects wall time;
/// the output is a pure function of (params, n_particles, seed, sampler).
struct ExperimentConfig {
    double lambda_B = 1.0;
    double epsilon = 0.0;
    std::uint64_t n_particles = 1;
    std::uint64_t seed = 0;
    Sampler sampler = Sampler::direct;
    double horizon = 10.0;    // tree export only
    double confidence = 0.95; // estimation only
    unsigned threads = 1;
};

/// N observer records plus the generating parameters; the unit of estimation.
struct DecayDataset {
    std::vector<ObserverRecord> records;
    RateParams params{1.0, 0.0};
    std::uint64_t seed = 0;
    Sampler sampler = Sampler::direct;
};

/// Samples the spine of the topology: a homogeneous Poisson process of rate
/// lambda_B on (0, horizon]. Expected event count is lambda_B * horizon.
inline BranchTree sample_branch_tree(const RateParams& params, double horizon,
                                     RngStream& stream) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::domain_error("sample_branch_tree: horizon must be positive and finite");
    }
    BranchTree tree;
    tree.horizon = horizon;
    tree.lambda_B = params.lambda_B();
    tree.epsilon = params.epsilon();
    double t = stream.exponential(params.lambda_B());
    while (t <= horizon) {
        tree.spine_event_times.push_back(t);
        t += stream.exponential(params.lambda_B());
    }
    return tree;
}

/// Walks the spine event by event: draws the Exponential(lambda_B) gap to the
/// next branching event, then keeps the observer on the excited branch with
/// probability epsilon or exits onto the ground branch with probability
/// 1 - epsilon. Terminates with probability 1 since epsilon < 1.
inline ObserverRecord sample_observer_mechanistic(const RateParams& params,
                                                  RngStream& stream) {
    ObserverRecord rec;
    double t = 0.0;
    std::uint64_t i = 0;
    for (;;) {
        t += stream.exponential(params.lambda_B());
        ++i;
        const bool stays_excited = stream.bernoulli(params.epsilon());
        if (!stays_excited) {
            break;
        }
    }
    rec.branch_index = i;
    rec.decay_time = t;
    return rec;
}

/// Draws the branch index from the geometric law, then the decay time as the
/// sum of branch_index independent Exponential(lambda_B) gaps. Same law as
/// the mechanistic walk.
inline ObserverRecord sample_observer_direct(const RateParams& params,
                                             RngStream& stream) {
    ObserverRecord rec;
    rec.branch_index = stream.geometric_from_one(params.epsilon());
    double t = 0.0;
    for (std::uint64_t k = 0; k < rec.branch_index; ++k) {
        t += stream.exponential(params.lambda_B());
    }
    rec.decay_time = t;
    return rec;
}

/// Simulates config.n_particles observer records. Particle k draws only from
/// the stream keyed (seed, k), so the result is independent of execution
/// order and thread count.
inline DecayDataset simulate_sample(const ExperimentConfig& config) {
    if (config.n_particles < 1) {
        throw std::invalid_argument("simulate_sample: n_particles must be >= 1");
    }
    const RateParams params(config.lambda_B, config.epsilon);
    DecayDataset ds;
    ds.params = params;
    ds.seed = config.seed;
    ds.sampler = config.sampler;
    ds.records.resize(config.n_particles);

    const auto sample_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t pid = begin; pid < end; ++pid) {
            RngStream stream(config.seed, pid);
            ObserverRecord rec = (config.sampler == Sampler::mechanistic)
                                     ? sample_observer_mechanistic(params, stream)
                                     : sample_observer_direct(params, stream);
            rec.particle_id = pid;
            ds.records[pid] = rec;
        }
    };

    unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency()
                                           : config.threads;
    if (threads <= 1 || config.n_particles < 2 * threads) {
        sample_range(0, config.n_particles);
        return ds;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (config.n_particles + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
        const std::uint64_t end = std::min(begin + chunk, config.n_particles);
        if (begin >= end) {
            break;
        }
        pool.emplace_back(sample_range, begin, end);
    }
    for (auto& worker : pool) {
        worker.join();
    }
    return ds;
}

/// Empirical survivor curve: fraction of records with decay_time > t for
/// each grid point. No censoring exists in this model, so this is a plain
/// exceedance fraction.
inline std::vector<double> empirical_survival(const DecayDataset& dataset,
                                              const std::vector<double>& grid) {
    if (dataset.records.empty()) {
        throw std::invalid_argument("empirical_survival: empty dataset");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0) || (k > 0 && !(grid[k] > grid[k - 1]))) {
            throw std::invalid_argument(
                "empirical_survival: grid must be nonnegative and strictly increasing");
        }
    }
    std::vector<double> times;
    times.reserve(dataset.records.size());
    for (const auto& rec : dataset.records) {
        times.push_back(rec.decay_time);
    }
    std::sort(times.begin(), times.end());
    const double n = static_cast<double>(times.size());
    std::vector<double> survival;
    survival.reserve(grid.size());
    for (double t : grid) {
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        survival.push_back(static_cast<double>(times.end() - it) / n);
    }
    return survival;
}

/// Histogram of branch indices over classes 1..max_i plus one overflow
/// bucket at the end; entries sum to the dataset size.
inline std::vector<std::uint64_t> branch_class_counts(const DecayDataset& dataset,
                                                      std::int64_t max_i) {
    if (max_i < 1) {
        throw std::invalid_argument("branch_class_counts: max_i must be >= 1");
    }
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_i) + 1, 0);
    for (const auto& rec : dataset.records) {
        const std::size_t slot =
            rec.branch_index <= static_cast<std::uint64_t>(max_i)
                ? static_cast<std::size_t>(rec.branch_index - 1)
                : static_cast<std::size_t>(max_i);
        ++counts[slot];
    }
    return counts;
}

} // namespace everett::sim
