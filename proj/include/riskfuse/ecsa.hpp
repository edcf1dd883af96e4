#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "riskfuse/error.hpp"

namespace riskfuse::ecsa {

using Position = Eigen::VectorXd;
/// Objective to minimize; receives the (possibly binarized) position.
using Objective = std::function<double(const Position&)>;

enum class SearchMode { continuous, binary };

/// Thrown when the objective fails; the message carries iteration and crow index.
class ObjectiveError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Seeded random source shared by all stochastic steps of one run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return unit_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }
    template <class It>
    void shuffle(It first, It last) {
        std::shuffle(first, last, engine_);
    }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// SplitMix64 step; gives well separated streams for (master seed, run index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    static Bounds uniform(std::size_t dim, double lo, double hi) {
        return {std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
    }
    std::size_t dimension() const noexcept { return lower.size(); }

    Position clamp(Position p) const {
        for (Eigen::Index d = 0; d < p.size(); ++d) {
            const auto i = static_cast<std::size_t>(d);
            p(d) = std::clamp(p(d), lower[i], upper[i]);
        }
        return p;
    }
};

struct EcsaConfig {
    std::size_t population_size = 10;
    std::size_t max_iterations = 100;
    double flight_length = 2.0;
    double ap_min = 0.1;
    double ap_max = 0.8;
    Bounds bounds;
    double beta = 0.9;
    std::uint64_t seed = 0;
    SearchMode mode = SearchMode::continuous;
    double binary_threshold = 0.5;
    /// Draw the binarization threshold uniformly per element instead of using binary_threshold.
    bool stochastic_threshold = false;
    /// Ring neighborhood half-width on the shuffled crow order (2 gives 5 crows including self).
    std::size_t neighborhood_radius = 2;
    /// Positions that replace the first random crows of the initial population.
    std::vector<Position> injected_positions;

    std::size_t dimension() const noexcept { return bounds.dimension(); }

    void validate() const {
        auto fail = [](const std::string& what) { throw ArgumentError("EcsaConfig: " + what); };
        if (population_size < 2) fail("population_size must be >= 2");
        if (max_iterations < 1) fail("max_iterations must be >= 1");
        if (!(ap_min >= 0.0 && ap_min < ap_max && ap_max <= 1.0)) {
            fail("require 0 <= ap_min < ap_max <= 1");
        }
        if (!(beta >= 0.0 && beta <= 1.0)) fail("beta must lie in [0, 1]");
        if (!(binary_threshold >= 0.0 && binary_threshold <= 1.0)) {
            fail("binary_threshold must lie in [0, 1]");
        }
        if (!std::isfinite(flight_length)) fail("flight_length must be finite");
        if (bounds.lower.empty() || bounds.lower.size() != bounds.upper.size()) {
            fail("bounds must be non-empty with matching lower/upper lengths");
        }
        for (std::size_t d = 0; d < bounds.lower.size(); ++d) {
            if (!(bounds.lower[d] < bounds.upper[d])) fail("each lower bound must be < upper");
        }
        for (const auto& p : injected_positions) {
            if (static_cast<std::size_t>(p.size()) != dimension()) {
                fail("injected position has the wrong dimension");
            }
        }
        if (injected_positions.size() > population_size) fail("too many injected positions");
    }
};

/// Validates an AP range without requiring the strict inequality of the full config.
inline double dynamic_awareness_probability(std::size_t rank, std::size_t population_size,
                                            double ap_min, double ap_max) {
    if (rank < 1 || rank > population_size) {
        std::ostringstream msg;
        msg << "dynamic_awareness_probability: rank " << rank << " outside 1.." << population_size;
        throw ArgumentError(msg.str());
    }
    return ap_min + (ap_max - ap_min) * static_cast<double>(rank) /
                        static_cast<double>(population_size);
}

inline double dynamic_awareness_probability(std::size_t rank, const EcsaConfig& config) {
    return dynamic_awareness_probability(rank, config.population_size, config.ap_min,
                                         config.ap_max);
}

/// Step-size coefficient 2 exp(-(4 itr / max_itr)^2).
inline double c1_coefficient(std::size_t itr, std::size_t max_itr) {
    if (max_itr == 0 || itr > max_itr) throw ArgumentError("c1_coefficient: itr outside [0, max]");
    const double x = 4.0 * static_cast<double>(itr) / static_cast<double>(max_itr);
    return 2.0 * std::exp(-x * x);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Bit d is 1 iff sigmoid(u_d) >= threshold; with stochastic = true the threshold is drawn per bit.
inline Position binarize(const Position& position, double threshold, bool stochastic, Rng* rng) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ArgumentError("binarize: threshold must lie in [0, 1]");
    }
    if (stochastic && rng == nullptr) throw ArgumentError("binarize: stochastic mode needs an RNG");
    Position bits(position.size());
    for (Eigen::Index d = 0; d < position.size(); ++d) {
        const double sigma = stochastic ? rng->uniform() : threshold;
        bits(d) = sigmoid(position(d)) >= sigma ? 1.0 : 0.0;
    }
    return bits;
}

/// beta * err + (1 - beta) * penalty, where the penalty is 1 in continuous mode and
/// the selected-subset fraction in binary mode.
inline double fitness(double err, double beta, SearchMode mode, double subset_fraction = 1.0) {
    if (!(subset_fraction >= 0.0 && subset_fraction <= 1.0)) {
        throw ArgumentError("fitness: subset_fraction must lie in [0, 1]");
    }
    const double penalty = mode == SearchMode::continuous ? 1.0 : subset_fraction;
    return beta * err + (1.0 - beta) * penalty;
}

struct CrowPopulation {
    std::vector<Position> positions;
    std::vector<Position> memories;
    std::vector<double> fitnesses;         // at current positions
    std::vector<double> memory_fitnesses;  // at memories; never above fitnesses
    std::vector<double> memory_values;     // raw objective at memories
    std::vector<std::size_t> ranks;        // 1 = best current fitness
    std::size_t itr = 0;

    std::size_t size() const noexcept { return positions.size(); }
};

/// u = lower + rand * (upper - lower) per element, then injected positions overwrite the first crows.
inline CrowPopulation init_population(const EcsaConfig& config, Rng& rng) {
    config.validate();
    CrowPopulation pop;
    const std::size_t dim = config.dimension();
    pop.positions.reserve(config.population_size);
    for (std::size_t j = 0; j < config.population_size; ++j) {
        Position p(static_cast<Eigen::Index>(dim));
        for (std::size_t d = 0; d < dim; ++d) {
            p(static_cast<Eigen::Index>(d)) =
                rng.uniform(config.bounds.lower[d], config.bounds.upper[d]);
        }
        pop.positions.push_back(std::move(p));
    }
    for (std::size_t j = 0; j < config.injected_positions.size(); ++j) {
        pop.positions[j] = config.bounds.clamp(config.injected_positions[j]);
    }
    pop.memories = pop.positions;
    pop.fitnesses.assign(config.population_size, 0.0);
    pop.memory_fitnesses.assign(config.population_size, 0.0);
    pop.memory_values.assign(config.population_size, 0.0);
    pop.ranks.resize(config.population_size);
    std::iota(pop.ranks.begin(), pop.ranks.end(), std::size_t{1});
    return pop;
}

inline CrowPopulation init_population(const EcsaConfig& config) {
    Rng rng(config.seed);
    return init_population(config, rng);
}

/// Ranks by ascending current fitness; ties keep index order.
inline std::vector<std::size_t> rank_by_fitness(const std::vector<double>& fitnesses) {
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });
    std::vector<std::size_t> ranks(fitnesses.size());
    for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
    return ranks;
}

/// Ring neighborhoods over a shuffled order: crow order[i] sees order[i-radius .. i+radius].
inline std::vector<std::vector<std::size_t>> ring_neighborhoods(
    const std::vector<std::size_t>& order, std::size_t radius) {
    const std::size_t n = order.size();
    std::vector<std::vector<std::size_t>> hoods(n);
    const std::size_t width = std::min(n, 2 * radius + 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto& hood = hoods[order[i]];
        for (std::size_t k = 0; k < width; ++k) {
            hood.push_back(order[(i + n - radius % n + k) % n]);
        }
    }
    return hoods;
}

/// u_s + FL (n_s - u_s) where n_s comes from the memory of a neighbor drawn independently per
/// dimension; clamped to the bounds.
inline Position local_neighborhood_update(std::size_t crow, const CrowPopulation& pop,
                                          const std::vector<std::size_t>& neighborhood,
                                          double flight_length, const Bounds& bounds, Rng& rng) {
    if (neighborhood.empty()) throw ArgumentError("local_neighborhood_update: empty neighborhood");
    const Position& u = pop.positions[crow];
    Position next(u.size());
    for (Eigen::Index s = 0; s < u.size(); ++s) {
        const std::size_t pick = neighborhood[rng.index(neighborhood.size())];
        next(s) = u(s) + flight_length * (pop.memories[pick](s) - u(s));
    }
    return bounds.clamp(std::move(next));
}

/// best +/- C1 * C2 per dimension: one direction draw per crow, an independent C2 per dimension.
inline Position global_update(const Position& best, std::size_t itr, std::size_t max_itr,
                              const Bounds& bounds, Rng& rng) {
    const double c1 = c1_coefficient(itr, max_itr);
    const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
    Position next(best.size());
    for (Eigen::Index d = 0; d < best.size(); ++d) next(d) = best(d) + sign * c1 * rng.uniform();
    return bounds.clamp(std::move(next));
}

struct OptimizationResult {
    Position best_position;
    /// Binarized best position (binary mode only; empty otherwise).
    Position best_bits;
    double best_fitness = 0.0;
    /// Raw objective value at the best position.
    double best_value = 0.0;
    /// Global-best fitness after initialization and after each iteration.
    std::vector<double> fitness_history;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
};

/// Called with every evaluated (continuous) position and its raw objective value.
using EvaluationObserver = std::function<void(const Position&, double)>;

namespace detail {

struct Evaluator {
    const Objective& objective;
    const EcsaConfig& config;
    const EvaluationObserver& observer;
    std::size_t evaluations = 0;

    struct Scored {
        double fitness;
        double value;
    };

    Scored operator()(const Position& p, std::size_t itr, std::size_t crow, Rng& rng) {
        Position arg = p;
        double fraction = 1.0;
        if (config.mode == SearchMode::binary) {
            arg = binarize(p, config.binary_threshold, config.stochastic_threshold, &rng);
            fraction = arg.sum() / static_cast<double>(arg.size());
        }
        double value = 0.0;
        try {
            value = objective(arg);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "objective failed at iteration " << itr << ", crow " << crow << ": "
                << e.what();
            throw ObjectiveError(msg.str());
        }
        ++evaluations;
        if (observer) observer(p, value);
        return {fitness(value, config.beta, config.mode, fraction), value};
    }
};

inline std::size_t best_index(const std::vector<double>& f) {
    return static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
}

inline OptimizationResult make_result(const CrowPopulation& pop, const EcsaConfig& config,
                                      std::vector<double> history, std::size_t evaluations) {
    const std::size_t b = best_index(pop.memory_fitnesses);
    OptimizationResult out;
    out.best_position = pop.memories[b];
    if (config.mode == SearchMode::binary) {
        out.best_bits = binarize(out.best_position, config.binary_threshold, false, nullptr);
    }
    out.best_fitness = pop.memory_fitnesses[b];
    out.best_value = pop.memory_values[b];
    out.fitness_history = std::move(history);
    out.seed = config.seed;
    out.iterations = pop.itr;
    out.evaluations = evaluations;
    return out;
}

}  // namespace detail

/// Enhanced crow search: rank-based awareness probability, ring-neighborhood following and
/// global-best guided moves.
inline OptimizationResult optimize(const Objective& objective, const EcsaConfig& config,
                                   const EvaluationObserver& observer = {}) {
    config.validate();
    Rng rng(config.seed);
    CrowPopulation pop = init_population(config, rng);
    detail::Evaluator eval{objective, config, observer};

    for (std::size_t j = 0; j < pop.size(); ++j) {
        const auto s = eval(pop.positions[j], 0, j, rng);
        pop.fitnesses[j] = pop.memory_fitnesses[j] = s.fitness;
        pop.memory_values[j] = s.value;
    }
    pop.ranks = rank_by_fitness(pop.fitnesses);

    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    auto hoods = ring_neighborhoods(order, config.neighborhood_radius);

    std::vector<double> history{pop.memory_fitnesses[detail::best_index(pop.memory_fitnesses)]};
    history.reserve(config.max_iterations + 1);

    for (std::size_t itr = 1; itr <= config.max_iterations; ++itr) {
        const Position best = pop.memories[detail::best_index(pop.memory_fitnesses)];
        for (std::size_t j = 0; j < pop.size(); ++j) {
            const double dap = dynamic_awareness_probability(pop.ranks[j], config);
            if (rng.uniform() >= dap) {
                pop.positions[j] = local_neighborhood_update(j, pop, hoods[j],
                                                             config.flight_length, config.bounds,
                                                             rng);
            } else {
                pop.positions[j] =
                    global_update(best, itr, config.max_iterations, config.bounds, rng);
            }
        }
        for (std::size_t j = 0; j < pop.size(); ++j) {
            const auto s = eval(pop.positions[j], itr, j, rng);
            pop.fitnesses[j] = s.fitness;
            if (s.fitness < pop.memory_fitnesses[j]) {
                pop.memories[j] = pop.positions[j];
                pop.memory_fitnesses[j] = s.fitness;
                pop.memory_values[j] = s.value;
            }
        }
        pop.ranks = rank_by_fitness(pop.fitnesses);
        rng.shuffle(order.begin(), order.end());
        hoods = ring_neighborhoods(order, config.neighborhood_radius);
        pop.itr = itr;
        history.push_back(pop.memory_fitnesses[detail::best_index(pop.memory_fitnesses)]);
    }
    return detail::make_result(pop, config, std::move(history), eval.evaluations);
}

/// Classical crow search (fixed awareness probability, random followed crow, random relocation
/// when the followed crow is aware). Used as a comparison baseline.
inline OptimizationResult optimize_classical_csa(const Objective& objective,
                                                 const EcsaConfig& config,
                                                 double awareness_probability = 0.1) {
    config.validate();
    Rng rng(config.seed);
    CrowPopulation pop = init_population(config, rng);
    detail::Evaluator eval{objective, config, {}};
    for (std::size_t j = 0; j < pop.size(); ++j) {
        const auto s = eval(pop.positions[j], 0, j, rng);
        pop.fitnesses[j] = pop.memory_fitnesses[j] = s.fitness;
        pop.memory_values[j] = s.value;
    }
    std::vector<double> history{pop.memory_fitnesses[detail::best_index(pop.memory_fitnesses)]};
    const std::size_t dim = config.dimension();

    for (std::size_t itr = 1; itr <= config.max_iterations; ++itr) {
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const std::size_t j = rng.index(pop.size());
            Position next(static_cast<Eigen::Index>(dim));
            if (rng.uniform() >= awareness_probability) {
                const double r = rng.uniform();
                next = pop.positions[i] +
                       r * config.flight_length * (pop.memories[j] - pop.positions[i]);
            } else {
                for (std::size_t d = 0; d < dim; ++d) {
                    next(static_cast<Eigen::Index>(d)) =
                        rng.uniform(config.bounds.lower[d], config.bounds.upper[d]);
                }
            }
            pop.positions[i] = config.bounds.clamp(std::move(next));
        }
        for (std::size_t j = 0; j < pop.size(); ++j) {
            const auto s = eval(pop.positions[j], itr, j, rng);
            pop.fitnesses[j] = s.fitness;
            if (s.fitness < pop.memory_fitnesses[j]) {
                pop.memories[j] = pop.positions[j];
                pop.memory_fitnesses[j] = s.fitness;
                pop.memory_values[j] = s.value;
            }
        }
        pop.itr = itr;
        history.push_back(pop.memory_fitnesses[detail::best_index(pop.memory_fitnesses)]);
    }
    return detail::make_result(pop, config, std::move(history), eval.evaluations);
}

/// Uniform random sampling with the same evaluation budget as optimize().
inline OptimizationResult random_search(const Objective& objective, const EcsaConfig& config) {
    config.validate();
    Rng rng(config.seed);
    CrowPopulation pop = init_population(config, rng);
    detail::Evaluator eval{objective, config, {}};
    for (std::size_t j = 0; j < pop.size(); ++j) {
        const auto s = eval(pop.positions[j], 0, j, rng);
        pop.memory_fitnesses[j] = pop.fitnesses[j] = s.fitness;
        pop.memory_values[j] = s.value;
    }
    std::vector<double> history{pop.memory_fitnesses[detail::best_index(pop.memory_fitnesses)]};
    for (std::size_t itr = 1; itr <= config.max_iterations; ++itr) {
        for (std::size_t j = 0; j < pop.size(); ++j) {
            Position p(static_cast<Eigen::Index>(config.dimension()));
            for (std::size_t d = 0; d < config.dimension(); ++d) {
                p(static_cast<Eigen::Index>(d)) =
                    rng.uniform(config.bounds.lower[d], config.bounds.upper[d]);
            }
            const auto s = eval(p, itr, j, rng);
            if (s.fitness < pop.memory_fitnesses[j]) {
                pop.memories[j] = p;
                pop.memory_fitnesses[j] = s.fitness;
                pop.memory_values[j] = s.value;
            }
        }
        pop.itr = itr;
        history.push_back(pop.memory_fitnesses[detail::best_index(pop.memory_fitnesses)]);
    }
    return detail::make_result(pop, config, std::move(history), eval.evaluations);
}

using Optimizer = std::function<OptimizationResult(const Objective&, const EcsaConfig&)>;

/// Runs `runs` independent optimizations with seeds derive_seed(config.seed, r).
/// Results are ordered by run index regardless of thread count.
inline std::vector<OptimizationResult> run_independent(const Objective& objective,
                                                       const EcsaConfig& config, std::size_t runs,
                                                       std::size_t threads = 1,
                                                       const Optimizer& optimizer = {}) {
    std::vector<OptimizationResult> results(runs);
    std::vector<std::exception_ptr> errors(runs);
    auto one = [&](std::size_t r) {
        try {
            EcsaConfig cfg = config;
            cfg.seed = derive_seed(config.seed, r);
            results[r] = optimizer ? optimizer(objective, cfg) : optimize(objective, cfg);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, runs));
    if (threads == 1) {
        for (std::size_t r = 0; r < runs; ++r) one(r);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < runs; r += threads) one(r);
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace riskfuse::ecsa
