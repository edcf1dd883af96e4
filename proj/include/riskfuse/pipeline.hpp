#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "riskfuse/anfis.hpp"
#include "riskfuse/dataset.hpp"
#include "riskfuse/dematel.hpp"
#include "riskfuse/ecsa.hpp"
#include "riskfuse/error.hpp"
#include "riskfuse/fuzzy.hpp"
#include "riskfuse/if_topsis.hpp"

namespace riskfuse::pipeline {

// ---------------------------------------------------------------------------
// Weights

struct WeightDerivation {
    Eigen::MatrixXd direct_relation;
    dematel::DematelResult dematel;
};

/// aggregate -> normalize -> total relation -> prominence -> weights. A single criterion takes
/// the whole weight.
inline WeightDerivation derive_weights_detailed(std::span<const dematel::JudgmentMatrix> matrices) {
    const auto s = dematel::aggregate_responses(matrices);
    WeightDerivation out;
    out.direct_relation = s.entries();
    if (s.size() == 1) {
        auto& d = out.dematel;
        d.q = d.t = Eigen::MatrixXd::Zero(1, 1);
        d.r_row = d.c_col = d.prominence = d.relation = Eigen::VectorXd::Zero(1);
        d.weights = Eigen::VectorXd::Ones(1);
        return out;
    }
    out.dematel = dematel::run(s);
    return out;
}

inline Eigen::VectorXd derive_weights(std::span<const dematel::JudgmentMatrix> matrices) {
    return derive_weights_detailed(matrices).dematel.weights;
}

inline Eigen::VectorXd derive_weights(std::span<const dematel::LabelMatrix> matrices,
                                      const LinguisticScale& scale) {
    std::vector<dematel::JudgmentMatrix> fuzzy;
    for (const auto& labels : matrices) {
        dematel::JudgmentMatrix m(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            for (std::size_t j = 0; j < labels[i].size(); ++j) {
                m[i].push_back(i == j ? TriangularFuzzyNumber{}
                                      : tfn_from_linguistic(labels[i][j], scale));
            }
        }
        fuzzy.push_back(std::move(m));
    }
    return derive_weights(std::span<const dematel::JudgmentMatrix>(fuzzy));
}

// ---------------------------------------------------------------------------
// Splitting

inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    ecsa::Rng rng(seed);
    rng.shuffle(idx.begin(), idx.end());
    return idx;
}

/// Seeded shuffle; the first floor(n * fraction) records train, the rest test.
template <class T>
std::pair<std::vector<T>, std::vector<T>> split_train_test(const std::vector<T>& records,
                                                           double fraction, std::uint64_t seed) {
    if (records.empty()) throw ArgumentError("split_train_test: no records");
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ArgumentError("split_train_test: fraction must lie strictly inside (0, 1)");
    }
    const auto n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(records.size()) * fraction + 1e-9));
    if (n_train == 0 || n_train == records.size()) {
        throw ArgumentError("split_train_test: split leaves an empty partition");
    }
    const auto order = shuffled_indices(records.size(), seed);
    std::pair<std::vector<T>, std::vector<T>> out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        (k < n_train ? out.first : out.second).push_back(records[order[k]]);
    }
    return out;
}

/// Seeded shuffle into k folds whose sizes differ by at most one (larger folds first).
template <class T>
std::vector<std::vector<T>> cv_folds(const std::vector<T>& records, std::size_t k,
                                     std::uint64_t seed) {
    if (k < 2) throw ArgumentError("cv_folds: need at least two folds");
    if (records.size() < k) {
        std::ostringstream msg;
        msg << "cv_folds: " << records.size() << " records cannot fill " << k << " folds";
        throw ArgumentError(msg.str());
    }
    const auto order = shuffled_indices(records.size(), seed);
    std::vector<std::vector<T>> folds(k);
    const std::size_t base = records.size() / k;
    const std::size_t extra = records.size() % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) folds[f].push_back(records[order[pos++]]);
    }
    return folds;
}

/// (train = all other folds, test = fold f) for every f.
template <class T>
std::vector<std::pair<std::vector<T>, std::vector<T>>> fold_pairs(
    const std::vector<std::vector<T>>& folds) {
    std::vector<std::pair<std::vector<T>, std::vector<T>>> out;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::pair<std::vector<T>, std::vector<T>> p;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            auto& dst = g == f ? p.second : p.first;
            dst.insert(dst.end(), folds[g].begin(), folds[g].end());
        }
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// ANFIS tuning

enum class CoefficientMode {
    magnitude,  // U in [10^-delta, 10^delta]: signs kept, size changes
    signed_,    // U in [-M, M]
};

struct TuneConfig {
    /// Population, iteration, awareness and seed settings. Bounds and injected positions are
    /// filled in by the tuner.
    ecsa::EcsaConfig ecsa;
    std::size_t runs = 20;
    CoefficientMode coefficient_mode = CoefficientMode::magnitude;
    double delta = 1.0;
    double signed_bound = 10.0;
    double cluster_radius = 0.5;
    std::size_t threads = 1;
};

struct TuneRun {
    std::uint64_t seed = 0;
    double best_fitness = 0.0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    std::size_t evaluations = 0;
    std::vector<double> history;
};

struct TuneResult {
    anfis::AnfisModel base;
    anfis::AnfisModel model;
    /// Full scaling vector in flatten_parameters order (consequent entries are 1: refit).
    Eigen::VectorXd coefficients;
    double base_train_rmse = 0.0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    std::vector<TuneRun> runs;
    std::size_t selected_run = 0;
};

/// Searches premise scaling coefficients with ECSA. Each candidate is scaled, its consequents
/// are refit by least squares and its training RMSE is the objective. The identity vector is
/// part of every initial population, so the result never trains worse than `base` refit.
/// Across independent runs the model with the lowest test RMSE is kept.
inline TuneResult tune_model_with_ecsa(const anfis::AnfisModel& base, const anfis::Dataset& train,
                                       const anfis::Dataset& test, const TuneConfig& config) {
    if (train.empty()) throw ArgumentError("tune: empty training set");
    if (test.empty()) throw ArgumentError("tune: empty test set");
    if (config.runs == 0) throw ArgumentError("tune: runs must be >= 1");
    const auto premise = static_cast<Eigen::Index>(base.premise_parameter_count());
    const auto consequent = static_cast<Eigen::Index>(base.consequent_parameter_count());

    ecsa::EcsaConfig ecfg = config.ecsa;
    ecfg.mode = ecsa::SearchMode::continuous;
    if (config.coefficient_mode == CoefficientMode::magnitude) {
        if (!(config.delta > 0.0)) throw ArgumentError("tune: delta must be positive");
        ecfg.bounds = ecsa::Bounds::uniform(static_cast<std::size_t>(premise),
                                            std::pow(10.0, -config.delta),
                                            std::pow(10.0, config.delta));
    } else {
        if (!(config.signed_bound >= 1.0)) throw ArgumentError("tune: signed bound must be >= 1");
        ecfg.bounds = ecsa::Bounds::uniform(static_cast<std::size_t>(premise),
                                            -config.signed_bound, config.signed_bound);
    }
    ecfg.injected_positions = {Eigen::VectorXd::Ones(premise)};

    auto full_coefficients = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd c(premise + consequent);
        c << u, Eigen::VectorXd::Ones(consequent);
        return c;
    };
    auto refit = [&](const Eigen::VectorXd& u) {
        const auto scaled = anfis::apply_parameter_scaling(base, full_coefficients(u));
        return anfis::fit_consequents_least_squares(scaled.model, train);
    };
    auto build = [&](const Eigen::VectorXd& u) { return refit(u).model; };
    const ecsa::Objective objective = [&](const Eigen::VectorXd& u) {
        return refit(u).train_rmse;
    };

    const auto results = ecsa::run_independent(objective, ecfg, config.runs, config.threads);

    std::vector<TuneRun> runs;
    std::optional<anfis::AnfisModel> best_model;
    std::size_t best_run = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
        auto model = build(results[r].best_position);
        TuneRun run{results[r].seed, results[r].best_fitness, results[r].best_value,
                    anfis::rmse(model, test), results[r].evaluations,
                    results[r].fitness_history};
        if (!best_model || run.test_rmse < runs[best_run].test_rmse) {
            best_model = std::move(model);
            best_run = r;
        }
        runs.push_back(std::move(run));
    }

    TuneResult out{base,
                   *best_model,
                   full_coefficients(results[best_run].best_position),
                   anfis::rmse(base, train),
                   runs[best_run].train_rmse,
                   runs[best_run].test_rmse,
                   std::move(runs),
                   best_run};
    return out;
}

inline TuneResult tune_anfis_with_ecsa(const anfis::Dataset& train, const anfis::Dataset& test,
                                       const TuneConfig& config) {
    return tune_model_with_ecsa(anfis::init_fis(train, config.cluster_radius), train, test,
                                config);
}

// ---------------------------------------------------------------------------
// Scoring and aggregation

inline std::vector<double> potential_scores(const anfis::AnfisModel& model,
                                            const std::vector<Eigen::VectorXd>& factor_inputs) {
    std::vector<double> f;
    f.reserve(factor_inputs.size());
    for (const auto& x : factor_inputs) f.push_back(anfis::forward(model, x));
    return f;
}

/// P_out = sum_j w_j f_j
inline double aggregate_risk(std::span<const double> w, std::span<const double> f) {
    if (w.size() != f.size()) throw ArgumentError("aggregate_risk: weight/score length mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) total += w[j] * f[j];
    return total;
}

/// Per-criterion input level (training minimum or maximum) at which the model predicts the larger
/// magnitude when every other criterion sits at the baseline.
inline Eigen::VectorXd risk_extreme_levels(const anfis::AnfisModel& model,
                                           const Eigen::VectorXd& baseline) {
    const auto& norm = model.normalization();
    Eigen::VectorXd levels(baseline.size());
    for (Eigen::Index d = 0; d < baseline.size(); ++d) {
        Eigen::VectorXd lo = baseline, hi = baseline;
        lo(d) = norm.lower(d);
        hi(d) = norm.lower(d) + norm.span(d);
        levels(d) = anfis::forward(model, lo) > anfis::forward(model, hi) ? lo(d) : hi(d);
    }
    return levels;
}

/// Baseline with criteria i and j moved to their risk-extreme levels (i == j moves one).
inline Eigen::VectorXd factor_probe(const Eigen::VectorXd& baseline,
                                    const Eigen::VectorXd& levels, Eigen::Index i,
                                    Eigen::Index j) {
    Eigen::VectorXd p = baseline;
    p(i) = levels(i);
    p(j) = levels(j);
    return p;
}

/// Turns a grid of predicted magnitudes into intuitionistic values: membership is the min-max
/// scaled magnitude shrunk by the hesitation, hesitation is constant.
inline std::vector<std::vector<IntuitionisticFuzzyValue>> magnitudes_to_ifv(
    const std::vector<std::vector<double>>& grid, double hesitation) {
    if (!(hesitation >= 0.0 && hesitation < 1.0)) {
        throw ArgumentError("magnitudes_to_ifv: hesitation must lie in [0, 1)");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& row : grid) {
        for (double g : row) {
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
    }
    std::vector<std::vector<IntuitionisticFuzzyValue>> out;
    for (const auto& row : grid) {
        std::vector<IntuitionisticFuzzyValue> cells;
        for (double g : row) {
            const double scaled = hi > lo ? (g - lo) / (hi - lo) : 0.5;
            const double mu = (1.0 - hesitation) * scaled;
            cells.emplace_back(mu, std::max(0.0, 1.0 - hesitation - mu));
        }
        out.push_back(std::move(cells));
    }
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end

/// Target transform: optional natural log, then min-max onto [0, 1].
struct TargetScale {
    bool log = false;
    double lower = 0.0;
    double span = 1.0;

    double to_model(double v) const { return ((log ? std::log(v) : v) - lower) / span; }
    double from_model(double v) const {
        const double t = v * span + lower;
        return log ? std::exp(t) : t;
    }
};

/// Model-ready view of a dataset: one feature per criterion, a scalar target.
struct RiskData {
    std::vector<std::string> criteria;
    std::vector<Eigen::VectorXd> features;
    /// Targets in model space.
    std::vector<double> targets;
    /// Maps model-space targets back to original units (used for MAPE).
    TargetScale scale;
};

struct DataSelection {
    std::vector<std::string> criteria;
    /// "effort" or "size".
    std::string target = "effort";
    bool log_target = true;
    data::OrdinalLevels levels;
};

inline RiskData build_risk_data(const data::ProjectDataset& dataset,
                                const DataSelection& selection,
                                const data::CriteriaCatalog& catalog =
                                    data::CriteriaCatalog::standard()) {
    if (selection.criteria.empty()) throw ArgumentError("no criteria selected");
    if (selection.target != "effort" && selection.target != "size") {
        throw ArgumentError("target must be 'effort' or 'size', got '" + selection.target + "'");
    }
    data::FeatureMapping mapping(dataset, selection.criteria, catalog, selection.levels);
    RiskData out;
    out.criteria = selection.criteria;
    std::vector<double> raw;
    for (const auto& rec : dataset.records) {
        const auto& t = selection.target == "effort" ? rec.effort : rec.size;
        if (!t) throw DataError("record " + rec.identifier + " has no " + selection.target);
        if (selection.log_target && !(*t > 0.0)) {
            throw DataError("record " + rec.identifier + ": log target needs a positive value");
        }
        const auto f = mapping.map(rec);
        out.features.push_back(Eigen::Map<const Eigen::VectorXd>(f.data(),
                                                                 static_cast<Eigen::Index>(f.size())));
        raw.push_back(*t);
    }
    if (raw.empty()) throw DataError("dataset has no records");
    out.scale.log = selection.log_target;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : raw) {
        const double t = selection.log_target ? std::log(v) : v;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    out.scale.lower = lo;
    out.scale.span = hi > lo ? hi - lo : 1.0;
    for (double v : raw) out.targets.push_back(out.scale.to_model(v));
    return out;
}

struct PipelineConfig {
    double cluster_radius = 0.5;
    TuneConfig tuning;
    double train_fraction = 0.7;
    std::size_t folds = 3;
    bool cross_validation = true;
    std::uint64_t seed = 7;
    /// Per-criterion TOPSIS kinds; empty means every criterion is a benefit criterion.
    std::vector<topsis::CriterionKind> criteria_kinds;
};

/// Plain-data copy of an ANFIS model.
struct ModelRecord {
    /// rules x inputs x (m, l, k)
    std::vector<std::vector<std::array<double, 3>>> premises;
    /// rules x (q..., s)
    std::vector<std::vector<double>> consequents;
    std::vector<double> normalization_lower;
    std::vector<double> normalization_span;

    friend bool operator==(const ModelRecord&, const ModelRecord&) = default;
};

inline ModelRecord snapshot(const anfis::AnfisModel& model) {
    ModelRecord rec;
    for (const auto& rule : model.rules()) {
        std::vector<std::array<double, 3>> p;
        for (const auto& mf : rule.premises) p.push_back({mf.center, mf.width, mf.shape});
        rec.premises.push_back(std::move(p));
        rec.consequents.emplace_back(rule.consequent.data(),
                                     rule.consequent.data() + rule.consequent.size());
    }
    const auto& n = model.normalization();
    rec.normalization_lower.assign(n.lower.data(), n.lower.data() + n.lower.size());
    rec.normalization_span.assign(n.span.data(), n.span.data() + n.span.size());
    return rec;
}

inline anfis::AnfisModel restore(const ModelRecord& rec) {
    if (rec.premises.size() != rec.consequents.size()) {
        throw ArgumentError("model record: premise and consequent rule counts differ");
    }
    std::vector<anfis::AnfisRule> rules;
    for (std::size_t r = 0; r < rec.premises.size(); ++r) {
        anfis::AnfisRule rule;
        for (const auto& p : rec.premises[r]) rule.premises.push_back({p[0], p[1], p[2]});
        rule.consequent = Eigen::Map<const Eigen::VectorXd>(
            rec.consequents[r].data(), static_cast<Eigen::Index>(rec.consequents[r].size()));
        rules.push_back(std::move(rule));
    }
    anfis::InputNormalization norm{
        Eigen::Map<const Eigen::VectorXd>(rec.normalization_lower.data(),
                                          static_cast<Eigen::Index>(rec.normalization_lower.size())),
        Eigen::Map<const Eigen::VectorXd>(rec.normalization_span.data(),
                                          static_cast<Eigen::Index>(rec.normalization_span.size()))};
    return {std::move(rules), std::move(norm)};
}

struct FoldMetrics {
    std::size_t fold = 0;
    std::uint64_t seed = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::size_t rules = 0;
    double base_train_rmse = 0.0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    double test_mape = 0.0;

    friend bool operator==(const FoldMetrics&, const FoldMetrics&) = default;
};

struct RunStats {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double best_fitness = 0.0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    std::size_t evaluations = 0;
    std::vector<double> history;

    friend bool operator==(const RunStats&, const RunStats&) = default;
};

using IfvTriple = std::array<double, 3>;  // (mu, nu, pi)

struct RiskReport {
    std::vector<std::string> criteria;
    std::uint64_t seed = 0;
    std::uint64_t split_seed = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;

    std::vector<std::vector<double>> direct_relation;
    std::vector<std::vector<double>> total_relation;
    std::vector<double> prominence;
    std::vector<double> relation;
    std::vector<double> weights;

    ModelRecord model;
    std::uint64_t tuning_seed = 0;
    double base_train_rmse = 0.0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    double test_mape = 0.0;
    std::size_t selected_run = 0;
    std::vector<RunStats> runs;
    std::vector<FoldMetrics> folds;

    std::vector<double> baseline;
    std::vector<double> extreme_levels;
    std::vector<std::vector<double>> probe_grid;
    std::vector<double> potential_scores;

    std::vector<std::string> criteria_kinds;
    double hesitation = 0.0;
    std::vector<std::vector<IfvTriple>> decision_matrix;
    std::vector<std::vector<IfvTriple>> weighted_matrix;
    std::vector<double> separation_positive;
    std::vector<double> separation_negative;
    std::vector<double> closeness;
    std::vector<std::size_t> ranking;
    bool ties = false;

    double p_out = 0.0;

    friend bool operator==(const RiskReport&, const RiskReport&) = default;
};

inline std::string_view kind_name(topsis::CriterionKind k) {
    return k == topsis::CriterionKind::benefit ? "benefit" : "cost";
}

inline topsis::CriterionKind parse_kind(std::string_view s) {
    if (s == "benefit") return topsis::CriterionKind::benefit;
    if (s == "cost") return topsis::CriterionKind::cost;
    throw ArgumentError("criterion kind must be 'benefit' or 'cost', got '" + std::string(s) + "'");
}

/// Rebuilds the weighted decision matrix recorded in a report.
inline topsis::IfDecisionMatrix recorded_weighted_matrix(const RiskReport& report) {
    std::vector<std::vector<IntuitionisticFuzzyValue>> rows;
    for (const auto& row : report.weighted_matrix) {
        std::vector<IntuitionisticFuzzyValue> cells;
        for (const auto& c : row) cells.emplace_back(c[0], c[1]);
        rows.push_back(std::move(cells));
    }
    std::vector<topsis::CriterionKind> kinds;
    for (const auto& k : report.criteria_kinds) kinds.push_back(parse_kind(k));
    return {std::move(rows), std::move(kinds)};
}

namespace detail {

inline std::string staged(std::string_view stage, const std::exception& e) {
    return "pipeline stage '" + std::string(stage) + "': " + e.what();
}

/// Runs f, prefixing any library error with the stage name while keeping its type.
template <class F>
decltype(auto) stage(std::string_view name, F&& f) {
    try {
        return f();
    } catch (const ArgumentError& e) {
        throw ArgumentError(staged(name, e));
    } catch (const LookupError& e) {
        throw LookupError(staged(name, e));
    } catch (const DataError& e) {
        throw DataError(staged(name, e));
    } catch (const IoError& e) {
        throw IoError(staged(name, e));
    } catch (const SingularityError& e) {
        throw SingularityError(staged(name, e));
    } catch (const DegenerateActivationError& e) {
        throw DegenerateActivationError(staged(name, e));
    } catch (const DegenerateInputError& e) {
        throw DegenerateInputError(staged(name, e));
    } catch (const NumericalError& e) {
        throw NumericalError(staged(name, e));
    } catch (const Error& e) {
        throw Error(staged(name, e));
    }
}

inline anfis::Dataset samples(const RiskData& data, const std::vector<std::size_t>& idx) {
    anfis::Dataset out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back({data.features[i], data.targets[i]});
    return out;
}

inline double mape_original_units(const anfis::AnfisModel& model, const RiskData& data,
                                  const std::vector<std::size_t>& idx) {
    std::vector<double> pred, actual;
    for (auto i : idx) {
        pred.push_back(data.scale.from_model(anfis::forward(model, data.features[i])));
        actual.push_back(data.scale.from_model(data.targets[i]));
    }
    return anfis::mape_values(pred, actual);
}

template <class T>
std::vector<T> to_vector(const Eigen::Matrix<T, Eigen::Dynamic, 1>& v) {
    return {v.data(), v.data() + v.size()};
}

inline std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
    }
    return out;
}

inline std::vector<std::vector<IfvTriple>> to_triples(const topsis::IfDecisionMatrix& m) {
    std::vector<std::vector<IfvTriple>> out;
    for (const auto& row : m.rows()) {
        std::vector<IfvTriple> cells;
        for (const auto& c : row) cells.push_back({c.mu(), c.nu(), c.pi()});
        out.push_back(std::move(cells));
    }
    return out;
}

}  // namespace detail

/// Seed streams used by run_pipeline, derived from the master seed.
struct SeedPlan {
    std::uint64_t split;
    std::uint64_t folds;
    std::uint64_t tuning;
    std::uint64_t fold_tuning(std::size_t f) const { return ecsa::derive_seed(tuning, f + 1); }

    static SeedPlan from(std::uint64_t master) {
        return {ecsa::derive_seed(master, 1), ecsa::derive_seed(master, 2),
                ecsa::derive_seed(master, 3)};
    }
};

struct TrainingOutcome {
    SeedPlan seeds;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    std::vector<FoldMetrics> folds;
    TuneResult tuned;
    /// Test-split MAPE in original target units, percent.
    double test_mape;
};

/// Seeded split, optional k-fold cross-validation over every record, then a final ECSA tuning on
/// the split. Fold results are diagnostics; the final model comes from the split.
inline TrainingOutcome train_risk_model(const RiskData& data, const PipelineConfig& config) {
    const auto seeds = SeedPlan::from(config.seed);
    const std::size_t n = data.criteria.size();
    auto [train_idx, test_idx] = detail::stage("split", [&] {
        if (data.features.size() != data.targets.size() || data.features.empty()) {
            throw DataError("features and targets must be non-empty and of equal length");
        }
        for (const auto& f : data.features) {
            if (static_cast<std::size_t>(f.size()) != n) {
                throw DataError("feature vector length differs from criteria count");
            }
        }
        std::vector<std::size_t> all(data.features.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return split_train_test(all, config.train_fraction, seeds.split);
    });

    TuneConfig tuning = config.tuning;
    tuning.cluster_radius = config.cluster_radius;

    std::vector<FoldMetrics> folds;
    if (config.cross_validation) {
        detail::stage("cross-validation", [&] {
            std::vector<std::size_t> all(data.features.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            const auto pairs = fold_pairs(cv_folds(all, config.folds, seeds.folds));
            for (std::size_t f = 0; f < pairs.size(); ++f) {
                TuneConfig fold_cfg = tuning;
                fold_cfg.ecsa.seed = seeds.fold_tuning(f);
                const auto tr = detail::samples(data, pairs[f].first);
                const auto te = detail::samples(data, pairs[f].second);
                const auto res = tune_anfis_with_ecsa(tr, te, fold_cfg);
                folds.push_back({f, fold_cfg.ecsa.seed, tr.size(), te.size(),
                                 res.model.rule_count(), res.base_train_rmse, res.train_rmse,
                                 res.test_rmse,
                                 detail::mape_original_units(res.model, data, pairs[f].second)});
            }
        });
    }

    return detail::stage("tuning", [&] {
        TuneConfig final_cfg = tuning;
        final_cfg.ecsa.seed = seeds.tuning;
        auto tuned = tune_anfis_with_ecsa(detail::samples(data, train_idx),
                                          detail::samples(data, test_idx), final_cfg);
        const double mape = detail::mape_original_units(tuned.model, data, test_idx);
        return TrainingOutcome{seeds,           std::move(train_idx), std::move(test_idx),
                               std::move(folds), std::move(tuned),    mape};
    });
}

/// DEMATEL weights -> ECSA-tuned ANFIS -> factor potential scores -> weighted IF-TOPSIS -> P_out.
inline RiskReport run_pipeline(const RiskData& data,
                               std::span<const dematel::JudgmentMatrix> respondents,
                               const PipelineConfig& config) {
    RiskReport report;
    const std::size_t n = data.criteria.size();
    report.criteria = data.criteria;
    report.seed = config.seed;

    detail::stage("weights", [&] {
        if (respondents.empty()) throw ArgumentError("no respondent matrices supplied");
        if (respondents.front().size() != n) {
            std::ostringstream msg;
            msg << "respondent matrices are " << respondents.front().size() << "x"
                << respondents.front().size() << " but " << n << " criteria are selected";
            throw ArgumentError(msg.str());
        }
        const auto w = derive_weights_detailed(respondents);
        report.direct_relation = detail::to_rows(w.direct_relation);
        report.total_relation = detail::to_rows(w.dematel.t);
        report.prominence = detail::to_vector(w.dematel.prominence);
        report.relation = detail::to_vector(w.dematel.relation);
        report.weights = detail::to_vector(w.dematel.weights);
    });

    const auto trained = train_risk_model(data, config);
    const auto& train_idx = trained.train_idx;
    const auto& tuned = trained.tuned;
    report.split_seed = trained.seeds.split;
    report.tuning_seed = trained.seeds.tuning;
    report.train_size = trained.train_idx.size();
    report.test_size = trained.test_idx.size();
    report.folds = trained.folds;
    report.model = snapshot(tuned.model);
    report.base_train_rmse = tuned.base_train_rmse;
    report.train_rmse = tuned.train_rmse;
    report.test_rmse = tuned.test_rmse;
    report.test_mape = trained.test_mape;
    report.selected_run = tuned.selected_run;
    for (std::size_t r = 0; r < tuned.runs.size(); ++r) {
        const auto& run = tuned.runs[r];
        report.runs.push_back({r, run.seed, run.best_fitness, run.train_rmse, run.test_rmse,
                               run.evaluations, run.history});
    }

    detail::stage("scoring", [&] {
        Eigen::VectorXd baseline = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (auto i : train_idx) baseline += data.features[i];
        baseline /= static_cast<double>(train_idx.size());
        const Eigen::VectorXd levels = risk_extreme_levels(tuned.model, baseline);
        report.baseline = detail::to_vector(baseline);
        report.extreme_levels = detail::to_vector(levels);

        std::vector<Eigen::VectorXd> singles;
        report.probe_grid.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const auto probe = factor_probe(baseline, levels, static_cast<Eigen::Index>(i),
                                                static_cast<Eigen::Index>(j));
                if (i == j) singles.push_back(probe);
                report.probe_grid[i][j] = anfis::forward(tuned.model, probe);
            }
        }
        report.potential_scores = potential_scores(tuned.model, singles);
    });

    detail::stage("ranking", [&] {
        std::vector<topsis::CriterionKind> kinds = config.criteria_kinds;
        if (kinds.empty()) kinds.assign(n, topsis::CriterionKind::benefit);
        if (kinds.size() != n) throw ArgumentError("criteria_kinds length differs from criteria");
        for (auto k : kinds) report.criteria_kinds.emplace_back(kind_name(k));

        report.hesitation = std::clamp(tuned.test_rmse, 0.0, 0.5);
        const topsis::IfDecisionMatrix raw(magnitudes_to_ifv(report.probe_grid, report.hesitation),
                                           kinds);
        std::vector<IntuitionisticFuzzyValue> lifted;
        for (double w : report.weights) lifted.push_back(topsis::lift_weight(std::clamp(w, 0.0, 1.0)));
        const auto weighted = topsis::weighted_if_matrix(raw, lifted);
        report.decision_matrix = detail::to_triples(raw);
        report.weighted_matrix = detail::to_triples(weighted);

        if (n == 1) {
            // A lone alternative is both ideals; it is trivially first.
            report.separation_positive = {0.0};
            report.separation_negative = {0.0};
            report.closeness = {1.0};
            report.ranking = {0};
            return;
        }
        const auto result = topsis::rank_weighted(recorded_weighted_matrix(report));
        report.separation_positive = result.separations.positive;
        report.separation_negative = result.separations.negative;
        report.closeness = result.xi;
        report.ranking = result.ranking;
        report.ties = result.ties;
    });

    report.p_out = aggregate_risk(report.weights, report.potential_scores);
    return report;
}

}  // namespace riskfuse::pipeline
