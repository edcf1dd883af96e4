#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "riskfuse/pipeline.hpp"

using namespace riskfuse;
using namespace riskfuse::pipeline;

namespace {

RiskData synthetic_risk_data(std::size_t n_criteria, std::size_t n_records, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.02);
    RiskData d;
    for (std::size_t c = 0; c < n_criteria; ++c) d.criteria.push_back("C" + std::to_string(c));
    for (std::size_t r = 0; r < n_records; ++r) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(n_criteria));
        for (auto& v : x) v = u(gen);
        double y = 0.2;
        for (Eigen::Index c = 0; c < x.size(); ++c) y += 0.6 * x(c) * x(c) / static_cast<double>(x.size());
        d.features.push_back(x);
        d.targets.push_back(std::clamp(y + noise(gen), 0.0, 1.0));
    }
    d.scale = {true, 0.0, 5.0};
    return d;
}

PipelineConfig small_config() {
    PipelineConfig c;
    c.tuning.ecsa.population_size = 6;
    c.tuning.ecsa.max_iterations = 8;
    c.tuning.runs = 2;
    c.folds = 3;
    return c;
}

std::vector<dematel::JudgmentMatrix> crisp_respondent(const Eigen::MatrixXd& s) {
    dematel::JudgmentMatrix m(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            m[static_cast<std::size_t>(i)].push_back(TriangularFuzzyNumber::crisp(s(i, j)));
        }
    }
    return {m};
}

std::vector<dematel::JudgmentMatrix> random_respondents(std::size_t n, std::size_t count,
                                                        std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> level(0, 4);
    std::vector<dematel::JudgmentMatrix> out;
    for (std::size_t r = 0; r < count; ++r) {
        dematel::JudgmentMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    m[i].push_back(TriangularFuzzyNumber{});
                } else {
                    const double c = level(gen) * 0.25;
                    m[i].push_back({std::max(0.0, c - 0.25), c, std::min(1.0, c + 0.25)});
                }
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<dematel::JudgmentMatrix> scaled(const std::vector<dematel::JudgmentMatrix>& rs,
                                            double k) {
    auto out = rs;
    for (auto& m : out) {
        for (auto& row : m) {
            for (auto& t : row) t = t.scaled(k);
        }
    }
    return out;
}

anfis::AnfisModel perturbed(const anfis::AnfisModel& m, double width_factor) {
    auto rules = m.rules();
    for (auto& r : rules) {
        for (auto& mf : r.premises) mf.width *= width_factor;
        r.consequent.setZero();
    }
    return {rules, m.normalization()};
}

}  // namespace

TEST(DeriveWeights, TwoByTwoFixture) {
    Eigen::MatrixXd s(2, 2);
    s << 0, 2, 1, 0;
    const auto w = derive_weights(crisp_respondent(s));
    EXPECT_NEAR(w(0), 0.5, 1e-12);
    EXPECT_NEAR(w(1), 0.5, 1e-12);
}

TEST(DeriveWeights, SingleCriterionTakesAll) {
    const auto w = derive_weights(crisp_respondent(Eigen::MatrixXd::Zero(1, 1)));
    ASSERT_EQ(w.size(), 1);
    EXPECT_EQ(w(0), 1.0);
}

TEST(DeriveWeights, LabelsMatchFuzzyPath) {
    const auto scale = default_dematel_scale();
    const std::vector<dematel::LabelMatrix> labels{
        {{"-", "High", "Low"}, {"Very low", "-", "Very high"}, {"No influence", "Low", "-"}}};
    dematel::JudgmentMatrix m(3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            m[i].push_back(i == j ? TriangularFuzzyNumber{}
                                  : tfn_from_linguistic(labels[0][i][j], scale));
        }
    }
    const std::vector<dematel::JudgmentMatrix> fuzzy{m};
    EXPECT_EQ(derive_weights(labels, scale), derive_weights(fuzzy));
}

TEST(Split, SeventyThirtyOfNinetyThree) {
    std::vector<int> r(93);
    std::iota(r.begin(), r.end(), 0);
    auto [train, test] = split_train_test(r, 0.7, 11);
    EXPECT_EQ(train.size(), 65u);
    EXPECT_EQ(test.size(), 28u);
    std::set<int> all(train.begin(), train.end());
    all.insert(test.begin(), test.end());
    EXPECT_EQ(all.size(), 93u);
    EXPECT_EQ(split_train_test(r, 0.7, 11), split_train_test(r, 0.7, 11));
    EXPECT_NE(split_train_test(r, 0.7, 11).first, split_train_test(r, 0.7, 12).first);
}

TEST(Split, Rejections) {
    const std::vector<int> r{1, 2, 3};
    EXPECT_THROW(split_train_test(r, 1.0, 1), ArgumentError);
    EXPECT_THROW(split_train_test(r, 0.0, 1), ArgumentError);
    EXPECT_THROW(split_train_test(r, 0.1, 1), ArgumentError);
    EXPECT_THROW(split_train_test(std::vector<int>{}, 0.5, 1), ArgumentError);
}

TEST(Folds, Sizes) {
    std::vector<int> r(93);
    std::iota(r.begin(), r.end(), 0);
    const auto f = cv_folds(r, 3, 5);
    EXPECT_EQ(f[0].size(), 31u);
    EXPECT_EQ(f[1].size(), 31u);
    EXPECT_EQ(f[2].size(), 31u);
    r.push_back(93);
    const auto g = cv_folds(r, 3, 5);
    EXPECT_EQ(g[0].size(), 32u);
    EXPECT_EQ(g[1].size(), 31u);
    EXPECT_EQ(g[2].size(), 31u);
    EXPECT_THROW(cv_folds(std::vector<int>{1, 2}, 3, 5), ArgumentError);
    EXPECT_THROW(cv_folds(r, 1, 5), ArgumentError);
}

TEST(FoldsProperty, PartitionAndPairs) {
    std::mt19937_64 gen(71);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + gen() % 60;
        const std::size_t k = 2 + gen() % std::min<std::size_t>(n - 1, 6);
        std::vector<std::size_t> r(n);
        std::iota(r.begin(), r.end(), std::size_t{0});
        const auto folds = cv_folds(r, k, gen());
        std::multiset<std::size_t> seen;
        std::size_t lo = n, hi = 0;
        for (const auto& f : folds) {
            seen.insert(f.begin(), f.end());
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
        }
        EXPECT_EQ(seen, std::multiset<std::size_t>(r.begin(), r.end()));
        EXPECT_LE(hi - lo, 1u);
        for (const auto& [train, test] : fold_pairs(folds)) EXPECT_EQ(train.size() + test.size(), n);
    }
}

TEST(AggregateRisk, Examples) {
    const std::vector<double> w{0.5, 0.5}, f{0.2, 0.6};
    EXPECT_NEAR(aggregate_risk(w, f), 0.4, 1e-15);
    EXPECT_EQ(aggregate_risk(std::vector<double>{1.0}, std::vector<double>{0.37}), 0.37);
    EXPECT_EQ(aggregate_risk(std::vector<double>{0.3, 0.7}, std::vector<double>{0.0, 0.0}), 0.0);
    EXPECT_THROW(aggregate_risk(std::vector<double>{1.0}, std::vector<double>{0.1, 0.2}),
                 ArgumentError);
}

TEST(PotentialScores, EmptyAndIdentical) {
    const auto d = synthetic_risk_data(2, 30, 72);
    anfis::Dataset train;
    for (std::size_t i = 0; i < d.features.size(); ++i) train.push_back({d.features[i], d.targets[i]});
    const auto model = anfis::init_fis(train, 0.5);
    EXPECT_TRUE(potential_scores(model, {}).empty());
    const Eigen::Vector2d x(0.3, 0.6);
    const auto f = potential_scores(model, {x, x, x});
    EXPECT_EQ(f[0], f[1]);
    EXPECT_EQ(f[1], f[2]);
}

TEST(MagnitudesToIfv, ScalesAndShrinks) {
    const auto g = magnitudes_to_ifv({{0.0, 1.0}, {0.5, 2.0}}, 0.2);
    EXPECT_EQ(g[0][0].mu(), 0.0);
    EXPECT_NEAR(g[1][1].mu(), 0.8, 1e-15);
    EXPECT_NEAR(g[1][0].mu(), 0.2, 1e-15);
    for (const auto& row : g) {
        for (const auto& c : row) EXPECT_NEAR(c.pi(), 0.2, 1e-12);
    }
    const auto flat = magnitudes_to_ifv({{3.0, 3.0}}, 0.0);
    EXPECT_EQ(flat[0][0].mu(), 0.5);
    EXPECT_THROW(magnitudes_to_ifv({{1.0}}, 1.0), ArgumentError);
}

TEST(TargetScale, RoundTrip) {
    const TargetScale s{true, 1.5, 4.0};
    for (double v : {1.0, 10.0, 250.0}) EXPECT_NEAR(s.from_model(s.to_model(v)), v, 1e-9 * v);
}

TEST(Tune, NeverWorseThanPerturbedBase) {
    for (std::uint64_t seed : {81u, 82u, 83u}) {
        const auto d = synthetic_risk_data(3, 60, seed);
        anfis::Dataset train, test;
        for (std::size_t i = 0; i < d.features.size(); ++i) {
            (i < 42 ? train : test).push_back({d.features[i], d.targets[i]});
        }
        const auto base = perturbed(anfis::init_fis(train, 0.5), 2.0);
        TuneConfig cfg;
        cfg.ecsa.population_size = 6;
        cfg.ecsa.max_iterations = 10;
        cfg.ecsa.seed = seed;
        cfg.runs = 2;
        const auto res = tune_model_with_ecsa(base, train, test, cfg);
        EXPECT_LE(res.train_rmse, res.base_train_rmse);
        EXPECT_LE(res.train_rmse, 0.95 * res.base_train_rmse);
        EXPECT_EQ(res.runs.size(), 2u);
        EXPECT_NEAR(res.train_rmse, anfis::rmse(res.model, train), 1e-12);
        EXPECT_NEAR(res.test_rmse, anfis::rmse(res.model, test), 1e-12);
        for (const auto& r : res.runs) EXPECT_GE(r.test_rmse, res.test_rmse);
    }
}

TEST(Tune, Deterministic) {
    const auto d = synthetic_risk_data(2, 40, 84);
    anfis::Dataset train, test;
    for (std::size_t i = 0; i < d.features.size(); ++i) {
        (i < 28 ? train : test).push_back({d.features[i], d.targets[i]});
    }
    TuneConfig cfg;
    cfg.ecsa.population_size = 5;
    cfg.ecsa.max_iterations = 6;
    cfg.ecsa.seed = 9;
    cfg.runs = 3;
    const auto a = tune_anfis_with_ecsa(train, test, cfg);
    const auto b = tune_anfis_with_ecsa(train, test, cfg);
    EXPECT_EQ(a.coefficients, b.coefficients);
    EXPECT_EQ(snapshot(a.model), snapshot(b.model));
    cfg.threads = 2;
    const auto c = tune_anfis_with_ecsa(train, test, cfg);
    EXPECT_EQ(snapshot(a.model), snapshot(c.model));
}

TEST(Tune, SignedModeStaysInBounds) {
    const auto d = synthetic_risk_data(2, 30, 85);
    anfis::Dataset train, test;
    for (std::size_t i = 0; i < d.features.size(); ++i) {
        (i < 20 ? train : test).push_back({d.features[i], d.targets[i]});
    }
    TuneConfig cfg;
    cfg.ecsa.population_size = 4;
    cfg.ecsa.max_iterations = 4;
    cfg.runs = 1;
    cfg.coefficient_mode = CoefficientMode::signed_;
    cfg.signed_bound = 3.0;
    const auto res = tune_anfis_with_ecsa(train, test, cfg);
    EXPECT_LE(res.coefficients.cwiseAbs().maxCoeff(), 3.0);
    EXPECT_LE(res.train_rmse, res.base_train_rmse + 1e-12);
}

TEST(Snapshot, RestoreRoundTrip) {
    const auto d = synthetic_risk_data(3, 30, 86);
    anfis::Dataset train;
    for (std::size_t i = 0; i < d.features.size(); ++i) train.push_back({d.features[i], d.targets[i]});
    const auto model = anfis::fit_consequents_least_squares(anfis::init_fis(train, 0.5), train).model;
    const auto back = restore(snapshot(model));
    EXPECT_EQ(snapshot(back), snapshot(model));
    for (const auto& s : train) EXPECT_EQ(anfis::forward(back, s.inputs), anfis::forward(model, s.inputs));
}

TEST(Pipeline, SingleCriterion) {
    const auto d = synthetic_risk_data(1, 30, 87);
    const auto r = run_pipeline(d, crisp_respondent(Eigen::MatrixXd::Zero(1, 1)), small_config());
    EXPECT_EQ(r.weights, std::vector<double>{1.0});
    EXPECT_EQ(r.ranking, std::vector<std::size_t>{0});
    EXPECT_EQ(r.p_out, r.potential_scores[0]);
}

TEST(Pipeline, MissingRespondentsNamesStage) {
    const auto d = synthetic_risk_data(3, 30, 88);
    try {
        (void)run_pipeline(d, {}, small_config());
        FAIL();
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("pipeline stage 'weights'"), std::string::npos);
    }
}

TEST(Pipeline, BadSplitNamesStage) {
    const auto d = synthetic_risk_data(2, 30, 89);
    auto cfg = small_config();
    cfg.train_fraction = 1.0;
    try {
        (void)run_pipeline(d, random_respondents(2, 2, 1), cfg);
        FAIL();
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("pipeline stage 'split'"), std::string::npos);
    }
}

TEST(Pipeline, ReportIsSelfConsistent) {
    const auto d = synthetic_risk_data(4, 50, 90);
    const auto rs = random_respondents(4, 3, 91);
    const auto r = run_pipeline(d, rs, small_config());

    EXPECT_EQ(r.train_size, 35u);
    EXPECT_EQ(r.test_size, 15u);
    EXPECT_EQ(r.folds.size(), 3u);
    EXPECT_NEAR(aggregate_risk(r.weights, r.potential_scores), r.p_out, 1e-9);

    std::vector<std::size_t> sorted = r.ranking;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3}));

    const auto again = topsis::rank_weighted(recorded_weighted_matrix(r));
    EXPECT_EQ(again.ranking, r.ranking);
    EXPECT_EQ(again.xi, r.closeness);

    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r.probe_grid[i][i], r.potential_scores[i]);
    EXPECT_LE(r.train_rmse, r.base_train_rmse);
    EXPECT_GE(r.hesitation, 0.0);
    EXPECT_LE(r.hesitation, 0.5);
}

TEST(Pipeline, Deterministic) {
    const auto d = synthetic_risk_data(3, 40, 92);
    const auto rs = random_respondents(3, 2, 93);
    EXPECT_EQ(run_pipeline(d, rs, small_config()), run_pipeline(d, rs, small_config()));
    auto other = small_config();
    other.seed = 8;
    EXPECT_NE(run_pipeline(d, rs, small_config()).split_seed, run_pipeline(d, rs, other).split_seed);
}

TEST(Pipeline, JudgmentScaleInvariance) {
    const auto d = synthetic_risk_data(3, 40, 94);
    const auto rs = random_respondents(3, 3, 95);
    auto cfg = small_config();
    cfg.cross_validation = false;
    const auto a = run_pipeline(d, rs, cfg);
    const auto b = run_pipeline(d, scaled(rs, 3.0), cfg);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.weights[i], b.weights[i], 1e-9);
    EXPECT_EQ(a.ranking, b.ranking);
    EXPECT_NEAR(a.p_out, b.p_out, 1e-9);
}

TEST(Pipeline, CriteriaKindsLengthChecked) {
    const auto d = synthetic_risk_data(2, 30, 96);
    auto cfg = small_config();
    cfg.cross_validation = false;
    cfg.criteria_kinds = {topsis::CriterionKind::cost};
    Eigen::MatrixXd s(2, 2);
    s << 0, 2, 1, 0;
    EXPECT_THROW(run_pipeline(d, crisp_respondent(s), cfg), ArgumentError);
}
