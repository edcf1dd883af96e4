#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "riskfuse/benchmarks.hpp"
#include "riskfuse/config.hpp"
#include "riskfuse/dataset.hpp"
#include "riskfuse/error.hpp"
#include "riskfuse/if_topsis.hpp"
#include "riskfuse/pipeline.hpp"
#include "riskfuse/report.hpp"

namespace riskfuse::cli {

enum ExitCode : int { ok = 0, usage = 1, data_failure = 2, numerical_failure = 3 };

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out;
    std::string format = "json";
};

namespace detail {

using Json = nlohmann::ordered_json;

inline std::string number(double v) { return Json(v).dump(); }

inline std::string vector_text(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + number(v[i]);
    return s + "]";
}

inline config::RunConfig require_config(const GlobalOptions& g) {
    if (g.config.empty()) throw ArgumentError("--config <file> is required for this command");
    return config::load_config(g.config);
}

inline void write_or_print(const GlobalOptions& g, const std::string& text, std::ostream& out) {
    if (g.out.empty()) {
        out << text;
    } else {
        pipeline::write_text_file(g.out, text);
    }
}

inline pipeline::RiskData load_risk_data(const config::RunConfig& cfg) {
    if (!cfg.dataset_path) throw ArgumentError("config has no dataset.path");
    const auto path = cfg.dataset_path->string();
    const auto ds = cfg.dataset_format ? data::load_dataset(path, *cfg.dataset_format)
                                       : data::load_dataset(path);
    return pipeline::build_risk_data(ds, cfg.selection);
}

inline pipeline::PipelineConfig seeded(const config::RunConfig& cfg, const GlobalOptions& g) {
    auto p = cfg.pipeline;
    p.seed = config::resolve_seed(g.seed, cfg.seed);
    return p;
}

inline int cmd_weights(const GlobalOptions& g, std::ostream& out) {
    const auto cfg = require_config(g);
    if (cfg.respondents.empty()) throw ArgumentError("config has no dematel respondents");
    const auto d = pipeline::derive_weights_detailed(cfg.respondents);
    const std::vector<double> w(d.dematel.weights.data(),
                                d.dematel.weights.data() + d.dematel.weights.size());
    out << "w = " << vector_text(w) << "\n";
    if (!g.out.empty()) {
        Json j;
        j["weights"] = w;
        j["prominence"] = std::vector<double>(d.dematel.prominence.data(),
                                              d.dematel.prominence.data() + d.dematel.prominence.size());
        j["relation"] = std::vector<double>(d.dematel.relation.data(),
                                            d.dematel.relation.data() + d.dematel.relation.size());
        pipeline::write_text_file(g.out, j.dump(2) + "\n");
    }
    return ok;
}

inline int cmd_tune(const GlobalOptions& g, std::ostream& out) {
    const auto cfg = require_config(g);
    const auto data = load_risk_data(cfg);
    const auto trained = pipeline::train_risk_model(data, seeded(cfg, g));
    std::ostringstream os;
    os << "fold,train_size,test_size,rules,base_train_rmse,train_rmse,test_rmse,test_mape\n";
    for (const auto& f : trained.folds) {
        os << f.fold << ',' << f.train_size << ',' << f.test_size << ',' << f.rules << ','
           << number(f.base_train_rmse) << ',' << number(f.train_rmse) << ','
           << number(f.test_rmse) << ',' << number(f.test_mape) << '\n';
    }
    os << "final," << trained.train_idx.size() << ',' << trained.test_idx.size() << ','
       << trained.tuned.model.rule_count() << ',' << number(trained.tuned.base_train_rmse) << ','
       << number(trained.tuned.train_rmse) << ',' << number(trained.tuned.test_rmse) << ','
       << number(trained.test_mape) << '\n';
    out << os.str();
    if (!g.out.empty()) pipeline::save_model(trained.tuned.model, g.out);
    return ok;
}

/// Input: {"matrix": [[[mu, nu], ...], ...], "kinds": [...], "weights": [...]}. Without
/// weights the matrix is taken as already weighted.
inline int cmd_rank(const GlobalOptions& g, std::ostream& out) {
    if (g.config.empty()) throw ArgumentError("--config <matrix.json> is required for rank");
    const auto j = pipeline::parse_json_text(pipeline::read_text_file(g.config), g.config);
    try {
        std::vector<std::vector<IntuitionisticFuzzyValue>> rows;
        for (const auto& row : j.at("matrix")) {
            std::vector<IntuitionisticFuzzyValue> cells;
            for (const auto& c : row) {
                if (!c.is_array() || c.size() < 2) {
                    throw ArgumentError("rank: each cell must be [mu, nu] or [mu, nu, pi]");
                }
                cells.emplace_back(c[0].get<double>(), c[1].get<double>());
            }
            rows.push_back(std::move(cells));
        }
        const std::size_t m = rows.empty() ? 0 : rows.front().size();
        std::vector<topsis::CriterionKind> kinds(m, topsis::CriterionKind::benefit);
        if (j.contains("kinds")) {
            kinds.clear();
            for (const auto& k : j.at("kinds")) {
                kinds.push_back(pipeline::parse_kind(k.get<std::string>()));
            }
        }
        topsis::IfDecisionMatrix matrix(std::move(rows), std::move(kinds));
        if (j.contains("weights")) {
            std::vector<IntuitionisticFuzzyValue> w;
            for (const auto& v : j.at("weights")) w.push_back(topsis::lift_weight(v.get<double>()));
            matrix = topsis::weighted_if_matrix(matrix, w);
        }
        const auto res = topsis::rank_weighted(matrix);
        Json o;
        o["closeness"] = res.xi;
        o["ranking"] = res.ranking;
        o["ties"] = res.ties;
        out << "xi = " << vector_text(res.xi) << "\nranking = [";
        for (std::size_t i = 0; i < res.ranking.size(); ++i) {
            out << (i ? ", " : "") << res.ranking[i];
        }
        out << "]\n";
        if (!g.out.empty()) pipeline::write_text_file(g.out, o.dump(2) + "\n");
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(g.config + ": " + e.what());
    }
    return ok;
}

inline int cmd_pipeline(const GlobalOptions& g, std::ostream& out) {
    const auto cfg = require_config(g);
    if (cfg.respondents.empty()) throw ArgumentError("config has no dematel respondents");
    const auto data = load_risk_data(cfg);
    const auto report = pipeline::run_pipeline(data, cfg.respondents, seeded(cfg, g));
    write_or_print(g, pipeline::render_report(report, pipeline::parse_report_format(g.format)),
                   out);
    if (!g.out.empty()) {
        out << "P_out = " << number(report.p_out) << "\n";
    }
    return ok;
}

struct BenchOptions {
    std::string function = "sphere";
    std::vector<std::string> algorithms = {"ecsa", "csa", "random"};
    std::size_t runs = 20;
    std::size_t dim = 5;
    std::size_t population = 10;
    std::size_t iterations = 100;
};

inline int cmd_bench(const GlobalOptions& g, const BenchOptions& b, std::ostream& out) {
    const auto fn = bench::test_function(b.function);
    ecsa::EcsaConfig cfg;
    cfg.population_size = b.population;
    cfg.max_iterations = b.iterations;
    cfg.bounds = ecsa::Bounds::uniform(b.dim, fn.lower, fn.upper);
    cfg.seed = config::resolve_seed(g.seed, std::nullopt);
    std::ostringstream os;
    os << "function,algorithm,run,seed,best_value,best_fitness,evaluations\n";
    for (const auto& alg : b.algorithms) {
        const auto results =
            ecsa::run_independent(fn.objective, cfg, b.runs, 1, bench::optimizer(alg));
        for (std::size_t r = 0; r < results.size(); ++r) {
            os << fn.name << ',' << alg << ',' << r << ',' << results[r].seed << ','
               << number(results[r].best_value) << ',' << number(results[r].best_fitness) << ','
               << results[r].evaluations << '\n';
        }
    }
    write_or_print(g, os.str(), out);
    return ok;
}

}  // namespace detail

/// Parses argv and runs one subcommand. Exit codes: 0 success, 1 usage, 2 data or I/O,
/// 3 numerical failure.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"Fuzzy software-risk assessment toolkit", "riskfuse"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Master RNG seed (falls back to RISKFUSE_SEED)");
    app.add_option("--config", g.config, "JSON configuration or input file");
    app.add_option("--out", g.out, "Output path (stdout when omitted)");
    app.add_option("--format", g.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* weights = app.add_subcommand("weights", "DEMATEL criterion weights");
    auto* tune = app.add_subcommand("tune", "ECSA-tuned ANFIS with per-fold RMSE/MAPE");
    auto* rank = app.add_subcommand("rank", "IF-TOPSIS ranking of a weighted matrix");
    auto* pipe = app.add_subcommand("pipeline", "Full risk assessment run");
    auto* bench = app.add_subcommand("bench-ecsa", "Optimizer test-function harness");

    detail::BenchOptions b;
    bench->add_option("--function", b.function)->check(CLI::IsMember({"sphere", "rastrigin"}));
    bench->add_option("--algorithm", b.algorithms, "ecsa, csa, random (repeatable)")
        ->check(CLI::IsMember({"ecsa", "csa", "random"}));
    bench->add_option("--runs", b.runs)->check(CLI::PositiveNumber);
    bench->add_option("--dim", b.dim)->check(CLI::PositiveNumber);
    bench->add_option("--population", b.population)->check(CLI::Range(2, 100000));
    bench->add_option("--iterations", b.iterations)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return usage;
    }

    try {
        if (weights->parsed()) return detail::cmd_weights(g, out);
        if (tune->parsed()) return detail::cmd_tune(g, out);
        if (rank->parsed()) return detail::cmd_rank(g, out);
        if (pipe->parsed()) return detail::cmd_pipeline(g, out);
        if (bench->parsed()) return detail::cmd_bench(g, b, out);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return data_failure;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return data_failure;
    } catch (const LookupError& e) {
        err << "data error: " << e.what() << "\n";
        return data_failure;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return numerical_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return numerical_failure;
    }
    err << app.help();
    return usage;
}

}  // namespace riskfuse::cli
