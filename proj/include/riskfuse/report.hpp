#pragma once

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "riskfuse/anfis.hpp"
#include "riskfuse/error.hpp"
#include "riskfuse/pipeline.hpp"

namespace riskfuse::pipeline {

using Json = nlohmann::ordered_json;

template <class J>
void to_json(J& j, const ModelRecord& m) {
    j = J::object();
    j["rule_count"] = m.premises.size();
    j["input_dim"] = m.normalization_lower.size();
    j["parameter_order"] = "premises: rule x input x (m, l, k); consequents: rule x (q..., s)";
    j["normalization"] = {{"lower", m.normalization_lower}, {"span", m.normalization_span}};
    J rules = J::array();
    for (std::size_t r = 0; r < m.premises.size(); ++r) {
        rules.push_back({{"premises", m.premises[r]}, {"consequent", m.consequents[r]}});
    }
    j["rules"] = std::move(rules);
}

template <class J>
void from_json(const J& j, ModelRecord& m) {
    m = {};
    j.at("normalization").at("lower").get_to(m.normalization_lower);
    j.at("normalization").at("span").get_to(m.normalization_span);
    for (const auto& rule : j.at("rules")) {
        m.premises.push_back(rule.at("premises").template get<std::vector<std::array<double, 3>>>());
        m.consequents.push_back(rule.at("consequent").template get<std::vector<double>>());
    }
    if (j.at("rule_count").template get<std::size_t>() != m.premises.size()) {
        throw DataError("model JSON: rule_count disagrees with the rules array");
    }
}

template <class J>
void to_json(J& j, const FoldMetrics& f) {
    j = J{{"fold", f.fold},
          {"seed", f.seed},
          {"train_size", f.train_size},
          {"test_size", f.test_size},
          {"rules", f.rules},
          {"base_train_rmse", f.base_train_rmse},
          {"train_rmse", f.train_rmse},
          {"test_rmse", f.test_rmse},
          {"test_mape", f.test_mape}};
}

template <class J>
void from_json(const J& j, FoldMetrics& f) {
    j.at("fold").get_to(f.fold);
    j.at("seed").get_to(f.seed);
    j.at("train_size").get_to(f.train_size);
    j.at("test_size").get_to(f.test_size);
    j.at("rules").get_to(f.rules);
    j.at("base_train_rmse").get_to(f.base_train_rmse);
    j.at("train_rmse").get_to(f.train_rmse);
    j.at("test_rmse").get_to(f.test_rmse);
    j.at("test_mape").get_to(f.test_mape);
}

template <class J>
void to_json(J& j, const RunStats& r) {
    j = J{{"run", r.run},
          {"seed", r.seed},
          {"best_fitness", r.best_fitness},
          {"train_rmse", r.train_rmse},
          {"test_rmse", r.test_rmse},
          {"evaluations", r.evaluations},
          {"history", r.history}};
}

template <class J>
void from_json(const J& j, RunStats& r) {
    j.at("run").get_to(r.run);
    j.at("seed").get_to(r.seed);
    j.at("best_fitness").get_to(r.best_fitness);
    j.at("train_rmse").get_to(r.train_rmse);
    j.at("test_rmse").get_to(r.test_rmse);
    j.at("evaluations").get_to(r.evaluations);
    j.at("history").get_to(r.history);
}

inline Json report_to_json(const RiskReport& r) {
    Json j;
    j["criteria"] = r.criteria;
    j["seeds"] = {{"master", r.seed}, {"split", r.split_seed}, {"tuning", r.tuning_seed}};
    j["split"] = {{"train_size", r.train_size}, {"test_size", r.test_size}};
    j["dematel"] = {{"direct_relation", r.direct_relation},
                    {"total_relation", r.total_relation},
                    {"prominence", r.prominence},
                    {"relation", r.relation},
                    {"weights", r.weights}};
    j["anfis"] = {{"model", r.model},
                  {"base_train_rmse", r.base_train_rmse},
                  {"train_rmse", r.train_rmse},
                  {"test_rmse", r.test_rmse},
                  {"test_mape", r.test_mape},
                  {"selected_run", r.selected_run},
                  {"runs", r.runs},
                  {"folds", r.folds}};
    j["scores"] = {{"baseline", r.baseline},
                   {"extreme_levels", r.extreme_levels},
                   {"probe_grid", r.probe_grid},
                   {"potential_scores", r.potential_scores}};
    j["topsis"] = {{"criteria_kinds", r.criteria_kinds},
                   {"hesitation", r.hesitation},
                   {"decision_matrix", r.decision_matrix},
                   {"weighted_matrix", r.weighted_matrix},
                   {"separation_positive", r.separation_positive},
                   {"separation_negative", r.separation_negative},
                   {"closeness", r.closeness},
                   {"ranking", r.ranking},
                   {"ties", r.ties}};
    j["p_out"] = r.p_out;
    return j;
}

inline RiskReport report_from_json(const Json& j) {
    try {
        RiskReport r;
        j.at("criteria").get_to(r.criteria);
        j.at("seeds").at("master").get_to(r.seed);
        j.at("seeds").at("split").get_to(r.split_seed);
        j.at("seeds").at("tuning").get_to(r.tuning_seed);
        j.at("split").at("train_size").get_to(r.train_size);
        j.at("split").at("test_size").get_to(r.test_size);
        const auto& d = j.at("dematel");
        d.at("direct_relation").get_to(r.direct_relation);
        d.at("total_relation").get_to(r.total_relation);
        d.at("prominence").get_to(r.prominence);
        d.at("relation").get_to(r.relation);
        d.at("weights").get_to(r.weights);
        const auto& a = j.at("anfis");
        a.at("model").get_to(r.model);
        a.at("base_train_rmse").get_to(r.base_train_rmse);
        a.at("train_rmse").get_to(r.train_rmse);
        a.at("test_rmse").get_to(r.test_rmse);
        a.at("test_mape").get_to(r.test_mape);
        a.at("selected_run").get_to(r.selected_run);
        a.at("runs").get_to(r.runs);
        a.at("folds").get_to(r.folds);
        const auto& s = j.at("scores");
        s.at("baseline").get_to(r.baseline);
        s.at("extreme_levels").get_to(r.extreme_levels);
        s.at("probe_grid").get_to(r.probe_grid);
        s.at("potential_scores").get_to(r.potential_scores);
        const auto& t = j.at("topsis");
        t.at("criteria_kinds").get_to(r.criteria_kinds);
        t.at("hesitation").get_to(r.hesitation);
        t.at("decision_matrix").get_to(r.decision_matrix);
        t.at("weighted_matrix").get_to(r.weighted_matrix);
        t.at("separation_positive").get_to(r.separation_positive);
        t.at("separation_negative").get_to(r.separation_negative);
        t.at("closeness").get_to(r.closeness);
        t.at("ranking").get_to(r.ranking);
        t.at("ties").get_to(r.ties);
        j.at("p_out").get_to(r.p_out);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report JSON: ") + e.what());
    }
}

enum class ReportFormat { json, csv };

inline ReportFormat parse_report_format(std::string_view s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw ArgumentError("format must be 'json' or 'csv', got '" + std::string(s) + "'");
}

namespace detail {

inline std::string csv_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::ostream& full_precision(std::ostream& os) {
    return os << std::setprecision(std::numeric_limits<double>::max_digits10);
}

}  // namespace detail

/// Three blank-line separated tables: weights; scores with closeness and rank; tuning runs.
inline std::string report_to_csv(const RiskReport& r) {
    std::ostringstream os;
    detail::full_precision(os);
    os << "criterion,weight,prominence,relation\n";
    for (std::size_t i = 0; i < r.criteria.size(); ++i) {
        os << detail::csv_quote(r.criteria[i]) << ',' << r.weights.at(i) << ','
           << r.prominence.at(i) << ',' << r.relation.at(i) << '\n';
    }
    os << "\ncriterion,potential_score,closeness,rank\n";
    std::vector<std::size_t> rank_of(r.criteria.size());
    for (std::size_t pos = 0; pos < r.ranking.size(); ++pos) rank_of.at(r.ranking[pos]) = pos + 1;
    for (std::size_t i = 0; i < r.criteria.size(); ++i) {
        os << detail::csv_quote(r.criteria[i]) << ',' << r.potential_scores.at(i) << ','
           << r.closeness.at(i) << ',' << rank_of[i] << '\n';
    }
    os << "\nrun,seed,best_fitness,train_rmse,test_rmse,evaluations,selected\n";
    for (const auto& run : r.runs) {
        os << run.run << ',' << run.seed << ',' << run.best_fitness << ',' << run.train_rmse << ','
           << run.test_rmse << ',' << run.evaluations << ','
           << (run.run == r.selected_run ? 1 : 0) << '\n';
    }
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string render_report(const RiskReport& report, ReportFormat format) {
    return format == ReportFormat::json ? report_to_json(report).dump(2) + "\n"
                                        : report_to_csv(report);
}

inline void emit_report(const RiskReport& report, ReportFormat format, const std::string& path) {
    write_text_file(path, render_report(report, format));
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(source + ": invalid JSON: " + e.what());
    }
}

inline RiskReport read_report(const std::string& path) {
    return report_from_json(parse_json_text(read_text_file(path), path));
}

inline void save_model(const anfis::AnfisModel& model, const std::string& path) {
    write_text_file(path, Json(snapshot(model)).dump(2) + "\n");
}

inline anfis::AnfisModel load_model(const std::string& path) {
    const auto j = parse_json_text(read_text_file(path), path);
    try {
        return restore(j.get<ModelRecord>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace riskfuse::pipeline
