#pragma once

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "riskfuse/dataset.hpp"
#include "riskfuse/dematel.hpp"
#include "riskfuse/error.hpp"
#include "riskfuse/fuzzy.hpp"
#include "riskfuse/pipeline.hpp"
#include "riskfuse/report.hpp"

namespace riskfuse::config {

/// Everything a CLI run needs, resolved from one JSON document.
///
/// Relative paths are resolved against the directory of the config file.
struct RunConfig {
    std::filesystem::path base_dir = ".";
    std::optional<std::filesystem::path> dataset_path;
    std::optional<data::DatasetFormat> dataset_format;
    pipeline::DataSelection selection;
    LinguisticScale scale = default_dematel_scale();
    std::vector<dematel::JudgmentMatrix> respondents;
    pipeline::PipelineConfig pipeline;
    std::optional<std::uint64_t> seed;
};

/// The 13 criteria that the NASA-93 COCOMO-81 columns can supply.
inline std::vector<std::string> default_criteria() {
    return {"SCED", "RELY", "DATA", "SIZE", "CPLX", "TIME", "STOR",
            "ACAP", "AEXP", "LTEX", "PCAP", "VEXP", "TOOL"};
}

namespace detail {

using Json = nlohmann::ordered_json;

inline void reject_unknown(const Json& j, const std::set<std::string>& known,
                           const std::string& where) {
    if (!j.is_object()) throw ArgumentError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ArgumentError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
void read_opt(const Json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(where + "." + key + ": " + e.what());
    }
}

inline TriangularFuzzyNumber tfn_from_array(const Json& a, const std::string& where) {
    if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() ||
        !a[2].is_number()) {
        throw ArgumentError(where + ": a fuzzy cell must be [l, m, u]");
    }
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

inline LinguisticScale parse_scale(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "default") return default_dematel_scale();
        throw ArgumentError("dematel.scale: only 'default' is built in, got '" +
                            j.get<std::string>() + "'");
    }
    reject_unknown(j, {"name", "levels"}, "dematel.scale");
    std::string name = j.value("name", std::string("custom"));
    std::vector<std::string> labels;
    std::vector<TriangularFuzzyNumber> tfns;
    for (const auto& level : j.at("levels")) {
        labels.push_back(level.at("label").get<std::string>());
        tfns.push_back(tfn_from_array(level.at("tfn"), "dematel.scale.levels"));
    }
    return {std::move(name), std::move(labels), std::move(tfns)};
}

inline dematel::JudgmentMatrix parse_judgments(const Json& m, const LinguisticScale& scale,
                                               std::size_t index) {
    const std::string where = "respondent " + std::to_string(index);
    if (!m.is_array()) throw ArgumentError(where + ": expected a matrix");
    dematel::JudgmentMatrix out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& row = m[i];
        if (!row.is_array() || row.size() != m.size()) {
            throw ArgumentError(where + ": matrix must be square");
        }
        std::vector<TriangularFuzzyNumber> cells;
        for (std::size_t k = 0; k < row.size(); ++k) {
            const auto& c = row[k];
            const std::string cell = where + " cell (" + std::to_string(i) + ", " +
                                     std::to_string(k) + ")";
            if (i == k && (c.is_null() || (c.is_string() && c.get<std::string>() == "-"))) {
                cells.emplace_back();
            } else if (c.is_string()) {
                cells.push_back(tfn_from_linguistic(c.get<std::string>(), scale));
            } else if (c.is_number()) {
                cells.push_back(TriangularFuzzyNumber::crisp(c.get<double>()));
            } else {
                cells.push_back(tfn_from_array(c, cell));
            }
        }
        out.push_back(std::move(cells));
    }
    return out;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline Json load_json_file(const std::filesystem::path& path) {
    return pipeline::parse_json_text(pipeline::read_text_file(path.string()), path.string());
}

}  // namespace detail

inline std::vector<dematel::JudgmentMatrix> parse_respondents(const nlohmann::ordered_json& j,
                                                              const LinguisticScale& scale) {
    const auto& list = j.is_object() ? j.at("respondents") : j;
    if (!list.is_array()) throw ArgumentError("respondents: expected an array of matrices");
    std::vector<dematel::JudgmentMatrix> out;
    for (std::size_t r = 0; r < list.size(); ++r) {
        out.push_back(detail::parse_judgments(list[r], scale, r));
    }
    return out;
}

inline RunConfig parse_config(const nlohmann::ordered_json& j,
                              const std::filesystem::path& base_dir) {
    using detail::read_opt;
    detail::reject_unknown(j,
                           {"criteria", "criteria_kinds", "dataset", "target", "ordinal_levels",
                            "dematel", "anfis", "ecsa", "split", "seed"},
                           "config");
    RunConfig c;
    c.base_dir = base_dir;
    c.selection.criteria = default_criteria();
    read_opt(j, "criteria", c.selection.criteria, "config");

    if (j.contains("criteria_kinds")) {
        for (const auto& k : j.at("criteria_kinds")) {
            c.pipeline.criteria_kinds.push_back(pipeline::parse_kind(k.get<std::string>()));
        }
    }
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        detail::reject_unknown(d, {"path", "format"}, "dataset");
        c.dataset_path = detail::resolve(base_dir, d.at("path").get<std::string>());
        if (d.contains("format")) {
            const auto f = d.at("format").get<std::string>();
            if (f == "csv") c.dataset_format = data::DatasetFormat::csv;
            else if (f == "arff") c.dataset_format = data::DatasetFormat::arff;
            else throw ArgumentError("dataset.format must be 'csv' or 'arff'");
        }
    }
    if (j.contains("target")) {
        const auto& t = j.at("target");
        detail::reject_unknown(t, {"attribute", "transform"}, "target");
        read_opt(t, "attribute", c.selection.target, "target");
        if (t.contains("transform")) {
            const auto tr = t.at("transform").get<std::string>();
            if (tr == "log") c.selection.log_target = true;
            else if (tr == "none") c.selection.log_target = false;
            else throw ArgumentError("target.transform must be 'log' or 'none'");
        }
    }
    if (j.contains("ordinal_levels")) {
        read_opt(j, "ordinal_levels", c.selection.levels.values, "config");
        c.selection.levels.validate();
    }
    if (j.contains("dematel")) {
        const auto& d = j.at("dematel");
        detail::reject_unknown(d, {"scale", "respondents", "respondents_file"}, "dematel");
        if (d.contains("scale")) c.scale = detail::parse_scale(d.at("scale"));
        if (d.contains("respondents")) {
            c.respondents = parse_respondents(d.at("respondents"), c.scale);
        } else if (d.contains("respondents_file")) {
            const auto path = detail::resolve(base_dir, d.at("respondents_file").get<std::string>());
            c.respondents = parse_respondents(detail::load_json_file(path), c.scale);
        }
    }
    if (j.contains("anfis")) {
        detail::reject_unknown(j.at("anfis"), {"radius"}, "anfis");
        read_opt(j.at("anfis"), "radius", c.pipeline.cluster_radius, "anfis");
    }
    if (j.contains("ecsa")) {
        const auto& e = j.at("ecsa");
        detail::reject_unknown(e,
                               {"population_size", "max_iterations", "flight_length", "ap_min",
                                "ap_max", "beta", "neighborhood_radius", "runs",
                                "coefficient_mode", "delta", "M", "threads"},
                               "ecsa");
        auto& t = c.pipeline.tuning;
        read_opt(e, "population_size", t.ecsa.population_size, "ecsa");
        read_opt(e, "max_iterations", t.ecsa.max_iterations, "ecsa");
        read_opt(e, "flight_length", t.ecsa.flight_length, "ecsa");
        read_opt(e, "ap_min", t.ecsa.ap_min, "ecsa");
        read_opt(e, "ap_max", t.ecsa.ap_max, "ecsa");
        read_opt(e, "beta", t.ecsa.beta, "ecsa");
        read_opt(e, "neighborhood_radius", t.ecsa.neighborhood_radius, "ecsa");
        read_opt(e, "runs", t.runs, "ecsa");
        read_opt(e, "delta", t.delta, "ecsa");
        read_opt(e, "M", t.signed_bound, "ecsa");
        read_opt(e, "threads", t.threads, "ecsa");
        if (e.contains("coefficient_mode")) {
            const auto m = e.at("coefficient_mode").get<std::string>();
            if (m == "magnitude") t.coefficient_mode = pipeline::CoefficientMode::magnitude;
            else if (m == "signed") t.coefficient_mode = pipeline::CoefficientMode::signed_;
            else throw ArgumentError("ecsa.coefficient_mode must be 'magnitude' or 'signed'");
        }
        if (t.threads == 0) throw ArgumentError("ecsa.threads must be >= 1");
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        detail::reject_unknown(s, {"train_fraction", "folds", "cross_validation"}, "split");
        read_opt(s, "train_fraction", c.pipeline.train_fraction, "split");
        read_opt(s, "folds", c.pipeline.folds, "split");
        read_opt(s, "cross_validation", c.pipeline.cross_validation, "split");
        if (!(c.pipeline.train_fraction > 0.0 && c.pipeline.train_fraction < 1.0)) {
            throw ArgumentError("split.train_fraction must lie strictly inside (0, 1)");
        }
        if (c.pipeline.folds < 2) throw ArgumentError("split.folds must be >= 2");
    }
    if (j.contains("seed")) {
        std::uint64_t s = 0;
        read_opt(j, "seed", s, "config");
        c.seed = s;
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    const auto j = detail::load_json_file(path);
    try {
        return parse_config(j, path.parent_path().empty() ? "." : path.parent_path());
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(path.string() + ": " + e.what());
    }
}

/// --seed, then RISKFUSE_SEED, then the config's seed, then `fallback`.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag,
                                  std::optional<std::uint64_t> from_config,
                                  std::uint64_t fallback = 7) {
    if (flag) return *flag;
    if (const char* env = std::getenv("RISKFUSE_SEED"); env && *env) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            throw ArgumentError(std::string("RISKFUSE_SEED is not an unsigned integer: '") + env +
                                "'");
        }
        return v;
    }
    return from_config.value_or(fallback);
}

}  // namespace riskfuse::config
