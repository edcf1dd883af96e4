#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "riskfuse/error.hpp"

namespace riskfuse::data {

/// COCOMO-81 ordinal effort-multiplier levels.
enum class Rating { very_low, low, nominal, high, very_high, extra_high };

inline constexpr std::array<Rating, 6> kAllRatings = {Rating::very_low,  Rating::low,
                                                      Rating::nominal,   Rating::high,
                                                      Rating::very_high, Rating::extra_high};

inline std::string_view rating_name(Rating r) {
    switch (r) {
        case Rating::very_low: return "very_low";
        case Rating::low: return "low";
        case Rating::nominal: return "nominal";
        case Rating::high: return "high";
        case Rating::very_high: return "very_high";
        case Rating::extra_high: return "extra_high";
    }
    return "?";
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Accepts PROMISE abbreviations (vl, l, n, h, vh, xh) and spelled-out names.
inline std::optional<Rating> parse_rating(std::string_view token) {
    static const std::map<std::string, Rating> table = {
        {"vl", Rating::very_low},        {"very_low", Rating::very_low},
        {"very low", Rating::very_low},  {"l", Rating::low},
        {"low", Rating::low},            {"n", Rating::nominal},
        {"nominal", Rating::nominal},    {"h", Rating::high},
        {"high", Rating::high},          {"vh", Rating::very_high},
        {"very_high", Rating::very_high}, {"very high", Rating::very_high},
        {"xh", Rating::extra_high},      {"extra_high", Rating::extra_high},
        {"extra high", Rating::extra_high},
    };
    auto it = table.find(to_lower(trim(token)));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

/// Attribute names whose values must be COCOMO ratings.
inline const std::set<std::string>& rating_attributes() {
    static const std::set<std::string> names = {
        "rely", "data", "cplx", "time", "stor", "virt", "turn", "acap", "aexp", "pcap",
        "vexp", "lexp", "modp", "tool", "sced", "docu", "pcon", "site", "prec", "flex",
        "resl", "team", "pmat", "ruse", "ltex", "increments"};
    return names;
}

inline const std::set<std::string>& size_attributes() {
    static const std::set<std::string> names = {"equivphyskloc", "kloc", "size", "loc"};
    return names;
}

inline const std::set<std::string>& effort_attributes() {
    static const std::set<std::string> names = {"act_effort", "effort", "actual_effort"};
    return names;
}

struct ProjectRecord {
    std::string identifier;
    /// Rating attributes by lower-case name; nullopt when the value is missing ('?').
    std::map<std::string, std::optional<Rating>> ratings;
    std::optional<double> size;    // KLOC
    std::optional<double> effort;  // person-months
    /// Every other column, verbatim.
    std::map<std::string, std::string> extras;
    std::size_t line = 0;
};

struct ProjectDataset {
    std::vector<std::string> attributes;
    std::vector<ProjectRecord> records;
    std::vector<std::string> warnings;

    bool has_attribute(const std::string& name) const {
        return std::find(attributes.begin(), attributes.end(), name) != attributes.end();
    }
};

enum class DatasetFormat { csv, arff };

namespace detail {

/// Splits one comma-separated line honoring "double" and 'single' quotes.
inline std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    char quote = 0;
    bool quoted_field = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == quote) {
                if (i + 1 < line.size() && line[i + 1] == quote) {
                    cur.push_back(c);
                    ++i;
                } else {
                    quote = 0;
                }
            } else {
                cur.push_back(c);
            }
        } else if ((c == '"' || c == '\'') && trim(cur).empty()) {
            quote = c;
            quoted_field = true;
            cur.clear();
        } else if (c == ',') {
            out.push_back(quoted_field ? cur : trim(cur));
            cur.clear();
            quoted_field = false;
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(quoted_field ? cur : trim(cur));
    return out;
}

inline std::optional<double> parse_number(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline bool is_missing(const std::string& s) {
    const std::string t = trim(s);
    return t.empty() || t == "?";
}

inline ProjectRecord parse_row(const std::vector<std::string>& attrs,
                               const std::vector<std::string>& fields, std::size_t line,
                               std::size_t ordinal) {
    if (fields.size() != attrs.size()) {
        std::ostringstream msg;
        msg << "line " << line << ": expected " << attrs.size() << " fields, found "
            << fields.size();
        throw DataError(msg.str());
    }
    ProjectRecord rec;
    rec.line = line;
    rec.identifier = std::to_string(ordinal);
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        const std::string& name = attrs[i];
        const std::string& value = fields[i];
        if (rating_attributes().contains(name)) {
            if (is_missing(value)) {
                rec.ratings[name] = std::nullopt;
                continue;
            }
            auto r = parse_rating(value);
            if (!r) {
                std::ostringstream msg;
                msg << "line " << line << ": unknown rating token '" << trim(value)
                    << "' for attribute '" << name << "'";
                throw DataError(msg.str());
            }
            rec.ratings[name] = *r;
        } else if (size_attributes().contains(name) || effort_attributes().contains(name)) {
            if (is_missing(value)) continue;
            auto v = parse_number(value);
            const bool is_size = size_attributes().contains(name);
            if (!v || (is_size && !(*v > 0.0))) {
                std::ostringstream msg;
                msg << "line " << line << ": invalid " << (is_size ? "size" : "effort")
                    << " value '" << trim(value) << "' for attribute '" << name << "'";
                throw DataError(msg.str());
            }
            (is_size ? rec.size : rec.effort) = *v;
        } else {
            if (name == "recordnumber" || name == "id") rec.identifier = trim(value);
            rec.extras[name] = value;
        }
    }
    return rec;
}

}  // namespace detail

/// Parses PROMISE ARFF (@attribute declarations, then @data) or CSV with a header row.
inline ProjectDataset parse_dataset(std::istream& in, DatasetFormat format,
                                    const std::string& source = "<stream>") {
    ProjectDataset ds;
    std::string raw;
    std::size_t line = 0;
    bool in_data = false;

    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw);
        if (text.empty()) continue;
        if (format == DatasetFormat::arff) {
            if (text.front() == '%') continue;
            if (!in_data && text.front() == '@') {
                std::istringstream ss(text);
                std::string keyword, name;
                ss >> keyword;
                keyword = to_lower(keyword);
                if (keyword == "@attribute") {
                    ss >> name;
                    if (name.size() >= 2 && (name.front() == '\'' || name.front() == '"')) {
                        name = name.substr(1, name.size() - 2);
                    }
                    ds.attributes.push_back(to_lower(name));
                } else if (keyword == "@data") {
                    in_data = true;
                }
                continue;
            }
            if (!in_data) {
                throw DataError(source + ": line " + std::to_string(line) +
                                ": content before @data");
            }
        } else if (!in_data) {
            for (auto& f : detail::split_fields(text)) ds.attributes.push_back(to_lower(f));
            in_data = true;
            continue;
        }
        try {
            ds.records.push_back(detail::parse_row(ds.attributes, detail::split_fields(text), line,
                                                   ds.records.size() + 1));
        } catch (const DataError& e) {
            throw DataError(source + ": " + e.what());
        }
    }
    if (ds.attributes.empty()) {
        throw DataError(source + ": no attribute declarations or header row");
    }
    if (ds.records.empty()) ds.warnings.push_back(source + ": data section is empty");
    return ds;
}

inline DatasetFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : to_lower(path.substr(dot + 1));
    return ext == "csv" ? DatasetFormat::csv : DatasetFormat::arff;
}

inline ProjectDataset load_dataset(const std::string& path, DatasetFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path + "'");
    return parse_dataset(in, format, path);
}

inline ProjectDataset load_dataset(const std::string& path) {
    return load_dataset(path, format_from_path(path));
}

// ---------------------------------------------------------------------------
// Criteria catalog

enum class CriterionSource { ordinal, numeric };

struct CriterionInfo {
    std::string code;
    char group = '?';
    std::string description;
    /// Dataset attribute names that carry this criterion, in preference order.
    std::vector<std::string> attributes;
    CriterionSource source = CriterionSource::ordinal;
};

struct CriteriaGroup {
    char letter;
    std::string name;
    std::vector<std::string> codes;
};

/// Six risk groups and their coded criteria. DATA is listed under both product and platform
/// risk in the source table; it is kept once, in the product group.
class CriteriaCatalog {
public:
    static const CriteriaCatalog& standard() {
        static const CriteriaCatalog catalog = build();
        return catalog;
    }

    const std::vector<CriteriaGroup>& groups() const noexcept { return groups_; }
    const std::vector<CriterionInfo>& criteria() const noexcept { return criteria_; }
    /// Table rows that repeat an existing code, as "CODE (slot)".
    const std::vector<std::string>& duplicate_rows() const noexcept { return duplicates_; }

    const CriterionInfo& at(const std::string& code) const {
        for (const auto& c : criteria_) {
            if (c.code == code) return c;
        }
        throw LookupError("unknown criterion code '" + code + "'");
    }

    bool contains(const std::string& code) const {
        return std::any_of(criteria_.begin(), criteria_.end(),
                           [&](const CriterionInfo& c) { return c.code == code; });
    }

    /// Dataset attribute backing `code`, or nullopt when the dataset lacks it.
    std::optional<std::string> resolve(const std::string& code,
                                       const ProjectDataset& dataset) const {
        for (const auto& attr : at(code).attributes) {
            if (dataset.has_attribute(attr)) return attr;
        }
        return std::nullopt;
    }

private:
    static CriteriaCatalog build() {
        CriteriaCatalog c;
        auto add = [&c](char group, std::string code, std::string desc,
                        std::vector<std::string> attrs,
                        CriterionSource src = CriterionSource::ordinal) {
            c.criteria_.push_back({code, group, std::move(desc), std::move(attrs), src});
            for (auto& g : c.groups_) {
                if (g.letter == group) g.codes.push_back(code);
            }
        };
        c.groups_ = {{'P', "Schedule risk", {}}, {'Q', "Product risk", {}},
                     {'R', "Platform risk", {}}, {'S', "Personnel risk", {}},
                     {'T', "Process risk", {}},  {'U', "Reuse risk", {}}};
        add('P', "SCED", "Required development schedule", {"sced"});
        add('Q', "RELY", "Required software reliability", {"rely"});
        add('Q', "DATA", "Database size", {"data"});
        add('Q', "SIZE", "Software size", {"equivphyskloc", "kloc", "size", "loc"},
            CriterionSource::numeric);
        add('Q', "CPLX", "Product complexity", {"cplx"});
        add('Q', "DOCU", "Documentation", {"docu"});
        add('R', "TIME", "Execution time constraints", {"time"});
        add('R', "STOR", "Main storage constraints", {"stor"});
        add('S', "ACAP", "Analyst capability", {"acap"});
        add('S', "AEXP", "Application experience", {"aexp"});
        add('S', "LTEX", "Language and tool set experience", {"ltex", "lexp"});
        add('S', "PCAP", "Programmer capability", {"pcap"});
        add('S', "VEXP", "Virtual machine experience", {"vexp"});
        add('S', "PCON", "Personnel continuity", {"pcon"});
        add('T', "TOOL", "Use of software tools", {"tool"});
        add('T', "SITE", "Multisite development", {"site"});
        add('T', "PREC", "Precedentedness", {"prec"});
        add('T', "FLEX", "Development flexibility", {"flex"});
        add('T', "RESL", "Architecture or risk resolution", {"resl"});
        add('T', "TEAM", "Team cohesion", {"team"});
        add('T', "PMAT", "Process maturity", {"pmat"});
        add('T', "INCREMENTS", "Increment development", {"increments"});
        add('U', "RUSE", "Required reusability", {"ruse"});
        c.duplicates_ = {"DATA (R3)"};
        return c;
    }

    std::vector<CriteriaGroup> groups_;
    std::vector<CriterionInfo> criteria_;
    std::vector<std::string> duplicates_;
};

// ---------------------------------------------------------------------------
// Feature mapping

/// Numeric value in [0, 1] for each rating level; equally spaced by default.
struct OrdinalLevels {
    std::array<double, 6> values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

    double operator()(Rating r) const { return values[static_cast<std::size_t>(r)]; }

    void validate() const {
        for (double v : values) {
            if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("ordinal levels must lie in [0, 1]");
        }
    }
};

/// Maps records to per-criterion features in [0, 1]; numeric criteria are min-max scaled over
/// the dataset the mapping was built from.
class FeatureMapping {
public:
    FeatureMapping(const ProjectDataset& dataset, std::vector<std::string> codes,
                   const CriteriaCatalog& catalog = CriteriaCatalog::standard(),
                   OrdinalLevels levels = {})
        : codes_(std::move(codes)), levels_(levels) {
        levels_.validate();
        for (const auto& code : codes_) {
            const auto& info = catalog.at(code);
            auto attr = catalog.resolve(code, dataset);
            if (!attr) {
                throw LookupError("criterion '" + code +
                                  "' is not mapped to any attribute of the dataset");
            }
            Column col{code, *attr, info.source, 0.0, 1.0};
            if (info.source == CriterionSource::numeric) {
                bool seen = false;
                for (const auto& rec : dataset.records) {
                    auto v = numeric_value(rec, *attr);
                    if (!v) continue;
                    col.lo = seen ? std::min(col.lo, *v) : *v;
                    col.hi = seen ? std::max(col.hi, *v) : *v;
                    seen = true;
                }
                if (!seen) throw DataError("criterion '" + code + "' has no numeric values");
            }
            columns_.push_back(col);
        }
    }

    const std::vector<std::string>& codes() const noexcept { return codes_; }

    std::vector<double> map(const ProjectRecord& rec) const {
        std::vector<double> out;
        out.reserve(columns_.size());
        for (const auto& col : columns_) {
            if (col.source == CriterionSource::ordinal) {
                auto it = rec.ratings.find(col.attribute);
                if (it == rec.ratings.end() || !it->second) {
                    throw DataError("record " + rec.identifier + ": criterion '" + col.code +
                                    "' is missing");
                }
                out.push_back(levels_(*it->second));
            } else {
                auto v = numeric_value(rec, col.attribute);
                if (!v) {
                    throw DataError("record " + rec.identifier + ": criterion '" + col.code +
                                    "' is missing");
                }
                const double span = col.hi - col.lo;
                out.push_back(span > 0.0 ? std::clamp((*v - col.lo) / span, 0.0, 1.0) : 0.0);
            }
        }
        return out;
    }

private:
    struct Column {
        std::string code;
        std::string attribute;
        CriterionSource source;
        double lo;
        double hi;
    };

    static std::optional<double> numeric_value(const ProjectRecord& rec, const std::string& attr) {
        if (size_attributes().contains(attr)) return rec.size;
        if (effort_attributes().contains(attr)) return rec.effort;
        auto it = rec.extras.find(attr);
        if (it == rec.extras.end()) return std::nullopt;
        return detail::parse_number(it->second);
    }

    std::vector<std::string> codes_;
    OrdinalLevels levels_;
    std::vector<Column> columns_;
};

inline std::vector<double> map_ratings_to_features(const ProjectRecord& record,
                                                   const FeatureMapping& mapping) {
    return mapping.map(record);
}

}  // namespace riskfuse::data
