#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "riskfuse/error.hpp"
#include "riskfuse/fuzzy.hpp"

namespace riskfuse::topsis {

using Ifv = IntuitionisticFuzzyValue;

enum class CriterionKind { benefit, cost };

/// Alternatives x criteria grid of intuitionistic values.
class IfDecisionMatrix {
public:
    IfDecisionMatrix(std::vector<std::vector<Ifv>> rows, std::vector<CriterionKind> kinds)
        : rows_(std::move(rows)), kinds_(std::move(kinds)) {
        for (const auto& row : rows_) {
            if (row.size() != kinds_.size()) {
                throw ArgumentError("IF decision matrix rows must have one cell per criterion");
            }
        }
    }

    std::size_t alternatives() const noexcept { return rows_.size(); }
    std::size_t criteria() const noexcept { return kinds_.size(); }
    const std::vector<std::vector<Ifv>>& rows() const noexcept { return rows_; }
    const std::vector<CriterionKind>& kinds() const noexcept { return kinds_; }
    const Ifv& at(std::size_t i, std::size_t j) const { return rows_.at(i).at(j); }

private:
    std::vector<std::vector<Ifv>> rows_;
    std::vector<CriterionKind> kinds_;
};

struct IdealSolutions {
    std::vector<Ifv> positive;
    std::vector<Ifv> negative;
};

struct Separations {
    std::vector<double> positive;  // V*
    std::vector<double> negative;  // V-
};

/// Lifts a crisp weight w in [0, 1] to (w, 1 - w, 0).
inline Ifv lift_weight(double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw ArgumentError("lift_weight: weight outside [0, 1]");
    return {w, 1.0 - w};
}

inline IfDecisionMatrix weighted_if_matrix(const IfDecisionMatrix& raw,
                                           const std::vector<Ifv>& weights) {
    if (weights.size() != raw.criteria()) {
        std::ostringstream msg;
        msg << "weighted_if_matrix: " << weights.size() << " weights for " << raw.criteria()
            << " criteria";
        throw ArgumentError(msg.str());
    }
    std::vector<std::vector<Ifv>> rows = raw.rows();
    for (auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = ifv_multiply(row[j], weights[j]);
    }
    return {std::move(rows), raw.kinds()};
}

/// Benefit criteria: positive ideal (max mu, min nu), negative (min mu, max nu). Cost: swapped.
inline IdealSolutions ideal_solutions(const IfDecisionMatrix& m) {
    if (m.alternatives() == 0 || m.criteria() == 0) {
        throw ArgumentError("ideal_solutions: empty decision matrix");
    }
    IdealSolutions out;
    for (std::size_t j = 0; j < m.criteria(); ++j) {
        double mu_max = m.at(0, j).mu(), mu_min = mu_max;
        double nu_max = m.at(0, j).nu(), nu_min = nu_max;
        for (std::size_t i = 1; i < m.alternatives(); ++i) {
            mu_max = std::max(mu_max, m.at(i, j).mu());
            mu_min = std::min(mu_min, m.at(i, j).mu());
            nu_max = std::max(nu_max, m.at(i, j).nu());
            nu_min = std::min(nu_min, m.at(i, j).nu());
        }
        // (max mu, min nu) is a valid IFV: max mu + min nu <= mu_a + nu_a for the maximizing row.
        Ifv best(mu_max, std::min(nu_min, 1.0 - mu_max));
        Ifv worst(mu_min, nu_max);
        if (m.kinds()[j] == CriterionKind::benefit) {
            out.positive.push_back(best);
            out.negative.push_back(worst);
        } else {
            out.positive.push_back(worst);
            out.negative.push_back(best);
        }
    }
    return out;
}

/// Normalized Euclidean distance sqrt(1/(2m) sum_j (dmu^2 + dnu^2 + dpi^2)).
inline double if_distance(const std::vector<Ifv>& row, const std::vector<Ifv>& ideal) {
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        const double dm = row[j].mu() - ideal[j].mu();
        const double dn = row[j].nu() - ideal[j].nu();
        const double dp = row[j].pi() - ideal[j].pi();
        acc += dm * dm + dn * dn + dp * dp;
    }
    return std::sqrt(acc / (2.0 * static_cast<double>(row.size())));
}

inline Separations separation_measures(const IfDecisionMatrix& m, const IdealSolutions& ideals) {
    if (ideals.positive.size() != m.criteria() || ideals.negative.size() != m.criteria()) {
        throw ArgumentError("separation_measures: ideal solutions do not match criteria count");
    }
    Separations out;
    for (const auto& row : m.rows()) {
        out.positive.push_back(if_distance(row, ideals.positive));
        out.negative.push_back(if_distance(row, ideals.negative));
    }
    return out;
}

/// xi_i = V-_i / (V-_i + V*_i)
inline std::vector<double> closeness(const std::vector<double>& vp, const std::vector<double>& vn) {
    if (vp.size() != vn.size()) throw ArgumentError("closeness: length mismatch");
    std::vector<double> xi(vp.size());
    for (std::size_t i = 0; i < vp.size(); ++i) {
        const double denom = vn[i] + vp[i];
        if (!(denom > 0.0)) {
            std::ostringstream msg;
            msg << "closeness: alternative " << i
                << " coincides with both ideal solutions (V* = V- = 0)";
            throw DegenerateInputError(msg.str());
        }
        xi[i] = std::clamp(vn[i] / denom, 0.0, 1.0);
    }
    return xi;
}

/// Indices by descending closeness; equal values keep ascending index order.
inline std::vector<std::size_t> rank_alternatives(const std::vector<double>& xi) {
    std::vector<std::size_t> order(xi.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return xi[a] > xi[b]; });
    return order;
}

/// True when some pair of alternatives shares the same closeness value.
inline bool has_ties(const std::vector<double>& xi) {
    std::vector<double> sorted = xi;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

struct TopsisResult {
    IfDecisionMatrix weighted;
    IdealSolutions ideals;
    Separations separations;
    std::vector<double> xi;
    std::vector<std::size_t> ranking;
    bool ties = false;
};

/// Ranks an already weighted matrix.
inline TopsisResult rank_weighted(const IfDecisionMatrix& weighted) {
    auto ideals = ideal_solutions(weighted);
    auto sep = separation_measures(weighted, ideals);
    auto xi = closeness(sep.positive, sep.negative);
    auto ranking = rank_alternatives(xi);
    const bool ties = has_ties(xi);
    return {weighted, std::move(ideals), std::move(sep), std::move(xi), std::move(ranking), ties};
}

inline TopsisResult rank(const IfDecisionMatrix& raw, const std::vector<Ifv>& weights) {
    return rank_weighted(weighted_if_matrix(raw, weights));
}

}  // namespace riskfuse::topsis
