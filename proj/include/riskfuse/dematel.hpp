#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "riskfuse/error.hpp"
#include "riskfuse/fuzzy.hpp"

namespace riskfuse::dematel {

/// One respondent's n x n fuzzy judgments; row i holds the influence of criterion i on each j.
using JudgmentMatrix = std::vector<std::vector<TriangularFuzzyNumber>>;
/// Same, expressed with linguistic labels of a scale.
using LabelMatrix = std::vector<std::vector<std::string>>;

/// Crisp averaged direct-influence matrix: square, zero diagonal, nonnegative.
class DirectRelationMatrix {
public:
    DirectRelationMatrix(Eigen::MatrixXd entries, std::size_t respondent_count)
        : entries_(std::move(entries)), respondents_(respondent_count) {
        if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
            throw ArgumentError("direct relation matrix must be square and non-empty");
        }
        for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
            for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
                const double v = entries_(i, j);
                if (!std::isfinite(v) || v < 0.0) {
                    throw ArgumentError("direct relation entries must be finite and >= 0");
                }
                if (i == j && v != 0.0) {
                    throw ArgumentError("direct relation matrix must have a zero diagonal");
                }
            }
        }
    }

    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    Eigen::Index size() const noexcept { return entries_.rows(); }
    std::size_t respondent_count() const noexcept { return respondents_; }

private:
    Eigen::MatrixXd entries_;
    std::size_t respondents_;
};

struct DematelResult {
    Eigen::MatrixXd q;
    Eigen::MatrixXd t;
    Eigen::VectorXd r_row;
    Eigen::VectorXd c_col;
    Eigen::VectorXd prominence;  // R + C
    Eigen::VectorXd relation;    // R - C
    Eigen::VectorXd weights;
};

/// Defuzzifies every off-diagonal cell over all respondents with CFCS; the diagonal is zero.
inline DirectRelationMatrix aggregate_responses(std::span<const JudgmentMatrix> matrices) {
    if (matrices.empty()) throw ArgumentError("aggregate_responses: no respondent matrices");
    const std::size_t n = matrices.front().size();
    if (n == 0) throw ArgumentError("aggregate_responses: empty judgment matrix");
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        const auto& m = matrices[k];
        bool ok = m.size() == n;
        for (const auto& row : m) ok = ok && row.size() == n;
        if (!ok) {
            std::ostringstream msg;
            msg << "aggregate_responses: respondent " << k << " matrix is not " << n << "x" << n;
            throw ArgumentError(msg.str());
        }
    }

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    std::vector<TriangularFuzzyNumber> cell(matrices.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            for (std::size_t k = 0; k < matrices.size(); ++k) cell[k] = matrices[k][i][j];
            s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cfcs_defuzzify(cell);
        }
    }
    return {std::move(s), matrices.size()};
}

inline DirectRelationMatrix aggregate_responses(std::span<const LabelMatrix> matrices,
                                                const LinguisticScale& scale) {
    std::vector<JudgmentMatrix> fuzzy;
    fuzzy.reserve(matrices.size());
    for (const auto& labels : matrices) {
        JudgmentMatrix m(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            m[i].reserve(labels[i].size());
            for (std::size_t j = 0; j < labels[i].size(); ++j) {
                // Diagonal cells are ignored; allow placeholders there.
                m[i].push_back(i == j ? TriangularFuzzyNumber{}
                                      : tfn_from_linguistic(labels[i][j], scale));
            }
        }
        fuzzy.push_back(std::move(m));
    }
    return aggregate_responses(std::span<const JudgmentMatrix>(fuzzy));
}

/// Q = L * S with L the reciprocal of the largest row sum.
inline Eigen::MatrixXd normalize_direct_matrix(const DirectRelationMatrix& s) {
    const double max_row = s.entries().rowwise().sum().maxCoeff();
    if (!(max_row > 0.0)) {
        throw DegenerateInputError("normalize_direct_matrix: all direct relations are zero");
    }
    return s.entries() / max_row;
}

/// T = Q (I - Q)^-1, computed by solving X (I - Q) = Q through an LU factorization.
inline Eigen::MatrixXd total_relation_matrix(const Eigen::MatrixXd& q) {
    if (q.rows() != q.cols()) throw ArgumentError("total_relation_matrix: Q must be square");
    const Eigen::Index n = q.rows();
    if (n == 0) return q;

    const double radius = q.eigenvalues().cwiseAbs().maxCoeff();
    if (!(radius < 1.0 - 64.0 * std::numeric_limits<double>::epsilon())) {
        std::ostringstream msg;
        msg << "total_relation_matrix: spectral radius of Q is " << radius << " (must be < 1)";
        throw SingularityError(msg.str());
    }

    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - q;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.transpose());
    const double rcond = lu.rcond();
    if (!(rcond > static_cast<double>(n) * std::numeric_limits<double>::epsilon())) {
        throw SingularityError("total_relation_matrix: I - Q is numerically singular");
    }
    // Q (I-Q)^-1 = X  <=>  (I-Q)^T X^T = Q^T
    return lu.solve(q.transpose()).transpose();
}

struct ProminenceRelation {
    Eigen::VectorXd r;  // row sums
    Eigen::VectorXd c;  // column sums
};

inline ProminenceRelation prominence_relation(const Eigen::MatrixXd& t) {
    if (t.rows() != t.cols()) throw ArgumentError("prominence_relation: T must be square");
    return {t.rowwise().sum(), t.colwise().sum().transpose()};
}

/// w_i = (R_i + C_i) / sum_k (R_k + C_k)
inline Eigen::VectorXd priority_weights(const Eigen::VectorXd& r, const Eigen::VectorXd& c) {
    if (r.size() != c.size()) throw ArgumentError("priority_weights: R and C lengths differ");
    if (r.size() == 0) throw ArgumentError("priority_weights: no criteria");
    const Eigen::VectorXd prominence = r + c;
    const double total = prominence.sum();
    if (!(total > 0.0)) throw DegenerateInputError("priority_weights: total prominence is zero");
    return prominence / total;
}

inline DematelResult run(const DirectRelationMatrix& s) {
    DematelResult out;
    out.q = normalize_direct_matrix(s);
    out.t = total_relation_matrix(out.q);
    auto [r, c] = prominence_relation(out.t);
    out.r_row = r;
    out.c_col = c;
    out.prominence = r + c;
    out.relation = r - c;
    out.weights = priority_weights(r, c);
    return out;
}

}  // namespace riskfuse::dematel
