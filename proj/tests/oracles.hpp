#pragma once

// Independent reference computations used by tests. They share no code with the library:
// plain arrays, textbook formulas, no early exits.

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

struct Cell {
    double mu;
    double nu;
};

struct TopsisOutcome {
    std::vector<double> xi;
    std::vector<int> ranking;
};

/// Weighted IF-TOPSIS from raw cells, IF weights and benefit flags.
inline TopsisOutcome if_topsis(const std::vector<std::vector<Cell>>& raw,
                               const std::vector<Cell>& weights, const std::vector<bool>& benefit) {
    const int rows = static_cast<int>(raw.size());
    const int cols = static_cast<int>(weights.size());
    std::vector<std::vector<std::array<double, 3>>> r(rows, std::vector<std::array<double, 3>>(cols));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double mu = raw[i][j].mu * weights[j].mu;
            const double nu = raw[i][j].nu + weights[j].nu - raw[i][j].nu * weights[j].nu;
            r[i][j] = {mu, nu, 1.0 - mu - nu};
        }
    }
    std::vector<std::array<double, 3>> pos(cols), neg(cols);
    for (int j = 0; j < cols; ++j) {
        double mu_hi = -1, mu_lo = 2, nu_hi = -1, nu_lo = 2;
        for (int i = 0; i < rows; ++i) {
            if (r[i][j][0] > mu_hi) mu_hi = r[i][j][0];
            if (r[i][j][0] < mu_lo) mu_lo = r[i][j][0];
            if (r[i][j][1] > nu_hi) nu_hi = r[i][j][1];
            if (r[i][j][1] < nu_lo) nu_lo = r[i][j][1];
        }
        const std::array<double, 3> good{mu_hi, nu_lo, 1.0 - mu_hi - nu_lo};
        const std::array<double, 3> bad{mu_lo, nu_hi, 1.0 - mu_lo - nu_hi};
        pos[j] = benefit[j] ? good : bad;
        neg[j] = benefit[j] ? bad : good;
    }
    TopsisOutcome out;
    for (int i = 0; i < rows; ++i) {
        double sp = 0, sn = 0;
        for (int j = 0; j < cols; ++j) {
            for (int k = 0; k < 3; ++k) {
                sp += (r[i][j][k] - pos[j][k]) * (r[i][j][k] - pos[j][k]);
                sn += (r[i][j][k] - neg[j][k]) * (r[i][j][k] - neg[j][k]);
            }
        }
        const double vp = std::sqrt(sp / (2.0 * cols));
        const double vn = std::sqrt(sn / (2.0 * cols));
        out.xi.push_back(vn / (vn + vp));
    }
    // Selection sort: largest first, lowest index wins ties.
    std::vector<bool> used(rows, false);
    for (int k = 0; k < rows; ++k) {
        int pick = -1;
        for (int i = 0; i < rows; ++i) {
            if (!used[i] && (pick < 0 || out.xi[i] > out.xi[pick])) pick = i;
        }
        used[pick] = true;
        out.ranking.push_back(pick);
    }
    return out;
}

/// T = sum_{k>=1} Q^k, truncated once the infinity norm of Q^k drops below tol.
inline std::vector<std::vector<double>> neumann_total(const std::vector<std::vector<double>>& q,
                                                      double tol = 1e-13) {
    const std::size_t n = q.size();
    auto mul = [n](const auto& a, const auto& b) {
        std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
        return c;
    };
    auto norm_inf = [n](const auto& a) {
        double m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += std::abs(a[i][j]);
            m = s > m ? s : m;
        }
        return m;
    };
    auto term = q;
    auto total = q;
    for (int k = 0; k < 1000000 && norm_inf(term) >= tol; ++k) {
        term = mul(term, q);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) total[i][j] += term[i][j];
    }
    return total;
}

}  // namespace oracle
