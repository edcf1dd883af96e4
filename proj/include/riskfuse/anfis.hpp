#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "riskfuse/error.hpp"

namespace riskfuse::anfis {

/// Generalized bell 1 / (1 + ((u - m) / l)^(2k)).
struct BellMembership {
    double center = 0.0;
    double width = 1.0;
    double shape = 1.0;

    void validate() const {
        if (!std::isfinite(center) || !(width > 0.0) || !(shape > 0.0) || !std::isfinite(width) ||
            !std::isfinite(shape)) {
            std::ostringstream msg;
            msg << "invalid bell membership (m=" << center << ", l=" << width << ", k=" << shape
                << ")";
            throw ArgumentError(msg.str());
        }
    }

    friend bool operator==(const BellMembership&, const BellMembership&) = default;
};

/// log of the bell degree; finite for every finite u.
inline double log_bell_membership(double u, const BellMembership& mf) {
    const double r = std::abs((u - mf.center) / mf.width);
    if (r == 0.0) return 0.0;
    // -log(1 + r^(2k)) = -softplus(2k log r)
    const double z = 2.0 * mf.shape * std::log(r);
    return z > 0.0 ? -(z + std::log1p(std::exp(-z))) : -std::log1p(std::exp(z));
}

inline double bell_membership(double u, const BellMembership& mf) {
    const double r = (u - mf.center) / mf.width;
    return 1.0 / (1.0 + std::pow(r * r, mf.shape));
}

/// IF x_1 is A_1 AND ... AND x_D is A_D THEN y = q . x + s
struct AnfisRule {
    std::vector<BellMembership> premises;
    /// q_1..q_D followed by the bias s.
    Eigen::VectorXd consequent;

    double output(const Eigen::VectorXd& x) const {
        const auto d = static_cast<Eigen::Index>(premises.size());
        return consequent.head(d).dot(x) + consequent(d);
    }
};

/// Per-dimension affine map of raw inputs onto [0, 1].
struct InputNormalization {
    Eigen::VectorXd lower;
    Eigen::VectorXd span;

    static InputNormalization identity(Eigen::Index dim) {
        return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& raw) const {
        return ((raw - lower).array() / span.array()).matrix();
    }
};

class AnfisModel {
public:
    AnfisModel(std::vector<AnfisRule> rules, InputNormalization normalization)
        : rules_(std::move(rules)), norm_(std::move(normalization)) {
        if (rules_.empty()) throw ArgumentError("ANFIS model needs at least one rule");
        dim_ = rules_.front().premises.size();
        if (dim_ == 0) throw ArgumentError("ANFIS model needs at least one input");
        for (const auto& rule : rules_) {
            if (rule.premises.size() != dim_) {
                throw ArgumentError("ANFIS rule premise count differs from input dimension");
            }
            if (static_cast<std::size_t>(rule.consequent.size()) != dim_ + 1) {
                throw ArgumentError("ANFIS rule consequent must have input_dim + 1 coefficients");
            }
            for (const auto& mf : rule.premises) mf.validate();
        }
        const auto d = static_cast<Eigen::Index>(dim_);
        if (norm_.lower.size() != d || norm_.span.size() != d) {
            throw ArgumentError("ANFIS normalization does not match input dimension");
        }
        if (!(norm_.span.array() > 0.0).all()) {
            throw ArgumentError("ANFIS normalization spans must be positive");
        }
    }

    std::size_t input_dim() const noexcept { return dim_; }
    std::size_t rule_count() const noexcept { return rules_.size(); }
    const std::vector<AnfisRule>& rules() const noexcept { return rules_; }
    const InputNormalization& normalization() const noexcept { return norm_; }

    /// Number of (m, l, k) premise parameters.
    std::size_t premise_parameter_count() const noexcept { return rules_.size() * dim_ * 3; }
    std::size_t consequent_parameter_count() const noexcept { return rules_.size() * (dim_ + 1); }
    std::size_t parameter_count() const noexcept {
        return premise_parameter_count() + consequent_parameter_count();
    }

private:
    std::vector<AnfisRule> rules_;
    InputNormalization norm_;
    std::size_t dim_ = 0;
};

struct Sample {
    Eigen::VectorXd inputs;
    double target = 0.0;
};

using Dataset = std::vector<Sample>;

namespace detail {

inline void check_input(const AnfisModel& model, const Eigen::VectorXd& inputs) {
    if (static_cast<std::size_t>(inputs.size()) != model.input_dim()) {
        std::ostringstream msg;
        msg << "ANFIS input has " << inputs.size() << " components, model expects "
            << model.input_dim();
        throw ArgumentError(msg.str());
    }
}

}  // namespace detail

/// Layers 1-3 on an already normalized input: rule activations scaled to sum to one.
///
/// The product t-norm is evaluated as a sum of log degrees so that many inputs
/// cannot underflow the product.
inline Eigen::VectorXd normalized_firing_strengths_normalized_input(const AnfisModel& model,
                                                                    const Eigen::VectorXd& x) {
    const auto& rules = model.rules();
    Eigen::VectorXd log_w(static_cast<Eigen::Index>(rules.size()));
    for (std::size_t j = 0; j < rules.size(); ++j) {
        // prod_d (1 + r_d^(2k)) takes one log per rule; the per-dimension log form is the
        // fallback once the product overflows.
        double prod = 1.0;
        for (std::size_t d = 0; d < model.input_dim(); ++d) {
            const auto& mf = rules[j].premises[d];
            const double u = (x(static_cast<Eigen::Index>(d)) - mf.center) / mf.width;
            prod *= 1.0 + std::exp(mf.shape * std::log(u * u));
        }
        double acc = -std::log(prod);
        if (!std::isfinite(acc)) {
            acc = 0.0;
            for (std::size_t d = 0; d < model.input_dim(); ++d) {
                acc += log_bell_membership(x(static_cast<Eigen::Index>(d)), rules[j].premises[d]);
            }
        }
        log_w(static_cast<Eigen::Index>(j)) = acc;
    }
    const double top = log_w.maxCoeff();
    if (!(top > -std::numeric_limits<double>::infinity()) || !std::isfinite(top)) {
        throw DegenerateActivationError("ANFIS: every rule firing strength is zero");
    }
    Eigen::VectorXd w = (log_w.array() - top).exp().matrix();
    return w / w.sum();
}

inline Eigen::VectorXd normalized_firing_strengths(const AnfisModel& model,
                                                   const Eigen::VectorXd& inputs) {
    detail::check_input(model, inputs);
    return normalized_firing_strengths_normalized_input(model,
                                                        model.normalization().apply(inputs));
}

/// Per-rule linear outputs f_j at the given raw input.
inline Eigen::VectorXd rule_outputs(const AnfisModel& model, const Eigen::VectorXd& inputs) {
    detail::check_input(model, inputs);
    const Eigen::VectorXd x = model.normalization().apply(inputs);
    Eigen::VectorXd f(static_cast<Eigen::Index>(model.rule_count()));
    for (std::size_t j = 0; j < model.rule_count(); ++j) {
        f(static_cast<Eigen::Index>(j)) = model.rules()[j].output(x);
    }
    return f;
}

/// Full five-layer pass: sum_j wbar_j (q_j . x + s_j).
inline double forward(const AnfisModel& model, const Eigen::VectorXd& inputs) {
    detail::check_input(model, inputs);
    const Eigen::VectorXd x = model.normalization().apply(inputs);
    const Eigen::VectorXd wbar = normalized_firing_strengths_normalized_input(model, x);
    double out = 0.0;
    for (std::size_t j = 0; j < model.rule_count(); ++j) {
        out += wbar(static_cast<Eigen::Index>(j)) * model.rules()[j].output(x);
    }
    return out;
}

/// d forward / d consequent, in (q..., s) per rule order: wbar_j * (x_norm, 1).
inline Eigen::VectorXd consequent_sensitivities(const AnfisModel& model,
                                                const Eigen::VectorXd& inputs) {
    detail::check_input(model, inputs);
    const Eigen::VectorXd x = model.normalization().apply(inputs);
    const Eigen::VectorXd wbar = normalized_firing_strengths_normalized_input(model, x);
    const auto d = static_cast<Eigen::Index>(model.input_dim());
    Eigen::VectorXd g(static_cast<Eigen::Index>(model.consequent_parameter_count()));
    for (Eigen::Index j = 0; j < wbar.size(); ++j) {
        g.segment(j * (d + 1), d) = wbar(j) * x;
        g(j * (d + 1) + d) = wbar(j);
    }
    return g;
}

struct SubtractiveClusteringOptions {
    double quash_factor = 1.25;
    double accept_ratio = 0.5;
    double reject_ratio = 0.15;
};

/// Chiu's density-potential clustering over points already scaled to [0, 1].
/// Returned centers are copies of data points, in selection order.
inline std::vector<Eigen::VectorXd> subtractive_clustering(
    std::span<const Eigen::VectorXd> data, double radius,
    const SubtractiveClusteringOptions& opts = {}) {
    if (data.empty()) throw ArgumentError("subtractive_clustering: no data");
    if (!(radius > 0.0)) throw ArgumentError("subtractive_clustering: radius must be positive");
    const std::size_t n = data.size();
    const double alpha = 4.0 / (radius * radius);
    const double rb = opts.quash_factor * radius;
    const double beta = 4.0 / (rb * rb);

    std::vector<double> potential(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            potential[i] += std::exp(-alpha * (data[i] - data[j]).squaredNorm());
        }
    }

    auto argmax = [&potential] {
        return static_cast<std::size_t>(
            std::max_element(potential.begin(), potential.end()) - potential.begin());
    };
    auto revise = [&](std::size_t k, double pk) {
        for (std::size_t i = 0; i < n; ++i) {
            potential[i] -= pk * std::exp(-beta * (data[i] - data[k]).squaredNorm());
        }
    };

    std::vector<Eigen::VectorXd> centers;
    std::size_t k = argmax();
    const double first = potential[k];
    centers.push_back(data[k]);
    revise(k, first);

    while (centers.size() < n) {
        k = argmax();
        const double pk = potential[k];
        bool accept = false;
        if (pk > opts.accept_ratio * first) {
            accept = true;
        } else if (pk < opts.reject_ratio * first) {
            break;
        } else {
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) dmin = std::min(dmin, (data[k] - c).norm());
            if (dmin / radius + pk / first >= 1.0) {
                accept = true;
            } else {
                potential[k] = 0.0;
            }
        }
        if (accept) {
            centers.push_back(data[k]);
            revise(k, pk);
        }
    }
    return centers;
}

struct ConsequentFit {
    AnfisModel model;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
    double train_rmse = 0.0;
};

/// Least-squares consequents with premises held fixed; minimum-norm when rank deficient.
inline ConsequentFit fit_consequents_least_squares(const AnfisModel& model,
                                                   const Dataset& train) {
    if (train.empty()) throw ArgumentError("fit_consequents_least_squares: empty training set");
    const auto dim = static_cast<Eigen::Index>(model.input_dim());
    const auto rules = static_cast<Eigen::Index>(model.rule_count());
    const Eigen::Index cols = rules * (dim + 1);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(train.size()), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));

    for (std::size_t n = 0; n < train.size(); ++n) {
        detail::check_input(model, train[n].inputs);
        const Eigen::VectorXd x = model.normalization().apply(train[n].inputs);
        const Eigen::VectorXd wbar = normalized_firing_strengths_normalized_input(model, x);
        const auto row = static_cast<Eigen::Index>(n);
        for (Eigen::Index j = 0; j < rules; ++j) {
            design.block(row, j * (dim + 1), 1, dim) = wbar(j) * x.transpose();
            design(row, j * (dim + 1) + dim) = wbar(j);
        }
        y(row) = train[n].target;
    }

    // Factor the transpose: with far more parameters than samples the tall orientation is
    // several times cheaper. A^T P = Q [T 0; 0 0] Z gives pinv(A) = Q [T^-T 0; 0 0] Z P^T.
    const Eigen::MatrixXd design_t = design.transpose();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design_t);
    const Eigen::Index r = cod.rank();
    Eigen::VectorXd zp = cod.colsPermutation().transpose() * y;
    // Z is only formed when the factor is rank deficient; otherwise it is the identity.
    if (r < design_t.cols()) zp = cod.matrixZ() * zp;
    Eigen::VectorXd head = Eigen::VectorXd::Zero(cols);
    head.head(r) = cod.matrixT()
                       .topLeftCorner(r, r)
                       .template triangularView<Eigen::Upper>()
                       .transpose()
                       .solve(zp.head(r));
    const Eigen::VectorXd theta = cod.householderQ() * head;

    std::vector<AnfisRule> fitted = model.rules();
    for (Eigen::Index j = 0; j < rules; ++j) {
        fitted[static_cast<std::size_t>(j)].consequent = theta.segment(j * (dim + 1), dim + 1);
    }
    const double residual = (design * theta - y).norm();
    return {AnfisModel(std::move(fitted), model.normalization()), r, r < cols,
            residual / std::sqrt(static_cast<double>(train.size()))};
}

/// genfis2-style initial model: clusters the joint (input, target) space, one rule per center.
inline AnfisModel init_fis(const Dataset& train, double radius) {
    if (train.empty()) throw ArgumentError("init_fis: empty training set");
    if (!(radius > 0.0)) throw ArgumentError("init_fis: radius must be positive");
    const Eigen::Index dim = train.front().inputs.size();
    if (dim == 0) throw ArgumentError("init_fis: samples have no inputs");

    Eigen::VectorXd lo = train.front().inputs;
    Eigen::VectorXd hi = train.front().inputs;
    double ylo = train.front().target;
    double yhi = ylo;
    for (const auto& s : train) {
        if (s.inputs.size() != dim) throw ArgumentError("init_fis: ragged input dimensions");
        lo = lo.cwiseMin(s.inputs);
        hi = hi.cwiseMax(s.inputs);
        ylo = std::min(ylo, s.target);
        yhi = std::max(yhi, s.target);
    }
    Eigen::VectorXd span = hi - lo;
    for (Eigen::Index d = 0; d < dim; ++d) {
        if (!(span(d) > 0.0)) span(d) = 1.0;
    }
    const double yspan = yhi > ylo ? yhi - ylo : 1.0;
    InputNormalization norm{lo, span};

    std::vector<Eigen::VectorXd> joint;
    joint.reserve(train.size());
    for (const auto& s : train) {
        Eigen::VectorXd p(dim + 1);
        p.head(dim) = norm.apply(s.inputs);
        p(dim) = (s.target - ylo) / yspan;
        joint.push_back(std::move(p));
    }
    const auto centers = subtractive_clustering(joint, radius);

    // Normalized data span is 1 in every dimension.
    const double width = radius / std::sqrt(8.0);
    std::vector<AnfisRule> rules;
    rules.reserve(centers.size());
    for (const auto& c : centers) {
        AnfisRule rule;
        rule.premises.reserve(static_cast<std::size_t>(dim));
        for (Eigen::Index d = 0; d < dim; ++d) rule.premises.push_back({c(d), width, 1.0});
        rule.consequent = Eigen::VectorXd::Zero(dim + 1);
        rules.push_back(std::move(rule));
    }
    return fit_consequents_least_squares(AnfisModel(std::move(rules), norm), train).model;
}

inline std::vector<double> predict(const AnfisModel& model, const Dataset& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& s : data) out.push_back(forward(model, s.inputs));
    return out;
}

inline double rmse_values(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw ArgumentError("rmse: length mismatch");
    if (actual.empty()) throw ArgumentError("rmse: empty dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = predicted[i] - actual[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

/// Mean absolute percentage error, in percent.
inline double mape_values(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw ArgumentError("mape: length mismatch");
    if (actual.empty()) throw ArgumentError("mape: empty dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            std::ostringstream msg;
            msg << "mape: target " << i << " is zero";
            throw ArgumentError(msg.str());
        }
        acc += std::abs((predicted[i] - actual[i]) / actual[i]);
    }
    return 100.0 * acc / static_cast<double>(actual.size());
}

namespace detail {
inline std::vector<double> targets(const Dataset& data) {
    std::vector<double> t;
    t.reserve(data.size());
    for (const auto& s : data) t.push_back(s.target);
    return t;
}
}  // namespace detail

inline double rmse(const AnfisModel& model, const Dataset& data) {
    if (data.empty()) throw ArgumentError("rmse: empty dataset");
    return rmse_values(predict(model, data), detail::targets(data));
}

inline double mape(const AnfisModel& model, const Dataset& data) {
    if (data.empty()) throw ArgumentError("mape: empty dataset");
    return mape_values(predict(model, data), detail::targets(data));
}

/// Flat parameter order: for each rule, for each input (m, l, k); then for each rule (q..., s).
inline Eigen::VectorXd flatten_parameters(const AnfisModel& model) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(model.parameter_count()));
    Eigen::Index pos = 0;
    for (const auto& rule : model.rules()) {
        for (const auto& mf : rule.premises) {
            out(pos++) = mf.center;
            out(pos++) = mf.width;
            out(pos++) = mf.shape;
        }
    }
    for (const auto& rule : model.rules()) {
        out.segment(pos, rule.consequent.size()) = rule.consequent;
        pos += rule.consequent.size();
    }
    return out;
}

inline constexpr double kMinPositiveParameter = 1e-6;

struct ScaledModel {
    AnfisModel model;
    /// Widths or shapes that had to be raised to kMinPositiveParameter.
    std::size_t clamped = 0;
};

/// a_i = U_i * a0_i for every parameter, in flatten_parameters order.
inline ScaledModel apply_parameter_scaling(const AnfisModel& base,
                                           const Eigen::VectorXd& coefficients) {
    if (static_cast<std::size_t>(coefficients.size()) != base.parameter_count()) {
        std::ostringstream msg;
        msg << "apply_parameter_scaling: expected " << base.parameter_count()
            << " coefficients, got " << coefficients.size();
        throw ArgumentError(msg.str());
    }
    std::size_t clamped = 0;
    auto positive = [&clamped](double v) {
        if (v >= kMinPositiveParameter) return v;
        ++clamped;
        return kMinPositiveParameter;
    };

    std::vector<AnfisRule> rules = base.rules();
    Eigen::Index pos = 0;
    for (auto& rule : rules) {
        for (auto& mf : rule.premises) {
            mf.center *= coefficients(pos++);
            mf.width = positive(mf.width * coefficients(pos++));
            mf.shape = positive(mf.shape * coefficients(pos++));
        }
    }
    for (auto& rule : rules) {
        const Eigen::Index len = rule.consequent.size();
        rule.consequent = rule.consequent.cwiseProduct(coefficients.segment(pos, len));
        pos += len;
    }
    return {AnfisModel(std::move(rules), base.normalization()), clamped};
}

}  // namespace riskfuse::anfis
