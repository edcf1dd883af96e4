#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "riskfuse/error.hpp"

namespace riskfuse {

/// Triangular fuzzy number (l, m, u) with l <= m <= u, all finite.
class TriangularFuzzyNumber {
public:
    constexpr TriangularFuzzyNumber() = default;

    TriangularFuzzyNumber(double lower, double modal, double upper)
        : l_(lower), m_(modal), u_(upper) {
        if (!std::isfinite(l_) || !std::isfinite(m_) || !std::isfinite(u_)) {
            throw ArgumentError("triangular fuzzy number has a non-finite component");
        }
        if (!(l_ <= m_ && m_ <= u_)) {
            std::ostringstream msg;
            msg << "triangular fuzzy number violates l <= m <= u: (" << l_ << ", " << m_ << ", "
                << u_ << ")";
            throw ArgumentError(msg.str());
        }
    }

    /// Degenerate number (c, c, c).
    static TriangularFuzzyNumber crisp(double c) { return {c, c, c}; }

    double lower() const noexcept { return l_; }
    double modal() const noexcept { return m_; }
    double upper() const noexcept { return u_; }

    /// Multiplies every component by a positive factor.
    TriangularFuzzyNumber scaled(double factor) const {
        if (!(factor > 0.0)) throw ArgumentError("scale factor must be positive");
        return {l_ * factor, m_ * factor, u_ * factor};
    }

    friend bool operator==(const TriangularFuzzyNumber&, const TriangularFuzzyNumber&) = default;

private:
    double l_ = 0.0;
    double m_ = 0.0;
    double u_ = 0.0;
};

/// Ordered linguistic terms, each mapped to a TFN with strictly increasing modal values.
class LinguisticScale {
public:
    LinguisticScale(std::string name, std::vector<std::string> labels,
                    std::vector<TriangularFuzzyNumber> tfns)
        : name_(std::move(name)), labels_(std::move(labels)), tfns_(std::move(tfns)) {
        if (labels_.size() != tfns_.size()) {
            throw ArgumentError("linguistic scale '" + name_ + "': label and TFN counts differ");
        }
        if (labels_.size() < 2) {
            throw ArgumentError("linguistic scale '" + name_ + "' needs at least two labels");
        }
        for (std::size_t i = 1; i < tfns_.size(); ++i) {
            if (!(tfns_[i].modal() > tfns_[i - 1].modal())) {
                throw ArgumentError("linguistic scale '" + name_ +
                                    "': modal values must strictly increase");
            }
        }
    }

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<TriangularFuzzyNumber>& tfns() const noexcept { return tfns_; }
    std::size_t size() const noexcept { return labels_.size(); }

    bool contains(const std::string& label) const {
        return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
    }

private:
    std::string name_;
    std::vector<std::string> labels_;
    std::vector<TriangularFuzzyNumber> tfns_;
};

/// Five-level influence scale, scores 0-4.
inline LinguisticScale default_dematel_scale() {
    return LinguisticScale("dematel-default",
                           {"No influence", "Very low", "Low", "High", "Very high"},
                           {{0.00, 0.00, 0.25},
                            {0.00, 0.25, 0.50},
                            {0.25, 0.50, 0.75},
                            {0.50, 0.75, 1.00},
                            {0.75, 1.00, 1.00}});
}

inline TriangularFuzzyNumber tfn_from_linguistic(const std::string& label,
                                                 const LinguisticScale& scale) {
    const auto& labels = scale.labels();
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw LookupError("unknown linguistic label '" + label + "' in scale '" + scale.name() +
                          "'");
    }
    return scale.tfns()[static_cast<std::size_t>(it - labels.begin())];
}

/// Converting Fuzzy data into Crisp Scores (Opricovic-Tzeng).
///
/// The judgments are normalized over their joint span [min l, max u], each one
/// is reduced to a normalized crisp value from its left and right scores, the
/// values are averaged and the average is mapped back onto the span.
inline double cfcs_defuzzify(std::span<const TriangularFuzzyNumber> judgments) {
    if (judgments.empty()) throw ArgumentError("cfcs_defuzzify: no judgments");

    double lo = judgments.front().lower();
    double hi = judgments.front().upper();
    for (const auto& t : judgments) {
        lo = std::min(lo, t.lower());
        hi = std::max(hi, t.upper());
    }
    const double span = hi - lo;
    // Zero span only when every judgment is the same crisp value.
    if (span == 0.0) return lo;

    double total = 0.0;
    for (const auto& t : judgments) {
        const double xl = (t.lower() - lo) / span;
        const double xm = (t.modal() - lo) / span;
        const double xu = (t.upper() - lo) / span;
        const double left = xm / (1.0 + xm - xl);
        const double right = xu / (1.0 + xu - xm);
        total += (left * (1.0 - left) + right * right) / (1.0 - left + right);
    }
    const double crisp = lo + span * (total / static_cast<double>(judgments.size()));
    return std::clamp(crisp, lo, hi);
}

inline double cfcs_defuzzify(std::initializer_list<TriangularFuzzyNumber> judgments) {
    return cfcs_defuzzify(std::span<const TriangularFuzzyNumber>(judgments.begin(),
                                                                 judgments.size()));
}

/// Intuitionistic fuzzy value: membership mu, non-membership nu, hesitation pi = 1 - mu - nu.
class IntuitionisticFuzzyValue {
public:
    static constexpr double kTolerance = 1e-9;

    constexpr IntuitionisticFuzzyValue() = default;

    IntuitionisticFuzzyValue(double mu, double nu) : mu_(mu), nu_(nu) {
        validate();
        pi_ = std::max(0.0, 1.0 - mu_ - nu_);
    }

    IntuitionisticFuzzyValue(double mu, double nu, double pi) : mu_(mu), nu_(nu), pi_(pi) {
        validate();
        if (std::abs(pi_ - (1.0 - mu_ - nu_)) > kTolerance) {
            std::ostringstream msg;
            msg << "intuitionistic value hesitation " << pi_ << " != 1 - mu - nu";
            throw ArgumentError(msg.str());
        }
    }

    double mu() const noexcept { return mu_; }
    double nu() const noexcept { return nu_; }
    double pi() const noexcept { return pi_; }

    friend bool operator==(const IntuitionisticFuzzyValue&,
                           const IntuitionisticFuzzyValue&) = default;

private:
    void validate() {
        auto in_unit = [](double v) {
            return std::isfinite(v) && v >= -kTolerance && v <= 1.0 + kTolerance;
        };
        if (!in_unit(mu_) || !in_unit(nu_) || mu_ + nu_ > 1.0 + kTolerance) {
            std::ostringstream msg;
            msg << "invalid intuitionistic value (mu=" << mu_ << ", nu=" << nu_ << ")";
            throw ArgumentError(msg.str());
        }
        mu_ = std::clamp(mu_, 0.0, 1.0);
        nu_ = std::clamp(nu_, 0.0, 1.0 - mu_);
    }

    double mu_ = 0.0;
    double nu_ = 1.0;
    double pi_ = 0.0;
};

/// Intuitionistic product: memberships multiply, non-memberships combine as a probabilistic sum.
inline IntuitionisticFuzzyValue ifv_multiply(const IntuitionisticFuzzyValue& a,
                                             const IntuitionisticFuzzyValue& w) {
    const double mu = a.mu() * w.mu();
    const double nu = a.nu() + w.nu() - a.nu() * w.nu();
    return {mu, std::min(nu, 1.0 - mu)};
}

}  // namespace riskfuse
