#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "riskfuse/ecsa.hpp"
#include "riskfuse/error.hpp"

namespace riskfuse::bench {

inline double sphere(const Eigen::VectorXd& x) { return x.squaredNorm(); }

inline double rastrigin(const Eigen::VectorXd& x) {
    double acc = 10.0 * static_cast<double>(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        acc += x(i) * x(i) - 10.0 * std::cos(2.0 * std::numbers::pi * x(i));
    }
    return acc;
}

struct TestFunction {
    std::string name;
    ecsa::Objective objective;
    double lower;
    double upper;
};

inline TestFunction test_function(std::string_view name) {
    if (name == "sphere") return {"sphere", sphere, -5.0, 5.0};
    if (name == "rastrigin") return {"rastrigin", rastrigin, -5.12, 5.12};
    throw ArgumentError("unknown test function '" + std::string(name) +
                        "' (expected sphere or rastrigin)");
}

inline ecsa::Optimizer optimizer(std::string_view algorithm) {
    if (algorithm == "ecsa") {
        return [](const ecsa::Objective& f, const ecsa::EcsaConfig& c) {
            return ecsa::optimize(f, c);
        };
    }
    if (algorithm == "csa") {
        return [](const ecsa::Objective& f, const ecsa::EcsaConfig& c) {
            return ecsa::optimize_classical_csa(f, c);
        };
    }
    if (algorithm == "random") return ecsa::random_search;
    throw ArgumentError("unknown algorithm '" + std::string(algorithm) +
                        "' (expected ecsa, csa or random)");
}

}  // namespace riskfuse::bench
