#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "riskfuse/fuzzy.hpp"

using namespace riskfuse;

namespace {

TriangularFuzzyNumber random_tfn(std::mt19937_64& gen, double lo = -3.0, double hi = 3.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    double a = u(gen), b = u(gen), c = u(gen);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return {a, b, c};
}

IntuitionisticFuzzyValue random_ifv(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mu = u(gen);
    const double nu = u(gen) * (1.0 - mu);
    return {mu, nu};
}

// Five CFCS steps written out independently for a pair of TFNs.
double cfcs_pair_by_hand(TriangularFuzzyNumber a, TriangularFuzzyNumber b) {
    const double minl = std::min(a.lower(), b.lower());
    const double maxu = std::max(a.upper(), b.upper());
    const double d = maxu - minl;
    double z[2];
    const TriangularFuzzyNumber t[2] = {a, b};
    for (int k = 0; k < 2; ++k) {
        const double xl = (t[k].lower() - minl) / d;
        const double xm = (t[k].modal() - minl) / d;
        const double xr = (t[k].upper() - minl) / d;
        const double xls = xm / (1 + xm - xl);
        const double xrs = xr / (1 + xr - xm);
        const double x = (xls * (1 - xls) + xrs * xrs) / (1 - xls + xrs);
        z[k] = minl + x * d;
    }
    return (z[0] + z[1]) / 2.0;
}

}  // namespace

TEST(TriangularFuzzyNumber, RejectsDisorderedComponents) {
    EXPECT_THROW(TriangularFuzzyNumber(0.5, 0.2, 1.0), ArgumentError);
    EXPECT_THROW(TriangularFuzzyNumber(0.0, 0.2, 0.1), ArgumentError);
    EXPECT_THROW(TriangularFuzzyNumber(0.0, std::nan(""), 0.1), ArgumentError);
    EXPECT_NO_THROW(TriangularFuzzyNumber(0.2, 0.2, 0.2));
}

TEST(LinguisticScale, DefaultScaleTable) {
    const auto s = default_dematel_scale();
    EXPECT_EQ(tfn_from_linguistic("No influence", s), TriangularFuzzyNumber(0.0, 0.0, 0.25));
    EXPECT_EQ(tfn_from_linguistic("Very low", s), TriangularFuzzyNumber(0.0, 0.25, 0.5));
    EXPECT_EQ(tfn_from_linguistic("Low", s), TriangularFuzzyNumber(0.25, 0.5, 0.75));
    EXPECT_EQ(tfn_from_linguistic("High", s), TriangularFuzzyNumber(0.5, 0.75, 1.0));
    EXPECT_EQ(tfn_from_linguistic("Very high", s), TriangularFuzzyNumber(0.75, 1.0, 1.0));
}

TEST(LinguisticScale, UnknownLabelNamesLabelAndScale) {
    const auto s = default_dematel_scale();
    try {
        (void)tfn_from_linguistic("Purple", s);
        FAIL() << "expected LookupError";
    } catch (const LookupError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("Purple"), std::string::npos);
        EXPECT_NE(what.find(s.name()), std::string::npos);
    }
}

TEST(LinguisticScale, ValidatesShape) {
    EXPECT_THROW(LinguisticScale("x", {"a"}, {{0, 0, 0}}), ArgumentError);
    EXPECT_THROW(LinguisticScale("x", {"a", "b"}, {{0, 0, 0}}), ArgumentError);
    EXPECT_THROW(LinguisticScale("x", {"a", "b"}, {{0, 0.5, 1}, {0, 0.5, 1}}), ArgumentError);
}

TEST(Cfcs, CrispInputIsReturned) {
    for (double c : {-2.0, 0.0, 0.37, 4.0}) {
        EXPECT_DOUBLE_EQ(cfcs_defuzzify({TriangularFuzzyNumber::crisp(c)}), c);
    }
}

TEST(Cfcs, SymmetricSingleTfnGivesMode) {
    EXPECT_NEAR(cfcs_defuzzify({{0.0, 0.25, 0.5}}), 0.25, 1e-12);
}

TEST(Cfcs, TwoJudgmentHandTrace) {
    // Normalized crisp values 0.8/3 and 2.2/3; their mean over span [0, 1] is 0.5.
    const TriangularFuzzyNumber a(0.0, 0.25, 0.5), b(0.5, 0.75, 1.0);
    const double v = cfcs_defuzzify({a, b});
    EXPECT_NEAR(v, 0.5, 1e-12);
    EXPECT_GT(v, 0.25);
    EXPECT_LT(v, 0.75);
    EXPECT_NEAR(v, cfcs_pair_by_hand(a, b), 1e-12);
}

TEST(Cfcs, MatchesHandStepsOnRandomPairs) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = random_tfn(gen), b = random_tfn(gen);
        if (std::max(a.upper(), b.upper()) - std::min(a.lower(), b.lower()) < 1e-6) continue;
        EXPECT_NEAR(cfcs_defuzzify({a, b}), cfcs_pair_by_hand(a, b), 1e-12);
    }
}

TEST(Cfcs, EmptyListRejected) {
    EXPECT_THROW(cfcs_defuzzify(std::span<const TriangularFuzzyNumber>{}), ArgumentError);
}

TEST(CfcsProperty, ResultInsideObservedSpan) {
    std::mt19937_64 gen(12);
    std::uniform_int_distribution<int> count(1, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<TriangularFuzzyNumber> j;
        const int n = count(gen);
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < n; ++k) {
            j.push_back(random_tfn(gen));
            lo = std::min(lo, j.back().lower());
            hi = std::max(hi, j.back().upper());
        }
        const double v = cfcs_defuzzify(j);
        EXPECT_GE(v, lo);
        EXPECT_LE(v, hi);
    }
}

TEST(CfcsProperty, RepeatedJudgmentEqualsSingle) {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 300; ++trial) {
        const auto t = random_tfn(gen);
        const std::vector<TriangularFuzzyNumber> many(1 + trial % 7, t);
        EXPECT_NEAR(cfcs_defuzzify(many), cfcs_defuzzify({t}), 1e-12);
    }
}

TEST(Ifv, InvariantsAndDefaults) {
    const IntuitionisticFuzzyValue v(0.6, 0.3);
    EXPECT_NEAR(v.pi(), 0.1, 1e-12);
    EXPECT_THROW(IntuitionisticFuzzyValue(0.7, 0.4), ArgumentError);
    EXPECT_THROW(IntuitionisticFuzzyValue(-0.1, 0.4), ArgumentError);
    EXPECT_THROW(IntuitionisticFuzzyValue(0.6, 0.3, 0.2), ArgumentError);
    EXPECT_NO_THROW(IntuitionisticFuzzyValue(0.6, 0.3, 0.1));
}

TEST(Ifv, MultiplyIdentity) {
    const auto r = ifv_multiply({0.6, 0.3, 0.1}, {1.0, 0.0, 0.0});
    EXPECT_NEAR(r.mu(), 0.6, 1e-12);
    EXPECT_NEAR(r.nu(), 0.3, 1e-12);
    EXPECT_NEAR(r.pi(), 0.1, 1e-12);
}

TEST(Ifv, MultiplyWorkedValue) {
    const auto r = ifv_multiply({0.6, 0.3, 0.1}, {0.5, 0.4, 0.1});
    EXPECT_NEAR(r.mu(), 0.30, 1e-12);
    EXPECT_NEAR(r.nu(), 0.58, 1e-12);
    EXPECT_NEAR(r.pi(), 0.12, 1e-12);
}

TEST(Ifv, ZeroMembershipAnnihilates) {
    std::mt19937_64 gen(14);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = ifv_multiply({0.0, 1.0}, random_ifv(gen));
        EXPECT_EQ(r.mu(), 0.0);
        EXPECT_NEAR(r.nu(), 1.0, 1e-12);
    }
}

TEST(IfvProperty, MultiplyCommutesAndPreservesInvariants) {
    std::mt19937_64 gen(15);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto a = random_ifv(gen), b = random_ifv(gen);
        const auto ab = ifv_multiply(a, b), ba = ifv_multiply(b, a);
        EXPECT_NEAR(ab.mu(), ba.mu(), 1e-15);
        EXPECT_NEAR(ab.nu(), ba.nu(), 1e-15);
        for (const auto& v : {ab, ba}) {
            EXPECT_GE(v.mu(), 0.0);
            EXPECT_LE(v.mu(), 1.0);
            EXPECT_GE(v.nu(), 0.0);
            EXPECT_LE(v.nu(), 1.0);
            EXPECT_LE(v.mu() + v.nu(), 1.0 + 1e-9);
            EXPECT_NEAR(v.pi(), 1.0 - v.mu() - v.nu(), 1e-9);
        }
    }
}
