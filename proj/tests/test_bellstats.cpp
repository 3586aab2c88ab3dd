#include "sagnac/bellstats.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace sagnac {
namespace {

const double kTsirelson = 2.0 * std::sqrt(2.0);

// Classical (no post-selection) rate law, evaluated by quadrature. The
// integrand is a degree-2 trigonometric polynomial, so 64 nodes are exact.
RateFunction classical_law() {
    return [](const AnalyzerSettings& s) {
        return RatePoint{s.xi, s.theta, oracle::classical_rate_quadrature(1.0, s.xi, s.theta, 64), 0.0};
    };
}

double sin2_law(double xi, double theta) { return 0.25 * std::pow(std::sin(theta - xi), 2); }

ChshAngles random_angles(Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, kPi);
    return {angle(rng), angle(rng), angle(rng), angle(rng)};
}

TEST(CorrelationE, Examples) {
    const auto rates = analytic_post_selected_rates(1.0);
    EXPECT_NEAR(correlation_e({0.3, 0.3}, rates).value, -1.0, 1e-12);
    EXPECT_NEAR(correlation_e({0.3, 0.3 + 0.25 * kPi}, rates).value, 0.0, 1e-12);
    const double oracle_e = oracle::four_rate_e(sin2_law, 0.3, 0.3 + 0.5 * kPi);
    EXPECT_NEAR(oracle_e, 1.0, 1e-12);
    EXPECT_NEAR(correlation_e({0.3, 0.3 + 0.5 * kPi}, rates).value, oracle_e, 1e-12);
}

TEST(CorrelationE, MatchesNegativeCosineLaw) {
    const auto rates = analytic_post_selected_rates(2.0);
    Rng rng(1);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int n = 0; n < 1000; ++n) {
        const double xi = angle(rng), theta = angle(rng);
        EXPECT_NEAR(correlation_e({xi, theta}, rates).value, -std::cos(2.0 * (theta - xi)), 1e-10);
    }
}

TEST(CorrelationE, AllZeroRatesAreDegenerate) {
    const RateFunction zero = [](const AnalyzerSettings& s) { return RatePoint{s.xi, s.theta, 0.0, 0.0}; };
    EXPECT_THROW(correlation_e({0.0, 0.0}, zero), DegenerateCorrelationError);
    EXPECT_THROW(chsh_s(ChshAngles::canonical(), zero), DegenerateCorrelationError);
}

TEST(CorrelationE, ErrorPropagation) {
    // Four independent rates of 1/4 with error sigma each.
    const double sigma = 1e-3;
    const RateFunction noisy = [&](const AnalyzerSettings& s) { return RatePoint{s.xi, s.theta, 0.25, sigma}; };
    const auto e = correlation_e({0.1, 0.2}, noisy);
    EXPECT_NEAR(e.value, 0.0, 1e-15);
    // E = (p - m)/(p + m), p = m = 1/2: dE/dp = 1, dE/dm = -1, var = 2 sigma^2 + 2 sigma^2.
    EXPECT_NEAR(e.stat_error, 2.0 * sigma, 1e-15);
}

TEST(ChshS, CanonicalAnglesGiveTsirelson) {
    const auto result = chsh_s(ChshAngles::canonical(), analytic_post_selected_rates(1.0));
    EXPECT_NEAR(result.s_value, kTsirelson, 1e-9);
    EXPECT_EQ(result.stat_error, 0.0);
    const double oracle_s = oracle::chsh_from(
        [](double x, double t) { return oracle::four_rate_e(sin2_law, x, t); }, 0.0, 0.25 * kPi, 0.125 * kPi,
        0.375 * kPi);
    EXPECT_NEAR(result.s_value, oracle_s, 1e-12);
}

TEST(ChshS, EqualAnglesStayClassical) {
    const auto result = chsh_s({0.4, 0.4, 0.4, 0.4}, analytic_post_selected_rates(1.0));
    EXPECT_NEAR(result.s_value, 2.0, 1e-12);  // |0| + |2 E| with E = -1
    EXPECT_LE(result.s_value, 2.0 + 1e-12);
}

TEST(ChshS, TsirelsonBoundOverRandomAngles) {
    Rng rng(2);
    const auto rates = analytic_post_selected_rates(1.0);
    double max_s = 0.0;
    for (int n = 0; n < 10000; ++n) max_s = std::max(max_s, chsh_s(random_angles(rng), rates).s_value);
    EXPECT_LE(max_s, kTsirelson + 1e-9);
    EXPECT_GT(max_s, 2.0);  // random draws do find violations
}

TEST(ChshS, ClassicalLawNeverViolates) {
    Rng rng(2);
    const auto rates = classical_law();
    double max_s = 0.0;
    for (int n = 0; n < 10000; ++n) max_s = std::max(max_s, chsh_s(random_angles(rng), rates).s_value);
    EXPECT_LE(max_s, 2.0 + 1e-9);
}

TEST(ChshS, ClassicalMonteCarloBelowTwo) {
    SourceConfig config;
    config.bandwidth_sigma = 1.0;
    const auto mc = chsh_s(ChshAngles::canonical(),
                           monte_carlo_rates(config, {CoincidenceKind::Classical}, {200000, 42}));
    const auto law = chsh_s(ChshAngles::canonical(), classical_law());
    EXPECT_LE(mc.s_value, 2.0 + 5.0 * mc.stat_error);
    EXPECT_LT(std::abs(mc.s_value - law.s_value), 5.0 * mc.stat_error);
}

TEST(ChshS, MonteCarloConvergesToAnalytic) {
    SourceConfig config;
    config.bandwidth_sigma = 3.0;
    const auto post_exact = chsh_s(ChshAngles::canonical(), analytic_post_selected_rates(1.0));
    const auto class_exact = chsh_s(ChshAngles::canonical(), classical_law());
    for (std::uint64_t n : {10000ull, 1000000ull}) {
        const auto post = chsh_s(ChshAngles::canonical(), monte_carlo_rates(config, {}, {n, 7}));
        EXPECT_LE(std::abs(post.s_value - post_exact.s_value), 5.0 * post.stat_error + 1e-12);
        const auto cls =
            chsh_s(ChshAngles::canonical(), monte_carlo_rates(config, {CoincidenceKind::Classical}, {n, 7}));
        EXPECT_LT(std::abs(cls.s_value - class_exact.s_value), 5.0 * cls.stat_error);
    }
}

TEST(MonteCarloRates, DeterministicPerSetting) {
    SourceConfig config;
    config.bandwidth_sigma = 1.0;
    const auto rates = monte_carlo_rates(config, {CoincidenceKind::Classical}, {5000, 3});
    const auto a = rates({0.1, 0.2});
    const auto b = rates({0.1, 0.2});
    const auto c = rates({0.2, 0.1});
    EXPECT_EQ(a.rate, b.rate);
    EXPECT_NE(a.rate, c.rate);
}

TEST(CorrelationE, TranslationInvariance) {
    Rng rng(3);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const auto rates = analytic_post_selected_rates(1.0);
    for (int n = 0; n < 1000; ++n) {
        const double xi = angle(rng), theta = angle(rng), c = angle(rng);
        EXPECT_NEAR(correlation_e({xi + c, theta + c}, rates).value, correlation_e({xi, theta}, rates).value, 1e-10);
    }
}

TEST(BellScan, FollowsNegativeCosine) {
    const auto scan = bell_scan(analytic_post_selected_rates(1.0), 72);
    ASSERT_EQ(scan.size(), 72u);
    EXPECT_EQ(scan.front().delta, 0.0);
    EXPECT_NEAR(scan.front().e, -1.0, 1e-12);
    EXPECT_NEAR(scan[18].delta, 0.25 * kPi, 1e-15);
    EXPECT_NEAR(scan[18].e, 0.0, 1e-12);
    double worst = 0.0;
    for (const auto& p : scan) worst = std::max(worst, std::abs(p.e + std::cos(2.0 * p.delta)));
    EXPECT_LT(worst, 1e-9);
    EXPECT_LT(scan.back().delta, kPi);
}

TEST(BellScan, NeedsTwoSteps) {
    EXPECT_THROW(bell_scan(analytic_post_selected_rates(1.0), 1), std::invalid_argument);
}

}  // namespace
}  // namespace sagnac
