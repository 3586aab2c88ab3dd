#include "sagnac/bellstats.hpp"

#include <bit>
#include <cmath>

namespace sagnac {

namespace {

constexpr double kQuarterTurn = 0.5 * kPi;

}  // namespace

Correlation correlation_e(const AnalyzerSettings& settings, const RateFunction& rate_fn) {
    const auto same = rate_fn(settings);
    const auto both_perp = rate_fn({settings.xi + kQuarterTurn, settings.theta + kQuarterTurn});
    const auto signal_perp = rate_fn({settings.xi + kQuarterTurn, settings.theta});
    const auto idler_perp = rate_fn({settings.xi, settings.theta + kQuarterTurn});

    const double plus = same.rate + both_perp.rate;
    const double minus = signal_perp.rate + idler_perp.rate;
    const double total = plus + minus;
    if (total == 0.0) throw DegenerateCorrelationError();

    // dE/dplus = 2 minus / total^2, dE/dminus = -2 plus / total^2
    const double var_plus = same.stat_error * same.stat_error + both_perp.stat_error * both_perp.stat_error;
    const double var_minus =
        signal_perp.stat_error * signal_perp.stat_error + idler_perp.stat_error * idler_perp.stat_error;
    const double g_plus = 2.0 * minus / (total * total);
    const double g_minus = 2.0 * plus / (total * total);
    return {(plus - minus) / total, std::sqrt(g_plus * g_plus * var_plus + g_minus * g_minus * var_minus)};
}

ChshAngles ChshAngles::canonical() { return from_degrees(0.0, 45.0, 22.5, 67.5); }

ChshAngles ChshAngles::from_degrees(double a, double a_prime, double b, double b_prime) {
    constexpr double k = kPi / 180.0;
    return {a * k, a_prime * k, b * k, b_prime * k};
}

ChshResult chsh_s(const ChshAngles& angles, const RateFunction& rate_fn) {
    const std::array<Correlation, 4> e = {
        correlation_e({angles.a, angles.b}, rate_fn),
        correlation_e({angles.a, angles.b_prime}, rate_fn),
        correlation_e({angles.a_prime, angles.b}, rate_fn),
        correlation_e({angles.a_prime, angles.b_prime}, rate_fn),
    };
    ChshResult result;
    double variance = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        result.e_values[i] = e[i].value;
        result.e_errors[i] = e[i].stat_error;
        variance += e[i].stat_error * e[i].stat_error;
    }
    result.s_value = std::abs(e[0].value - e[1].value) + std::abs(e[2].value + e[3].value);
    result.stat_error = std::sqrt(variance);
    return result;
}

std::vector<ScanPoint> bell_scan(const RateFunction& rate_fn, int grid_steps) {
    if (grid_steps < 2) throw std::invalid_argument("bell_scan needs at least two grid steps");
    std::vector<ScanPoint> out;
    out.reserve(static_cast<std::size_t>(grid_steps));
    for (int k = 0; k < grid_steps; ++k) {
        const double delta = kPi * k / grid_steps;
        out.push_back({delta, correlation_e({0.0, delta}, rate_fn).value});
    }
    return out;
}

RateFunction analytic_post_selected_rates(double i0) {
    return [i0](const AnalyzerSettings& s) {
        return RatePoint{s.xi, s.theta, coincidence_rate_analytic(s, i0), 0.0};
    };
}

RateFunction monte_carlo_rates(const SourceConfig& config, const CoincidenceMode& mode, const RunSpec& run) {
    return [config, mode, run](const AnalyzerSettings& s) {
        RunSpec point_run = run;
        const std::uint64_t key = std::bit_cast<std::uint64_t>(s.xi) ^ splitmix64(std::bit_cast<std::uint64_t>(s.theta));
        point_run.master_seed = derive_seed(run.master_seed, key);
        return coincidence_rate_mc(s, config, mode, point_run);
    };
}

}  // namespace sagnac
