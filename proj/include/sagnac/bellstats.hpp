#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sagnac/analyzers.hpp"
#include "sagnac/coincidence.hpp"

namespace sagnac {

/// Coincidence rate as a function of analyzer settings. Must be safe to call
/// concurrently and return a nonnegative rate.
using RateFunction = std::function<RatePoint(const AnalyzerSettings&)>;

struct Correlation {
    double value = 0.0;
    double stat_error = 0.0;
};

class DegenerateCorrelationError : public std::domain_error {
public:
    DegenerateCorrelationError() : std::domain_error("all four coincidence rates are zero; E is undefined") {}
};

/// Four-rate polarization correlation
///   E = [R(x,t) + R(x+90,t+90) - R(x+90,t) - R(x,t+90)] / (sum of the four)
/// with the statistical error propagated to first order.
Correlation correlation_e(const AnalyzerSettings& settings, const RateFunction& rate_fn);

struct ChshAngles {
    double a = 0.0;
    double a_prime = 0.0;
    double b = 0.0;
    double b_prime = 0.0;

    // (0, 45, 22.5, 67.5) degrees.
    static ChshAngles canonical();
    static ChshAngles from_degrees(double a, double a_prime, double b, double b_prime);
};

struct ChshResult {
    // E(a,b), E(a,b'), E(a',b), E(a',b')
    std::array<double, 4> e_values{};
    std::array<double, 4> e_errors{};
    double s_value = 0.0;
    double stat_error = 0.0;
};

/// S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|
ChshResult chsh_s(const ChshAngles& angles, const RateFunction& rate_fn);

struct ScanPoint {
    double delta = 0.0;  // theta - xi, rad
    double e = 0.0;
};

/// E at xi = 0, theta = delta for grid_steps evenly spaced deltas in [0, pi).
std::vector<ScanPoint> bell_scan(const RateFunction& rate_fn, int grid_steps);

RateFunction analytic_post_selected_rates(double i0);

/// Monte Carlo rates. Each call draws from its own stream seeded by
/// (run.master_seed, settings), so repeated calls are deterministic and
/// different settings are statistically independent.
RateFunction monte_carlo_rates(const SourceConfig& config, const CoincidenceMode& mode, const RunSpec& run);

}  // namespace sagnac
