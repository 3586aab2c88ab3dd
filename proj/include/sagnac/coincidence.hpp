#pragma once

#include <vector>

#include "sagnac/analyzers.hpp"
#include "sagnac/ensemble.hpp"
#include "sagnac/pairmodel.hpp"

namespace sagnac {

enum class CoincidenceKind {
    PostSelected,  // same-pair amplitude products only
    Classical,     // product of singles intensities, no pair selection
};

enum class TimeModel {
    PathTime,      // signal and idler of a path share its time label
    DetectorTime,  // idler detector sees t + tau
};

struct CoincidenceMode {
    CoincidenceKind kind = CoincidenceKind::PostSelected;
    double tau_s = 0.0;
    TimeModel time_model = TimeModel::PathTime;

    // tau is only meaningful in the detector-time model.
    double idler_delay() const;
};

struct RatePoint {
    double xi = 0.0;
    double theta = 0.0;
    double rate = 0.0;        // units of I0^2
    double stat_error = 0.0;  // 0 for analytic rates
};

/// Product field of Ds and Di keeping only term pairs from the same Sagnac
/// path (V1*H1 and H2*V2). Throws std::invalid_argument when the two fields do
/// not come from the same sample, or are not a (signal, idler) pair.
Complex pair_selected_amplitude(const ProjectedField& es, const ProjectedField& ei);

/// I_s * I_i with every cross-pair term kept.
double intensity_product(const ProjectedField& es, const ProjectedField& ei);

/// |pair_selected_amplitude|^2 or intensity_product, per kind.
double coincidence_value(const ProjectedField& es, const ProjectedField& ei, CoincidenceKind kind);

/// Per-sample coincidence value at the given analyzer settings.
double coincidence_trial(const SourceConfig& config, const AnalyzerSettings& settings,
                         const CoincidenceMode& mode, const PairSample& sample);

/// (i0^2 / 4) sin^2(theta - xi)
double coincidence_rate_analytic(const AnalyzerSettings& settings, double i0);

RatePoint coincidence_rate_mc(const AnalyzerSettings& settings, const SourceConfig& config,
                              const CoincidenceMode& mode, const RunSpec& run);

/// Post-selected detector-time rates over a grid of idler delays.
/// Requires a Gaussian spectrum with bandwidth_sigma > 0.
std::vector<RatePoint> decoherence_scan(const AnalyzerSettings& settings, const SourceConfig& config,
                                        const std::vector<double>& tau_grid, const RunSpec& run);

struct Contrast {
    double value = 0.0;
    double stat_error = 0.0;
};

/// Contrast of the pair-interference cross term recovered from a
/// post-selected rate: 1 at tau = 0, 0 when the two pair amplitudes are fully
/// dephased. Throws std::invalid_argument where the settings make the cross
/// term vanish (sin xi cos theta cos xi sin theta == 0).
Contrast cross_term_contrast(const AnalyzerSettings& settings, double i0, const RatePoint& point);

}  // namespace sagnac
