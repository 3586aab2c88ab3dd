#include "sagnac/coincidence.hpp"

#include <cmath>
#include <stdexcept>

namespace sagnac {

namespace {

void check_pairing(const ProjectedField& es, const ProjectedField& ei) {
    if (es.detector != Detector::Signal || ei.detector != Detector::Idler)
        throw std::invalid_argument("coincidence needs a signal field and an idler field");
    if (!(es.sample == ei.sample) || es.idler_delay_s != ei.idler_delay_s)
        throw std::invalid_argument("signal and idler fields come from different samples");
}

// Same-path products without the common phase factors.
Complex pair_selected_sum(const ProjectedField& es, const ProjectedField& ei) {
    check_pairing(es, ei);
    Complex sum{0.0, 0.0};
    for (const auto& s : es.terms) {
        for (const auto& i : ei.terms) {
            if (s.tag.path == i.tag.path) sum += s.amp * i.amp;
        }
    }
    return sum;
}

}  // namespace

double CoincidenceMode::idler_delay() const {
    if (time_model == TimeModel::PathTime) {
        if (tau_s != 0.0) throw std::invalid_argument("tau requires the detector-time model");
        return 0.0;
    }
    return tau_s;
}

Complex pair_selected_amplitude(const ProjectedField& es, const ProjectedField& ei) {
    return std::polar(1.0, es.common_phase + ei.common_phase) * pair_selected_sum(es, ei);
}

double intensity_product(const ProjectedField& es, const ProjectedField& ei) {
    check_pairing(es, ei);
    return singles_intensity(es) * singles_intensity(ei);
}

double coincidence_value(const ProjectedField& es, const ProjectedField& ei, CoincidenceKind kind) {
    return kind == CoincidenceKind::PostSelected ? std::norm(pair_selected_sum(es, ei))
                                                 : intensity_product(es, ei);
}

double coincidence_trial(const SourceConfig& config, const AnalyzerSettings& settings,
                         const CoincidenceMode& mode, const PairSample& sample) {
    const auto fields = build_output_fields(config, sample, mode.idler_delay());
    return coincidence_value(project_signal(fields.port_a, settings), project_idler(fields.port_b, settings),
                             mode.kind);
}

double coincidence_rate_analytic(const AnalyzerSettings& settings, double i0) {
    if (!(i0 > 0.0)) throw std::invalid_argument("i0 must be positive");
    const double s = std::sin(settings.theta - settings.xi);
    return 0.25 * i0 * i0 * s * s;
}

RatePoint coincidence_rate_mc(const AnalyzerSettings& settings, const SourceConfig& config,
                              const CoincidenceMode& mode, const RunSpec& run) {
    config.validate();
    mode.idler_delay();
    const auto acc = run_ensemble(run, config, [&](const PairSample& sample) {
        return coincidence_trial(config, settings, mode, sample);
    });
    return {settings.xi, settings.theta, acc.mean(), acc.standard_error()};
}

std::vector<RatePoint> decoherence_scan(const AnalyzerSettings& settings, const SourceConfig& config,
                                        const std::vector<double>& tau_grid, const RunSpec& run) {
    if (config.spectrum != Spectrum::Gaussian || !(config.bandwidth_sigma > 0.0))
        throw std::invalid_argument("decoherence scan needs a Gaussian spectrum with sigma > 0");
    std::vector<RatePoint> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        const CoincidenceMode mode{CoincidenceKind::PostSelected, tau, TimeModel::DetectorTime};
        out.push_back(coincidence_rate_mc(settings, config, mode, run));
    }
    return out;
}

Contrast cross_term_contrast(const AnalyzerSettings& settings, double i0, const RatePoint& point) {
    const double sx = std::sin(settings.xi), cx = std::cos(settings.xi);
    const double st = std::sin(settings.theta), ct = std::cos(settings.theta);
    const double scale = 0.25 * i0 * i0;
    // |a_j e^{i phi_j} + a_k e^{i phi_k}|^2 = a_j^2 + a_k^2 + 2 a_j a_k cos(phi_j - phi_k)
    // with a_j = -sx*ct, a_k = cx*st.
    const double incoherent = scale * (sx * sx * ct * ct + cx * cx * st * st);
    const double cross = -2.0 * scale * sx * ct * cx * st;
    if (std::abs(cross) < 1e-12 * scale)
        throw std::invalid_argument("cross term vanishes at these analyzer settings");
    return {(point.rate - incoherent) / cross, point.stat_error / std::abs(cross)};
}

}  // namespace sagnac
