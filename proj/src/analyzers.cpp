#include "sagnac/analyzers.hpp"

#include <cmath>
#include <stdexcept>

namespace sagnac {

namespace {

// Polarizer at `angle` from H passes cos(angle) of H and sin(angle) of V.
double projection_factor(Polarization polarization, double angle) {
    return polarization == Polarization::H ? std::cos(angle) : std::sin(angle);
}

std::array<FieldTerm, 2> project_terms(const std::array<FieldTerm, 2>& terms, double angle) {
    std::array<FieldTerm, 2> out = terms;
    for (auto& term : out) term.amp *= projection_factor(term.tag.polarization, angle);
    return out;
}

}  // namespace

AnalyzerSettings AnalyzerSettings::from_degrees(double xi_deg, double theta_deg) {
    return {xi_deg * kPi / 180.0, theta_deg * kPi / 180.0};
}

double canonical_angle(double angle) {
    double reduced = std::fmod(angle, kPi);
    if (reduced < 0.0) reduced += kPi;
    if (reduced >= kPi) reduced = 0.0;
    return reduced;
}

ProjectedField project_signal(const OutputField& field_a, const AnalyzerSettings& settings) {
    if (field_a.port != Port::A)
        throw std::invalid_argument("project_signal expects the port-A field");
    return {Detector::Signal, project_terms(field_a.terms, settings.xi), field_a.common_phase, field_a.sample,
            field_a.idler_delay_s};
}

ProjectedField project_idler(const OutputField& field_b, const AnalyzerSettings& settings) {
    if (field_b.port != Port::B)
        throw std::invalid_argument("project_idler expects the port-B field");
    return {Detector::Idler, project_terms(field_b.terms, settings.theta), field_b.common_phase, field_b.sample,
            field_b.idler_delay_s};
}

Complex ProjectedField::total_amplitude() const {
    return std::polar(1.0, common_phase) * (terms[0].amp + terms[1].amp);
}

double singles_intensity(const ProjectedField& field) {
    return std::norm(field.terms[0].amp + field.terms[1].amp);
}

double signal_intensity_closed_form(double i0, double xi, double phase) {
    return 0.5 * i0 * (1.0 - std::sin(2.0 * xi) * std::sin(phase));
}

double idler_intensity_closed_form(double i0, double theta, double phase) {
    return 0.5 * i0 * (1.0 + std::sin(2.0 * theta) * std::sin(phase));
}

double singles_fringe_phase(const PairSample& sample) {
    return delta_jk(sample) + 0.5 * kPi;
}

}  // namespace sagnac
