#pragma once

#include <array>

#include "sagnac/pairmodel.hpp"

namespace sagnac {

/// Local polarizer angles in radians, both measured from the H axis:
/// xi in front of the signal detector Ds, theta in front of the idler detector Di.
struct AnalyzerSettings {
    double xi = 0.0;
    double theta = 0.0;

    static AnalyzerSettings from_degrees(double xi_deg, double theta_deg);
};

// Reduces an angle to [0, pi). Used only for reporting.
double canonical_angle(double angle);

enum class Detector { Signal, Idler };

/// A field after a polarizer. Keeps the basis tags so pair origin can be
/// tracked through coincidence detection.
struct ProjectedField {
    Detector detector;
    std::array<FieldTerm, 2> terms;  // excluding e^{i common_phase}
    double common_phase = 0.0;
    PairSample sample;
    double idler_delay_s = 0.0;

    Complex total_amplitude() const;
};

// Throws std::invalid_argument if the field is not from the expected port.
ProjectedField project_signal(const OutputField& field_a, const AnalyzerSettings& settings);
ProjectedField project_idler(const OutputField& field_b, const AnalyzerSettings& settings);

/// |sum of projected amplitudes|^2 for one sample.
double singles_intensity(const ProjectedField& field);

// Closed-form singles fringes as functions of the fringe phase:
//   I_s = (I0/2)(1 - sin 2xi sin(phase)),  I_i = (I0/2)(1 + sin 2theta sin(phase))
double signal_intensity_closed_form(double i0, double xi, double phase);
double idler_intensity_closed_form(double i0, double theta, double phase);

/// Phase at which the closed forms reproduce the literal field amplitudes:
/// the projected terms interfere with cos(delta_jk), which is sin(delta_jk + pi/2).
double singles_fringe_phase(const PairSample& sample);

}  // namespace sagnac
