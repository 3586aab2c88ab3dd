#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace sagnac {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class Spectrum { Gaussian, Uniform };

// How the detuning-time phase of a pair sample is produced.
//  Uniform:  delta_jk is drawn uniformly on [0, 2pi) and the time labels are
//            solved for, so the singles fringe is fully randomized.
//  Physical: detunings and time labels are drawn independently.
enum class PhaseModel { Uniform, Physical };

struct SourceConfig {
    double amplitude_e0 = 1.0;
    double phase_phi = 0.0;      // rad
    double global_phase = 0.0;   // rad, folded with phase_phi
    double bandwidth_sigma = kTwoPi * 1e9;  // rad/s (1 GHz)
    Spectrum spectrum = Spectrum::Gaussian;
    PhaseModel phase_model = PhaseModel::Uniform;
    double time_span_s = 1e-6;  // Physical model only

    double folded_phase() const { return phase_phi + global_phase; }
    double intensity() const { return amplitude_e0 * amplitude_e0; }

    // Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

SourceConfig source_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SourceConfig& config);
// Throws std::runtime_error if the file cannot be read.
SourceConfig load_source_config(const std::string& path);

/// One detection window: the detuning of each pair and the time label of each
/// Sagnac path. Signal and idler of a pair carry +detuning and -detuning.
struct PairSample {
    double detuning_j = 0.0;  // backward pair (path 1), rad/s
    double detuning_k = 0.0;  // forward pair (path 2), rad/s
    double time_1 = 0.0;      // s
    double time_2 = 0.0;      // s

    bool operator==(const PairSample&) const = default;
};

double delta_jk(const PairSample& sample);

enum class Path { One = 1, Two = 2 };
enum class Polarization { H, V };
enum class DetuningSign { Plus, Minus };
enum class Port { A, B };

struct BasisTag {
    Path path;
    Polarization polarization;
    DetuningSign detuning_sign;

    bool operator==(const BasisTag&) const = default;
};

std::string to_string(const BasisTag& tag);

struct FieldTerm {
    BasisTag tag;
    Complex amp;
};

/// Field at one PBS output port: two terms, one per Sagnac path.
///
/// Term amplitudes exclude the traveling-wave phase e^{i phi'}, which is common
/// to every term and kept in common_phase; intensities never depend on it.
struct OutputField {
    Port port;
    std::array<FieldTerm, 2> terms;
    double common_phase = 0.0;
    PairSample sample;
    double idler_delay_s = 0.0;

    Complex full_amplitude(std::size_t term) const;
    double total_intensity() const;
};

struct OutputFields {
    OutputField port_a;
    OutputField port_b;
};

/// PBS output fields for one pair sample.
///
/// Port A (signal side): (E0/sqrt2) e^{i phi'} (-V1 e^{i dj t1} + H2 e^{i dk t2})
/// Port B (idler side):  (i E0/sqrt2) e^{i phi'} (H1 e^{-i dj t1} + V2 e^{-i dk t2})
/// with phi' = phase_phi + global_phase.
///
/// The leading i on port B is the fixed pi/2 signal-idler phase. A nonzero
/// idler_delay_s shifts the port-B time labels by that amount (detector-time
/// model); it is zero for the path-time model.
OutputFields build_output_fields(const SourceConfig& config, const PairSample& sample,
                                 double idler_delay_s = 0.0);

/// Draws one pair sample. Detunings are i.i.d. from the configured spectrum
/// (zero mean, standard deviation bandwidth_sigma).
PairSample sample_pair(const SourceConfig& config, Rng& rng);

}  // namespace sagnac
