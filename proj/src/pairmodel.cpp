#include "sagnac/pairmodel.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sagnac {

namespace {

Spectrum parse_spectrum(const std::string& name) {
    if (name == "gaussian") return Spectrum::Gaussian;
    if (name == "uniform") return Spectrum::Uniform;
    throw std::invalid_argument("unknown spectrum '" + name + "' (expected gaussian|uniform)");
}

PhaseModel parse_phase_model(const std::string& name) {
    if (name == "uniform") return PhaseModel::Uniform;
    if (name == "physical") return PhaseModel::Physical;
    throw std::invalid_argument("unknown phase_model '" + name + "' (expected uniform|physical)");
}

double draw_detuning(const SourceConfig& config, Rng& rng) {
    if (config.bandwidth_sigma == 0.0) return 0.0;
    if (config.spectrum == Spectrum::Gaussian) {
        std::normal_distribution<double> dist(0.0, config.bandwidth_sigma);
        return dist(rng);
    }
    // Half-width sqrt(3)*sigma gives standard deviation sigma.
    const double half_width = std::sqrt(3.0) * config.bandwidth_sigma;
    std::uniform_real_distribution<double> dist(-half_width, half_width);
    return dist(rng);
}

}  // namespace

void SourceConfig::validate() const {
    if (!(amplitude_e0 > 0.0) || !std::isfinite(amplitude_e0))
        throw std::invalid_argument("amplitude_e0 must be positive and finite");
    if (!(bandwidth_sigma >= 0.0) || !std::isfinite(bandwidth_sigma))
        throw std::invalid_argument("bandwidth_sigma must be non-negative and finite");
    if (!std::isfinite(phase_phi) || !std::isfinite(global_phase))
        throw std::invalid_argument("phases must be finite");
    if (!(time_span_s > 0.0) || !std::isfinite(time_span_s))
        throw std::invalid_argument("time_span_s must be positive and finite");
}

SourceConfig source_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("source config must be a JSON object");
    SourceConfig config;
    config.amplitude_e0 = doc.value("amplitude_e0", config.amplitude_e0);
    config.phase_phi = doc.value("phase_phi_rad", config.phase_phi);
    config.global_phase = doc.value("global_phase_rad", config.global_phase);
    config.bandwidth_sigma = doc.value("bandwidth_sigma_rad_s", config.bandwidth_sigma);
    if (doc.contains("spectrum")) config.spectrum = parse_spectrum(doc.at("spectrum").get<std::string>());
    if (doc.contains("phase_model"))
        config.phase_model = parse_phase_model(doc.at("phase_model").get<std::string>());
    config.time_span_s = doc.value("time_span_s", config.time_span_s);
    config.validate();
    return config;
}

nlohmann::json to_json(const SourceConfig& config) {
    return {
        {"amplitude_e0", config.amplitude_e0},
        {"phase_phi_rad", config.phase_phi},
        {"global_phase_rad", config.global_phase},
        {"bandwidth_sigma_rad_s", config.bandwidth_sigma},
        {"spectrum", config.spectrum == Spectrum::Gaussian ? "gaussian" : "uniform"},
        {"phase_model", config.phase_model == PhaseModel::Uniform ? "uniform" : "physical"},
        {"time_span_s", config.time_span_s},
    };
}

SourceConfig load_source_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("malformed config '" + path + "': " + e.what());
    }
    try {
        return source_config_from_json(doc);
    } catch (const nlohmann::json::type_error& e) {
        throw std::invalid_argument("bad config value in '" + path + "': " + e.what());
    }
}

double delta_jk(const PairSample& sample) {
    return sample.detuning_j * sample.time_1 - sample.detuning_k * sample.time_2;
}

std::string to_string(const BasisTag& tag) {
    std::string out = tag.polarization == Polarization::H ? "H" : "V";
    out += tag.path == Path::One ? "1" : "2";
    out += tag.detuning_sign == DetuningSign::Plus ? "+" : "-";
    return out;
}

Complex OutputField::full_amplitude(std::size_t term) const {
    return std::polar(1.0, common_phase) * terms.at(term).amp;
}

double OutputField::total_intensity() const {
    return std::norm(terms[0].amp) + std::norm(terms[1].amp);
}

OutputFields build_output_fields(const SourceConfig& config, const PairSample& sample,
                                 double idler_delay_s) {
    const double scale = config.amplitude_e0 / std::sqrt(2.0);
    const Complex prefactor_a{scale, 0.0};
    const Complex prefactor_b{0.0, scale};

    const double t1_idler = sample.time_1 + idler_delay_s;
    const double t2_idler = sample.time_2 + idler_delay_s;

    OutputField port_a{
        Port::A,
        {{{{Path::One, Polarization::V, DetuningSign::Plus},
           -prefactor_a * std::polar(1.0, sample.detuning_j * sample.time_1)},
          {{Path::Two, Polarization::H, DetuningSign::Plus},
           prefactor_a * std::polar(1.0, sample.detuning_k * sample.time_2)}}},
        config.folded_phase(),
        sample,
        idler_delay_s,
    };
    OutputField port_b{
        Port::B,
        {{{{Path::One, Polarization::H, DetuningSign::Minus},
           prefactor_b * std::polar(1.0, -sample.detuning_j * t1_idler)},
          {{Path::Two, Polarization::V, DetuningSign::Minus},
           prefactor_b * std::polar(1.0, -sample.detuning_k * t2_idler)}}},
        config.folded_phase(),
        sample,
        idler_delay_s,
    };
    return {port_a, port_b};
}

PairSample sample_pair(const SourceConfig& config, Rng& rng) {
    PairSample sample;
    sample.detuning_j = draw_detuning(config, rng);
    sample.detuning_k = draw_detuning(config, rng);

    if (config.phase_model == PhaseModel::Physical) {
        std::uniform_real_distribution<double> time(0.0, config.time_span_s);
        sample.time_1 = time(rng);
        sample.time_2 = time(rng);
        return sample;
    }

    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    const double target = phase(rng);
    if (sample.detuning_j != 0.0) {
        sample.time_1 = target / sample.detuning_j;
    } else if (sample.detuning_k != 0.0) {
        sample.time_2 = -target / sample.detuning_k;
    }
    // Both detunings zero: no time label can produce a phase, delta_jk = 0.
    return sample;
}

}  // namespace sagnac
