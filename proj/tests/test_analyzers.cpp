#include "sagnac/analyzers.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sagnac/ensemble.hpp"

namespace sagnac {
namespace {

struct Projected {
    ProjectedField signal;
    ProjectedField idler;
};

Projected project(const SourceConfig& config, const PairSample& sample, const AnalyzerSettings& s) {
    const auto fields = build_output_fields(config, sample);
    return {project_signal(fields.port_a, s), project_idler(fields.port_b, s)};
}

TEST(Projection, RejectsWrongPort) {
    const auto fields = build_output_fields(SourceConfig{}, PairSample{});
    EXPECT_THROW(project_signal(fields.port_b, {}), std::invalid_argument);
    EXPECT_THROW(project_idler(fields.port_a, {}), std::invalid_argument);
}

TEST(Projection, SignalAtZeroAndRightAngle) {
    auto p = project(SourceConfig{}, PairSample{}, {0.0, 0.0});
    EXPECT_EQ(p.signal.terms[0].amp, Complex(0.0, 0.0));  // V1 blocked
    EXPECT_NE(p.signal.terms[1].amp, Complex(0.0, 0.0));
    p = project(SourceConfig{}, PairSample{}, {0.5 * kPi, 0.0});
    EXPECT_NEAR(std::abs(p.signal.terms[1].amp), 0.0, 1e-16);  // H2 blocked
}

TEST(Projection, SignalAtFortyFive) {
    const auto p = project(SourceConfig{}, PairSample{}, {0.25 * kPi, 0.0});
    EXPECT_NEAR(p.signal.terms[0].amp.real(), -0.5, 1e-15);
    EXPECT_NEAR(p.signal.terms[1].amp.real(), 0.5, 1e-15);
    EXPECT_NEAR(p.signal.terms[0].amp.imag(), 0.0, 1e-15);
    EXPECT_NEAR(p.signal.terms[1].amp.imag(), 0.0, 1e-15);
}

TEST(Projection, IdlerAtZeroRightAngleAndFortyFive) {
    auto p = project(SourceConfig{}, PairSample{}, {0.0, 0.0});
    EXPECT_EQ(p.idler.terms[1].amp, Complex(0.0, 0.0));  // V2 blocked
    p = project(SourceConfig{}, PairSample{}, {0.0, 0.5 * kPi});
    EXPECT_NEAR(std::abs(p.idler.terms[0].amp), 0.0, 1e-16);  // H1 blocked
    p = project(SourceConfig{}, PairSample{}, {0.0, 0.25 * kPi});
    for (const auto& term : p.idler.terms) {
        EXPECT_NEAR(term.amp.real(), 0.0, 1e-15);
        EXPECT_NEAR(term.amp.imag(), 0.5, 1e-15);
    }
}

TEST(Projection, KeepsOriginTagsAndNeverAmplifies) {
    Rng rng(4);
    std::uniform_real_distribution<double> angle(-kPi, kPi), det(-1e3, 1e3), t(0.0, 1.0);
    SourceConfig config;
    config.amplitude_e0 = 1.7;
    for (int n = 0; n < 10000; ++n) {
        const PairSample sample{det(rng), det(rng), t(rng), t(rng)};
        const auto fields = build_output_fields(config, sample);
        const auto p = project(config, sample, {angle(rng), angle(rng)});
        for (int i = 0; i < 2; ++i) {
            EXPECT_EQ(p.signal.terms[i].tag, fields.port_a.terms[i].tag);
            EXPECT_EQ(p.idler.terms[i].tag, fields.port_b.terms[i].tag);
        }
        const double bound = 0.5 * config.intensity() + 1e-12;
        EXPECT_LE(std::norm(p.signal.terms[0].amp) + std::norm(p.signal.terms[1].amp), bound);
        EXPECT_LE(std::norm(p.idler.terms[0].amp) + std::norm(p.idler.terms[1].amp), bound);
    }
}

TEST(SinglesClosedForm, Examples) {
    EXPECT_NEAR(signal_intensity_closed_form(1.0, 0.25 * kPi, 0.5 * kPi), 0.0, 1e-15);
    EXPECT_NEAR(idler_intensity_closed_form(1.0, 0.25 * kPi, 0.5 * kPi), 1.0, 1e-15);
}

TEST(SinglesIntensity, LiteralFieldsAtZeroPhase) {
    // Zero detunings: the two projected signal terms interfere with cos(0) = 1.
    const auto p = project(SourceConfig{}, PairSample{}, {0.25 * kPi, 0.25 * kPi});
    EXPECT_NEAR(singles_intensity(p.signal), 0.0, 1e-15);
    EXPECT_NEAR(singles_intensity(p.idler), 1.0, 1e-15);
}

TEST(SinglesIntensity, AgreesWithClosedFormAndDirectFields) {
    Rng rng(77);
    std::uniform_real_distribution<double> angle(-kPi, kPi), det(-50.0, 50.0), t(0.0, 1.0);
    for (int n = 0; n < 10000; ++n) {
        const double xi = angle(rng), theta = angle(rng);
        const PairSample s{det(rng), det(rng), t(rng), t(rng)};
        const auto p = project(SourceConfig{}, s, {xi, theta});
        const double is = singles_intensity(p.signal);
        const double ii = singles_intensity(p.idler);
        const double phase = singles_fringe_phase(s);
        EXPECT_NEAR(is, signal_intensity_closed_form(1.0, xi, phase), 1e-10);
        EXPECT_NEAR(ii, idler_intensity_closed_form(1.0, theta, phase), 1e-10);
        EXPECT_NEAR(is, std::norm(oracle::signal_field(xi, s.detuning_j, s.time_1, s.detuning_k, s.time_2)), 1e-12);
        EXPECT_NEAR(ii, std::norm(oracle::idler_field(theta, s.detuning_j, s.time_1, s.detuning_k, s.time_2)), 1e-12);
    }
}

TEST(SinglesIntensity, PolarizerComplement) {
    Rng rng(78);
    std::uniform_real_distribution<double> angle(-kPi, kPi), det(-50.0, 50.0), t(0.0, 1.0);
    SourceConfig config;
    config.amplitude_e0 = 1.3;
    for (int n = 0; n < 10000; ++n) {
        const double xi = angle(rng), theta = angle(rng);
        const PairSample s{det(rng), det(rng), t(rng), t(rng)};
        const auto a = project(config, s, {xi, theta});
        const auto b = project(config, s, {xi + 0.5 * kPi, theta + 0.5 * kPi});
        EXPECT_NEAR(singles_intensity(a.signal) + singles_intensity(b.signal), config.intensity(), 1e-10);
        EXPECT_NEAR(singles_intensity(a.idler) + singles_intensity(b.idler), config.intensity(), 1e-10);
    }
}

TEST(SinglesIntensity, BitIdenticalUnderPhaseChanges) {
    Rng rng(79);
    std::uniform_real_distribution<double> u(0.0, kTwoPi), det(-50.0, 50.0), t(0.0, 1.0);
    for (int n = 0; n < 1000; ++n) {
        SourceConfig a, b;
        b.phase_phi = u(rng);
        b.global_phase = u(rng);
        const PairSample s{det(rng), det(rng), t(rng), t(rng)};
        const AnalyzerSettings settings{u(rng), u(rng)};
        const auto pa = project(a, s, settings);
        const auto pb = project(b, s, settings);
        EXPECT_EQ(singles_intensity(pa.signal), singles_intensity(pb.signal));
        EXPECT_EQ(singles_intensity(pa.idler), singles_intensity(pb.idler));
    }
}

Accumulator signal_mean(double xi, std::uint64_t seed) {
    SourceConfig config;
    config.bandwidth_sigma = 1.0;
    const AnalyzerSettings settings{xi, 0.0};
    return run_ensemble({1000000, seed}, config, [&](const PairSample& s) {
        return singles_intensity(project_signal(build_output_fields(config, s).port_a, settings));
    });
}

TEST(SinglesIntensity, EnsembleIsHalfAndFlatInXi) {
    const auto a = signal_mean(0.3, 1);
    const auto b = signal_mean(1.1, 2);
    EXPECT_LT(std::abs(a.mean() - 0.5), 5.0 * a.standard_error());
    EXPECT_LT(std::abs(b.mean() - 0.5), 5.0 * b.standard_error());
    const double pooled = std::hypot(a.standard_error(), b.standard_error());
    EXPECT_LT(std::abs(a.mean() - b.mean()), 5.0 * pooled);
}

TEST(CanonicalAngle, ReducesModPi) {
    EXPECT_NEAR(canonical_angle(kPi + 0.25), 0.25, 1e-15);
    EXPECT_NEAR(canonical_angle(-0.25), kPi - 0.25, 1e-15);
    EXPECT_EQ(canonical_angle(0.0), 0.0);
    const auto s = AnalyzerSettings::from_degrees(90.0, 45.0);
    EXPECT_NEAR(s.xi, 0.5 * kPi, 1e-15);
    EXPECT_NEAR(s.theta, 0.25 * kPi, 1e-15);
}

}  // namespace
}  // namespace sagnac
