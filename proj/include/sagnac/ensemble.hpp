#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sagnac/pairmodel.hpp"

namespace sagnac {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunSpec {
    std::uint64_t n_trials = 100000;
    std::uint64_t master_seed = kDefaultSeed;
    std::uint64_t chunk_size = 4096;
    unsigned workers = 0;  // 0: hardware concurrency
};

/// Streaming mean/variance (Welford), mergeable across chunks.
class Accumulator {
public:
    void add(double value);
    void merge(const Accumulator& other);

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    double m2() const { return m2_; }
    // Sample variance; 0 for fewer than two values.
    double variance() const;
    double standard_error() const;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

class EmptyEnsembleError : public std::invalid_argument {
public:
    EmptyEnsembleError() : std::invalid_argument("ensemble needs at least one trial") {}
};

std::uint64_t splitmix64(std::uint64_t x);

// Independent seed for a derived stream (chunk, rate point, ...).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream);

using TrialFunction = std::function<double(const PairSample&)>;

/// Averages trial_fn over spec.n_trials samples drawn from config.
///
/// Trials are split into chunks of spec.chunk_size, each with its own RNG
/// seeded from (master_seed, chunk index). Chunks run on spec.workers threads
/// and are merged in chunk order, so the result is bit-identical for any
/// worker count.
Accumulator run_ensemble(const RunSpec& spec, const SourceConfig& config, const TrialFunction& trial_fn);

/// The exact sample stream run_ensemble would evaluate.
std::vector<PairSample> generate_samples(const RunSpec& spec, const SourceConfig& config);

}  // namespace sagnac
