#include "sagnac/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace sagnac {

void Accumulator::add(double value) {
    ++count_;
    const double delta = value - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (value - mean_);
}

void Accumulator::merge(const Accumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double n_a = static_cast<double>(count_);
    const double n_b = static_cast<double>(other.count_);
    const double n = n_a + n_b;
    const double delta = other.mean_ - mean_;
    mean_ += delta * n_b / n;
    m2_ += other.m2_ + delta * delta * n_a * n_b / n;
    count_ += other.count_;
}

double Accumulator::variance() const {
    return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double Accumulator::standard_error() const {
    return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

namespace {

struct ChunkRange {
    std::uint64_t begin;
    std::uint64_t end;
};

ChunkRange chunk_range(const RunSpec& spec, std::uint64_t chunk) {
    const std::uint64_t begin = chunk * spec.chunk_size;
    return {begin, std::min(begin + spec.chunk_size, spec.n_trials)};
}

// Runs body(chunk) for every chunk index on up to spec.workers threads.
template <typename Body>
void for_each_chunk(const RunSpec& spec, std::uint64_t n_chunks, Body&& body) {
    unsigned workers = spec.workers != 0 ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));
    if (workers <= 1) {
        for (std::uint64_t chunk = 0; chunk < n_chunks; ++chunk) body(chunk);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::uint64_t chunk = next++; chunk < n_chunks; chunk = next++) body(chunk);
        });
    }
}

std::uint64_t chunk_count(const RunSpec& spec) {
    if (spec.n_trials == 0) throw EmptyEnsembleError();
    if (spec.chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
    return (spec.n_trials + spec.chunk_size - 1) / spec.chunk_size;
}

}  // namespace

Accumulator run_ensemble(const RunSpec& spec, const SourceConfig& config, const TrialFunction& trial_fn) {
    const std::uint64_t n_chunks = chunk_count(spec);
    std::vector<Accumulator> partial(n_chunks);
    for_each_chunk(spec, n_chunks, [&](std::uint64_t chunk) {
        Rng rng(derive_seed(spec.master_seed, chunk));
        const auto range = chunk_range(spec, chunk);
        Accumulator acc;
        for (std::uint64_t i = range.begin; i < range.end; ++i) acc.add(trial_fn(sample_pair(config, rng)));
        partial[chunk] = acc;
    });
    Accumulator total;
    for (const auto& acc : partial) total.merge(acc);
    return total;
}

std::vector<PairSample> generate_samples(const RunSpec& spec, const SourceConfig& config) {
    const std::uint64_t n_chunks = chunk_count(spec);
    std::vector<PairSample> samples(spec.n_trials);
    for_each_chunk(spec, n_chunks, [&](std::uint64_t chunk) {
        Rng rng(derive_seed(spec.master_seed, chunk));
        const auto range = chunk_range(spec, chunk);
        for (std::uint64_t i = range.begin; i < range.end; ++i) samples[i] = sample_pair(config, rng);
    });
    return samples;
}

}  // namespace sagnac
