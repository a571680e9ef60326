#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rcx/matgroup.hpp"

namespace rcx {

/// SplitMix64: the stream-derivation PRNG. One mixing step of the public
/// domain splitmix64 generator.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256++ (public domain, Blackman/Vigna). Trial streams are derived
/// splittably: stream t of master seed s is seeded from SplitMix64 applied
/// to mix(s) + t, so trials can be generated independently and in parallel
/// with identical results regardless of worker count.
class Xoshiro256pp {
public:
    static Xoshiro256pp for_stream(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 base(seed);
        SplitMix64 sm(base.next() + stream);
        Xoshiro256pp g;
        for (auto& w : g.s_) w = sm.next();
        return g;
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in (0, 1]: 53-bit mantissa.
    double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via the polar (Marsaglia) method; no trig calls, so
    /// streams are reproducible across libm versions.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Complex gaussian with E|g|^2 = 1: real and imaginary parts are
    /// independent centered normals of variance 1/2.
    std::complex<double> complex_gaussian() {
        double re = normal(), im = normal();
        return {re * 0x1.6a09e667f3bcdp-1, im * 0x1.6a09e667f3bcdp-1};  // * 1/sqrt(2)
    }

private:
    std::uint64_t s_[4]{};
    bool have_spare_{false};
    double spare_{0};
};

/// Wishart ensemble configuration. Implied ratio c = p / (d1 d2).
struct EnsembleConfig {
    int d1{1};
    int d2{1};
    int p{1};
    int trials{1};
    std::uint64_t seed{0};

    double c() const { return static_cast<double>(p) / (static_cast<double>(d1) * d2); }
    void validate() const;
};

struct EstimateWithError {
    std::complex<double> mean{0, 0};
    double stderr_val{0};
    int trials{0};
};

/// i.i.d. complex gaussian entries with E|g|^2 = 1, filled row-major.
Eigen::MatrixXcd sample_gaussian(int rows, int cols, Xoshiro256pp& rng);

/// W = (G_i G_j^*)_{ij} / (d1 d2) from d1 stacked d2 x p gaussian blocks,
/// with block metadata (d1, d2). Hermitian positive semidefinite.
ComplexMatrix build_wishart(const EnsembleConfig& cfg, Xoshiro256pp& rng);

/// One sampled trial: the d1 x d1 inner blocks of d1 * W^Gamma, plus a
/// cache of block-chain products so word traces cost at most one matrix
/// product per new prefix. Safe for concurrent path_trace calls.
class TrialBlocks {
public:
    TrialBlocks(const EnsembleConfig& cfg, int trial);

    int d1() const { return d1_; }
    int m() const { return m_; }
    const Eigen::MatrixXcd& block(int i, int j) const {
        return blocks_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d1_) +
                       static_cast<std::size_t>(j)];
    }
    /// Normalized trace tau of the block product along the closed position
    /// path p_0, p_1, ..., p_r = p_0.
    std::complex<double> path_trace(const std::vector<int>& path) const;

private:
    const Eigen::MatrixXcd& chain(const std::vector<int>& path) const;

    int d1_;
    int m_;
    std::vector<Eigen::MatrixXcd> blocks_;
    mutable std::mutex cache_mu_;
    mutable std::map<std::vector<int>, Eigen::MatrixXcd> chain_cache_;
};

/// Evaluation context for a single trial: elements Y_0..Y_{d1-1} are the
/// diagonal parts of d1 * W^Gamma for that trial's sample. Does not own the
/// blocks.
class TrialYContext final : public EvaluationContext<std::complex<double>> {
public:
    explicit TrialYContext(const TrialBlocks& blocks) : blocks_(&blocks) {}

    int dim() const override { return blocks_->d1(); }
    DiagVec<std::complex<double>> moment(const DWord<std::complex<double>>& w) const override;

private:
    const TrialBlocks* blocks_;
};

/// Monte Carlo evaluation context: the oracle averages per-trial phi-tilde
/// values over all configured trials and reports slot means; stderr is
/// available through moment_stats. Trials are cached when the configured
/// matrices are small, otherwise rebuilt on demand (use for_each_trial for
/// batch work at large sizes).
class McContext final : public EvaluationContext<std::complex<double>> {
public:
    explicit McContext(EnsembleConfig cfg);

    int dim() const override { return cfg_.d1; }
    DiagVec<std::complex<double>> moment(const DWord<std::complex<double>>& w) const override;

    struct MomentStats {
        DiagVec<std::complex<double>> mean;
        std::vector<double> stderr_val;
    };
    MomentStats moment_stats(const DWord<std::complex<double>>& w) const;

    /// Evaluates many words in one pass over the trials (each trial is
    /// sampled once, whether or not it fits the cache).
    std::vector<MomentStats> moment_stats_batch(
        const std::vector<DWord<std::complex<double>>>& words) const;

    const EnsembleConfig& config() const { return cfg_; }
    std::shared_ptr<const TrialBlocks> trial(int t) const;

    /// Runs fn over every trial in order (serial, bounded memory).
    void for_each_trial(const std::function<void(int, const TrialBlocks&)>& fn) const;

private:
    EnsembleConfig cfg_;
    bool cache_trials_;
    mutable std::mutex cache_mu_;
    mutable std::vector<std::shared_ptr<const TrialBlocks>> cache_;
};

/// Word symbols for scalar-trace estimation: W, its partial transpose, and
/// the diagonal parts Y_k of d1 * W^Gamma, each optionally adjointed.
struct McWordToken {
    enum class Base { W, WGamma, Yk };
    Base base{Base::W};
    int k{0};
    bool adjoint{false};
};

/// Parses tokens like "W", "WG", "W*", "Y0", "Y2*".
std::vector<McWordToken> parse_mc_word(const std::string& text);

/// Empirical phi (normalized trace) of the word product, averaged over
/// trials with stderr. Deterministic in the seed and independent of the
/// number of worker threads.
EstimateWithError estimate_scalar_moment(const EnsembleConfig& cfg,
                                         const std::vector<McWordToken>& word,
                                         int threads = 1);

/// Ascending eigenvalues of a Hermitian matrix (deviation above 1e-8 is an
/// argument error).
std::vector<double> empirical_spectrum(const ComplexMatrix& X);

/// Mean and stderr over a set of sampled complex values.
EstimateWithError summarize(const std::vector<std::complex<double>>& values);

}  // namespace rcx
