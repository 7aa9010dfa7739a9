#pragma once

// Monte Carlo simulation of recursive training over L interleaved
// sub-channels: a pilot on sub-channel 0, then MMSE prediction of each next
// fading value from phase-compensated observations with genie decisions.

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "pskfade/execution.hpp"
#include "pskfade/mutual_info.hpp"
#include "pskfade/spectrum.hpp"

namespace pskfade::sim {

using numerics::Complex;
using spectral::SpectrumModel;

/// How non-Markov spectra are synthesized. `Circulant` throws
/// EmbeddingFailure when the embedding has negative eigenvalues (spectra with
/// exact zeros or jumps); `Automatic` then falls back to a dense square-root
/// factor of the length x length covariance.
enum class SynthesisMethod { Automatic, Circulant, Dense };

/// Draws stationary CN(0, 1) sequences with the model's autocorrelation.
/// Gauss-Markov models always use the exact AR(1) recursion.
class FadingSynthesizer {
public:
    FadingSynthesizer(const SpectrumModel& model, std::size_t length,
                      SynthesisMethod method = SynthesisMethod::Automatic);
    ~FadingSynthesizer();
    FadingSynthesizer(FadingSynthesizer&&) noexcept;
    FadingSynthesizer& operator=(FadingSynthesizer&&) noexcept;

    std::size_t length() const { return length_; }
    /// The method actually in use (`Automatic` is resolved at construction).
    SynthesisMethod method() const { return method_; }
    std::vector<Complex> draw(std::mt19937_64& rng) const;

private:
    struct Plan;
    void build_circulant(const SpectrumModel& model);
    void build_dense(const SpectrumModel& model);
    std::size_t length_;
    double ar_coefficient_ = 0.0;  ///< sqrt(1 - eps) for the AR(1) path
    bool recursive_ = false;
    SynthesisMethod method_ = SynthesisMethod::Automatic;
    std::vector<double> root_eigen_;  ///< sqrt(lambda_j / m) for circulant embedding
    std::vector<Complex> factor_;     ///< row-major A with A A^H = covariance, dense path
    std::unique_ptr<Plan> plan_;
};

std::vector<Complex> synthesize_fading(const SpectrumModel& model, std::size_t n, std::uint64_t seed);

/// The per-trial generator: seeded from (seed, trial) so trials are order independent.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

struct SimConfig {
    SpectrumModel model = SpectrumModel::memoryless();
    double rho = 1.0;
    std::size_t L = 2;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    mi::PskConstellation constellation{4};
    bool pilots_only = false;  ///< every sub-channel carries the pilot symbol 1
    Execution execution = Execution::Parallel;

    void validate() const;
};

struct SimResult {
    std::vector<double> empirical_sigma2;  ///< mean |h[l] - estimate|^2, l = 0..L-1
    std::vector<double> standard_error;
    std::vector<double> analytic_sigma2;   ///< 1 at l = 0, then the Toeplitz sequence
    std::vector<double> empirical_rho_eff;
    std::uint64_t rng_seed = 0;
};

/// Trials run in fixed blocks whose partial sums are combined in block order,
/// so the result is bit-identical for any thread count and for Execution::Serial.
SimResult run_recursive_training(const SimConfig& config);

}  // namespace pskfade::sim
