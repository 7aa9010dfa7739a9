#pragma once

// Mutual information of M-PSK over the coherent channel induced by channel
// prediction, and the Gaussian-input reference capacity. All values in nats.

#include <cstdint>
#include <span>
#include <vector>

#include "pskfade/execution.hpp"
#include "pskfade/numerics.hpp"
#include "pskfade/spectrum.hpp"

namespace pskfade::mi {

using numerics::Complex;
using numerics::QuadratureSpec;
using spectral::SpectrumModel;

/// M-PSK, points exp(j 2 pi m / M). M >= 3 keeps the input complex proper.
class PskConstellation {
public:
    explicit PskConstellation(int order = 4);

    int order() const { return static_cast<int>(points_.size()); }
    const std::vector<Complex>& points() const { return points_; }

private:
    std::vector<Complex> points_;
};

/// I(s; sqrt(snr) s + z), z ~ CN(0, 1), by 64 x 64 Gauss-Hermite quadrature.
/// Falls back to a fixed-seed Monte Carlo estimate if the rule ever leaves [0, log M].
double psk_awgn_mi(const PskConstellation& constellation, double snr);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

/// Plain Monte Carlo over symbols and noise; deterministic given (seed, samples).
MonteCarloEstimate psk_awgn_mi_mc(const PskConstellation& constellation, double snr,
                                  std::size_t samples, std::uint64_t seed);

/// E_g[psk_awgn_mi(rho_eff g)], g ~ Exp(1).
double psk_fading_mi(const PskConstellation& constellation, double rho_eff,
                     const QuadratureSpec& spec = {});

/// E[log(1 + rho g)], g ~ Exp(1).
double coherent_gaussian_capacity(double rho, const QuadratureSpec& spec = {});

/// PSK rate of the channel seen through the steady-state predictor.
double induced_channel_rate(const SpectrumModel& model, double rho,
                            const PskConstellation& constellation = PskConstellation(4));

/// induced_channel_rate over a grid of SNRs.
std::vector<double> induced_channel_rates(const SpectrumModel& model, std::span<const double> rhos,
                                          const PskConstellation& constellation = PskConstellation(4),
                                          Execution execution = Execution::Parallel);

}  // namespace pskfade::mi
