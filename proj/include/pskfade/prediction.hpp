#pragma once

// One-step MMSE channel prediction under recursive training: the steady-state
// error from the log-spectral integral, the finite-history transient from
// Toeplitz solves, the resulting effective SNR and the Gauss-Markov regimes.

#include <optional>
#include <string_view>
#include <vector>

#include "pskfade/execution.hpp"
#include "pskfade/spectrum.hpp"

namespace pskfade::prediction {

using numerics::Complex;
using numerics::QuadratureSpec;
using spectral::SpectrumModel;

struct PredictionResult {
    double sigma2_inf = 1.0;
    double rho_eff = 0.0;
    std::vector<double> transient;  ///< sigma^2[l] for l = 1..L, empty unless requested
};

enum class Regime { Quadratic, Linear, Saturation };

std::string_view to_string(Regime regime);

struct RegimeLabel {
    Regime regime;
    double approx_sigma2;
    double approx_rho_eff;
};

/// sigma^2_inf = (exp{g(rho)} - 1) / rho, clamped to [0, 1].
double steady_state_error(const SpectrumModel& model, double rho, const QuadratureSpec& spec = {});

/// Closed form for the discrete Gauss-Markov model.
double gm_steady_state_error(double eps, double rho);

/// (1 - sigma2) rho / (sigma2 rho + 1).
double effective_snr(double sigma2, double rho);

/// Linear one-step predictor of h[l] from x'[0..l-1] = sqrt(rho) h + z':
/// estimate = sum_i weights[i] * x'[i].
struct OneStepPredictor {
    std::vector<Complex> weights;
    double error = 1.0;
};

/// `r` holds r[0..l] (at least l + 1 lags).
OneStepPredictor one_step_predictor(std::span<const Complex> r, double rho, std::size_t l);

/// sigma^2[l] = 1 - rho c_l^H (rho R_l + I)^{-1} c_l for l = 1..L.
std::vector<double> transient_error_sequence(const SpectrumModel& model, double rho, std::size_t L,
                                             Execution execution = Execution::Parallel);

/// Same as above from a precomputed autocorrelation sequence r[0..L].
std::vector<double> transient_error_sequence(std::span<const Complex> r, double rho, std::size_t L,
                                             Execution execution = Execution::Parallel);

PredictionResult predict(const SpectrumModel& model, double rho,
                         std::optional<std::size_t> transient_length = std::nullopt);

/// Sharp cutoffs at rho = eps and rho = 1/eps; ties go to Linear.
RegimeLabel classify_regime(double eps, double rho);

}  // namespace pskfade::prediction
