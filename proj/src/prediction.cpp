#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "pskfade/error.hpp"
#include "pskfade/prediction.hpp"

namespace pskfade::prediction {

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Quadratic: return "Quadratic";
        case Regime::Linear: return "Linear";
        case Regime::Saturation: return "Saturation";
    }
    return "?";
}

double steady_state_error(const SpectrumModel& model, double rho, const QuadratureSpec& spec) {
    require(model.is_discrete(), "steady_state_error needs a discrete model");
    require(rho > 0.0 && std::isfinite(rho), "rho must be positive and finite");
    // Low SNR: g = rho - excess keeps 1 - sigma2 ~ rho exact. High SNR: that
    // difference cancels, so integrate g directly.
    const double excess = spectral::log_spectral_excess(model, rho, spec);
    const double g =
        excess < 0.5 * rho ? rho - excess : spectral::log_spectral_integral(model, rho, spec);
    const double sigma2 = std::expm1(g) / rho;
    return std::clamp(sigma2, 0.0, 1.0);
}

double gm_steady_state_error(double eps, double rho) {
    require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
    require(rho > 0.0 && std::isfinite(rho), "rho must be positive and finite");
    const double a = (rho - 1.0) * eps;
    const double s = std::sqrt(a * a + 4.0 * rho * eps);
    // For a < 0 the numerator a + s cancels; (a + s)/(2 rho) = 2 eps / (s - a).
    const double sigma2 = a >= 0.0 ? (a + s) / (2.0 * rho) : 2.0 * eps / (s - a);
    return std::clamp(sigma2, 0.0, 1.0);
}

double effective_snr(double sigma2, double rho) {
    require(sigma2 >= 0.0 && sigma2 <= 1.0, "sigma2 must lie in [0, 1]");
    require(rho > 0.0, "rho must be positive");
    return (1.0 - sigma2) * rho / (sigma2 * rho + 1.0);
}

OneStepPredictor one_step_predictor(std::span<const Complex> r, double rho, std::size_t l) {
    require(l >= 1, "predictor needs at least one observation");
    require(r.size() >= l + 1, "autocorrelation sequence too short");
    require(rho > 0.0, "rho must be positive");

    // Observations x'[i] = sqrt(rho) h[i] + z'[i], i = 0..l-1. With
    // p_i = E[h[l] x'[i]^*] = sqrt(rho) r[l-i] the normal equations read
    // Sigma conj(b) = conj(p), Sigma = rho R_l + I.
    const double root = std::sqrt(rho);
    numerics::ToeplitzSystem system;
    system.first_column.resize(l);
    system.rhs.resize(l);
    for (std::size_t k = 0; k < l; ++k) system.first_column[k] = rho * r[k];
    system.first_column[0] += 1.0;
    for (std::size_t i = 0; i < l; ++i) system.rhs[i] = std::conj(root * r[l - i]);

    const std::vector<Complex> v = numerics::toeplitz_solve(system);
    OneStepPredictor out;
    out.weights.resize(l);
    double explained = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        out.weights[i] = std::conj(v[i]);
        explained += std::real(v[i] * root * r[l - i]);
    }
    out.error = std::clamp(std::real(r[0]) - explained, 0.0, 1.0);
    return out;
}

std::vector<double> transient_error_sequence(std::span<const Complex> r, double rho, std::size_t L,
                                             Execution execution) {
    require(L >= 1, "L must be at least 1");
    require(r.size() >= L + 1, "autocorrelation sequence too short");
    std::vector<double> sigma2(L);
    const auto n = static_cast<std::ptrdiff_t>(L);
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 4) if (execution == Execution::Parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            sigma2[i] = one_step_predictor(r, rho, static_cast<std::size_t>(i) + 1).error;
        } catch (...) {
#pragma omp critical(pskfade_transient_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t l = 1; l < L; ++l) {
        if (sigma2[l] > sigma2[l - 1] + 1e-8) {
            fail(ErrorKind::NonConvergence,
                 "prediction error increased at l = " + std::to_string(l + 1));
        }
    }
    return sigma2;
}

std::vector<double> transient_error_sequence(const SpectrumModel& model, double rho, std::size_t L,
                                             Execution execution) {
    require(model.is_discrete(), "transient_error_sequence needs a discrete model");
    require(L >= 1, "L must be at least 1");
    const auto r = spectral::autocorrelation_sequence(model, L + 1);
    return transient_error_sequence(r, rho, L, execution);
}

PredictionResult predict(const SpectrumModel& model, double rho,
                         std::optional<std::size_t> transient_length) {
    PredictionResult out;
    out.sigma2_inf = steady_state_error(model, rho);
    out.rho_eff = effective_snr(out.sigma2_inf, rho);
    if (transient_length) out.transient = transient_error_sequence(model, rho, *transient_length);
    return out;
}

RegimeLabel classify_regime(double eps, double rho) {
    require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
    require(rho > 0.0, "rho must be positive");
    if (rho < eps) return {Regime::Quadratic, 1.0 - rho / eps, rho * rho / eps};
    if (rho > 1.0 / eps) return {Regime::Saturation, eps, 1.0 / eps};
    return {Regime::Linear, std::sqrt(eps / rho), rho};
}

}  // namespace pskfade::prediction
