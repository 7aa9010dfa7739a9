#include "pskfade/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pskfade/error.hpp"

namespace pskfade::rates {

namespace {

constexpr double kPi = std::numbers::pi;

double square_integral_of(const SpectrumModel& model, const QuadratureSpec& spec) {
    require(model.is_discrete(), "low-SNR expansion needs a discrete model");
    if (auto exact = spectral::square_integral_exact(model)) return *exact;
    return spectral::square_integral(model, spec);
}

// Coefficient c of R = c rho^2; U = (c + 1/2) rho^2.
double quadratic_coefficient(const SpectrumModel& model, const QuadratureSpec& spec) {
    return 0.5 * (square_integral_of(model, spec) - 1.0);
}

void require_power(double P) {
    require(P > 0.0 && std::isfinite(P), "envelope power must be positive and finite");
}

}  // namespace

std::string_view to_string(RateUnits units) {
    return units == RateUnits::PerSymbol ? "nats/symbol" : "nats/unit-time";
}

double second_order_rate(double rho_eff) {
    require(rho_eff >= 0.0, "effective SNR must be non-negative");
    return std::max(rho_eff - rho_eff * rho_eff, 0.0);
}

double low_snr_rate(const SpectrumModel& model, double rho, const QuadratureSpec& spec) {
    require(rho >= 0.0, "SNR must be non-negative");
    return quadratic_coefficient(model, spec) * rho * rho;
}

double capacity_upper_bound_dt(const SpectrumModel& model, double rho, const QuadratureSpec& spec) {
    require(rho >= 0.0, "SNR must be non-negative");
    return (quadratic_coefficient(model, spec) + 0.5) * rho * rho;
}

double capacity_per_unit_energy_dt(const SpectrumModel& model, double rho,
                                   const QuadratureSpec& spec) {
    require(model.is_discrete(), "capacity_per_unit_energy_dt needs a discrete model");
    require(rho > 0.0 && std::isfinite(rho), "SNR must be positive and finite");
    return spectral::log_spectral_excess(model, rho, spec) / rho;
}

double high_snr_capacity_regular(double sigma2_pred, double rho) {
    require(sigma2_pred >= 0.0 && sigma2_pred <= 1.0, "sigma2_pred must lie in [0, 1]");
    if (sigma2_pred == 0.0) {
        fail(ErrorKind::NotRegular, "deterministic fading (sigma2_pred = 0) has no regular high-SNR law");
    }
    if (!(rho > std::numbers::e)) {
        fail(ErrorKind::OutOfDomain, "high-SNR formula needs rho > e");
    }
    return std::log(std::log(rho)) - 1.0 - kEulerGamma - std::log(sigma2_pred);
}

double high_snr_capacity_regular(const SpectrumModel& model, double rho, const QuadratureSpec& spec) {
    return high_snr_capacity_regular(spectral::noiseless_pred_error(model, spec), rho);
}

double high_snr_prelog_deterministic(const SpectrumModel& model) {
    return spectral::zero_set_measure(model);
}

double capacity_per_unit_energy_ct(const SpectrumModel& model, double P, const QuadratureSpec& spec) {
    require(!model.is_discrete(), "capacity_per_unit_energy_ct needs a continuous model");
    require_power(P);
    return spectral::log_spectral_excess(model, P, spec) / P;
}

double wideband_rate(const SpectrumModel& model, double P, const QuadratureSpec& spec) {
    return capacity_per_unit_energy_ct(model, P, spec) * P;
}

double capacity_upper_bound_ct(const SpectrumModel& model, double P, const QuadratureSpec& spec) {
    return capacity_per_unit_energy_ct(model, P, spec) * P;
}

double wideband_rate_gm(double eps_c, double P) {
    require(eps_c > 0.0 && eps_c < 1.0, "eps_c must lie in (0, 1)");
    require_power(P);
    const double lambda = std::abs(std::log1p(-eps_c));
    const double root = std::sqrt(1.0 + 4.0 * P / lambda) + 1.0;
    // P - (lambda/2)(sqrt(1 + x) - 1) = 4 P^2 / (lambda (sqrt(1 + x) + 1)^2)
    return 4.0 * P * P / (lambda * root * root);
}

double wideband_rate_clarke(double omega_m, double P) {
    require(omega_m > 0.0 && std::isfinite(omega_m), "omega_m must be positive");
    require_power(P);
    const double q = 2.0 * P / omega_m;
    const double log_ratio = std::log(omega_m / P);
    if (q <= 1.0) {
        const double s = std::sqrt((1.0 - q) * (1.0 + q));
        const double one_minus_s = q * q / (1.0 + s);
        return omega_m / kPi * (one_minus_s * log_ratio - s * std::log1p(-0.5 * one_minus_s));
    }
    const double r = std::sqrt((q - 1.0) * (q + 1.0));
    return omega_m / kPi * (log_ratio + r * std::atan(r));
}

double clarke_small_p_asymptote(double omega_m, double P) {
    require(omega_m > 0.0, "omega_m must be positive");
    require(P > 0.0 && P <= 1.0, "small-P asymptote needs P in (0, 1]");
    return 2.0 / (kPi * omega_m) * std::log(1.0 / P) * P * P;
}

double ct_small_p_coefficient(const SpectrumModel& model, const QuadratureSpec& spec) {
    return 0.5 * spectral::continuous_square_integral(model, spec);
}

RateBreakdown discrete_breakdown(const SpectrumModel& model, double rho, const QuadratureSpec& spec) {
    RateBreakdown out;
    out.rate_nats = low_snr_rate(model, rho, spec);
    out.capacity_ub = capacity_upper_bound_dt(model, rho, spec);
    out.cap_per_unit_energy = capacity_per_unit_energy_dt(model, rho, spec);
    out.gap = out.capacity_ub - out.rate_nats;
    out.units = RateUnits::PerSymbol;
    return out;
}

RateBreakdown wideband_breakdown(const SpectrumModel& model, double P, const QuadratureSpec& spec) {
    RateBreakdown out;
    out.cap_per_unit_energy = capacity_per_unit_energy_ct(model, P, spec);
    out.rate_nats = out.cap_per_unit_energy * P;
    out.capacity_ub = out.cap_per_unit_energy * P;
    out.gap = out.capacity_ub - out.rate_nats;
    out.units = RateUnits::PerUnitTime;
    return out;
}

}  // namespace pskfade::rates
