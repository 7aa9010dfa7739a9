#pragma once

// Achievable rates and capacity bounds. Low-SNR and wideband quantities are
// the leading terms of their expansions, not exact mutual information; the
// exact PSK mutual information lives in mutual_info.hpp.

#include <string_view>

#include "pskfade/spectrum.hpp"

namespace pskfade::rates {

using numerics::QuadratureSpec;
using spectral::SpectrumModel;

inline constexpr double kEulerGamma = 0.57721566490153286061;

enum class RateUnits { PerSymbol, PerUnitTime };

std::string_view to_string(RateUnits units);

struct RateBreakdown {
    double rate_nats = 0.0;
    double capacity_ub = 0.0;
    double cap_per_unit_energy = 0.0;
    double gap = 0.0;
    RateUnits units = RateUnits::PerSymbol;
};

/// max(rho_eff - rho_eff^2, 0).
double second_order_rate(double rho_eff);

/// (1/2) [(1/2pi) integral S^2 - 1] rho^2. Exact square integrals are used
/// for the parametric families, quadrature otherwise.
double low_snr_rate(const SpectrumModel& model, double rho, const QuadratureSpec& spec = {});

/// (1/2) (1/2pi) integral S^2 rho^2; exceeds low_snr_rate by rho^2 / 2.
double capacity_upper_bound_dt(const SpectrumModel& model, double rho,
                               const QuadratureSpec& spec = {});

/// 1 - g(rho)/rho for a discrete model at peak SNR rho.
double capacity_per_unit_energy_dt(const SpectrumModel& model, double rho,
                                   const QuadratureSpec& spec = {});

/// loglog(rho) - 1 - gamma + log(1/sigma2_pred), valid for rho > e.
/// Throws NotRegular when sigma2_pred = 0.
double high_snr_capacity_regular(double sigma2_pred, double rho);
double high_snr_capacity_regular(const SpectrumModel& model, double rho,
                                 const QuadratureSpec& spec = {});

/// High-SNR pre-log of a deterministic process: the normalized measure of {S = 0}.
double high_snr_prelog_deterministic(const SpectrumModel& model);

/// 1 - (1/(2pi P)) integral log(1 + P S_c) dw for a continuous model.
double capacity_per_unit_energy_ct(const SpectrumModel& model, double P,
                                   const QuadratureSpec& spec = {});

/// Wideband limit of the PSK rate, capacity_per_unit_energy_ct * P.
double wideband_rate(const SpectrumModel& model, double P, const QuadratureSpec& spec = {});

/// Peak-envelope capacity bound per unit time; the same expression as wideband_rate.
double capacity_upper_bound_ct(const SpectrumModel& model, double P,
                               const QuadratureSpec& spec = {});

/// P - (lambda/2)(sqrt(1 + 4P/lambda) - 1), lambda = |log(1 - eps_c)|.
double wideband_rate_gm(double eps_c, double P);

/// Closed form for the Clarke spectrum, split at P = omega_m / 2.
double wideband_rate_clarke(double omega_m, double P);

/// (2 / (pi omega_m)) log(1/P) P^2 for P in (0, 1].
double clarke_small_p_asymptote(double omega_m, double P);

/// (1/2)(1/2pi) integral S_c^2 dw; throws Divergent for Clarke.
double ct_small_p_coefficient(const SpectrumModel& model, const QuadratureSpec& spec = {});

RateBreakdown discrete_breakdown(const SpectrumModel& model, double rho,
                                 const QuadratureSpec& spec = {});
RateBreakdown wideband_breakdown(const SpectrumModel& model, double P,
                                 const QuadratureSpec& spec = {});

}  // namespace pskfade::rates
