#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "pskfade/error.hpp"
#include "pskfade/prediction.hpp"
#include "pskfade/rates.hpp"

using namespace pskfade;
using namespace pskfade::rates;
using spectral::SpectrumModel;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;
}

std::vector<SpectrumModel> discrete_models() {
    return {SpectrumModel::memoryless(),       SpectrumModel::gauss_markov_d(0.5),
            SpectrumModel::gauss_markov_d(1e-2), SpectrumModel::gauss_markov_d(1e-4),
            SpectrumModel::notched(2),         SpectrumModel::notched(9),
            SpectrumModel::peaked(3),          SpectrumModel::peaked(256)};
}

const double kMachine = 4.0 * std::numeric_limits<double>::epsilon();

}  // namespace

TEST_CASE("second_order_rate") {
    CHECK(second_order_rate(0.0) == 0.0);
    CHECK(second_order_rate(0.01) == doctest::Approx(0.0099).epsilon(1e-14));
    CHECK(second_order_rate(2.0) == 0.0);
    CHECK(kind_of([] { second_order_rate(-1.0); }) == ErrorKind::InvalidArgument);

    const double rho = 0.0316;
    const double sigma2 = prediction::gm_steady_state_error(1e-4, rho);
    const double ratio = second_order_rate(prediction::effective_snr(sigma2, rho)) / rho;
    CHECK(ratio == doctest::Approx(0.91).epsilon(0.02 / 0.91));
}

TEST_CASE("low_snr_rate and the upper bound") {
    for (double rho : {1e-3, 0.1, 1.0}) CHECK(low_snr_rate(SpectrumModel::memoryless(), rho) == 0.0);
    CHECK(low_snr_rate(SpectrumModel::gauss_markov_d(0.01), 1e-3) ==
          doctest::Approx(9.9e-5).epsilon(1e-12));
    for (double eps : {0.5, 1e-2, 1e-4}) {
        for (double rho : {1e-4, 0.3, 2.0}) {
            CHECK(low_snr_rate(SpectrumModel::gauss_markov_d(eps), rho) ==
                  doctest::Approx((1.0 / eps - 1.0) * rho * rho).epsilon(kMachine));
        }
    }
    double previous = 1.0;
    for (int n = 2; n <= 4096; n *= 4) {
        const double c = low_snr_rate(SpectrumModel::notched(n), 1.0);
        CHECK(c < previous);
        previous = c;
    }
    CHECK(previous < 1e-3);

    CHECK(capacity_upper_bound_dt(SpectrumModel::memoryless(), 0.1) == doctest::Approx(0.005));
    CHECK(capacity_upper_bound_dt(SpectrumModel::gauss_markov_d(0.5), 0.1) ==
          doctest::Approx(0.015).epsilon(1e-14));

    // Tabulated input goes through quadrature and agrees with the exact path.
    std::vector<spectral::SpectrumPoint> grid;
    const auto peaked = SpectrumModel::peaked(4);
    for (int i = 0; i <= 100; ++i) {
        const double w = std::numbers::pi * i / 100.0;
        grid.push_back({w, spectral::eval_spectrum(peaked, w)});
    }
    const auto tab = SpectrumModel::tabulated_d(grid);
    CHECK(low_snr_rate(tab, 1.0) == doctest::Approx(0.5 * (spectral::square_integral(tab) - 1.0)));
}

TEST_CASE("gap identity U - R = rho^2/2") {
    for (const auto& m : discrete_models()) {
        for (double rho : {1e-6, 1e-3, 0.1, 1.0, 10.0}) {
            const double u = capacity_upper_bound_dt(m, rho);
            const double r = low_snr_rate(m, rho);
            CHECK(std::abs((u - r) - 0.5 * rho * rho) <= kMachine * u);
            const auto b = discrete_breakdown(m, rho);
            CHECK(b.gap >= 0.0);
            CHECK(b.units == RateUnits::PerSymbol);
        }
    }
}

TEST_CASE("capacity per unit energy, discrete") {
    CHECK(capacity_per_unit_energy_dt(SpectrumModel::memoryless(), 1.0) ==
          doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
    CHECK(capacity_per_unit_energy_dt(SpectrumModel::memoryless(), 1.0) ==
          doctest::Approx(0.306853).epsilon(1e-6));
    CHECK(capacity_per_unit_energy_dt(SpectrumModel::gauss_markov_d(0.25), 1.0) ==
          doctest::Approx(0.594535).epsilon(1e-6));
    for (const auto& m : discrete_models()) {
        double previous = 0.0;
        for (double rho = 1e-8; rho <= 1e8; rho *= 100.0) {
            const double c = capacity_per_unit_energy_dt(m, rho);
            CHECK(c >= previous - 1e-12);
            CHECK(c < 1.0);
            previous = c;
        }
        // C-dot = (1/2) Q rho + O(rho^2)
        const double q = *spectral::square_integral_exact(m);
        CHECK(capacity_per_unit_energy_dt(m, 1e-8) / (0.5 * q * 1e-8) ==
              doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("high-SNR reference formulas") {
    CHECK(high_snr_capacity_regular(1.0, std::exp(std::numbers::e)) ==
          doctest::Approx(-kEulerGamma).epsilon(1e-12));
    // loglog(100) - 1 - gamma + log 2
    CHECK(high_snr_capacity_regular(0.5, 100.0) == doctest::Approx(0.643111).epsilon(1e-6));
    CHECK(kind_of([] { high_snr_capacity_regular(SpectrumModel::notched(4), 100.0); }) ==
          ErrorKind::NotRegular);
    CHECK(kind_of([] { high_snr_capacity_regular(0.5, 2.0); }) == ErrorKind::OutOfDomain);
    CHECK(high_snr_capacity_regular(SpectrumModel::gauss_markov_d(0.1), 1e4) ==
          doctest::Approx(high_snr_capacity_regular(0.1, 1e4)).epsilon(1e-7));

    CHECK(high_snr_prelog_deterministic(SpectrumModel::memoryless()) == 0.0);
    CHECK(high_snr_prelog_deterministic(SpectrumModel::notched(4)) == doctest::Approx(0.25));
    CHECK(high_snr_prelog_deterministic(SpectrumModel::gauss_markov_d(0.3)) == 0.0);
}

TEST_CASE("wideband rate equals capacity per unit energy times P") {
    const std::vector<SpectrumModel> models{SpectrumModel::gauss_markov_c(0.9),
                                            SpectrumModel::gauss_markov_c(1e-2),
                                            SpectrumModel::clarke(100.0), SpectrumModel::clarke(1.0)};
    for (const auto& m : models) {
        for (double P : {1e-3, 1e-1, 1.0, 10.0, 1e3}) {
            const double c = capacity_per_unit_energy_ct(m, P);
            CHECK(wideband_rate(m, P) == c * P);
            CHECK(capacity_upper_bound_ct(m, P) == wideband_rate(m, P));
            CHECK(c >= 0.0);
            CHECK(c < 1.0);
            const auto b = wideband_breakdown(m, P);
            CHECK(b.gap == 0.0);
            CHECK(b.rate_nats == wideband_rate(m, P));
        }
    }
    CHECK(kind_of([] { wideband_rate(SpectrumModel::memoryless(), 1.0); }) ==
          ErrorKind::InvalidArgument);
}

TEST_CASE("continuous Gauss-Markov closed form") {
    CHECK(wideband_rate_gm(0.9, 1.0) == doctest::Approx(0.24654594376645345).epsilon(1e-12));
    CHECK(wideband_rate_gm(0.9, 1.0) == doctest::Approx(0.24655).epsilon(1e-5));
    const auto gm = SpectrumModel::gauss_markov_c(0.9);
    for (double P : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3}) {
        CHECK(wideband_rate(gm, P) == doctest::Approx(wideband_rate_gm(0.9, P)).epsilon(1e-6));
    }
    for (double eps_c : {0.9, 0.3}) {
        const double lambda = std::abs(std::log1p(-eps_c));
        CHECK(wideband_rate_gm(eps_c, 1e-7) / (1e-14 / lambda) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(ct_small_p_coefficient(SpectrumModel::gauss_markov_c(eps_c)) ==
              doctest::Approx(1.0 / lambda).epsilon(1e-7));
    }
    CHECK(ct_small_p_coefficient(gm) == doctest::Approx(0.434294).epsilon(1e-6));
    const double coeff = ct_small_p_coefficient(gm);
    CHECK(wideband_rate(gm, 1e-5) / (coeff * 1e-10) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(wideband_rate_gm(0.9, 1e8) / 1e8 == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(kind_of([] { wideband_rate_gm(1.0, 1.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { wideband_rate_gm(0.5, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Clarke closed form") {
    const double wm = 100.0;
    const double half = wm / 2.0;
    CHECK(wideband_rate_clarke(wm, half) == doctest::Approx(wm / std::numbers::pi * std::log(2.0)));
    CHECK(wideband_rate_clarke(wm, half) == doctest::Approx(22.0636).epsilon(1e-5));
    const double below = wideband_rate_clarke(wm, std::nextafter(half, 0.0));
    const double above = wideband_rate_clarke(wm, std::nextafter(half, 1e9));
    CHECK(std::abs(below - above) <= 1e-9 * wideband_rate_clarke(wm, half));

    CHECK(wideband_rate_clarke(wm, 1e-3) == doctest::Approx(7.647665875e-8).epsilon(1e-8));
    CHECK(wideband_rate_clarke(wm, 1e-3) == doctest::Approx(7.648e-8).epsilon(1e-3));
    const double expansion = 2.0 / (std::numbers::pi * wm) * 1e-6 *
                             (std::log(1e3) + std::log(wm) + 0.5);
    CHECK(wideband_rate_clarke(wm, 1e-3) == doctest::Approx(expansion).epsilon(1e-4));
    CHECK(wideband_rate_clarke(wm, 1e6) / 1e6 == doctest::Approx(1.0).epsilon(0.02));

    const auto clarke = SpectrumModel::clarke(wm);
    for (double P : {1e-3, 1e-1, 1.0, 10.0, 1e3}) {
        CHECK(wideband_rate(clarke, P) == doctest::Approx(wideband_rate_clarke(wm, P)).epsilon(1e-6));
    }
    CHECK(kind_of([&] { ct_small_p_coefficient(clarke); }) == ErrorKind::Divergent);
}

TEST_CASE("Clarke small-P asymptote") {
    CHECK(clarke_small_p_asymptote(100.0, 1e-3) == doctest::Approx(4.3976e-8).epsilon(1e-4));
    CHECK(clarke_small_p_asymptote(100.0, 1.0) == 0.0);
    CHECK(kind_of([] { clarke_small_p_asymptote(100.0, 2.0); }) == ErrorKind::InvalidArgument);
    // The ratio approaches 1 slowly, like 1 + O(1/log(1/P)).
    double previous = 1e9;
    for (double P = 1e-3; P >= 1e-150; P *= 1e-21) {
        const double ratio = wideband_rate_clarke(100.0, P) / clarke_small_p_asymptote(100.0, P);
        CHECK(ratio > 1.0);
        CHECK(ratio < previous);
        previous = ratio;
    }
    CHECK(previous < 1.02);
}

TEST_CASE("asymptotic sandwich: second-order rate over the low-SNR rate -> 1") {
    for (double eps : {1e-2, 1e-4}) {
        const auto model = SpectrumModel::gauss_markov_d(eps);
        double previous_error = 1e9;
        for (double scale : {1e-1, 1e-2, 1e-3}) {
            const double rho = eps * scale;
            const double rho_eff =
                prediction::effective_snr(prediction::gm_steady_state_error(eps, rho), rho);
            const double error = std::abs(second_order_rate(rho_eff) / low_snr_rate(model, rho) - 1.0);
            CHECK(error < previous_error);
            previous_error = error;
        }
        CHECK(previous_error < 5e-3);
    }
}
