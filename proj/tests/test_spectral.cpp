#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pskfade/error.hpp"
#include "pskfade/spectrum.hpp"

using namespace pskfade;
using namespace pskfade::spectral;
using std::numbers::pi;

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

double peaked_square(int n) {
    const double root = std::sqrt(static_cast<double>(n));
    const double floor = (root - 1.0) / (root - 1.0 / n);
    const double width = 1.0 / (n * root);
    return n * n * width + floor * floor * (1.0 - width);
}

double peaked_pred(int n) {
    const double root = std::sqrt(static_cast<double>(n));
    const double floor = (root - 1.0) / (root - 1.0 / n);
    const double width = 1.0 / (n * root);
    return std::exp(width * std::log(n) + (1.0 - width) * std::log(floor));
}

// Midpoint Riemann sum of (1/2pi) * integral over [-pi, pi].
double riemann(const SpectrumModel& m, double (*h)(double), int points = 400000) {
    double sum = 0.0;
    const double step = 2.0 * pi / points;
    for (int i = 0; i < points; ++i) sum += h(eval_spectrum(m, -pi + (i + 0.5) * step));
    return sum * step / (2.0 * pi);
}

std::vector<SpectrumModel> discrete_models() {
    return {SpectrumModel::memoryless(),      SpectrumModel::gauss_markov_d(1.0),
            SpectrumModel::gauss_markov_d(0.5), SpectrumModel::gauss_markov_d(1e-2),
            SpectrumModel::gauss_markov_d(1e-4), SpectrumModel::notched(2),
            SpectrumModel::notched(7),        SpectrumModel::peaked(2),
            SpectrumModel::peaked(16),        SpectrumModel::peaked(1024)};
}

}  // namespace

TEST_CASE("eval_spectrum examples") {
    CHECK(eval_spectrum(SpectrumModel::memoryless(), 0.3) == 1.0);
    CHECK(eval_spectrum(SpectrumModel::gauss_markov_d(1.0), 2.0) == doctest::Approx(1.0));
    CHECK(eval_spectrum(SpectrumModel::gauss_markov_d(0.5), 0.0) ==
          doctest::Approx(5.828427).epsilon(1e-6));
    CHECK(eval_spectrum(SpectrumModel::notched(4), 3.0) == 0.0);
    CHECK(eval_spectrum(SpectrumModel::notched(4), 1.0) == doctest::Approx(4.0 / 3.0));
    CHECK(eval_spectrum(SpectrumModel::clarke(100.0), 150.0) == 0.0);
    CHECK(eval_spectrum(SpectrumModel::clarke(100.0), 0.0) == doctest::Approx(0.02));
    CHECK(std::isinf(eval_spectrum(SpectrumModel::clarke(100.0), 100.0)));
    CHECK(kind_of([] { eval_spectrum(SpectrumModel::memoryless(), 3.2); }) ==
          ErrorKind::OutOfDomain);
}

TEST_CASE("Gauss-Markov spectrum matches the summed AR(1) autocorrelation") {
    const double eps = 0.5, omega = 0.7;
    double sum = 1.0;
    for (int k = 1; k < 400; ++k) sum += 2.0 * std::pow(1.0 - eps, 0.5 * k) * std::cos(k * omega);
    CHECK(eval_spectrum(SpectrumModel::gauss_markov_d(eps), omega) ==
          doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("factories reject bad parameters") {
    CHECK(kind_of([] { SpectrumModel::gauss_markov_d(0.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectrumModel::gauss_markov_d(1.5); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectrumModel::notched(1); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectrumModel::peaked(1); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectrumModel::gauss_markov_c(1.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectrumModel::clarke(-1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("unit power for every built-in family") {
    for (const auto& m : discrete_models()) {
        CAPTURE(m.describe());
        CHECK(unit_power(m) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(m.is_even());
    }
    for (const auto& m : {SpectrumModel::gauss_markov_c(0.9), SpectrumModel::gauss_markov_c(1e-3),
                          SpectrumModel::clarke(100.0), SpectrumModel::clarke(0.5)}) {
        CAPTURE(m.describe());
        CHECK(unit_power(m) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("square_integral closed forms and Riemann oracle") {
    CHECK(square_integral(SpectrumModel::memoryless()) == doctest::Approx(1.0));
    for (double eps : {0.5, 1e-1, 1e-2, 1e-3}) {
        CHECK(square_integral(SpectrumModel::gauss_markov_d(eps)) ==
              doctest::Approx(2.0 / eps - 1.0).epsilon(1e-8));
    }
    for (int n : {2, 3, 4, 10, 100}) {
        CHECK(square_integral(SpectrumModel::notched(n)) ==
              doctest::Approx(n / (n - 1.0)).epsilon(1e-10));
    }
    CHECK(square_integral(SpectrumModel::peaked(4)) == doctest::Approx(2.285714).epsilon(1e-6));
    for (int n = 2; n <= 1024; n *= 2) {
        CHECK(square_integral(SpectrumModel::peaked(n)) ==
              doctest::Approx(peaked_square(n)).epsilon(1e-9));
    }
    const auto gm = SpectrumModel::gauss_markov_d(0.3);
    CHECK(square_integral(gm) ==
          doctest::Approx(riemann(gm, [](double s) { return s * s; })).epsilon(1e-8));
}

TEST_CASE("square_integral >= 1 with equality only for flat spectra") {
    for (const auto& m : discrete_models()) {
        const double q = square_integral(m);
        const bool flat = m.as<MemorylessD>() != nullptr ||
                          (m.as<GaussMarkovD>() != nullptr && m.as<GaussMarkovD>()->eps == 1.0);
        if (flat) {
            CHECK(q == doctest::Approx(1.0).epsilon(1e-12));
        } else {
            CHECK(q > 1.0 + 1e-6);
        }
    }
}

TEST_CASE("example families: limits in n") {
    double previous_notched = 1e9, previous_peaked = 0.0;
    for (int n = 2; n <= 1024; n *= 2) {
        const double qn = square_integral(SpectrumModel::notched(n));
        const double qp = square_integral(SpectrumModel::peaked(n));
        CHECK(qn < previous_notched);
        CHECK(qp > previous_peaked);
        previous_notched = qn;
        previous_peaked = qp;
        CHECK(noiseless_pred_error(SpectrumModel::notched(n)) == 0.0);
    }
    CHECK(previous_notched == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(previous_peaked > 30.0);

    // sigma^2_pred of the peaked family dips to a minimum at n = 4 and only
    // then increases towards 1.
    CHECK(noiseless_pred_error(SpectrumModel::peaked(4)) == doctest::Approx(0.72876).epsilon(1e-4));
    double previous = 0.0;
    for (int n = 4; n <= 1024; n *= 2) {
        const double p = noiseless_pred_error(SpectrumModel::peaked(n));
        CHECK(p == doctest::Approx(peaked_pred(n)).epsilon(1e-9));
        CHECK(p > previous);
        previous = p;
    }
    CHECK(previous > 0.96);
    CHECK(noiseless_pred_error(SpectrumModel::peaked(2)) >
          noiseless_pred_error(SpectrumModel::peaked(4)));
}

TEST_CASE("log_spectral_integral") {
    const auto mem = SpectrumModel::memoryless();
    CHECK(log_spectral_integral(mem, 0.0) == 0.0);
    for (double rho : {1e-3, 1.0, 1e3}) {
        CHECK(log_spectral_integral(mem, rho) == doctest::Approx(std::log1p(rho)).epsilon(1e-12));
    }
    CHECK(log_spectral_integral(SpectrumModel::gauss_markov_d(0.25), 1.0) ==
          doctest::Approx(std::log(1.5)).epsilon(1e-10));

    for (const auto& m : discrete_models()) {
        for (double rho = 1e-6; rho <= 1e6; rho *= 10.0) {
            const double g = log_spectral_integral(m, rho);
            CHECK(g >= 0.0);
            CHECK(g <= rho * (1.0 + 1e-12));
            const double excess = log_spectral_excess(m, rho);
            CHECK(excess >= 0.0);
            CHECK(std::abs((rho - excess) - g) <= 1e-8 * rho);
        }
    }
}

TEST_CASE("noiseless prediction error and zero-set measure") {
    CHECK(noiseless_pred_error(SpectrumModel::memoryless()) == 1.0);
    // Regular AR(1): sigma^2_pred = eps.
    CHECK(noiseless_pred_error(SpectrumModel::gauss_markov_d(0.1)) ==
          doctest::Approx(0.1).epsilon(1e-8));
    CHECK(zero_set_measure(SpectrumModel::memoryless()) == 0.0);
    CHECK(zero_set_measure(SpectrumModel::gauss_markov_d(0.01)) == 0.0);
    CHECK(zero_set_measure(SpectrumModel::notched(4)) == doctest::Approx(0.25));
    CHECK(zero_set_measure(SpectrumModel::notched(10)) == doctest::Approx(0.1));
}

TEST_CASE("autocorrelation") {
    for (const auto& m : discrete_models()) {
        CHECK(std::abs(autocorrelation(m, 0.0) - 1.0) < 1e-12);
    }
    CHECK(std::abs(autocorrelation(SpectrumModel::gauss_markov_c(0.9), 2.0) - 0.1) < 1e-15);
    CHECK(std::abs(autocorrelation(SpectrumModel::gauss_markov_d(0.19), 1.0) - 0.9) < 1e-15);

    // Notched(n): r[k] = sin(k pi (1 - 1/n)) / (k pi (1 - 1/n)) * n/(n-1) * (1 - 1/n).
    const int n = 4;
    const double edge = pi - pi / n;
    for (int k = 1; k < 6; ++k) {
        const double expected = std::sin(k * edge) / (k * pi) * n / (n - 1.0);
        CHECK(std::abs(autocorrelation(SpectrumModel::notched(n), k) - expected) < 1e-10);
    }
    CHECK(kind_of([] { autocorrelation(SpectrumModel::memoryless(), 0.5); }) ==
          ErrorKind::OutOfDomain);

    // Clarke: J0(omega_m tau), and a dense Riemann sum of (1/2pi) int S cos(w tau).
    const auto clarke = SpectrumModel::clarke(100.0);
    CHECK(autocorrelation(clarke, 0.01).real() ==
          doctest::Approx(std::cyl_bessel_j(0.0, 1.0)).epsilon(1e-10));
    CHECK(autocorrelation(clarke, 0.01).real() == doctest::Approx(0.7651976865579665).epsilon(1e-10));
    const int points = 1000000;
    double sum = 0.0;
    const double step = (pi / 2.0) / points;
    for (int i = 0; i < points; ++i) {
        const double theta = (i + 0.5) * step;
        const double w = 100.0 * std::sin(theta);
        // dw = omega_m cos(theta) d theta removes the edge singularity.
        sum += eval_spectrum(clarke, w) * std::cos(w * 0.01) * 100.0 * std::cos(theta);
    }
    CHECK(autocorrelation(clarke, 0.01).real() == doctest::Approx(sum * step / pi).epsilon(1e-8));
    for (double tau : {0.0, 0.05, 0.37, 2.0}) {
        CHECK(autocorrelation(clarke, tau).real() ==
              doctest::Approx(std::cyl_bessel_j(0.0, 100.0 * tau)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("Clarke substitution agrees with direct quadrature away from the edge") {
    const auto clarke = SpectrumModel::clarke(100.0);
    const double direct = numerics::integrate_finite(
        [&](double w) { return std::log1p(5.0 * eval_spectrum(clarke, w)); }, 0.0, 90.0);
    const double substituted = numerics::integrate_finite(
        [&](double theta) {
            const double w = 100.0 * std::sin(theta);
            return std::log1p(5.0 * eval_spectrum(clarke, w)) * 100.0 * std::cos(theta);
        },
        0.0, std::asin(0.9));
    CHECK(substituted == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("continuous square integral") {
    for (double eps_c : {0.9, 0.5, 1e-2}) {
        const double lambda = std::abs(std::log1p(-eps_c));
        CHECK(continuous_square_integral(SpectrumModel::gauss_markov_c(eps_c)) ==
              doctest::Approx(2.0 / lambda).epsilon(1e-7));
    }
    CHECK(kind_of([] { continuous_square_integral(SpectrumModel::clarke(100.0)); }) ==
          ErrorKind::Divergent);
}

TEST_CASE("double integral of the autocorrelation") {
    const auto gm = SpectrumModel::gauss_markov_c(0.9);
    for (double T : {1e-6, 1e-3, 0.3, 2.0, 50.0}) {
        const double b = 0.5 * std::abs(std::log(0.1));
        const double closed = 2.0 / (b * b) * (b * T - 1.0 + std::exp(-b * T));
        const double quad = numerics::integrate_finite(
            [&](double tau) { return 2.0 * (T - tau) * std::exp(-b * tau); }, 0.0, T);
        CHECK(double_integral_autocorrelation(gm, T) == doctest::Approx(quad).epsilon(1e-9));
        if (T > 1e-2) CHECK(double_integral_autocorrelation(gm, T) == doctest::Approx(closed));
    }
    // Clarke goes through the quadrature path.
    const auto clarke = SpectrumModel::clarke(10.0);
    const double T = 0.05;
    const double oracle = numerics::integrate_finite(
        [&](double tau) { return 2.0 * (T - tau) * std::cyl_bessel_j(0.0, 10.0 * tau); }, 0.0, T);
    CHECK(double_integral_autocorrelation(clarke, T) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("discretize: unit power and the small-T identities") {
    const auto gm = SpectrumModel::gauss_markov_c(0.9);
    const auto ch = discretize(gm, 1e-4, 1.0);
    CHECK(ch.alias_power == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(unit_power(ch.spectrum) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ch.rho / (ch.P * ch.T) <= 1.0);
    CHECK(ch.rho / (ch.P * ch.T) >= 1.0 - 1e-3);

    // g_d(rho) / T -> (1/2pi) integral log(1 + P S_c) dw.
    const double lhs = log_spectral_integral(ch.spectrum, ch.rho) / ch.T;
    const double rhs = 1.0 - log_spectral_excess(gm, 1.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-2));

    double previous = 1.0;
    for (double T : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double gap = std::abs(discretize(gm, T, 1.0).rho / T - 1.0);
        CHECK(gap < previous);
        previous = gap;
    }

    const auto clarke = discretize(SpectrumModel::clarke(100.0), 1e-3, 2.0);
    CHECK(clarke.alias_power == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(unit_power(clarke.spectrum) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(clarke.rho / (clarke.P * clarke.T) == doctest::Approx(1.0).epsilon(1e-2));

    CHECK(kind_of([&] { discretize(SpectrumModel::memoryless(), 1.0, 1.0); }) ==
          ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { discretize(gm, -1.0, 1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("tabulated spectra") {
    // A triangle on [0, pi] rescaled to unit power.
    std::vector<SpectrumPoint> grid{{0.0, 2.0}, {pi / 2.0, 1.0}, {pi, 0.0}};
    const auto tab = SpectrumModel::tabulated_d(grid);
    CHECK(unit_power(tab) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eval_spectrum(tab, -pi / 4.0) == doctest::Approx(eval_spectrum(tab, pi / 4.0)));
    CHECK(zero_set_measure(tab) < 1e-9);

    std::vector<SpectrumPoint> notch{{0.0, 1.0}, {2.0, 1.0}, {2.0 + 1e-9, 0.0}, {pi, 0.0}};
    const auto tn = SpectrumModel::tabulated_d(notch);
    CHECK(zero_set_measure(tn) == doctest::Approx((pi - 2.0) / pi).epsilon(1e-6));
    CHECK(noiseless_pred_error(tn) == 0.0);

    // Tabulated Gauss-Markov reproduces the parametric square integral.
    const auto gm = SpectrumModel::gauss_markov_d(0.1);
    std::vector<SpectrumPoint> fine;
    for (int i = 0; i <= 20000; ++i) {
        const double w = pi * i / 20000.0;
        fine.push_back({w, eval_spectrum(gm, w)});
    }
    CHECK(square_integral(SpectrumModel::tabulated_d(fine)) ==
          doctest::Approx(square_integral(gm)).epsilon(1e-4));

    CHECK(kind_of([] { SpectrumModel::tabulated_d({{0.0, 1.0}}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectrumModel::tabulated_d({{0.0, 1.0}, {1.0, -1.0}}); }) ==
          ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectrumModel::tabulated_d({{0.0, 1.0}, {4.0, 1.0}}); }) ==
          ErrorKind::InvalidArgument);

    const auto tc = SpectrumModel::tabulated_c({{0.0, 1.0}, {1.0, 1.0}, {2.0, 0.5}});
    CHECK(unit_power(tc) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(autocorrelation(tc, 0.0) - 1.0) < 1e-12);
}

TEST_CASE("spectrum CSV round trip") {
    std::vector<SpectrumPoint> points{{0.0, 2.0}, {1.5, 1.25}, {pi, 0.125}};
    std::ostringstream out;
    write_spectrum_csv(out, points);
    CHECK(out.str().rfind("freq,density\n", 0) == 0);
    std::istringstream in("# comment\n" + out.str());
    const auto back = read_spectrum_csv(in);
    REQUIRE(back.size() == points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(back[i].freq == doctest::Approx(points[i].freq).epsilon(1e-8));
        CHECK(back[i].density == doctest::Approx(points[i].density).epsilon(1e-8));
    }
    std::istringstream no_header("0,1\n1,2\n");
    CHECK(kind_of([&] { read_spectrum_csv(no_header); }) == ErrorKind::Io);
    std::istringstream garbage("freq,density\n0,abc\n");
    CHECK(kind_of([&] { read_spectrum_csv(garbage); }) == ErrorKind::Io);
    CHECK(kind_of([] { read_spectrum_csv_file("/nonexistent/spectrum.csv"); }) == ErrorKind::Io);
}
