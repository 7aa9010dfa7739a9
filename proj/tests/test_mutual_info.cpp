#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "pskfade/error.hpp"
#include "pskfade/mutual_info.hpp"
#include "pskfade/prediction.hpp"

using namespace pskfade;
using namespace pskfade::mi;
using spectral::SpectrumModel;

TEST_CASE("PskConstellation") {
    for (int M : {3, 4, 8, 16}) {
        const PskConstellation c(M);
        Complex sum = 0.0, square = 0.0;
        for (const auto& s : c.points()) {
            CHECK(std::abs(std::abs(s) - 1.0) < 1e-15);
            sum += s;
            square += s * s;
        }
        CHECK(std::abs(sum) < 1e-14);
        CHECK(std::abs(square) < 1e-14);
    }
    CHECK(PskConstellation().order() == 4);
    CHECK_THROWS_AS(PskConstellation(2), Error);
}

TEST_CASE("psk_awgn_mi examples") {
    const PskConstellation qpsk(4);
    CHECK(psk_awgn_mi(qpsk, 0.0) == 0.0);
    CHECK(psk_awgn_mi(qpsk, 1e6) == doctest::Approx(std::log(4.0)).epsilon(1e-4));
    // Golden value from a 1e7-sample seeded Monte Carlo oracle (0.674031 +- 0.00025).
    CHECK(psk_awgn_mi(qpsk, 1.0) == doctest::Approx(0.674031).epsilon(1e-3));
    CHECK(psk_awgn_mi(qpsk, 1.0) == doctest::Approx(0.6736616407).epsilon(1e-9));
    CHECK_THROWS_AS(psk_awgn_mi(qpsk, -1.0), Error);
}

TEST_CASE("psk_awgn_mi is monotone in snr and in M") {
    for (int M : {3, 4, 8}) {
        const PskConstellation c(M);
        double previous = 0.0;
        for (double db = -40.0; db <= 40.0; db += 2.0) {
            const double value = psk_awgn_mi(c, std::pow(10.0, db / 10.0));
            CHECK(value >= previous);
            CHECK(value <= std::log(static_cast<double>(M)) + 1e-12);
            previous = value;
        }
    }
    for (double snr : {1e-3, 0.1, 0.5, 1.0}) {
        CHECK(psk_awgn_mi(PskConstellation(8), snr) >= psk_awgn_mi(PskConstellation(4), snr));
    }
    // Small-snr expansion: I = snr - snr^2/2 + ... for complex proper inputs.
    const double snr = 1e-4;
    CHECK(psk_awgn_mi(PskConstellation(4), snr) ==
          doctest::Approx(snr - 0.5 * snr * snr).epsilon(1e-7));
}

TEST_CASE("Gauss-Hermite and Monte Carlo estimators agree") {
    const PskConstellation qpsk(4);
    int index = 0;
    for (double db = -20.0; db <= 25.0; db += 5.0, ++index) {
        const double snr = std::pow(10.0, db / 10.0);
        const auto mc = psk_awgn_mi_mc(qpsk, snr, 200000, 1000 + index);
        CAPTURE(db);
        // The 64-point rule is within 1e-7 of a 200-point rule over this range.
        const double combined = std::hypot(mc.standard_error, 1e-7);
        CHECK(std::abs(mc.mean - psk_awgn_mi(qpsk, snr)) <= 3.0 * combined);
    }
    const auto a = psk_awgn_mi_mc(qpsk, 1.0, 1000, 7);
    const auto b = psk_awgn_mi_mc(qpsk, 1.0, 1000, 7);
    CHECK(a.mean == b.mean);
    CHECK(a.standard_error == b.standard_error);
}

TEST_CASE("psk_fading_mi") {
    const PskConstellation qpsk(4);
    CHECK(psk_fading_mi(qpsk, 0.0) == 0.0);
    CHECK(psk_fading_mi(qpsk, 1e8) == doctest::Approx(std::log(4.0)).epsilon(1e-4));
    CHECK(psk_fading_mi(qpsk, 0.01) == doctest::Approx(0.0099).epsilon(0.05));
    CHECK(psk_fading_mi(qpsk, 0.01) == doctest::Approx(0.0099019089).epsilon(1e-7));
    for (double x = 1e-6; x <= 0.01; x *= 10.0) {
        CHECK(std::abs(psk_fading_mi(qpsk, x) - (x - x * x)) / (x * x) <= 0.5);
    }
}

TEST_CASE("coherent Gaussian capacity") {
    CHECK(coherent_gaussian_capacity(0.0) == 0.0);
    CHECK(coherent_gaussian_capacity(1e-7) / 1e-7 == doctest::Approx(1.0).epsilon(1e-6));

    // Midpoint Riemann sum on [0, 50] plus the analytic tail bound, which is below 1e-20.
    const int points = 2000000;
    const double step = 50.0 / points;
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        const double g = (i + 0.5) * step;
        sum += std::log1p(g) * std::exp(-g);
    }
    CHECK(coherent_gaussian_capacity(1.0) == doctest::Approx(sum * step).epsilon(1e-9));
    CHECK(coherent_gaussian_capacity(1.0) == doctest::Approx(0.5963473623231946).epsilon(1e-10));
    // e^{1/rho} E1(1/rho)
    for (double rho : {0.1, 3.0, 100.0}) {
        CHECK(coherent_gaussian_capacity(rho) ==
              doctest::Approx(std::exp(1.0 / rho) * -std::expint(-1.0 / rho)).epsilon(1e-9));
    }
}

TEST_CASE("PSK never beats the Gaussian-input capacity") {
    for (int M : {3, 4, 8}) {
        for (double db = -30.0; db <= 30.0; db += 3.0) {
            const double x = std::pow(10.0, db / 10.0);
            CHECK(psk_fading_mi(PskConstellation(M), x) <= coherent_gaussian_capacity(x));
        }
    }
}

TEST_CASE("induced channel rate") {
    for (double rho : {0.01, 0.1, 1.0}) {
        CHECK(induced_channel_rate(SpectrumModel::memoryless(), rho) <= 1e-6);
    }
    const auto gm = SpectrumModel::gauss_markov_d(1e-4);
    const double rho = std::pow(10.0, -1.5);
    CHECK(induced_channel_rate(gm, rho) / rho >= 0.87);
    // A decade below the threshold rho = eps the normalized rate has collapsed.
    CHECK(induced_channel_rate(gm, 1e-5) / 1e-5 <= 0.1);
    CHECK(induced_channel_rate(gm, 1e-6) / 1e-6 <= 0.02);

    const std::vector<double> rhos{1e-3, 1e-2, 1e-1};
    const auto serial = induced_channel_rates(gm, rhos, PskConstellation(4), Execution::Serial);
    const auto parallel = induced_channel_rates(gm, rhos, PskConstellation(4), Execution::Parallel);
    CHECK(serial == parallel);
    CHECK(serial[1] == induced_channel_rate(gm, 1e-2));
}
