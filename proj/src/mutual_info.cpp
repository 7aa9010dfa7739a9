#include "pskfade/mutual_info.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>

#include "pskfade/error.hpp"
#include "pskfade/prediction.hpp"

namespace pskfade::mi {

namespace {

constexpr std::size_t kHermiteOrder = 64;
constexpr std::size_t kFallbackSamples = 1'000'000;
constexpr std::uint64_t kFallbackSeed = 0x5eed'f00d;

const numerics::GaussHermiteRule& hermite_rule() {
    static const numerics::GaussHermiteRule rule = numerics::gauss_hermite(kHermiteOrder);
    return rule;
}

// Rates are O(rho) at low SNR; keep the absolute tolerance below that scale.
QuadratureSpec scaled_for(const QuadratureSpec& spec, double rho) {
    QuadratureSpec local = spec;
    local.absolute_tolerance =
        std::max(1e-300, std::min(spec.absolute_tolerance,
                                  1e-2 * spec.relative_tolerance * std::min(rho, 1.0)));
    return local;
}

}  // namespace

PskConstellation::PskConstellation(int order) {
    require(order >= 3, "PSK order must be at least 3 (BPSK is not complex proper)");
    points_.reserve(static_cast<std::size_t>(order));
    for (int m = 0; m < order; ++m) {
        points_.push_back(std::polar(1.0, 2.0 * std::numbers::pi * m / order));
    }
}

double psk_awgn_mi(const PskConstellation& constellation, double snr) {
    require(snr >= 0.0 && std::isfinite(snr), "snr must be non-negative and finite");
    if (snr == 0.0) return 0.0;

    // By symmetry only s_0 needs averaging. With a_m = sqrt(snr)(s_0 - s_m),
    // I = -E log((1/M) sum_m exp(|z|^2 - |z + a_m|^2)), written with
    // log1p/expm1 so the m = 0 term contributes an exact zero.
    const auto& pts = constellation.points();
    const std::size_t M = pts.size();
    const double root = std::sqrt(snr);
    std::vector<Complex> offset(M);
    std::vector<double> energy(M);
    for (std::size_t m = 0; m < M; ++m) {
        offset[m] = root * (pts[0] - pts[m]);
        energy[m] = std::norm(offset[m]);
    }

    const auto& rule = hermite_rule();
    const double inv_m = 1.0 / static_cast<double>(M);
    double total = 0.0;
    for (std::size_t i = 0; i < kHermiteOrder; ++i) {
        const double x = rule.nodes[i];
        double row = 0.0;
        for (std::size_t j = 0; j < kHermiteOrder; ++j) {
            const double y = rule.nodes[j];
            double u = 0.0;
            for (std::size_t m = 1; m < M; ++m) {
                const double delta =
                    -energy[m] - 2.0 * (offset[m].real() * x + offset[m].imag() * y);
                u += std::expm1(delta);
            }
            row += rule.weights[j] * std::log1p(u * inv_m);
        }
        total += rule.weights[i] * row;
    }
    const double value = -total / std::numbers::pi;
    const double cap = std::log(static_cast<double>(M));

    if (!std::isfinite(value) || value < -1e-12 || value > cap + 1e-12) {
        return std::clamp(psk_awgn_mi_mc(constellation, snr, kFallbackSamples, kFallbackSeed).mean,
                          0.0, cap);
    }
    return std::clamp(value, 0.0, cap);
}

MonteCarloEstimate psk_awgn_mi_mc(const PskConstellation& constellation, double snr,
                                  std::size_t samples, std::uint64_t seed) {
    require(snr >= 0.0 && std::isfinite(snr), "snr must be non-negative and finite");
    require(samples >= 2, "Monte Carlo needs at least two samples");
    const auto& pts = constellation.points();
    const std::size_t M = pts.size();
    const double root = std::sqrt(snr);
    const double log_m = std::log(static_cast<double>(M));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::uniform_int_distribution<std::size_t> pick(0, M - 1);
    std::vector<double> metric(M);

    double mean = 0.0, m2 = 0.0;
    for (std::size_t n = 0; n < samples; ++n) {
        const std::size_t sent = pick(rng);
        const Complex z(normal(rng), normal(rng));
        const Complex y = root * pts[sent] + z;
        // log p(y|s_sent) - log((1/M) sum p(y|s_m)) via log-sum-exp.
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < M; ++m) {
            metric[m] = -std::norm(y - root * pts[m]);
            peak = std::max(peak, metric[m]);
        }
        double sum = 0.0;
        for (double v : metric) sum += std::exp(v - peak);
        const double sample = log_m + metric[sent] - peak - std::log(sum);
        const double delta = sample - mean;
        mean += delta / static_cast<double>(n + 1);
        m2 += delta * (sample - mean);
    }
    MonteCarloEstimate out;
    out.mean = mean;
    out.samples = samples;
    out.standard_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    return out;
}

double psk_fading_mi(const PskConstellation& constellation, double rho_eff, const QuadratureSpec& spec) {
    require(rho_eff >= 0.0 && std::isfinite(rho_eff), "effective SNR must be non-negative and finite");
    if (rho_eff == 0.0) return 0.0;
    return numerics::expect_rayleigh(
        [&](double g) { return psk_awgn_mi(constellation, rho_eff * g); },
        scaled_for(spec, rho_eff));
}

double coherent_gaussian_capacity(double rho, const QuadratureSpec& spec) {
    require(rho >= 0.0 && std::isfinite(rho), "SNR must be non-negative and finite");
    if (rho == 0.0) return 0.0;
    return numerics::expect_rayleigh([rho](double g) { return std::log1p(rho * g); },
                                     scaled_for(spec, rho));
}

double induced_channel_rate(const SpectrumModel& model, double rho,
                            const PskConstellation& constellation) {
    const double sigma2 = prediction::steady_state_error(model, rho);
    return psk_fading_mi(constellation, prediction::effective_snr(sigma2, rho));
}

std::vector<double> induced_channel_rates(const SpectrumModel& model, std::span<const double> rhos,
                                          const PskConstellation& constellation, Execution execution) {
    std::vector<double> out(rhos.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(rhos.size());
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::Parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = induced_channel_rate(model, rhos[i], constellation);
        } catch (...) {
#pragma omp critical(pskfade_rate_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace pskfade::mi
