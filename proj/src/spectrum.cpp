#include "pskfade/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pskfade/error.hpp"

namespace pskfade::spectral {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroThreshold = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double gm_c_rate(double eps_c) { return std::abs(std::log1p(-eps_c)); }

// Linear interpolation with constant extrapolation beyond the grid.
double interpolate(const std::vector<SpectrumPoint>& grid, double x) {
    if (x <= grid.front().freq) return grid.front().density;
    if (x >= grid.back().freq) return grid.back().density;
    const auto upper = std::upper_bound(grid.begin(), grid.end(), x,
                                        [](double v, const SpectrumPoint& p) { return v < p.freq; });
    const auto lower = upper - 1;
    const double t = (x - lower->freq) / (upper->freq - lower->freq);
    return lower->density + t * (upper->density - lower->density);
}

double trapezoid(const std::vector<SpectrumPoint>& grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        sum += 0.5 * (grid[i].density + grid[i + 1].density) * (grid[i + 1].freq - grid[i].freq);
    }
    return sum;
}

void validate_grid(const std::vector<SpectrumPoint>& grid) {
    require(grid.size() >= 2, "tabulated spectrum needs at least two points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require(std::isfinite(grid[i].freq) && std::isfinite(grid[i].density),
                "tabulated spectrum contains a non-finite value");
        require(grid[i].density >= 0.0, "spectral density must be non-negative");
        if (i > 0) require(grid[i].freq > grid[i - 1].freq, "frequencies must increase strictly");
    }
}

void scale_to_unit_power(std::vector<SpectrumPoint>& grid, double power) {
    require(power > 0.0, "tabulated spectrum has zero power");
    for (auto& p : grid) p.density /= power;
}

// Si(x) = integral_0^x sin(t)/t dt.
double sine_integral(double x) {
    if (x < 0.0) return -sine_integral(-x);
    if (x <= 50.0) {
        if (x == 0.0) return 0.0;
        std::vector<double> breaks;
        for (double b = kPi; b < x; b += kPi) breaks.push_back(b);
        return numerics::integrate_piecewise(
            [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }, 0.0, x, breaks,
            {1e-13, 1e-15, 1 << 14});
    }
    // Asymptotic auxiliary functions; the smallest term at x > 50 is below 1e-20.
    double f = 0.0;
    double g = 0.0;
    double term_f = 1.0 / x;
    double term_g = 1.0 / (x * x);
    for (int k = 0; k < 40; ++k) {
        f += term_f;
        g += term_g;
        const double next_f = -term_f * (2.0 * k + 1.0) * (2.0 * k + 2.0) / (x * x);
        const double next_g = -term_g * (2.0 * k + 2.0) * (2.0 * k + 3.0) / (x * x);
        if (std::abs(next_f) > std::abs(term_f)) break;
        term_f = next_f;
        term_g = next_g;
    }
    return kPi / 2.0 - f * std::cos(x) - g * std::sin(x);
}

// integral_a^inf cos(w tau) / w^2 dw for a > 0, tau >= 0.
double cosine_tail(double a, double tau) {
    if (tau == 0.0) return 1.0 / a;
    return std::cos(a * tau) / a - tau * (kPi / 2.0 - sine_integral(a * tau));
}

std::vector<double> geometric_points(double start, double stop, double ratio) {
    std::vector<double> points;
    for (double x = start; x < stop; x *= ratio) points.push_back(x);
    return points;
}

void require_discrete(const SpectrumModel& model, const char* what) {
    require(model.is_discrete(), std::string(what) + " needs a discrete-time model");
}

void require_continuous(const SpectrumModel& model, const char* what) {
    require(!model.is_discrete(), std::string(what) + " needs a continuous-time model");
}

// Partial integrals over [a, limit - delta] for shrinking delta; reports
// Divergent when they keep growing instead of settling.
double escalating_integral(const numerics::RealFunction& h, double a, double limit,
                           std::span<const double> breaks, const QuadratureSpec& spec) {
    constexpr double kGrowthLimit = 1e6;
    std::vector<double> partial;
    for (int k = 1; k <= 12; ++k) {
        const double upper = limit - (limit - a) * std::pow(10.0, -k);
        partial.push_back(numerics::integrate_piecewise(h, a, upper, breaks, spec));
        if (std::abs(partial.back()) > kGrowthLimit) {
            fail(ErrorKind::Divergent, "partial integrals exceed 1e6");
        }
    }
    int growing = 0;
    for (std::size_t i = partial.size() - 3; i < partial.size(); ++i) {
        const double prev = std::abs(partial[i - 1] - partial[i - 2]);
        const double step = std::abs(partial[i] - partial[i - 1]);
        if (prev > 0.0 && step >= 0.5 * prev && step > 1e-14 * std::abs(partial[i])) ++growing;
    }
    if (growing == 3) {
        fail(ErrorKind::Divergent, "partial integrals keep growing toward the singularity");
    }
    return numerics::integrate_piecewise(h, a, limit, breaks, spec);
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

SpectrumModel SpectrumModel::memoryless() { return SpectrumModel(MemorylessD{}); }

SpectrumModel SpectrumModel::gauss_markov_d(double eps) {
    require(eps > 0.0 && eps <= 1.0, "innovation rate eps must lie in (0, 1]");
    return SpectrumModel(GaussMarkovD{eps});
}

SpectrumModel SpectrumModel::notched(int n) {
    require(n >= 2, "notched spectrum needs n >= 2");
    return SpectrumModel(NotchedD{n});
}

SpectrumModel SpectrumModel::peaked(int n) {
    require(n >= 2, "peaked spectrum needs n >= 2");
    return SpectrumModel(PeakedD{n});
}

SpectrumModel SpectrumModel::tabulated_d(std::vector<SpectrumPoint> grid) {
    validate_grid(grid);
    const bool mirrored = grid.front().freq >= 0.0;
    const double slack = 1e-12;
    require(grid.back().freq <= kPi + slack && grid.front().freq >= -kPi - slack,
            "discrete frequencies must lie in [-pi, pi]");
    double power = 0.0;
    if (mirrored) {
        power = (grid.front().density * grid.front().freq + trapezoid(grid) +
                 grid.back().density * (kPi - grid.back().freq)) /
                kPi;
    } else {
        power = (grid.front().density * (grid.front().freq + kPi) + trapezoid(grid) +
                 grid.back().density * (kPi - grid.back().freq)) /
                (2.0 * kPi);
    }
    scale_to_unit_power(grid, power);
    return SpectrumModel(TabulatedD{std::move(grid), mirrored});
}

SpectrumModel SpectrumModel::gauss_markov_c(double eps_c) {
    require(eps_c > 0.0 && eps_c < 1.0, "continuous innovation rate eps_c must lie in (0, 1)");
    return SpectrumModel(GaussMarkovC{eps_c});
}

SpectrumModel SpectrumModel::clarke(double omega_m) {
    require(omega_m > 0.0 && std::isfinite(omega_m), "maximum Doppler frequency must be positive");
    return SpectrumModel(ClarkeC{omega_m});
}

SpectrumModel SpectrumModel::tabulated_c(std::vector<SpectrumPoint> grid) {
    validate_grid(grid);
    require(grid.front().freq >= 0.0, "continuous grid must use non-negative frequencies");
    const double last = grid.back().freq;
    const double half_power =
        grid.front().density * grid.front().freq + trapezoid(grid) + grid.back().density * last;
    scale_to_unit_power(grid, half_power / kPi);
    return SpectrumModel(TabulatedC{std::move(grid)});
}

TimeBase SpectrumModel::time_base() const {
    return std::visit(Overloaded{
                          [](const GaussMarkovC&) { return TimeBase::Continuous; },
                          [](const ClarkeC&) { return TimeBase::Continuous; },
                          [](const TabulatedC&) { return TimeBase::Continuous; },
                          [](const auto&) { return TimeBase::Discrete; },
                      },
                      family_);
}

bool SpectrumModel::is_even() const {
    if (const auto* tab = as<TabulatedD>()) return tab->mirrored;
    return true;
}

std::string SpectrumModel::describe() const {
    std::ostringstream out;
    std::visit(Overloaded{
                   [&](const MemorylessD&) { out << "memoryless"; },
                   [&](const GaussMarkovD& m) { out << "gauss-markov-d(eps=" << m.eps << ")"; },
                   [&](const NotchedD& m) { out << "notched(n=" << m.n << ")"; },
                   [&](const PeakedD& m) { out << "peaked(n=" << m.n << ")"; },
                   [&](const TabulatedD& m) { out << "tabulated-d(" << m.grid.size() << " points)"; },
                   [&](const GaussMarkovC& m) { out << "gauss-markov-c(eps_c=" << m.eps_c << ")"; },
                   [&](const ClarkeC& m) { out << "clarke(omega_m=" << m.omega_m << ")"; },
                   [&](const TabulatedC& m) { out << "tabulated-c(" << m.grid.size() << " points)"; },
               },
               family_);
    return out.str();
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_spectrum(const SpectrumModel& model, double freq) {
    if (model.is_discrete() && std::abs(freq) > kPi * (1.0 + 1e-14)) {
        fail(ErrorKind::OutOfDomain, "discrete frequency " + std::to_string(freq) +
                                         " outside [-pi, pi]");
    }
    const double af = std::abs(freq);
    return std::visit(
        Overloaded{
            [](const MemorylessD&) { return 1.0; },
            [&](const GaussMarkovD& m) {
                // (2 - eps) - 2a cos = (1 - a)^2 + 4a sin^2(freq/2), a = sqrt(1 - eps)
                const double a = std::sqrt(1.0 - m.eps);
                const double gap = m.eps / (1.0 + a);
                const double s = std::sin(0.5 * freq);
                return m.eps / (gap * gap + 4.0 * a * s * s);
            },
            [&](const NotchedD& m) {
                const double n = m.n;
                return af <= kPi - kPi / n ? n / (n - 1.0) : 0.0;
            },
            [&](const PeakedD& m) {
                const double n = m.n;
                const double root = std::sqrt(n);
                return af <= kPi / (n * root) ? n : (root - 1.0) / (root - 1.0 / n);
            },
            [&](const TabulatedD& m) { return interpolate(m.grid, m.mirrored ? af : freq); },
            [&](const GaussMarkovC& m) {
                const double rate = gm_c_rate(m.eps_c);
                return rate / (freq * freq + 0.25 * rate * rate);
            },
            [&](const ClarkeC& m) {
                if (af > m.omega_m) return 0.0;
                if (af == m.omega_m) return std::numeric_limits<double>::infinity();
                const double x = af / m.omega_m;
                return (2.0 / m.omega_m) / std::sqrt((1.0 - x) * (1.0 + x));
            },
            [&](const TabulatedC& m) {
                const SpectrumPoint& last = m.grid.back();
                if (af <= last.freq) return interpolate(m.grid, af);
                const double r = last.freq / af;
                return last.density * r * r;
            },
        },
        model.family());
}

std::vector<double> feature_points(const SpectrumModel& model) {
    return std::visit(
        Overloaded{
            [](const MemorylessD&) { return std::vector<double>{}; },
            [](const GaussMarkovD& m) {
                if (m.eps >= 1.0) return std::vector<double>{};
                return geometric_points(m.eps / 16.0, kPi, 2.0);
            },
            [](const NotchedD& m) { return std::vector<double>{kPi - kPi / m.n}; },
            [](const PeakedD& m) {
                const double n = m.n;
                return std::vector<double>{kPi / (n * std::sqrt(n))};
            },
            [](const TabulatedD& m) {
                std::vector<double> points;
                for (const auto& p : m.grid) points.push_back(p.freq);
                return points;
            },
            [](const GaussMarkovC& m) {
                const double half = 0.5 * gm_c_rate(m.eps_c);
                return geometric_points(half / 16.0, 16.0 * half, 2.0);
            },
            [](const ClarkeC& m) { return std::vector<double>{m.omega_m}; },
            [](const TabulatedC& m) {
                std::vector<double> points;
                for (const auto& p : m.grid) points.push_back(p.freq);
                return points;
            },
        },
        model.family());
}

double band_average(const SpectrumModel& model, const std::function<double(double)>& h,
                    const QuadratureSpec& spec) {
    const std::vector<double> breaks = feature_points(model);
    if (model.is_discrete()) {
        auto integrand = [&](double omega) { return h(eval_spectrum(model, omega)); };
        if (model.is_even()) {
            return numerics::integrate_piecewise(integrand, 0.0, kPi, breaks, spec) / kPi;
        }
        return numerics::integrate_piecewise(integrand, -kPi, kPi, breaks, spec) / (2.0 * kPi);
    }
    if (const auto* clarke = model.as<ClarkeC>()) {
        // w = omega_m sin(theta) removes the inverse-square-root edge singularity.
        const double wm = clarke->omega_m;
        auto integrand = [&](double theta) {
            const double c = std::cos(theta);
            if (c <= 0.0) return 0.0;
            return h((2.0 / wm) / c) * wm * c;
        };
        return numerics::integrate_finite(integrand, 0.0, kPi / 2.0, spec) / kPi;
    }
    auto integrand = [&](double w) { return h(eval_spectrum(model, w)); };
    if (const auto* tab = model.as<TabulatedC>()) {
        const double last = tab->grid.back().freq;
        const double body = numerics::integrate_piecewise(integrand, 0.0, last, breaks, spec);
        const double tail = numerics::integrate_tail(integrand, last, {}, spec);
        return (body + tail) / kPi;
    }
    return numerics::integrate_tail(integrand, 0.0, breaks, spec) / kPi;
}

double unit_power(const SpectrumModel& model, const QuadratureSpec& spec) {
    return band_average(model, [](double s) { return s; }, spec);
}

Complex autocorrelation(const SpectrumModel& model, double tau, const QuadratureSpec& spec) {
    const double at = std::abs(tau);
    if (model.is_discrete()) {
        const double lag = std::round(tau);
        if (std::abs(tau - lag) > 1e-12) {
            fail(ErrorKind::OutOfDomain, "discrete autocorrelation needs an integer lag");
        }
        const auto k = static_cast<long>(std::abs(lag));
        if (std::holds_alternative<MemorylessD>(model.family())) return k == 0 ? 1.0 : 0.0;
        if (const auto* gm = model.as<GaussMarkovD>()) {
            return std::pow(1.0 - gm->eps, 0.5 * static_cast<double>(k));
        }
        if (k == 0) return 1.0;
        std::vector<double> breaks = feature_points(model);
        const double kd = static_cast<double>(k);
        for (long j = 1; j < k; ++j) breaks.push_back(kPi * static_cast<double>(j) / kd);
        QuadratureSpec local = spec;
        local.max_subdivisions = std::max(local.max_subdivisions, breaks.size() * 64);
        if (model.is_even()) {
            const double re = numerics::integrate_piecewise(
                [&](double w) { return eval_spectrum(model, w) * std::cos(kd * w); }, 0.0, kPi,
                breaks, local);
            return re / kPi;
        }
        const std::size_t half = breaks.size();
        for (std::size_t i = 0; i < half; ++i) breaks.push_back(-breaks[i]);
        const double signed_lag = lag;
        const double re = numerics::integrate_piecewise(
            [&](double w) { return eval_spectrum(model, w) * std::cos(signed_lag * w); }, -kPi,
            kPi, breaks, local);
        const double im = numerics::integrate_piecewise(
            [&](double w) { return eval_spectrum(model, w) * std::sin(signed_lag * w); }, -kPi,
            kPi, breaks, local);
        return Complex(re, im) / (2.0 * kPi);
    }

    if (const auto* gm = model.as<GaussMarkovC>()) return std::pow(1.0 - gm->eps_c, 0.5 * at);
    if (at == 0.0) return 1.0;
    if (const auto* clarke = model.as<ClarkeC>()) {
        // (2/pi) * integral_0^{pi/2} cos(omega_m tau sin theta) d theta
        const double x = clarke->omega_m * at;
        std::vector<double> breaks;
        const auto pieces = static_cast<int>(std::ceil(x / kPi));
        for (int j = 1; j < pieces; ++j) {
            breaks.push_back(std::asin(std::min(1.0, kPi * j / x)));
        }
        const double value = numerics::integrate_piecewise(
            [x](double theta) { return std::cos(x * std::sin(theta)); }, 0.0, kPi / 2.0, breaks,
            spec);
        return 2.0 * value / kPi;
    }
    const auto& tab = std::get<TabulatedC>(model.family());
    const double last = tab.grid.back().freq;
    std::vector<double> breaks = feature_points(model);
    for (double w = kPi / at; w < last; w += kPi / at) breaks.push_back(w);
    QuadratureSpec local = spec;
    local.max_subdivisions = std::max(local.max_subdivisions, breaks.size() * 64);
    const double body = numerics::integrate_piecewise(
        [&](double w) { return eval_spectrum(model, w) * std::cos(w * at); }, 0.0, last, breaks,
        local);
    const double tail = tab.grid.back().density * last * last * cosine_tail(last, at);
    return (body + tail) / kPi;
}

std::vector<Complex> autocorrelation_sequence(const SpectrumModel& model, std::size_t count,
                                              const QuadratureSpec& spec) {
    require_discrete(model, "autocorrelation_sequence");
    std::vector<Complex> r(count);
    for (std::size_t k = 0; k < count; ++k) r[k] = autocorrelation(model, static_cast<double>(k), spec);
    return r;
}

double square_integral(const SpectrumModel& model, const QuadratureSpec& spec) {
    require_discrete(model, "square_integral");
    const double value = band_average(model, [](double s) { return s * s; }, spec);
    if (!std::isfinite(value)) fail(ErrorKind::Divergent, "square integral is not finite");
    return value;
}

std::optional<double> square_integral_exact(const SpectrumModel& model) {
    require_discrete(model, "square_integral_exact");
    return std::visit(
        Overloaded{
            [](const MemorylessD&) -> std::optional<double> { return 1.0; },
            [](const GaussMarkovD& m) -> std::optional<double> { return 2.0 / m.eps - 1.0; },
            [](const NotchedD& m) -> std::optional<double> { return m.n / (m.n - 1.0); },
            [](const PeakedD& m) -> std::optional<double> {
                const double n = m.n;
                const double root = std::sqrt(n);
                const double floor = (root - 1.0) / (root - 1.0 / n);
                return root + floor * floor * (1.0 - 1.0 / (n * root));
            },
            [](const auto&) -> std::optional<double> { return std::nullopt; },
        },
        model.family());
}

double log_spectral_integral(const SpectrumModel& model, double rho, const QuadratureSpec& spec) {
    require_discrete(model, "log_spectral_integral");
    require(rho >= 0.0, "SNR must be non-negative");
    if (rho == 0.0) return 0.0;
    return band_average(model, [rho](double s) { return std::log1p(rho * s); }, spec);
}

double log_spectral_excess(const SpectrumModel& model, double rho, const QuadratureSpec& spec) {
    require(rho >= 0.0, "SNR or power must be non-negative");
    if (rho == 0.0) return 0.0;
    return band_average(
        model,
        [rho](double s) { return std::isinf(s) ? 0.0 : numerics::x_minus_log1p(rho * s); }, spec);
}

double noiseless_pred_error(const SpectrumModel& model, const QuadratureSpec& spec) {
    require_discrete(model, "noiseless_pred_error");
    if (zero_set_measure(model) > 0.0) return 0.0;
    if (std::holds_alternative<MemorylessD>(model.family())) return 1.0;
    const double mean_log = band_average(model, [](double s) { return std::log(s); }, spec);
    return std::clamp(std::exp(mean_log), 0.0, 1.0);
}

double zero_set_measure(const SpectrumModel& model) {
    require_discrete(model, "zero_set_measure");
    if (const auto* notched = model.as<NotchedD>()) return 1.0 / notched->n;
    const auto* tab = model.as<TabulatedD>();
    if (tab == nullptr) return 0.0;

    const auto& g = tab->grid;
    const double lo = tab->mirrored ? 0.0 : -kPi;
    double measure = 0.0;
    if (g.front().density < kZeroThreshold) measure += g.front().freq - lo;
    if (g.back().density < kZeroThreshold) measure += kPi - g.back().freq;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double s0 = g[i].density;
        const double s1 = g[i + 1].density;
        const double width = g[i + 1].freq - g[i].freq;
        if (s0 < kZeroThreshold && s1 < kZeroThreshold) {
            measure += width;
        } else if (s0 < kZeroThreshold || s1 < kZeroThreshold) {
            // Linear segment crossing the threshold: keep the part below it.
            const double below = (kZeroThreshold - std::min(s0, s1)) / std::abs(s1 - s0);
            measure += width * std::clamp(below, 0.0, 1.0);
        }
    }
    return measure / (kPi - lo);
}

double continuous_square_integral(const SpectrumModel& model, const QuadratureSpec& spec) {
    require_continuous(model, "continuous_square_integral");
    if (const auto* clarke = model.as<ClarkeC>()) {
        const double wm = clarke->omega_m;
        auto integrand = [wm](double theta) {
            const double c = std::cos(theta);
            return c <= 0.0 ? 0.0 : (4.0 / wm) / c;
        };
        return escalating_integral(integrand, 0.0, kPi / 2.0, {}, spec) / kPi;
    }
    // tan(theta) substitution, truncation escalated toward theta = pi/2
    auto integrand = [&model](double theta) {
        const double c = std::cos(theta);
        if (c <= 0.0) return 0.0;
        const double s = eval_spectrum(model, std::tan(theta));
        return s * s / (c * c);
    };
    std::vector<double> breaks;
    for (double w : feature_points(model)) breaks.push_back(std::atan(w));
    return escalating_integral(integrand, 0.0, kPi / 2.0, breaks, spec) / kPi;
}

double double_integral_autocorrelation(const SpectrumModel& model, double T,
                                       const QuadratureSpec& spec) {
    require_continuous(model, "double_integral_autocorrelation");
    require(T > 0.0, "symbol duration must be positive");
    if (const auto* gm = model.as<GaussMarkovC>()) {
        // 2 * integral_0^T (T - tau) exp(-b tau) d tau = (2/b^2)(bT - 1 + e^{-bT})
        const double b = 0.5 * gm_c_rate(gm->eps_c);
        const double x = b * T;
        double core = 0.0;
        if (x < 0.1) {
            double term = 0.5 * x * x;
            for (int k = 2; k < 20; ++k) {
                core += term;
                term *= -x / (k + 1);
            }
        } else {
            core = x + std::expm1(-x);
        }
        return 2.0 * core / (b * b);
    }
    auto integrand = [&](double tau) {
        return 2.0 * (T - tau) * autocorrelation(model, tau, spec).real();
    };
    return numerics::integrate_finite(integrand, 0.0, T, spec);
}

// ---------------------------------------------------------------------------
// Continuous -> discrete conversion

namespace {

struct AliasEnvelope {
    double coefficient;  // S(w) <= coefficient / w^2 for w >= onset
    double onset;
    double cutoff;       // S(w) = 0 beyond, or +inf
};

AliasEnvelope alias_envelope(const SpectrumModel& model) {
    if (const auto* gm = model.as<GaussMarkovC>()) {
        return {gm_c_rate(gm->eps_c), 0.0, std::numeric_limits<double>::infinity()};
    }
    if (const auto* clarke = model.as<ClarkeC>()) return {0.0, 0.0, clarke->omega_m};
    const auto& tab = std::get<TabulatedC>(model.family());
    const SpectrumPoint& last = tab.grid.back();
    return {last.density * last.freq * last.freq, last.freq,
            std::numeric_limits<double>::infinity()};
}

int alias_count(const SpectrumModel& model, double T, double kernel_integral, double tolerance) {
    const AliasEnvelope env = alias_envelope(model);
    if (std::isfinite(env.cutoff)) {
        // Aliases with |Omega - 2k pi| > cutoff * T vanish identically.
        return static_cast<int>(std::floor(0.5 * (env.cutoff * T / kPi + 1.0)));
    }
    const double scale = 8.0 * env.coefficient * T * T * T / (kernel_integral * std::pow(kPi, 4));
    constexpr int kMaxAliases = 1'000'000;
    for (int k = 1; k <= kMaxAliases; ++k) {
        const double nearest = (2.0 * k + 1.0) * kPi / T;
        if (nearest < env.onset) continue;
        const double odd = 2.0 * k - 1.0;
        if (scale / (6.0 * odd * odd * odd) <= tolerance) return k;
    }
    fail(ErrorKind::AliasTruncation, "alias sum needs more than 1e6 terms");
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

double aliased_density(const SpectrumModel& model, double T, double kernel_integral,
                       int alias_terms, double omega) {
    double sum = 0.0;
    for (int k = -alias_terms; k <= alias_terms; ++k) {
        const double shifted = omega - 2.0 * kPi * k;
        const double s = eval_spectrum(model, shifted / T);
        if (s == 0.0) continue;
        const double window = sinc(0.5 * shifted);
        sum += s * window * window;
    }
    return sum * T / kernel_integral;
}

DiscretizedChannel discretize(const SpectrumModel& model, double T, double P,
                              const DiscretizeOptions& options) {
    require_continuous(model, "discretize");
    require(T > 0.0 && std::isfinite(T), "symbol duration must be positive");
    require(P > 0.0 && std::isfinite(P), "envelope power must be positive");

    const double kernel = double_integral_autocorrelation(model, T, options.quadrature);
    const int aliases = alias_count(model, T, kernel, options.alias_tolerance);

    // Where the discrete density has structure: the scaled feature points of
    // every alias folded back into [0, pi].
    std::vector<double> singular;
    std::vector<double> breaks;
    for (double w : feature_points(model)) {
        for (int k = -aliases; k <= aliases; ++k) {
            for (double sign : {-1.0, 1.0}) {
                const double folded = std::abs(sign * w * T + 2.0 * kPi * k);
                if (folded > 0.0 && folded < kPi) {
                    breaks.push_back(folded);
                    if (model.as<ClarkeC>() != nullptr) singular.push_back(folded);
                }
            }
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto density = [&](double omega) { return aliased_density(model, T, kernel, aliases, omega); };
    // Clarke aliases are infinite at isolated points; those carry no mass.
    auto finite_density = [&](double omega) {
        const double value = density(omega);
        return std::isfinite(value) ? value : 0.0;
    };
    const double power = numerics::integrate_piecewise(finite_density, 0.0, kPi, breaks,
                                                       options.quadrature) /
                         kPi;
    if (std::abs(power - 1.0) > 1e-6) {
        fail(ErrorKind::AliasTruncation,
             "converted spectrum has power " + std::to_string(power) + " instead of 1");
    }

    // Tabulation grid: geometric near 0, uniform across the band, and
    // clustered on both sides of each density singularity.
    double feature = kPi;
    for (double b : breaks) feature = std::min(feature, b);
    if (const auto* gm = model.as<GaussMarkovC>()) feature = 0.5 * gm_c_rate(gm->eps_c) * T;
    const double start = std::min(feature * 1e-3, kPi * 1e-6);
    std::vector<double> grid{0.0, kPi};
    if (options.geometric_points > 1) {
        const double ratio =
            std::pow(kPi / start, 1.0 / static_cast<double>(options.geometric_points - 1));
        double x = start;
        for (std::size_t i = 0; i < options.geometric_points; ++i, x *= ratio) grid.push_back(x);
    }
    for (std::size_t i = 1; i < options.uniform_points; ++i) {
        grid.push_back(kPi * static_cast<double>(i) / static_cast<double>(options.uniform_points));
    }
    if (breaks.size() <= 4096) grid.insert(grid.end(), breaks.begin(), breaks.end());
    for (double s : singular) {
        for (int j = 1; j <= 12; ++j) {
            const double d = std::pow(10.0, -j);
            grid.push_back(s * (1.0 - d));
            grid.push_back(s * (1.0 + d));
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<SpectrumPoint> table;
    table.reserve(grid.size());
    for (double omega : grid) {
        if (omega < 0.0 || omega > kPi) continue;
        const double value = density(omega);
        if (std::isfinite(value)) table.push_back({omega, value});
    }

    DiscretizedChannel out{SpectrumModel::tabulated_d(std::move(table)), 0.0, T, P, kernel, power,
                           aliases};
    out.rho = P / T * kernel;
    return out;
}

}  // namespace pskfade::spectral
