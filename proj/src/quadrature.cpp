#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "pskfade/error.hpp"
#include "pskfade/numerics.hpp"

namespace pskfade::numerics {

namespace {

// 15-point Kronrod abscissae (descending) and weights, with the embedded
// 7-point Gauss weights for the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const RealFunction& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);

    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (std::size_t j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
    }

    const double value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double error = std::abs((resk - resg) * half);
    if (resasc != 0.0 && error != 0.0) {
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    }
    if (resabs > tiny / (50.0 * eps)) error = std::max(50.0 * eps * resabs, error);

    if (!std::isfinite(value) || !std::isfinite(error)) {
        fail(ErrorKind::NonConvergence, "non-finite integrand on [" + std::to_string(a) + ", " +
                                            std::to_string(b) + "]");
    }
    return {a, b, value, error};
}

bool too_narrow(double a, double b) {
    const double mid = 0.5 * (a + b);
    const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    return mid <= a || mid >= b || (b - a) <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

QuadratureResult integrate_segments(const RealFunction& f, std::vector<double> edges,
                                    const QuadratureSpec& spec) {
    spec.validate();
    std::priority_queue<Segment> heap;
    double total = 0.0;
    double total_error = 0.0;
    double frozen_value = 0.0;
    double frozen_error = 0.0;

    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const Segment s = kronrod15(f, edges[i], edges[i + 1]);
        total += s.value;
        total_error += s.error;
        heap.push(s);
    }
    std::size_t segments = heap.size();

    auto tolerance = [&spec](double value) {
        return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(value));
    };

    // Segments at floating-point resolution are frozen; their error cannot be
    // reduced further, so only the remaining error has to meet the tolerance.
    while (!heap.empty() && total_error - frozen_error > tolerance(total)) {
        const Segment worst = heap.top();
        heap.pop();
        if (too_narrow(worst.a, worst.b)) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        if (segments >= spec.max_subdivisions) {
            fail(ErrorKind::NonConvergence,
                 "subdivision budget of " + std::to_string(spec.max_subdivisions) +
                     " exhausted (error estimate " + std::to_string(total_error) + ")");
        }
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = kronrod15(f, worst.a, mid);
        const Segment right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++segments;
    }

    if (frozen_error > 1e3 * tolerance(total)) {
        fail(ErrorKind::NonConvergence, "integrand cannot be resolved in double precision (error " +
                                            std::to_string(frozen_error) + ")");
    }

    // Re-sum from scratch so that the running updates do not leak round-off.
    QuadratureResult result;
    result.subdivisions = segments;
    result.value = frozen_value;
    result.error_estimate = frozen_error;
    while (!heap.empty()) {
        result.value += heap.top().value;
        result.error_estimate += heap.top().error;
        heap.pop();
    }
    return result;
}

}  // namespace

void QuadratureSpec::validate() const {
    require(relative_tolerance > 0.0 && absolute_tolerance > 0.0,
            "quadrature tolerances must be positive");
    require(max_subdivisions >= 1, "quadrature needs at least one subdivision");
}

QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec) {
    if (!(a < b)) {
        fail(ErrorKind::InvalidInterval,
             "need a < b, got [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    return integrate_segments(f, {a, b}, spec);
}

double integrate_finite(const RealFunction& f, double a, double b, const QuadratureSpec& spec) {
    return integrate_adaptive(f, a, b, spec).value;
}

double integrate_piecewise(const RealFunction& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureSpec& spec) {
    if (!(a < b)) {
        fail(ErrorKind::InvalidInterval,
             "need a < b, got [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    std::vector<double> edges{a, b};
    for (double x : breakpoints) {
        if (x > a && x < b) edges.push_back(x);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return integrate_segments(f, std::move(edges), spec).value;
}

double integrate_tail(const RealFunction& f, double a, std::span<const double> breaks,
                      const QuadratureSpec& spec) {
    // Probe w^2 |f(w)| far out; an O(w^-2) integrand keeps it bounded.
    const double scale = std::max(1.0, std::abs(a));
    const double near = std::abs(f(a + 1e4 * scale)) * (1e4 * scale) * (1e4 * scale);
    const double far = std::abs(f(a + 1e10 * scale)) * (1e10 * scale) * (1e10 * scale);
    if (!std::isfinite(far) || (far > 1e-300 && far > 100.0 * near)) {
        fail(ErrorKind::DivergentTail, "integrand decays slower than w^-2");
    }

    auto mapped = [&f, a](double theta) {
        const double c = std::cos(theta);
        if (c <= 0.0) return 0.0;
        return f(a + std::tan(theta)) / (c * c);
    };
    std::vector<double> theta_breaks;
    theta_breaks.reserve(breaks.size());
    for (double w : breaks) {
        if (w > a) theta_breaks.push_back(std::atan(w - a));
    }
    return integrate_piecewise(mapped, 0.0, std::numbers::pi / 2.0, theta_breaks, spec);
}

double integrate_halfline(const RealFunction& f, const QuadratureSpec& spec) {
    return integrate_tail(f, 0.0, {}, spec);
}

double expect_rayleigh(const RealFunction& f, const QuadratureSpec& spec) {
    static constexpr std::array<double, 4> breaks = {0.5, 2.0, 8.0, 40.0};
    return integrate_tail([&f](double g) { return f(g) * std::exp(-g); }, 0.0, breaks, spec);
}

double x_minus_log1p(double x) {
    if (std::abs(x) < 1e-3) {
        // Alternating series x^2/2 - x^3/3 + ...; truncation error below x^8/8.
        double term = x * x;
        double sum = 0.0;
        for (int k = 2; k <= 7; ++k) {
            sum += (k % 2 == 0 ? term : -term) / k;
            term *= x;
        }
        return sum;
    }
    return x - std::log1p(x);
}

}  // namespace pskfade::numerics
