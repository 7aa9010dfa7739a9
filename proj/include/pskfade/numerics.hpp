#pragma once

// Numerical kernels shared by every other module: adaptive Gauss-Kronrod
// quadrature on finite and semi-infinite domains, Hermitian-Toeplitz solves
// and expectations over the unit-mean exponential law of |CN(0,1)|^2.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pskfade::numerics {

using Complex = std::complex<double>;
using RealFunction = std::function<double(double)>;

struct QuadratureSpec {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 1e-12;
    std::size_t max_subdivisions = std::size_t{1} << 16;

    /// Throws InvalidArgument unless both tolerances are positive and the budget is at least 1.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t subdivisions = 0;
};

/// Globally adaptive G7/K15 quadrature over [a, b]. Endpoints are never
/// evaluated, so integrable endpoint singularities are tolerated.
/// Throws InvalidInterval when a >= b and NonConvergence when the
/// subdivision budget runs out.
QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec = {});

double integrate_finite(const RealFunction& f, double a, double b, const QuadratureSpec& spec = {});

/// Same as integrate_finite, but the interval is first split at the interior
/// `breakpoints` (points outside (a, b) are ignored). Use it for known
/// discontinuities and narrow peaks that an adaptive rule could step over.
double integrate_piecewise(const RealFunction& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureSpec& spec = {});

/// Integral over [0, inf) using w = tan(theta), theta in [0, pi/2).
/// The integrand must decay at least like w^-2; a tail probe that sees
/// w^2 |f(w)| growing raises DivergentTail.
double integrate_halfline(const RealFunction& f, const QuadratureSpec& spec = {});

/// Integral over [a, inf) using w = a + tan(theta). `breaks` are optional
/// interior split points given in w.
double integrate_tail(const RealFunction& f, double a, std::span<const double> breaks = {},
                      const QuadratureSpec& spec = {});

/// E[f(g)] for g ~ Exp(1), i.e. the law of |h|^2 with h ~ CN(0,1).
double expect_rayleigh(const RealFunction& f, const QuadratureSpec& spec = {});

/// Hermitian Toeplitz system T w = rhs, with T(i, j) = c[i-j] for i >= j and
/// conj(c[j-i]) otherwise.
struct ToeplitzSystem {
    std::vector<Complex> first_column;
    std::vector<Complex> rhs;
};

enum class ToeplitzMethod { Automatic, Levinson, Cholesky };

/// Levinson recursion with a dense Cholesky fallback once a reflection
/// coefficient reaches magnitude 1 - 1e-10 or the residual check fails.
/// Throws NotPositiveDefinite.
std::vector<Complex> toeplitz_solve(const ToeplitzSystem& system,
                                    ToeplitzMethod method = ToeplitzMethod::Automatic);

/// || T w - rhs ||_2 evaluated densely.
double toeplitz_residual(const ToeplitzSystem& system, std::span<const Complex> solution);

/// Nodes and weights of the n-point Gauss-Hermite rule for weight exp(-x^2).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(std::size_t order);

/// x - log(1 + x) without cancellation for small x (x > -1).
double x_minus_log1p(double x);

}  // namespace pskfade::numerics
