#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "pskfade/error.hpp"
#include "pskfade/numerics.hpp"

namespace pskfade::numerics {

namespace {

constexpr double kReflectionLimit = 1.0 - 1e-10;
constexpr double kResidualTolerance = 1e-10;

Complex element(std::span<const Complex> column, std::ptrdiff_t lag) {
    return lag >= 0 ? column[static_cast<std::size_t>(lag)]
                    : std::conj(column[static_cast<std::size_t>(-lag)]);
}

double norm2(std::span<const Complex> v) {
    double sum = 0.0;
    for (const Complex& x : v) sum += std::norm(x);
    return std::sqrt(sum);
}

void check_leading(const ToeplitzSystem& system) {
    require(!system.first_column.empty(), "Toeplitz system must not be empty");
    require(system.first_column.size() == system.rhs.size(),
            "Toeplitz first column and right-hand side differ in length");
    const Complex t0 = system.first_column.front();
    if (!(t0.real() > 0.0) || std::abs(t0.imag()) > 1e-12 * std::abs(t0.real())) {
        fail(ErrorKind::NotPositiveDefinite, "leading element must be real and positive");
    }
}

// Returns false when a reflection coefficient gets too close to the unit circle.
bool levinson(const ToeplitzSystem& system, std::vector<Complex>& x) {
    const auto& c = system.first_column;
    const auto& y = system.rhs;
    const std::size_t n = c.size();
    const double t0 = c[0].real();

    std::vector<Complex> f{Complex(1.0 / t0)};
    std::vector<Complex> b{Complex(1.0 / t0)};
    x.assign(1, y[0] / t0);
    f.reserve(n);
    b.reserve(n);
    x.reserve(n);

    std::vector<Complex> f_next(n);
    std::vector<Complex> b_next(n);
    for (std::size_t m = 1; m < n; ++m) {
        Complex ef{};
        Complex eb{};
        Complex ex{};
        for (std::size_t i = 0; i < m; ++i) {
            const Complex lower = c[m - i];
            ef += lower * f[i];
            ex += lower * x[i];
            eb += std::conj(c[i + 1]) * b[i];
        }
        if (std::abs(ef) >= kReflectionLimit) return false;
        const Complex denom = 1.0 - ef * eb;
        if (!(denom.real() > 0.0)) return false;

        f_next.assign(m + 1, Complex{});
        b_next.assign(m + 1, Complex{});
        for (std::size_t i = 0; i <= m; ++i) {
            const Complex f_up = i < m ? f[i] : Complex{};
            const Complex b_dn = i > 0 ? b[i - 1] : Complex{};
            f_next[i] = (f_up - ef * b_dn) / denom;
            b_next[i] = (b_dn - eb * f_up) / denom;
        }
        f.swap(f_next);
        b.swap(b_next);

        x.push_back(Complex{});
        const Complex gain = y[m] - ex;
        for (std::size_t i = 0; i <= m; ++i) x[i] += gain * b[i];
    }
    return true;
}

std::vector<Complex> cholesky(const ToeplitzSystem& system) {
    const auto n = static_cast<Eigen::Index>(system.first_column.size());
    Eigen::MatrixXcd t(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) t(i, j) = element(system.first_column, i - j);
    }
    const Eigen::LLT<Eigen::MatrixXcd> llt(t);
    if (llt.info() != Eigen::Success) {
        fail(ErrorKind::NotPositiveDefinite, "Cholesky factorization failed");
    }
    const Eigen::Map<const Eigen::VectorXcd> rhs(system.rhs.data(), n);
    const Eigen::VectorXcd w = llt.solve(rhs);
    return {w.data(), w.data() + n};
}

}  // namespace

double toeplitz_residual(const ToeplitzSystem& system, std::span<const Complex> solution) {
    const std::size_t n = system.first_column.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Complex row{};
        for (std::size_t j = 0; j < n; ++j) {
            row += element(system.first_column, static_cast<std::ptrdiff_t>(i) -
                                                    static_cast<std::ptrdiff_t>(j)) *
                   solution[j];
        }
        sum += std::norm(row - system.rhs[i]);
    }
    return std::sqrt(sum);
}

std::vector<Complex> toeplitz_solve(const ToeplitzSystem& system, ToeplitzMethod method) {
    check_leading(system);
    if (method == ToeplitzMethod::Cholesky) return cholesky(system);

    std::vector<Complex> x;
    const bool stable = levinson(system, x);
    if (method == ToeplitzMethod::Levinson) {
        if (!stable) fail(ErrorKind::NotPositiveDefinite, "reflection coefficient reached 1");
        return x;
    }
    if (stable && toeplitz_residual(system, x) <= kResidualTolerance * norm2(system.rhs)) {
        return x;
    }
    return cholesky(system);
}

GaussHermiteRule gauss_hermite(std::size_t order) {
    require(order >= 1, "Gauss-Hermite order must be at least 1");
    // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Hermite recurrence.
    const auto n = static_cast<Eigen::Index>(order);
    Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * static_cast<double>(k));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diagonal, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        fail(ErrorKind::NonConvergence, "Gauss-Hermite eigen-decomposition failed");
    }
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double mass = std::sqrt(std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = mass * v0 * v0;
    }
    return rule;
}

}  // namespace pskfade::numerics
