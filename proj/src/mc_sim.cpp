#include "pskfade/mc_sim.hpp"

#include <fftw3.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "pskfade/error.hpp"
#include "pskfade/prediction.hpp"

namespace pskfade::sim {

namespace {

constexpr std::size_t kBlockTrials = 256;
constexpr double kEmbeddingTolerance = 1e-8;
constexpr int kEmbeddingAttempts = 3;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

Complex complex_normal(std::mt19937_64& rng, std::normal_distribution<double>& normal) {
    const double re = normal(rng);
    return {re, normal(rng)};
}

}  // namespace

struct FadingSynthesizer::Plan {
    fftw_plan plan = nullptr;
    std::size_t size = 0;

    ~Plan() {
        if (plan != nullptr) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

FadingSynthesizer::FadingSynthesizer(const SpectrumModel& model, std::size_t length,
                                     SynthesisMethod method)
    : length_(length), method_(method) {
    require(model.is_discrete(), "fading synthesis needs a discrete model");
    require(length >= 1, "sequence length must be at least 1");
    if (model.as<spectral::MemorylessD>() != nullptr) {
        recursive_ = true;
        return;
    }
    if (const auto* gm = model.as<spectral::GaussMarkovD>()) {
        recursive_ = true;
        ar_coefficient_ = std::sqrt(1.0 - gm->eps);
        return;
    }

    if (method == SynthesisMethod::Dense) {
        build_dense(model);
        return;
    }
    try {
        build_circulant(model);
        method_ = SynthesisMethod::Circulant;
    } catch (const Error& e) {
        if (method == SynthesisMethod::Circulant || e.kind() != ErrorKind::EmbeddingFailure) throw;
        build_dense(model);
    }
}

void FadingSynthesizer::build_dense(const SpectrumModel& model) {
    method_ = SynthesisMethod::Dense;
    const std::size_t n = length_;
    const auto r = spectral::autocorrelation_sequence(model, n);
    Eigen::MatrixXcd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                i >= j ? r[i - j] : std::conj(r[j - i]);
        }
    }
    // Eigendecomposition rather than Cholesky: deterministic spectra give
    // singular covariances.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(cov);
    if (solver.info() != Eigen::Success) {
        fail(ErrorKind::EmbeddingFailure, "covariance eigendecomposition failed");
    }
    const auto& values = solver.eigenvalues();
    const double largest = values.maxCoeff();
    if (values.minCoeff() < -1e-8 * largest) {
        fail(ErrorKind::EmbeddingFailure, "autocorrelation sequence is not positive semidefinite");
    }
    factor_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            factor_[i * n + j] = solver.eigenvectors()(static_cast<Eigen::Index>(i), jj) *
                                 std::sqrt(std::max(values(jj), 0.0));
        }
    }
}

void FadingSynthesizer::build_circulant(const SpectrumModel& model) {
    const std::size_t length = length_;
    // Circulant embedding of r[0..length-1] into size m = power of two >= 2(length - 1);
    // a larger embedding is tried before giving up.
    std::size_t m = 2;
    while (m < 2 * (length - 1)) m *= 2;
    double worst = 0.0;
    for (int attempt = 0; attempt < kEmbeddingAttempts; ++attempt, m *= 2) {
        const std::size_t half = m / 2;
        const auto r = spectral::autocorrelation_sequence(model, half + 1);
        std::vector<Complex> first_row(m);
        for (std::size_t k = 0; k <= half; ++k) first_row[k] = r[k];
        for (std::size_t k = half + 1; k < m; ++k) first_row[k] = std::conj(r[m - k]);

        std::vector<Complex> eigen(m);
        {
            std::lock_guard lock(planner_mutex());
            fftw_plan forward = fftw_plan_dft_1d(
                static_cast<int>(m), reinterpret_cast<fftw_complex*>(first_row.data()),
                reinterpret_cast<fftw_complex*>(eigen.data()), FFTW_FORWARD, FFTW_ESTIMATE);
            fftw_execute(forward);
            fftw_destroy_plan(forward);
        }
        double largest = 0.0, smallest = 0.0;
        for (const auto& e : eigen) {
            largest = std::max(largest, e.real());
            smallest = std::min(smallest, e.real());
        }
        worst = smallest;
        if (smallest < -kEmbeddingTolerance * largest) continue;

        root_eigen_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            root_eigen_[j] = std::sqrt(std::max(eigen[j].real(), 0.0) / static_cast<double>(m));
        }
        break;
    }
    if (root_eigen_.empty()) {
        fail(ErrorKind::EmbeddingFailure, "circulant embedding up to size " + std::to_string(m / 2) +
                                              " has a negative eigenvalue " + std::to_string(worst));
    }
    m = root_eigen_.size();

    plan_ = std::make_unique<Plan>();
    plan_->size = m;
    std::vector<Complex> scratch_in(m), scratch_out(m);
    std::lock_guard lock(planner_mutex());
    plan_->plan = fftw_plan_dft_1d(
        static_cast<int>(m), reinterpret_cast<fftw_complex*>(scratch_in.data()),
        reinterpret_cast<fftw_complex*>(scratch_out.data()), FFTW_BACKWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
}

FadingSynthesizer::~FadingSynthesizer() = default;
FadingSynthesizer::FadingSynthesizer(FadingSynthesizer&&) noexcept = default;
FadingSynthesizer& FadingSynthesizer::operator=(FadingSynthesizer&&) noexcept = default;

std::vector<Complex> FadingSynthesizer::draw(std::mt19937_64& rng) const {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::vector<Complex> h(length_);
    if (recursive_) {
        const double a = ar_coefficient_;
        const double innovation = std::sqrt(1.0 - a * a);
        h[0] = complex_normal(rng, normal);
        for (std::size_t k = 1; k < length_; ++k) {
            h[k] = a * h[k - 1] + innovation * complex_normal(rng, normal);
        }
        return h;
    }
    if (method_ == SynthesisMethod::Dense) {
        std::vector<Complex> w(length_);
        for (auto& v : w) v = complex_normal(rng, normal);
        for (std::size_t i = 0; i < length_; ++i) {
            Complex acc = 0.0;
            for (std::size_t j = 0; j < length_; ++j) acc += factor_[i * length_ + j] * w[j];
            h[i] = acc;
        }
        return h;
    }
    const std::size_t m = plan_->size;
    std::vector<Complex> in(m), out(m);
    for (std::size_t j = 0; j < m; ++j) in[j] = root_eigen_[j] * complex_normal(rng, normal);
    // New-array execute is thread safe on a shared plan.
    fftw_execute_dft(plan_->plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    std::copy_n(out.begin(), length_, h.begin());
    return h;
}

std::vector<Complex> synthesize_fading(const SpectrumModel& model, std::size_t n, std::uint64_t seed) {
    FadingSynthesizer synth(model, n);
    auto rng = trial_rng(seed, 0);
    return synth.draw(rng);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

void SimConfig::validate() const {
    require(model.is_discrete(), "simulation needs a discrete model");
    require(rho > 0.0 && std::isfinite(rho), "rho must be positive and finite");
    require(L >= 2, "need at least two sub-channels (L >= 2)");
    require(trials >= 1, "need at least one trial");
}

SimResult run_recursive_training(const SimConfig& config) {
    config.validate();
    const std::size_t L = config.L;
    const double rho = config.rho;
    const double root = std::sqrt(rho);

    const auto r = spectral::autocorrelation_sequence(config.model, L);
    // predictors[l - 1] estimates h[l] from x'[0..l-1].
    std::vector<std::vector<Complex>> predictors(L - 1);
    SimResult result;
    result.rng_seed = config.seed;
    result.analytic_sigma2.assign(L, 1.0);
    {
        std::exception_ptr failure;
        const auto count = static_cast<std::ptrdiff_t>(L - 1);
#pragma omp parallel for schedule(dynamic, 4) if (config.execution == Execution::Parallel)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                auto p = prediction::one_step_predictor(r, rho, static_cast<std::size_t>(i) + 1);
                predictors[i] = std::move(p.weights);
                result.analytic_sigma2[i + 1] = p.error;
            } catch (...) {
#pragma omp critical(pskfade_sim_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    const FadingSynthesizer synth(config.model, L);
    const auto& points = config.constellation.points();
    const std::size_t blocks = (config.trials + kBlockTrials - 1) / kBlockTrials;
    std::vector<double> block_sum(blocks * L, 0.0);
    std::vector<double> block_sq(blocks * L, 0.0);

    const auto block_count = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1) if (config.execution == Execution::Parallel)
    for (std::ptrdiff_t b = 0; b < block_count; ++b) {
        double* sum = &block_sum[static_cast<std::size_t>(b) * L];
        double* sq = &block_sq[static_cast<std::size_t>(b) * L];
        const std::size_t first = static_cast<std::size_t>(b) * kBlockTrials;
        const std::size_t last = std::min(config.trials, first + kBlockTrials);
        std::vector<Complex> compensated(L);
        for (std::size_t trial = first; trial < last; ++trial) {
            auto rng = trial_rng(config.seed, trial);
            const std::vector<Complex> h = synth.draw(rng);
            std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
            std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
            for (std::size_t i = 0; i < L; ++i) {
                const Complex s = (i == 0 || config.pilots_only) ? Complex(1.0) : points[pick(rng)];
                const Complex x = root * h[i] * s + complex_normal(rng, normal);
                // Known (pilot or genie-decided) symbol removes the phase.
                compensated[i] = std::conj(s) * x;
            }
            const double e0 = std::norm(h[0]);
            sum[0] += e0;
            sq[0] += e0 * e0;
            for (std::size_t l = 1; l < L; ++l) {
                const auto& w = predictors[l - 1];
                Complex estimate = 0.0;
                for (std::size_t i = 0; i < l; ++i) estimate += w[i] * compensated[i];
                const double e = std::norm(h[l] - estimate);
                sum[l] += e;
                sq[l] += e * e;
            }
        }
    }

    std::vector<double> sum(L, 0.0), sq(L, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t l = 0; l < L; ++l) {
            sum[l] += block_sum[b * L + l];
            sq[l] += block_sq[b * L + l];
        }
    }
    const auto n = static_cast<double>(config.trials);
    result.empirical_sigma2.resize(L);
    result.standard_error.resize(L);
    result.empirical_rho_eff.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double mean = sum[l] / n;
        const double variance = config.trials > 1 ? std::max(sq[l] - n * mean * mean, 0.0) / (n - 1.0) : 0.0;
        result.empirical_sigma2[l] = mean;
        result.standard_error[l] = std::sqrt(variance / n);
        result.empirical_rho_eff[l] = prediction::effective_snr(std::clamp(mean, 0.0, 1.0), rho);
    }
    return result;
}

}  // namespace pskfade::sim
