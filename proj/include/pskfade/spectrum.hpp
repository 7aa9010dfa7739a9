#pragma once

// Fading spectral densities and the scalar functionals derived from them.
//
// Discrete-time densities live on [-pi, pi] and continuous-time densities on
// the real line; both are normalized to unit power, (1/2pi) * integral S = 1.

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pskfade/numerics.hpp"

namespace pskfade::spectral {

using numerics::Complex;
using numerics::QuadratureSpec;

enum class TimeBase { Discrete, Continuous };

struct SpectrumPoint {
    double freq = 0.0;
    double density = 0.0;
};

struct MemorylessD {};

/// First-order autoregressive fading with innovation rate eps in (0, 1].
struct GaussMarkovD {
    double eps;
};

/// Flat spectrum with zero notches on pi - pi/n < |Omega| <= pi.
struct NotchedD {
    int n;
};

/// Narrow peak of height n on |Omega| <= pi / n^{3/2} over an almost flat floor.
struct PeakedD {
    int n;
};

/// Piecewise-linear density. A grid with only non-negative frequencies is
/// mirrored to an even density; values outside the grid are held constant.
struct TabulatedD {
    std::vector<SpectrumPoint> grid;
    bool mirrored = true;
};

/// K(tau) = (1 - eps_c)^{|tau|/2}, eps_c in (0, 1).
struct GaussMarkovC {
    double eps_c;
};

/// Clarke/Jakes Doppler spectrum with maximum Doppler frequency omega_m.
struct ClarkeC {
    double omega_m;
};

/// Piecewise-linear density on a grid of w >= 0, mirrored to negative w;
/// beyond the last grid point the density decays as (w_last / w)^2.
struct TabulatedC {
    std::vector<SpectrumPoint> grid;
};

class SpectrumModel {
public:
    using Family = std::variant<MemorylessD, GaussMarkovD, NotchedD, PeakedD, TabulatedD,
                                GaussMarkovC, ClarkeC, TabulatedC>;

    static SpectrumModel memoryless();
    static SpectrumModel gauss_markov_d(double eps);
    static SpectrumModel notched(int n);
    static SpectrumModel peaked(int n);
    /// Validates the grid and rescales it to unit power.
    static SpectrumModel tabulated_d(std::vector<SpectrumPoint> grid);
    static SpectrumModel gauss_markov_c(double eps_c);
    static SpectrumModel clarke(double omega_m);
    /// Validates the grid and rescales it to unit power.
    static SpectrumModel tabulated_c(std::vector<SpectrumPoint> grid);

    TimeBase time_base() const;
    bool is_discrete() const { return time_base() == TimeBase::Discrete; }
    bool is_even() const;
    const Family& family() const { return family_; }
    std::string describe() const;

    template <class T>
    const T* as() const {
        return std::get_if<T>(&family_);
    }

private:
    explicit SpectrumModel(Family family) : family_(std::move(family)) {}
    Family family_;
};

/// S(e^{j Omega}) or S(j w). Discrete models reject |Omega| > pi (OutOfDomain).
/// Clarke returns +inf exactly at |w| = omega_m.
double eval_spectrum(const SpectrumModel& model, double freq);

/// Frequencies in the non-negative half domain where the density has a
/// discontinuity, a kink or a narrow feature; used to seed quadrature.
std::vector<double> feature_points(const SpectrumModel& model);

/// (1/2pi) * integral of h(S) over the frequency domain. For continuous
/// models h(0) must be 0.
double band_average(const SpectrumModel& model, const std::function<double(double)>& h,
                    const QuadratureSpec& spec = {});

/// (1/2pi) * integral S; 1 for every valid model.
double unit_power(const SpectrumModel& model, const QuadratureSpec& spec = {});

/// Complex autocorrelation K(tau). Discrete models require an integer lag.
Complex autocorrelation(const SpectrumModel& model, double tau, const QuadratureSpec& spec = {});

/// r[0..count-1] of a discrete model.
std::vector<Complex> autocorrelation_sequence(const SpectrumModel& model, std::size_t count,
                                              const QuadratureSpec& spec = {});

/// (1/2pi) * integral S^2 over [-pi, pi].
double square_integral(const SpectrumModel& model, const QuadratureSpec& spec = {});

/// Closed-form square integral of the parametric discrete families; empty for tabulated input.
std::optional<double> square_integral_exact(const SpectrumModel& model);

/// g(rho) = (1/2pi) * integral log(1 + rho S) over [-pi, pi].
double log_spectral_integral(const SpectrumModel& model, double rho,
                             const QuadratureSpec& spec = {});

/// rho - g(rho), evaluated without cancellation; works for both time bases
/// (for continuous models it is P - (1/2pi) * integral log(1 + P S) dw).
double log_spectral_excess(const SpectrumModel& model, double rho, const QuadratureSpec& spec = {});

/// exp{(1/2pi) integral log S}; exactly 0 when S vanishes on a set of positive measure.
double noiseless_pred_error(const SpectrumModel& model, const QuadratureSpec& spec = {});

/// (1/2pi) * measure{Omega : S = 0}; tabulated densities count S < 1e-12 as zero.
double zero_set_measure(const SpectrumModel& model);

/// (1/2pi) * integral S^2 dw for continuous models. Raises Divergent when
/// partial integrals keep growing as the truncation approaches a singularity.
double continuous_square_integral(const SpectrumModel& model, const QuadratureSpec& spec = {});

/// Integral of K(s - t) over [0, T]^2.
double double_integral_autocorrelation(const SpectrumModel& model, double T,
                                       const QuadratureSpec& spec = {});

struct DiscretizedChannel {
    SpectrumModel spectrum;       ///< tabulated discrete density
    double rho = 0.0;             ///< average SNR per symbol
    double T = 0.0;               ///< symbol duration
    double P = 0.0;               ///< envelope power
    double kernel_integral = 0.0; ///< integral of K over [0, T]^2
    double alias_power = 0.0;     ///< unit-power check of the untabulated alias sum
    int alias_terms = 0;          ///< aliases kept on each side
};

struct DiscretizeOptions {
    std::size_t geometric_points = 1500;
    std::size_t uniform_points = 500;
    double alias_tolerance = 1e-10;
    QuadratureSpec quadrature{};
};

/// Matched-filter-and-sample conversion of a continuous model with symbol
/// duration T and envelope power P.
DiscretizedChannel discretize(const SpectrumModel& model, double T, double P,
                              const DiscretizeOptions& options = {});

/// Exact (untabulated) discrete density of the converted channel; exposed for testing.
double aliased_density(const SpectrumModel& model, double T, double kernel_integral,
                       int alias_terms, double omega);

/// Two-column CSV "freq,density" with a header row; '#' lines are comments.
std::vector<SpectrumPoint> read_spectrum_csv(std::istream& in);
std::vector<SpectrumPoint> read_spectrum_csv_file(const std::string& path);
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& points,
                        int precision = 9);

}  // namespace pskfade::spectral
