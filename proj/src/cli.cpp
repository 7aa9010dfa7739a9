#include "pskfade/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "pskfade/error.hpp"
#include "pskfade/execution.hpp"
#include "pskfade/mc_sim.hpp"
#include "pskfade/mutual_info.hpp"
#include "pskfade/prediction.hpp"
#include "pskfade/rates.hpp"
#include "pskfade/spectrum.hpp"

namespace pskfade::cli {

namespace {

using spectral::SpectrumModel;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        fail(ErrorKind::InvalidArgument, "cannot parse " + std::string(what) + " from '" +
                                             std::string(text) + "'");
    }
    return value;
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }
double to_db(double value) { return 10.0 * std::log10(value); }

struct ModelFlags {
    std::string model;
    double eps = 1e-4;
    double eps_c = 0.9;
    int n = 4;
    double omega_m = 100.0;
    std::string spectrum_csv;

    void add_to(CLI::App& app, const std::string& default_model) {
        model = default_model;
        app.add_option("--model", model,
                       "memoryless | gm-d | notched | peaked | tabulated-d | gm-c | clarke | tabulated-c")
            ->capture_default_str();
        app.add_option("--eps", eps, "innovation rate of gm-d")->capture_default_str();
        app.add_option("--eps-c", eps_c, "innovation rate of gm-c")->capture_default_str();
        app.add_option("--n", n, "parameter of notched / peaked")->capture_default_str();
        app.add_option("--omega-m", omega_m, "maximum Doppler frequency of clarke")
            ->capture_default_str();
        app.add_option("--spectrum-csv", spectrum_csv, "freq,density table for tabulated models");
    }

    SpectrumModel build() const {
        if (model == "memoryless") return SpectrumModel::memoryless();
        if (model == "gm-d") return SpectrumModel::gauss_markov_d(eps);
        if (model == "notched") return SpectrumModel::notched(n);
        if (model == "peaked") return SpectrumModel::peaked(n);
        if (model == "gm-c") return SpectrumModel::gauss_markov_c(eps_c);
        if (model == "clarke") return SpectrumModel::clarke(omega_m);
        if (model == "tabulated-d" || model == "tabulated-c") {
            require(!spectrum_csv.empty(), "--spectrum-csv is required for " + model);
            auto grid = spectral::read_spectrum_csv_file(spectrum_csv);
            return model == "tabulated-d" ? SpectrumModel::tabulated_d(std::move(grid))
                                          : SpectrumModel::tabulated_c(std::move(grid));
        }
        fail(ErrorKind::InvalidArgument, "unknown model '" + model + "'");
    }
};

struct Common {
    int precision = 9;
    std::string out_path;
    int threads = 0;
};

class CsvWriter {
public:
    CsvWriter(std::ostream& out, int precision) : out_(out), precision_(precision) {}

    void header(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto name : names) {
            if (!first) out_ << ',';
            out_ << name;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& field(double value) {
        separator();
        out_ << format_number(value, precision_);
        return *this;
    }
    CsvWriter& field(std::string_view text) {
        separator();
        out_ << text;
        return *this;
    }
    CsvWriter& field(std::size_t value) {
        separator();
        out_ << value;
        return *this;
    }
    void end_row() {
        out_ << '\n';
        fresh_ = true;
    }
    void comment(std::string_view text) { out_ << "# " << text << '\n'; }

private:
    void separator() {
        if (!fresh_) out_ << ',';
        fresh_ = false;
    }

    std::ostream& out_;
    int precision_;
    bool fresh_ = true;
};

// Evaluates rows in parallel; output order is the grid order.
template <class Row, class Fn>
std::vector<Row> map_grid(const std::vector<double>& grid, Fn&& fn) {
    std::vector<Row> rows(grid.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            rows[i] = fn(grid[i]);
        } catch (...) {
#pragma omp critical(pskfade_cli_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

void cmd_regimes(CsvWriter& csv, double eps, const SweepSpec& sweep) {
    const auto model = SpectrumModel::gauss_markov_d(eps);
    struct Row {
        double sigma2, rho_eff;
        prediction::Regime regime;
    };
    const auto grid = sweep.grid_db();
    const auto rows = map_grid<Row>(grid, [&](double db) {
        const double rho = from_db(db);
        const auto p = prediction::predict(model, rho);
        return Row{p.sigma2_inf, p.rho_eff, prediction::classify_regime(eps, rho).regime};
    });
    csv.header({"rho_db", "rho_eff_db", "sigma2_inf", "regime"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.field(grid[i]).field(to_db(rows[i].rho_eff)).field(rows[i].sigma2);
        csv.field(prediction::to_string(rows[i].regime)).end_row();
    }
}

void cmd_normalized_rate(CsvWriter& csv, const SpectrumModel& model, int order,
                         const SweepSpec& sweep) {
    const mi::PskConstellation constellation(order);
    require(model.is_discrete(), "normalized-rate needs a discrete model");
    struct Row {
        double rate, coherent;
    };
    const auto grid = sweep.grid_db();
    const auto rows = map_grid<Row>(grid, [&](double db) {
        const double rho = from_db(db);
        return Row{mi::induced_channel_rate(model, rho, constellation),
                   mi::coherent_gaussian_capacity(rho)};
    });
    csv.header({"rho_db", "rate_nats", "rate_over_rho", "coherent_gaussian_over_rho"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = from_db(grid[i]);
        csv.field(grid[i]).field(rows[i].rate).field(rows[i].rate / rho).field(rows[i].coherent / rho);
        csv.end_row();
    }
}

void cmd_wideband(CsvWriter& csv, const SpectrumModel& model, const SweepSpec& sweep) {
    require(!model.is_discrete(), "wideband needs a continuous model (gm-c, clarke, tabulated-c)");
    const auto* gm = model.as<spectral::GaussMarkovC>();
    const auto* clarke = model.as<spectral::ClarkeC>();
    double coefficient = kNaN;
    if (clarke == nullptr) coefficient = rates::ct_small_p_coefficient(model);

    struct Row {
        double rate, quadrature, small_p;
    };
    const auto grid = sweep.grid_db();
    const auto rows = map_grid<Row>(grid, [&](double db) {
        const double P = from_db(db);
        Row row{};
        row.quadrature = rates::wideband_rate(model, P);
        if (gm != nullptr) {
            row.rate = rates::wideband_rate_gm(gm->eps_c, P);
        } else if (clarke != nullptr) {
            row.rate = rates::wideband_rate_clarke(clarke->omega_m, P);
        } else {
            row.rate = row.quadrature;
        }
        if (clarke != nullptr) {
            row.small_p = P <= 1.0 ? rates::clarke_small_p_asymptote(clarke->omega_m, P) : kNaN;
        } else {
            row.small_p = coefficient * P * P;
        }
        return row;
    });
    csv.header({"p_db", "rate", "small_p_asymptote", "large_p_asymptote", "rate_quadrature"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.field(grid[i]).field(rows[i].rate).field(rows[i].small_p).field(from_db(grid[i]));
        csv.field(rows[i].quadrature).end_row();
    }
}

struct SimFlags {
    double rho = 1.0;
    std::size_t L = 200;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    int order = 4;
    bool pilots_only = false;
};

void cmd_simulate(CsvWriter& csv, const SpectrumModel& model, const SimFlags& flags) {
    sim::SimConfig config;
    config.model = model;
    config.rho = flags.rho;
    config.L = flags.L;
    config.trials = flags.trials;
    config.seed = flags.seed;
    config.constellation = mi::PskConstellation(flags.order);
    config.pilots_only = flags.pilots_only;
    const auto result = sim::run_recursive_training(config);
    csv.header({"l", "sigma2_analytic", "sigma2_empirical", "stderr"});
    for (std::size_t l = 0; l < flags.L; ++l) {
        csv.field(l).field(result.analytic_sigma2[l]).field(result.empirical_sigma2[l]);
        csv.field(result.standard_error[l]).end_row();
    }
    csv.comment("seed=" + std::to_string(result.rng_seed));
}

void cmd_transient(CsvWriter& csv, const SpectrumModel& model, double rho, std::size_t L) {
    const auto sequence = prediction::transient_error_sequence(model, rho, L);
    const double steady = prediction::steady_state_error(model, rho);
    csv.header({"l", "sigma2", "rho_eff", "sigma2_inf"});
    for (std::size_t l = 1; l <= L; ++l) {
        const double s = sequence[l - 1];
        csv.field(l).field(s).field(prediction::effective_snr(s, rho)).field(steady).end_row();
    }
}

void cmd_spectrum(CsvWriter& csv, const SpectrumModel& model, std::size_t points, double max_freq,
                  double T, double P, int precision) {
    require(points >= 2, "--points must be at least 2");
    if (T > 0.0) {
        const auto channel = spectral::discretize(model, T, P);
        const auto& grid = channel.spectrum.as<spectral::TabulatedD>()->grid;
        csv.comment("rho=" + format_number(channel.rho, precision) +
                    " alias_terms=" + std::to_string(channel.alias_terms));
        csv.header({"freq", "density"});
        for (const auto& p : grid) csv.field(p.freq).field(p.density).end_row();
        return;
    }
    double top = std::numbers::pi;
    if (!model.is_discrete()) {
        if (max_freq > 0.0) {
            top = max_freq;
        } else if (const auto* c = model.as<spectral::ClarkeC>()) {
            top = 1.5 * c->omega_m;
        } else if (const auto* g = model.as<spectral::GaussMarkovC>()) {
            top = 10.0 * std::abs(std::log1p(-g->eps_c));
        } else {
            top = 2.0 * model.as<spectral::TabulatedC>()->grid.back().freq;
        }
    }
    csv.header({"freq", "density"});
    for (std::size_t i = 0; i < points; ++i) {
        const double f = top * static_cast<double>(i) / static_cast<double>(points - 1);
        csv.field(f).field(spectral::eval_spectrum(model, f)).end_row();
    }
}

}  // namespace

std::vector<double> SweepSpec::grid_db() const {
    require(step_db > 0.0 && std::isfinite(step_db), "sweep step must be positive");
    require(start_db <= stop_db, "sweep start must not exceed stop");
    const auto count = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
    require(count <= 10'000'000, "sweep has too many points");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = start_db + static_cast<double>(i) * step_db;
    return grid;
}

SweepSpec parse_sweep(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        fail(ErrorKind::InvalidArgument, "sweep must look like start:stop:step, got '" +
                                             std::string(text) + "'");
    }
    SweepSpec s;
    s.start_db = parse_double(text.substr(0, first), "sweep start");
    s.stop_db = parse_double(text.substr(first + 1, second - first - 1), "sweep stop");
    s.step_db = parse_double(text.substr(second + 1), "sweep step");
    require(s.step_db > 0.0, "sweep step must be positive");
    require(s.start_db <= s.stop_db, "sweep start must not exceed stop");
    return s;
}

std::string format_number(double value, int precision) {
    if (value == 0.0) return "0";  // also folds -0
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
    return buffer;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rates and channel prediction for PSK over correlated Rayleigh fading"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--precision", common.precision, "significant digits in CSV output")
        ->capture_default_str()
        ->check(CLI::Range(1, 17));
    app.add_option("--out", common.out_path, "write CSV to this file instead of stdout");
    app.add_option("--threads", common.threads, "OpenMP threads (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);

    std::string sweep_text;
    ModelFlags model_flags;
    std::function<void(CsvWriter&)> action;

    auto* regimes = app.add_subcommand("regimes", "steady-state prediction regimes of Gauss-Markov fading");
    double regimes_eps = 1e-4;
    regimes->add_option("--eps", regimes_eps, "innovation rate")->capture_default_str();
    regimes->add_option("--sweep", sweep_text, "rho sweep start:stop:step in dB")->default_str("-80:80:1");
    regimes->callback([&] {
        action = [&](CsvWriter& csv) {
            cmd_regimes(csv, regimes_eps, parse_sweep(sweep_text.empty() ? "-80:80:1" : sweep_text));
        };
    });

    auto* normalized = app.add_subcommand("normalized-rate", "PSK rate over SNR on the induced channel");
    int order = 4;
    model_flags.add_to(*normalized, "gm-d");
    normalized->add_option("--M", order, "PSK order (>= 3)")->capture_default_str();
    normalized->add_option("--sweep", sweep_text, "rho sweep in dB")->default_str("-40:10:0.5");
    normalized->callback([&] {
        action = [&](CsvWriter& csv) {
            cmd_normalized_rate(csv, model_flags.build(), order,
                                parse_sweep(sweep_text.empty() ? "-40:10:0.5" : sweep_text));
        };
    });

    auto* wideband = app.add_subcommand("wideband", "wideband rate over envelope power");
    ModelFlags wide_flags;
    wide_flags.add_to(*wideband, "gm-c");
    wideband->add_option("--sweep", sweep_text, "P sweep in dB")->default_str("-30:30:1");
    wideband->callback([&] {
        action = [&](CsvWriter& csv) {
            cmd_wideband(csv, wide_flags.build(), parse_sweep(sweep_text.empty() ? "-30:30:1" : sweep_text));
        };
    });

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo recursive training");
    ModelFlags sim_model;
    SimFlags sim_flags;
    sim_model.add_to(*simulate, "gm-d");
    simulate->add_option("--rho", sim_flags.rho, "SNR (linear)")->capture_default_str();
    simulate->add_option("--L", sim_flags.L, "number of sub-channels")->capture_default_str();
    simulate->add_option("--trials", sim_flags.trials, "Monte Carlo trials")->capture_default_str();
    simulate->add_option("--seed", sim_flags.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--M", sim_flags.order, "PSK order (>= 3)")->capture_default_str();
    simulate->add_flag("--pilots-only", sim_flags.pilots_only, "send the pilot on every sub-channel");
    simulate->callback([&] {
        action = [&](CsvWriter& csv) { cmd_simulate(csv, sim_model.build(), sim_flags); };
    });

    auto* transient = app.add_subcommand("transient", "finite-history prediction error sequence");
    ModelFlags transient_model;
    double transient_rho = 1.0;
    std::size_t transient_L = 200;
    transient_model.add_to(*transient, "gm-d");
    transient->add_option("--rho", transient_rho, "SNR (linear)")->capture_default_str();
    transient->add_option("--L", transient_L, "history length")->capture_default_str();
    transient->callback([&] {
        action = [&](CsvWriter& csv) {
            cmd_transient(csv, transient_model.build(), transient_rho, transient_L);
        };
    });

    auto* spectrum = app.add_subcommand("spectrum", "tabulate a spectral density");
    ModelFlags spectrum_model;
    std::size_t points = 513;
    double max_freq = 0.0, T = 0.0, P = 1.0;
    spectrum_model.add_to(*spectrum, "gm-d");
    spectrum->add_option("--points", points, "number of grid points")->capture_default_str();
    spectrum->add_option("--max-freq", max_freq, "upper frequency for continuous models");
    spectrum->add_option("--T", T, "symbol duration: tabulate the sampled discrete spectrum instead");
    spectrum->add_option("--P", P, "envelope power used with --T")->capture_default_str();
    spectrum->callback([&] {
        action = [&](CsvWriter& csv) {
            cmd_spectrum(csv, spectrum_model.build(), points, max_freq, T, P, common.precision);
        };
    });

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return UsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_usage_error() ? UsageError : NumericFailure;
    }

    try {
        set_thread_count(common.threads);
        std::ostringstream buffer;
        CsvWriter csv(buffer, common.precision);
        action(csv);
        if (common.out_path.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(common.out_path, std::ios::binary);
            if (!file) fail(ErrorKind::Io, "cannot open '" + common.out_path + "' for writing");
            file << buffer.str();
            if (!file) fail(ErrorKind::Io, "failed writing '" + common.out_path + "'");
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_usage_error() ? UsageError : NumericFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return NumericFailure;
    }
    return Success;
}

}  // namespace pskfade::cli
