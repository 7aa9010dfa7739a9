#pragma once

// Command-line front end. Every command writes CSV with a header row; the
// library entry point lets tests run commands in-process.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pskfade::cli {

/// start:stop:step in dB.
struct SweepSpec {
    double start_db = 0.0;
    double stop_db = 0.0;
    double step_db = 1.0;

    /// Grid values start + i * step up to and including stop (within 1e-9 step).
    std::vector<double> grid_db() const;
};

/// Throws pskfade::Error (InvalidArgument) on malformed input.
SweepSpec parse_sweep(std::string_view text);

/// Shortest "%.*g" rendering with `precision` significant digits.
std::string format_number(double value, int precision);

enum ExitCode : int { Success = 0, NumericFailure = 1, UsageError = 2 };

/// Runs one command; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace pskfade::cli
