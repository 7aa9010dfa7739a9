#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pskfade/error.hpp"
#include "pskfade/spectrum.hpp"

namespace pskfade::spectral {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_number(std::string_view text, double& value) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::vector<SpectrumPoint> read_spectrum_csv(std::istream& in) {
    std::vector<SpectrumPoint> points;
    std::string line;
    bool header_seen = false;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto comma = view.find(',');
        if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
            fail(ErrorKind::Io, "line " + std::to_string(line_number) + ": expected two columns");
        }
        if (!header_seen) {
            double probe = 0.0;
            if (parse_number(view.substr(0, comma), probe)) {
                fail(ErrorKind::Io, "spectrum CSV needs a header row");
            }
            header_seen = true;
            continue;
        }
        SpectrumPoint p;
        if (!parse_number(view.substr(0, comma), p.freq) ||
            !parse_number(view.substr(comma + 1), p.density)) {
            fail(ErrorKind::Io, "line " + std::to_string(line_number) + ": malformed number");
        }
        points.push_back(p);
    }
    if (!header_seen) fail(ErrorKind::Io, "spectrum CSV is empty");
    return points;
}

std::vector<SpectrumPoint> read_spectrum_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    return read_spectrum_csv(in);
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& points,
                        int precision) {
    char buffer[64];
    out << "freq,density\n";
    for (const auto& p : points) {
        std::snprintf(buffer, sizeof buffer, "%.*g", precision, p.freq);
        out << buffer << ',';
        std::snprintf(buffer, sizeof buffer, "%.*g", precision, p.density);
        out << buffer << '\n';
    }
}

}  // namespace pskfade::spectral
