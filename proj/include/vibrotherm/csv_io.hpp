#pragma once

#include "vibrotherm/spectra.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vibrotherm {

struct CsvTable {
    std::vector<std::string> comments;   // '#' lines, without the marker
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;   // throws ConfigError
};

// Locale-independent shortest round-trip-safe formatting; "nan" for NaN.
std::string format_number(double v);

// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
std::string render_csv(const std::vector<std::string>& comments, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

CsvTable read_csv(const std::filesystem::path& path);

// energy_eV, intensity_per_eV with '# kind = ...' and '# temperature_K = ...'
void write_spectrum(const std::filesystem::path& path, const SpectralCurve& c, std::vector<std::string> comments);
SpectralCurve read_spectrum(const std::filesystem::path& path);

} // namespace vibrotherm
