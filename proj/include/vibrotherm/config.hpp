#pragma once

#include "vibrotherm/condensim.hpp"
#include "vibrotherm/extraction.hpp"
#include "vibrotherm/polariton.hpp"
#include "vibrotherm/spectra.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vibrotherm {

// Minimal TOML-like document: [section] headers, `key = value` lines with
// numbers, booleans, "strings" and [number, ...] arrays; '#' comments.
struct ConfigEntry {
    std::string key;
    std::variant<double, bool, std::string, std::vector<double>> value;
    int line = 0;
};

struct ConfigDocument {
    std::map<std::string, std::vector<ConfigEntry>> sections;
    std::map<std::string, int> section_lines;

    static ConfigDocument parse(std::string_view text);
    bool has(const std::string& section) const { return sections.count(section) > 0; }
};

struct RatesSection {
    double T = 300.0;
    double k = 0.0;          // 1/um; 0 -> nearest neighbour of k'
    double kprime = 0.0;
    std::string spectral_density = "flat_A1";
    std::vector<double> map_rabi;     // meV
    std::vector<double> map_ground;   // meV
    std::vector<double> ratevt_T;     // K
    double ratevt_k_max = 1.0;
    int ratevt_k_count = 40;
    std::string rate_unit = "eV";     // eV | meV | ps-1
};

struct SimulationSection {
    int n_modes = 31;
    double k_max = 3.0;
    DecayRates decay;
    double gamma_therm = 5e-7;   // meV
    double T = 300.0;
    ScatterParams scatter;
    PumpPulse pump;
    std::optional<double> pump_ratio;   // run at this multiple of the threshold
    SeedPulse seed;
    double dt = 5e-4;
    double t_end = 10.0;
    int save_stride = 20;
    ThresholdOptions threshold;
};

struct OutputSection {
    std::string dir = "out";
    bool svg = true;
    std::vector<double> temperatures;   // K
    double grid_step = 0.5;             // meV
    std::string model = "exact";        // exact | reduced | homogeneous
};

struct RunConfig {
    std::optional<MolecularSystem> molecule;
    std::optional<PolaritonSetup> cavity;
    std::optional<LowFreqNet> net;
    std::optional<RatesSection> rates;
    std::optional<SimulationSection> simulation;
    OutputSection output;
    std::string resolved;   // canonical dump with defaults, units in meV/K/ps/um

    const MolecularSystem& require_molecule() const;
    const PolaritonSetup& require_cavity() const;
    const LowFreqNet& require_net() const;
    const RatesSection& require_rates() const;
    const SimulationSection& require_simulation() const;
};

RunConfig load_config(std::string_view text);
RunConfig load_config_file(const std::filesystem::path& path);

// reference MeLPPP configuration shipped with the binary
std::string_view bundled_config();

} // namespace vibrotherm
