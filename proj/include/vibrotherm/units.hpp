#pragma once

#include <string>
#include <string_view>

namespace vibrotherm {

// Canonical units: energies in meV, times in ps, wavevectors in 1/um,
// areas in um^2.
namespace constants {
inline constexpr double hbar_meV_ps = 0.6582119569;
inline constexpr double kB_meV_per_K = 8.617333262e-2;
inline constexpr double meV_per_cm1 = 0.1239841984;
inline constexpr double meV_per_eV = 1000.0;
inline constexpr double pi = 3.14159265358979323846;
} // namespace constants

enum class EnergyUnit { eV, meV, cm1, K };

struct Energy {
    double value = 0.0;
    EnergyUnit unit = EnergyUnit::meV;

    static Energy meV(double v) { return {v, EnergyUnit::meV}; }
    static Energy eV(double v) { return {v, EnergyUnit::eV}; }
    static Energy cm1(double v) { return {v, EnergyUnit::cm1}; }
    static Energy kelvin(double v) { return {v, EnergyUnit::K}; }

    double in_meV() const;
};

struct Temperature {
    double kelvin = 0.0;
    explicit Temperature(double T = 0.0);
    double kT() const { return kelvin * constants::kB_meV_per_K; }
};

// meV per one unit of `u`
double unit_scale(EnergyUnit u);
EnergyUnit parse_energy_unit(std::string_view s);   // throws ConfigError
std::string_view unit_suffix(EnergyUnit u);

Energy convert_energy(Energy x, EnergyUnit target);
double to_meV(double value, EnergyUnit u);
double from_meV(double meV, EnergyUnit u);

// 1/(exp(dE/kT) - 1); exactly 0 at T = 0.
double bose_occupation(double dE_meV, Temperature T);
inline double bose_occupation(Energy dE, Temperature T) { return bose_occupation(dE.in_meV(), T); }

// x^n e^{-x} / n!, evaluated in log space.
double poisson_weight(int n, double x);

inline double rate_per_ps(double energy_meV) { return energy_meV / constants::hbar_meV_ps; }

} // namespace vibrotherm
