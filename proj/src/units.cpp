#include "vibrotherm/units.hpp"
#include "vibrotherm/errors.hpp"

#include <cmath>

namespace vibrotherm {

double unit_scale(EnergyUnit u)
{
    switch (u) {
    case EnergyUnit::eV: return constants::meV_per_eV;
    case EnergyUnit::meV: return 1.0;
    case EnergyUnit::cm1: return constants::meV_per_cm1;
    case EnergyUnit::K: return constants::kB_meV_per_K;
    }
    throw ConfigError("unknown energy unit");
}

EnergyUnit parse_energy_unit(std::string_view s)
{
    if (s == "eV") return EnergyUnit::eV;
    if (s == "meV") return EnergyUnit::meV;
    if (s == "cm1" || s == "cm-1" || s == "cm^-1") return EnergyUnit::cm1;
    if (s == "K") return EnergyUnit::K;
    throw ConfigError("unknown energy unit '" + std::string(s) + "'");
}

std::string_view unit_suffix(EnergyUnit u)
{
    switch (u) {
    case EnergyUnit::eV: return "eV";
    case EnergyUnit::meV: return "meV";
    case EnergyUnit::cm1: return "cm1";
    case EnergyUnit::K: return "K";
    }
    return "?";
}

double Energy::in_meV() const { return value * unit_scale(unit); }

Temperature::Temperature(double T) : kelvin(T)
{
    if (!(T >= 0.0) || !std::isfinite(T))
        throw DomainError("temperature must be finite and >= 0 K");
}

double to_meV(double value, EnergyUnit u) { return value * unit_scale(u); }
double from_meV(double meV, EnergyUnit u) { return meV / unit_scale(u); }

Energy convert_energy(Energy x, EnergyUnit target)
{
    if (x.unit == target) return x;
    return {from_meV(x.in_meV(), target), target};
}

double bose_occupation(double dE, Temperature T)
{
    if (T.kelvin == 0.0) return 0.0;
    if (!(dE > 0.0))
        throw DomainError("bose_occupation: energy gap must be > 0 at finite temperature");
    return 1.0 / std::expm1(dE / T.kT());
}

double poisson_weight(int n, double x)
{
    if (n < 0 || x < 0.0) throw DomainError("poisson_weight: need n >= 0 and x >= 0");
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(x) - x - std::lgamma(n + 1.0));
}

} // namespace vibrotherm
