#include "vibrotherm/polariton.hpp"
#include "vibrotherm/errors.hpp"
#include "vibrotherm/units.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>

namespace vibrotherm {

void PolaritonSetup::validate() const
{
    if (!(cavity.alpha_cav > 0.0)) throw DomainError("alpha_cav must be > 0");
    if (!(cavity.area > 0.0)) throw DomainError("cavity area must be > 0");
    if (!(rabi > 0.0)) throw DomainError("Rabi energy must be > 0");
    if (!(n_mol > 0.0)) throw DomainError("molecule count must be > 0");
    if (!(cavity.omega_cav0 < omega_0))
        throw DomainError("only negative exciton-photon detuning (omega_cav0 < omega_0) is supported");
}

namespace {
double half_split(const PolaritonSetup& s, double k)
{
    const double d = s.detuning(k);
    return std::sqrt(0.25 * d * d + s.rabi * s.rabi);
}
} // namespace

BranchEnergies branch_energies(const PolaritonSetup& s, double k)
{
    const double mid = 0.5 * (s.omega_0 + s.cavity.omega_cav(k));
    const double r = half_split(s, k);
    return {mid - r, mid + r};
}

double lower_branch(const PolaritonSetup& s, double k) { return branch_energies(s, k).lower; }

double lower_branch_gap(const PolaritonSetup& s, double k_hi, double k_lo)
{
    // d(k) = omega_0 - omega_cav(k); R = sqrt(d^2/4 + Omega^2)
    // omega_low = (omega_0 + omega_cav)/2 - R, and
    // R_hi - R_lo = (d_hi - d_lo)(d_hi + d_lo) / (4 (R_hi + R_lo))
    const double dk2 = s.cavity.alpha_cav * (k_hi * k_hi - k_lo * k_lo);
    const double d_sum = s.detuning(k_hi) + s.detuning(k_lo);
    const double r_sum = half_split(s, k_hi) + half_split(s, k_lo);
    return dk2 * (0.5 + d_sum / (4.0 * r_sum));
}

double hopfield_angle(const PolaritonSetup& s, double k)
{
    return 0.5 * std::atan2(2.0 * s.rabi, s.detuning(k));
}

double excitonic_fraction(const PolaritonSetup& s, double k)
{
    const double phi = hopfield_angle(s, k);
    return std::sin(phi) * std::sin(phi);
}

double hopfield_angle_difference(const PolaritonSetup& s, double k_a, double k_b)
{
    // arg((d_a + 2i Omega) conj(d_b + 2i Omega)) = 2 (phi_a - phi_b)
    const double da = s.detuning(k_a), db = s.detuning(k_b), w = 2.0 * s.rabi;
    return 0.5 * std::atan2(w * (db - da), da * db + w * w);
}

double alpha_pol(const PolaritonSetup& s)
{
    const double d = s.detuning(0.0);
    return 0.5 * s.cavity.alpha_cav * (1.0 + d / std::sqrt(d * d + 4.0 * s.rabi * s.rabi));
}

double delta_omega_min(const PolaritonSetup& s)
{
    if (!(s.cavity.area > 0.0)) throw DomainError("cavity area must be > 0");
    return 4.0 * constants::pi * alpha_pol(s) / s.cavity.area;
}

double n_states(double k_max, double area)
{
    return constants::pi * k_max * k_max * area / (4.0 * constants::pi * constants::pi);
}

double k_for_gap(const PolaritonSetup& s, double dw)
{
    if (dw < 0.0) throw DomainError("k_for_gap: gap must be >= 0");
    if (dw == 0.0) return 0.0;
    if (dw >= s.omega_0 - lower_branch(s, 0.0))
        throw DomainError("requested gap exceeds the lower-branch band height");
    auto f = [&](double k) { return lower_branch_gap(s, k, 0.0) - dw; };
    double hi = std::sqrt(dw / alpha_pol(s));
    while (f(hi) < 0.0) hi *= 2.0;
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, 0.0, hi, f(0.0), f(hi),
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

double cavity_for_ground(double omega_0, double rabi, double omega_low0)
{
    const double e = omega_0 - omega_low0;
    if (!(e > 0.0)) throw DomainError("requested ground-state energy must lie below the exciton");
    // e = d/2 + sqrt(d^2/4 + Omega^2)  =>  d = (e^2 - Omega^2)/e
    const double d = (e * e - rabi * rabi) / e;
    return omega_0 - d;
}

} // namespace vibrotherm
