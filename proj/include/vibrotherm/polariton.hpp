#pragma once

namespace vibrotherm {

// Energies in meV, k in 1/um, alpha_cav in meV um^2, area in um^2.
struct CavityConfig {
    double omega_cav0 = 0.0;
    double alpha_cav = 0.0;
    double area = 0.0;

    double omega_cav(double k) const { return omega_cav0 + alpha_cav * k * k; }
};

struct PolaritonSetup {
    CavityConfig cavity;
    double omega_0 = 0.0;   // dressed exciton
    double rabi = 0.0;      // Omega_R
    double n_mol = 1.0;

    double detuning(double k) const { return omega_0 - cavity.omega_cav(k); }   // > 0 below the exciton
    void validate() const;
};

struct BranchEnergies {
    double lower;
    double upper;
};

BranchEnergies branch_energies(const PolaritonSetup& s, double k);
double lower_branch(const PolaritonSetup& s, double k);
// omega_low(k_hi) - omega_low(k_lo) without cancellation between two
// ~eV-sized numbers
double lower_branch_gap(const PolaritonSetup& s, double k_hi, double k_lo);

// phi in (0, pi/2); sin^2(phi) is the excitonic fraction of the lower branch
double hopfield_angle(const PolaritonSetup& s, double k);
double excitonic_fraction(const PolaritonSetup& s, double k);
// phi(k_a) - phi(k_b), formed as one angle to keep small differences exact
double hopfield_angle_difference(const PolaritonSetup& s, double k_a, double k_b);

double alpha_pol(const PolaritonSetup& s);
double delta_omega_min(const PolaritonSetup& s);
double n_states(double k_max, double area);

// k >= 0 at which omega_low(k) - omega_low(0) = dw
double k_for_gap(const PolaritonSetup& s, double dw);

// omega_cav0 that puts the lower branch at omega_low0 for the given Rabi
// energy; throws DomainError if omega_low0 >= omega_0.
double cavity_for_ground(double omega_0, double rabi, double omega_low0);

} // namespace vibrotherm
