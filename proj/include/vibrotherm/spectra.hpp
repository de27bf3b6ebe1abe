#pragma once

#include "vibrotherm/lineshape_kernels.hpp"
#include "vibrotherm/units.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vibrotherm {

// All energies in meV.
struct VibrationalMode {
    double omega = 0.0;
    double huang_rhys_sq = 0.0;   // Lambda^2
    double gamma = 0.0;           // damping, Lorentzian model only
};

struct MolecularSystem {
    double omega_0 = 0.0;         // dressed 0-0 energy
    double gamma_inhom = 0.0;     // Gaussian standard deviation
    double gamma_diss = 0.0;      // exciton decay, Lorentzian model only
    std::vector<VibrationalMode> modes;   // ascending in omega
    double omega_M = 0.0;         // modes with omega <= omega_M are "low"
    double broadening_ratio = 5.0;

    std::vector<VibrationalMode> low_modes() const;
    std::vector<VibrationalMode> high_modes() const;
    void validate(LineShape shape = LineShape::gaussian) const;
};

// Sorts the modes and fills omega_M from the rule omega_M < Gamma < omega_{M+1}
// when no explicit cutoff is supplied.
MolecularSystem make_system(double omega_0, double gamma_inhom, std::vector<VibrationalMode> modes,
                            std::optional<double> omega_M = std::nullopt, double gamma_diss = 0.0);
double cutoff_from_width(const std::vector<VibrationalMode>& sorted_modes, double gamma_inhom);

enum class SpectrumKind { emission, absorption };

struct SpectralCurve {
    std::vector<double> grid;        // meV, strictly increasing
    std::vector<double> intensity;   // per meV
    SpectrumKind kind = SpectrumKind::emission;
    double temperature = 0.0;        // K
    std::string model;

    double integral() const;
};

struct TruncationPolicy {
    double epsilon = 1e-8;
    int max_quanta = 40;
    double prune = 1e-12;
};

// One multimode vibronic term: net energy sum_j omega_j (k_j - k'_j) and
// the total quanta sum_j gamma_j (k_j + k'_j) damping it carries.
struct ProgressionTerm {
    double shift;
    double weight;
    double damping;
};

// Double Poisson sum over thermal (k') and emitted (k) quanta, truncated per
// mode and pruned across modes; weights renormalized to 1. When
// keep_damping is false, terms with equal net quanta are merged.
std::vector<ProgressionTerm> vibronic_progression(const std::vector<VibrationalMode>& modes,
                                                  Temperature T, const TruncationPolicy& policy = {},
                                                  bool keep_damping = false);

std::vector<double> uniform_grid(double lo, double hi, double step);
// [omega_0 - 0.8 eV, omega_0 + 0.8 eV] at 0.5 meV
std::vector<double> default_grid(const MolecularSystem& sys);
// Symmetric about omega_0, spanning every retained line centre +- 10 widths.
std::vector<double> covering_grid(const MolecularSystem& sys, Temperature T, double step = 0.5,
                                  const TruncationPolicy& policy = {});

SpectralCurve emission_exact(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                             const TruncationPolicy& policy = {});
SpectralCurve absorption_exact(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                               const TruncationPolicy& policy = {});

SpectralCurve emission_homogeneous(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                                   const TruncationPolicy& policy = {});
SpectralCurve absorption_homogeneous(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                                     const TruncationPolicy& policy = {});

struct PeakParams {
    double omega_em;
    double omega_abs;
    double gamma_em;   // = gamma_abs
};
PeakParams effective_peak_params(const MolecularSystem& sys, Temperature T);

SpectralCurve emission_reduced(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                               const TruncationPolicy& policy = {});
SpectralCurve absorption_reduced(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                                 const TruncationPolicy& policy = {});

// Lines (centre, weight, width) behind each model, for callers that want
// to evaluate them elsewhere (benchmarks, fits).
std::vector<LineTerm> exact_lines(const MolecularSystem& sys, Temperature T, SpectrumKind kind,
                                  const TruncationPolicy& policy = {});

const char* to_string(SpectrumKind k);

} // namespace vibrotherm
