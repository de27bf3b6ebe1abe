#pragma once

#include "vibrotherm/polariton.hpp"
#include "vibrotherm/units.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace vibrotherm {

struct PolaritonMode {
    double k;            // 1/um
    double omega;        // meV
    double sin2phi;
    double gamma;        // decay, meV
    double degeneracy;   // D_i
};

struct ModeGrid {
    std::vector<PolaritonMode> modes;
    double omega_exc = 0.0;   // reservoir energy, meV
    double gamma_exc = 0.0;   // reservoir decay gamma_P, meV
    double dk = 0.0;
};

struct DecayRates {
    double gamma_cav = 4.4;    // meV
    double gamma_exc = 60.0;   // meV
};

ModeGrid build_mode_grid(const PolaritonSetup& s, int n_modes = 31, double k_max = 3.0, DecayRates decay = {});

// W(i, j) = rate i -> j in meV: gamma_therm downhill, Boltzmann-suppressed uphill.
Eigen::MatrixXd thermalization_matrix(const ModeGrid& g, double gamma_therm, Temperature T);

struct ScatterParams {
    double omega_vib = 199.0;   // meV
    double gamma_vib = 2.5;     // meV
    double g = 0.5;             // meV
    std::optional<double> gamma0;   // meV; defaults to g^2 / gamma_vib

    double prefactor() const { return gamma0 ? *gamma0 : g * g / gamma_vib; }
};

std::vector<double> scattering_rates(const ModeGrid& g, const ScatterParams& p);

// Gaussian in time; `amplitude` is the time-integrated number injected.
struct PumpPulse {
    double amplitude = 0.0;
    double t0 = 1.0;     // ps
    double fwhm = 0.2;   // ps
};

struct SeedPulse {
    double amplitude = 0.0;   // time-integrated, at the centre of the k profile
    double k = 2.55;          // 1/um
    double sigma_k = 0.2;     // 1/um
    double t0 = 1.0;          // ps
    double fwhm = 0.2;        // ps
};

struct SimConfig {
    ModeGrid grid;
    double gamma_therm = 5e-7;   // meV
    Temperature T{300.0};
    PumpPulse pump;
    SeedPulse seed;
    ScatterParams scatter;
    double dt = 5e-4;            // ps
    double t_end = 10.0;         // ps
    int save_stride = 20;
    double decay_scale = 1.0;    // multiplies every decay rate, reservoir included (0: no losses)
    std::vector<double> initial;     // optional n_i(0)
    double initial_reservoir = 0.0;

    double max_linear_rate() const;   // 1/ps
    void validate() const;
};

struct SimTrajectory {
    std::vector<double> times;             // ps
    std::vector<double> n_P;
    std::vector<std::vector<double>> n;    // [sample][mode]
    std::vector<double> peak;              // max over every step, per mode
    std::vector<double> integrated;        // int n_i dt over [0, t_end], per mode
    std::vector<double> final_state;
    ModeGrid grid;
    std::size_t steps = 0;
};

SimTrajectory simulate(const SimConfig& cfg);

struct ThresholdOptions {
    double lo = 1e2;
    double hi = 1e8;   // lowered automatically if the run there fails to integrate
    double rel_tol = 1e-3;
    double target = 1.0;           // peak n_0 at threshold
    int scan_points = 0;           // log-spaced (amplitude, peak n_0) samples
    std::optional<std::uint64_t> jitter_seed;   // perturbs the bracket by up to +-10%
};

struct ThresholdResult {
    double amplitude = 0.0;
    double sharpness = 0.0;   // d ln(peak n_0) / d ln(P) at threshold
    int evaluations = 0;
    std::vector<std::pair<double, double>> scan;
};

double peak_ground_occupation(const SimConfig& cfg, double pump_amplitude);
ThresholdResult find_threshold(const SimConfig& templ, const ThresholdOptions& opts = {});

enum class EkMode { final_state, at_time, time_integrated };

struct EkPoint {
    double k;
    double omega;
    double occupation;
};

std::vector<EkPoint> ek_distribution(const SimTrajectory& traj, EkMode mode = EkMode::final_state, double t = 0.0);

// First saved time at which n_mode reaches `fraction` of its final value.
double relaxation_time(const SimTrajectory& traj, std::size_t mode = 0, double fraction = 0.5);

} // namespace vibrotherm
