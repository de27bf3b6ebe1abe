#pragma once

#include "vibrotherm/extraction.hpp"
#include "vibrotherm/polariton.hpp"
#include "vibrotherm/spectra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vibrotherm {

// J(w) = Lambda^2(w) nu(w), in 1/meV, supported on (0, omega_M].
class SpectralDensity {
public:
    enum class Kind { flat_A1, flat_A2, discrete_modes, tabulated };

    static SpectralDensity flat_A1(double A1, double omega_M);   // w J = A1/omega_M
    static SpectralDensity flat_A2(double A2, double omega_M);   // w^2 J = A2/omega_M
    static SpectralDensity flat_A1(const LowFreqNet& net) { return flat_A1(net.A1, net.omega_M); }
    static SpectralDensity flat_A2(const LowFreqNet& net) { return flat_A2(net.A2, net.omega_M); }
    // Gaussian-broadened sticks; a mode's own damping is used as its width
    // when nonzero, otherwise `width`.
    static SpectralDensity discrete_modes(std::vector<VibrationalMode> modes, double width, double omega_M);
    // piecewise-linear through (w, J) samples, zero outside the table
    static SpectralDensity tabulated(std::vector<double> w, std::vector<double> J, double omega_M);

    double operator()(double w) const;
    Kind kind() const { return kind_; }
    double omega_M() const { return omega_M_; }
    // int_0^omega_M w J and w^2 J (infinite A1 for flat_A2: log divergence at 0)
    double realized_A1() const;
    double realized_A2() const;

private:
    Kind kind_ = Kind::flat_A1;
    double omega_M_ = 0.0;
    double level_ = 0.0;
    double width_ = 0.0;
    std::vector<VibrationalMode> modes_;
    std::vector<double> w_, J_;
    double moment(int p) const;
};

enum class MixingForm { exact, quadratic };

struct MixingFactor {
    double exact;
    double approx;
    double ratio;   // approx / exact (1 when both vanish)
};

struct RatePair {
    double gamma_down = 0.0;   // meV; higher state -> lower, emits a vibration
    double gamma_up = 0.0;     // meV; lower -> higher, absorbs
    double delta_omega = 0.0;  // meV
    double sin2 = 0.0;
    bool out_of_band = false;
};

// alpha_cav^2 Omega^4 / (alpha_pol^2 (d0^2 + 4 Omega^2)^2), d0 = omega_0 - omega_cav0
double mixing_prefactor(const PolaritonSetup& s);

MixingFactor sin2_mixing(const PolaritonSetup& s, double k, double kp);

// Either ordering of (k, k') is accepted; the pair is oriented by energy.
RatePair therm_rate_pair(const PolaritonSetup& s, const SpectralDensity& sd, double k, double kp, Temperature T,
                         MixingForm mixing = MixingForm::exact);

struct RateEstimate {
    double value;   // meV
    std::optional<std::string> warning;
};

// Per-pair rate with n ~ kT/dw and quadratic mixing.
double high_T_pair_estimate(const PolaritonSetup& s, const SpectralDensity& sd, double dw, Temperature T);
// (1/omega_M) int_0^omega_M of the per-pair rate with w J = A1/omega_M
double high_T_average(const PolaritonSetup& s, const LowFreqNet& net, Temperature T);
// prefactor * (A1/N) * S kT / alpha_pol
RateEstimate high_T_estimate(const PolaritonSetup& s, const LowFreqNet& net, Temperature T);

RatePair low_T_estimates(const PolaritonSetup& s, const LowFreqNet& net, double dw, Temperature T);

enum class MapEstimator { low_T, high_T };

struct RateMap {
    std::vector<double> rabi;     // columns, meV
    std::vector<double> ground;   // rows, omega_low(0) in meV
    std::vector<double> values;   // row-major, meV; NaN where detuning would be >= 0
    std::size_t flagged = 0;

    double at(std::size_t row, std::size_t col) const { return values[row * rabi.size() + col]; }
};

// Nearest-neighbour downhill rate (k' = 0 -> k at dw = dw_min) per cell;
// omega_cav0 is solved from (Omega_R, omega_low0).
RateMap rate_map(const PolaritonSetup& templ, const LowFreqNet& net, const std::vector<double>& rabi,
                 const std::vector<double>& ground, Temperature T, MapEstimator est = MapEstimator::low_T);

struct RateVsTemperature {
    std::vector<double> k;            // 1/um
    std::vector<double> T;            // K
    std::vector<double> delta_omega;  // per k, meV
    std::vector<double> up;           // row-major (T, k), meV; NaN below dw_min
    std::vector<double> down;
    std::vector<double> nn_up;        // nearest-neighbour pair, per T
    std::vector<double> nn_down;
    std::vector<int> thermalization_length;   // k-states with up >= nn_up / e

    double up_at(std::size_t it, std::size_t ik) const { return up[it * k.size() + ik]; }
    double down_at(std::size_t it, std::size_t ik) const { return down[it * k.size() + ik]; }
};

RateVsTemperature rate_vs_temperature(const PolaritonSetup& s, const SpectralDensity& sd,
                                      const std::vector<double>& k_grid, const std::vector<double>& T_grid,
                                      MixingForm mixing = MixingForm::quadratic);

} // namespace vibrotherm
