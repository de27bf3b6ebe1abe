#include "vibrotherm/rates.hpp"
#include "vibrotherm/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vibrotherm {

namespace {
constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
}

SpectralDensity SpectralDensity::flat_A1(double A1, double omega_M)
{
    if (!(omega_M > 0.0) || !(A1 >= 0.0)) throw DomainError("flat_A1 needs omega_M > 0 and A1 >= 0");
    SpectralDensity sd;
    sd.kind_ = Kind::flat_A1;
    sd.omega_M_ = omega_M;
    sd.level_ = A1 / omega_M;
    return sd;
}

SpectralDensity SpectralDensity::flat_A2(double A2, double omega_M)
{
    if (!(omega_M > 0.0) || !(A2 >= 0.0)) throw DomainError("flat_A2 needs omega_M > 0 and A2 >= 0");
    SpectralDensity sd;
    sd.kind_ = Kind::flat_A2;
    sd.omega_M_ = omega_M;
    sd.level_ = A2 / omega_M;
    return sd;
}

SpectralDensity SpectralDensity::discrete_modes(std::vector<VibrationalMode> modes, double width, double omega_M)
{
    if (!(omega_M > 0.0) || !(width > 0.0)) throw DomainError("discrete_modes needs omega_M > 0 and width > 0");
    SpectralDensity sd;
    sd.kind_ = Kind::discrete_modes;
    sd.omega_M_ = omega_M;
    sd.width_ = width;
    sd.modes_ = std::move(modes);
    return sd;
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> w, std::vector<double> J, double omega_M)
{
    if (w.size() != J.size() || w.size() < 2) throw DomainError("tabulated density needs >= 2 matching samples");
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (J[i] < 0.0) throw DomainError("tabulated density must be >= 0");
        if (i > 0 && !(w[i] > w[i - 1])) throw DomainError("tabulated frequencies must increase");
    }
    SpectralDensity sd;
    sd.kind_ = Kind::tabulated;
    sd.omega_M_ = omega_M;
    sd.w_ = std::move(w);
    sd.J_ = std::move(J);
    return sd;
}

double SpectralDensity::operator()(double w) const
{
    if (!(w > 0.0) || w > omega_M_) return 0.0;
    switch (kind_) {
    case Kind::flat_A1: return level_ / w;
    case Kind::flat_A2: return level_ / (w * w);
    case Kind::discrete_modes: {
        double acc = 0.0;
        for (const auto& m : modes_) {
            const double s = m.gamma > 0.0 ? m.gamma : width_;
            const double u = (w - m.omega) / s;
            acc += m.huang_rhys_sq * std::exp(-0.5 * u * u) / (std::sqrt(2.0 * constants::pi) * s);
        }
        return acc;
    }
    case Kind::tabulated: {
        if (w < w_.front() || w > w_.back()) return 0.0;
        const auto it = std::upper_bound(w_.begin(), w_.end(), w);
        if (it == w_.end()) return J_.back();
        const std::size_t i = static_cast<std::size_t>(it - w_.begin());
        const double f = (w - w_[i - 1]) / (w_[i] - w_[i - 1]);
        return J_[i - 1] + f * (J_[i] - J_[i - 1]);
    }
    }
    return 0.0;
}

double SpectralDensity::moment(int p) const
{
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double w) { return std::pow(w, p) * (*this)(w); };
    std::vector<double> knots{0.0};
    if (kind_ == Kind::tabulated)
        for (double w : w_)
            if (w > 0.0 && w < omega_M_) knots.push_back(w);
    if (kind_ == Kind::discrete_modes)
        for (const auto& m : modes_)
            if (m.omega > 0.0 && m.omega < omega_M_) knots.push_back(m.omega);
    knots.push_back(omega_M_);
    std::sort(knots.begin(), knots.end());
    double acc = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (knots[i] > knots[i - 1]) acc += gauss_kronrod<double, 61>::integrate(f, knots[i - 1], knots[i], 15, 1e-12);
    return acc;
}

double SpectralDensity::realized_A1() const
{
    switch (kind_) {
    case Kind::flat_A1: return level_ * omega_M_;
    case Kind::flat_A2: return level_ > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    default: return moment(1);
    }
}

double SpectralDensity::realized_A2() const
{
    switch (kind_) {
    case Kind::flat_A1: return level_ * omega_M_ * omega_M_ / 2.0;
    case Kind::flat_A2: return level_ * omega_M_;
    default: return moment(2);
    }
}

double mixing_prefactor(const PolaritonSetup& s)
{
    const double ap = alpha_pol(s);
    const double d0 = s.detuning(0.0);
    const double q = d0 * d0 + 4.0 * s.rabi * s.rabi;
    const double r2 = s.rabi * s.rabi;
    return s.cavity.alpha_cav * s.cavity.alpha_cav * r2 * r2 / (ap * ap * q * q);
}

namespace {

double approx_sin2(const PolaritonSetup& s, double dw)
{
    return mixing_prefactor(s) * dw * dw / (s.rabi * s.rabi);
}

} // namespace

MixingFactor sin2_mixing(const PolaritonSetup& s, double k, double kp)
{
    const double dphi = hopfield_angle_difference(s, kp, k);
    const double ex = std::sin(dphi) * std::sin(dphi);
    const double dw = std::abs(lower_branch_gap(s, std::abs(k), std::abs(kp)));
    const double ap = approx_sin2(s, dw);
    return {ex, ap, ex > 0.0 ? ap / ex : 1.0};
}

RatePair therm_rate_pair(const PolaritonSetup& s, const SpectralDensity& sd, double k, double kp, Temperature T,
                         MixingForm mixing)
{
    const double hi = std::max(std::abs(k), std::abs(kp));
    const double lo = std::min(std::abs(k), std::abs(kp));
    RatePair r;
    r.delta_omega = lower_branch_gap(s, hi, lo);
    const double dmin = delta_omega_min(s);
    if (r.delta_omega < dmin * (1.0 - 1e-9))
        throw DomainError(fmt::format("level spacing {:.4g} meV is below the finite-size minimum {:.4g} meV",
                                      r.delta_omega, dmin));
    if (r.delta_omega > sd.omega_M()) {
        r.out_of_band = true;
        return r;
    }
    r.sin2 = mixing == MixingForm::exact ? sin2_mixing(s, hi, lo).exact : approx_sin2(s, r.delta_omega);
    const double base = 2.0 * constants::pi * r.sin2 * s.rabi * s.rabi / s.n_mol * sd(r.delta_omega);
    const double n = bose_occupation(r.delta_omega, T);
    r.gamma_down = base * (1.0 + n);
    r.gamma_up = base * n;
    return r;
}

double high_T_pair_estimate(const PolaritonSetup& s, const SpectralDensity& sd, double dw, Temperature T)
{
    return 2.0 * constants::pi * mixing_prefactor(s) / s.n_mol * dw * sd(dw) * T.kT();
}

double high_T_average(const PolaritonSetup& s, const LowFreqNet& net, Temperature T)
{
    return 2.0 * constants::pi * mixing_prefactor(s) * net.A1 / s.n_mol * T.kT() / net.omega_M;
}

RateEstimate high_T_estimate(const PolaritonSetup& s, const LowFreqNet& net, Temperature T)
{
    RateEstimate e;
    e.value = mixing_prefactor(s) * net.A1 / s.n_mol * s.cavity.area * T.kT() / alpha_pol(s);
    if (T.kT() < 3.0 * net.omega_M)
        e.warning = fmt::format("high-temperature estimate used at kB*T = {:.3g} meV < 3 omega_M = {:.3g} meV",
                                T.kT(), 3.0 * net.omega_M);
    return e;
}

RatePair low_T_estimates(const PolaritonSetup& s, const LowFreqNet& net, double dw, Temperature T)
{
    const double base = 2.0 * constants::pi * mixing_prefactor(s) * net.A2 / (s.n_mol * net.omega_M);
    const double n = bose_occupation(dw, T);
    RatePair r;
    r.delta_omega = dw;
    r.sin2 = approx_sin2(s, dw);
    r.gamma_down = base * (1.0 + n);
    r.gamma_up = base * n;
    return r;
}

RateMap rate_map(const PolaritonSetup& templ, const LowFreqNet& net, const std::vector<double>& rabi,
                 const std::vector<double>& ground, Temperature T, MapEstimator est)
{
    for (double g : ground)
        if (!(g < templ.omega_0))
            throw DomainError(fmt::format("requested ground state {:.6g} meV is not below the exciton {:.6g} meV",
                                          g, templ.omega_0));
    RateMap m;
    m.rabi = rabi;
    m.ground = ground;
    m.values.assign(rabi.size() * ground.size(), nan_v);
    const long cells = static_cast<long>(m.values.size());
    std::size_t flagged = 0;
#pragma omp parallel for schedule(static) reduction(+ : flagged)
    for (long c = 0; c < cells; ++c) {
        const std::size_t row = static_cast<std::size_t>(c) / rabi.size();
        const std::size_t col = static_cast<std::size_t>(c) % rabi.size();
        PolaritonSetup s = templ;
        s.rabi = rabi[col];
        s.cavity.omega_cav0 = cavity_for_ground(s.omega_0, s.rabi, ground[row]);
        if (!(s.cavity.omega_cav0 < s.omega_0)) {
            ++flagged;
            continue;
        }
        m.values[c] = est == MapEstimator::low_T ? low_T_estimates(s, net, delta_omega_min(s), T).gamma_down
                                                 : high_T_estimate(s, net, T).value;
    }
    m.flagged = flagged;
    return m;
}

RateVsTemperature rate_vs_temperature(const PolaritonSetup& s, const SpectralDensity& sd,
                                      const std::vector<double>& k_grid, const std::vector<double>& T_grid,
                                      MixingForm mixing)
{
    RateVsTemperature out;
    out.k = k_grid;
    out.T = T_grid;
    const double dmin = delta_omega_min(s);
    const double k_nn = k_for_gap(s, dmin);
    for (double k : k_grid) out.delta_omega.push_back(lower_branch_gap(s, std::abs(k), 0.0));
    const std::size_t nk = k_grid.size();
    out.up.assign(T_grid.size() * nk, nan_v);
    out.down.assign(T_grid.size() * nk, nan_v);
    out.nn_up.resize(T_grid.size());
    out.nn_down.resize(T_grid.size());
    out.thermalization_length.resize(T_grid.size());
    for (std::size_t it = 0; it < T_grid.size(); ++it) {
        const Temperature T(T_grid[it]);
        const auto nn = therm_rate_pair(s, sd, k_nn, 0.0, T, mixing);
        out.nn_up[it] = nn.gamma_up;
        out.nn_down[it] = nn.gamma_down;
        int len = 0;
        for (std::size_t ik = 0; ik < nk; ++ik) {
            if (out.delta_omega[ik] < dmin * (1.0 - 1e-9)) continue;
            const auto r = therm_rate_pair(s, sd, k_grid[ik], 0.0, T, mixing);
            out.up[it * nk + ik] = r.gamma_up;
            out.down[it * nk + ik] = r.gamma_down;
            if (nn.gamma_up > 0.0 && r.gamma_up >= nn.gamma_up / std::exp(1.0)) ++len;
        }
        out.thermalization_length[it] = len;
    }
    return out;
}

} // namespace vibrotherm
