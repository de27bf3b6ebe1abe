#include "vibrotherm/condensim.hpp"
#include "vibrotherm/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace vibrotherm {

ModeGrid build_mode_grid(const PolaritonSetup& s, int n_modes, double k_max, DecayRates decay)
{
    s.validate();
    if (n_modes < 1 || !(k_max > 0.0)) throw DomainError("mode grid needs n >= 1 and k_max > 0");
    ModeGrid g;
    g.dk = k_max / n_modes;
    g.omega_exc = s.omega_0;
    g.gamma_exc = decay.gamma_exc;
    const double area = s.cavity.area;
    const double pi = constants::pi;
    for (int i = 0; i < n_modes; ++i) {
        const double k = i * g.dk;
        const double s2 = excitonic_fraction(s, k);
        double D = i == 0 ? std::round(pi * (g.dk / 2) * (g.dk / 2) * area / (4 * pi * pi))
                          : std::round(2 * pi * k * g.dk * area / (4 * pi * pi));
        D = std::max(D, 1.0);
        g.modes.push_back({k, lower_branch(s, k), s2, (1.0 - s2) * decay.gamma_cav + s2 * decay.gamma_exc, D});
    }
    return g;
}

Eigen::MatrixXd thermalization_matrix(const ModeGrid& g, double gamma_therm, Temperature T)
{
    if (gamma_therm < 0.0) throw DomainError("gamma_therm must be >= 0");
    const auto n = static_cast<Eigen::Index>(g.modes.size());
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double up = g.modes[j].omega - g.modes[i].omega;
            if (up < 0.0) W(i, j) = gamma_therm;
            else if (T.kelvin > 0.0) W(i, j) = gamma_therm * std::exp(-up / T.kT());
            else W(i, j) = up == 0.0 ? gamma_therm : 0.0;
        }
    return W;
}

std::vector<double> scattering_rates(const ModeGrid& g, const ScatterParams& p)
{
    if (!(p.gamma_vib > 0.0)) throw DomainError("gamma_vib must be > 0");
    const double res = g.omega_exc - p.omega_vib;
    const double g2 = p.gamma_vib * p.gamma_vib;
    std::vector<double> out;
    for (const auto& m : g.modes) {
        const double d = res - m.omega;
        out.push_back(p.prefactor() * m.sin2phi * g2 / (d * d + g2));
    }
    return out;
}

double SimConfig::max_linear_rate() const
{
    double r = decay_scale * grid.gamma_exc;
    double dmax = 1.0;
    for (const auto& m : grid.modes) {
        r = std::max(r, decay_scale * m.gamma);
        dmax = std::max(dmax, m.degeneracy);
    }
    r = std::max(r, gamma_therm * dmax * static_cast<double>(grid.modes.size()));
    return rate_per_ps(r);
}

void SimConfig::validate() const
{
    if (grid.modes.empty()) throw DomainError("simulation needs at least one mode");
    for (std::size_t i = 1; i < grid.modes.size(); ++i)
        if (!(grid.modes[i].k > grid.modes[i - 1].k)) throw DomainError("mode k values must increase");
    if (!(dt > 0.0) || !(t_end > 0.0)) throw DomainError("dt and t_end must be > 0");
    if (!(pump.fwhm > 0.0) || !(seed.fwhm > 0.0) || !(seed.sigma_k > 0.0) || !(scatter.gamma_vib > 0.0))
        throw DomainError("pulse and resonance widths must be > 0");
    if (pump.amplitude < 0.0 || seed.amplitude < 0.0) throw DomainError("pulse amplitudes must be >= 0");
    if (decay_scale < 0.0 || gamma_therm < 0.0) throw DomainError("rates must be >= 0");
    if (save_stride < 1) throw DomainError("save_stride must be >= 1");
    if (!initial.empty() && initial.size() != grid.modes.size())
        throw DomainError("initial occupations must match the mode count");
    if (dt * max_linear_rate() >= 0.1)
        throw DomainError(fmt::format("dt = {:.3g} ps does not resolve the fastest rate {:.3g} 1/ps "
                                      "(need dt * rate < 0.1)",
                                      dt, max_linear_rate()));
}

namespace {

double gaussian_pulse(double t, double t0, double fwhm)
{
    const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double u = (t - t0) / sigma;
    return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * constants::pi) * sigma);
}

struct Rhs {
    Eigen::MatrixXd W;        // 1/ps
    Eigen::VectorXd gamma;    // 1/ps
    Eigen::VectorXd D;
    Eigen::VectorXd Gp;       // 1/ps
    Eigen::VectorXd seed_k;   // seed profile over modes
    double gamma_P;
    PumpPulse pump;
    SeedPulse seed;

    // state: [n_P, n_0 ... n_{N-1}]
    void operator()(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) const
    {
        const auto N = D.size();
        const double nP = y[0];
        const auto n = y.tail(N);
        const Eigen::VectorXd nD = n + D;
        const Eigen::VectorXd in = W.transpose() * n;
        const Eigen::VectorXd out = W * nD;
        const double kp = pump.amplitude > 0.0 ? pump.amplitude * gaussian_pulse(t, pump.t0, pump.fwhm) : 0.0;
        const double ks = seed.amplitude > 0.0 ? seed.amplitude * gaussian_pulse(t, seed.t0, seed.fwhm) : 0.0;
        dy[0] = -gamma_P * nP + kp - nP * Gp.dot(nD);
        dy.tail(N) = (-gamma.array() * n.array() + ks * seed_k.array() + Gp.array() * nP * nD.array()
                      + nD.array() * in.array() - n.array() * out.array())
                         .matrix();
    }
};

} // namespace

SimTrajectory simulate(const SimConfig& cfg)
{
    cfg.validate();
    const auto& g = cfg.grid;
    const auto N = static_cast<Eigen::Index>(g.modes.size());
    Rhs f;
    f.W = thermalization_matrix(g, cfg.gamma_therm, cfg.T) / constants::hbar_meV_ps;
    f.gamma.resize(N);
    f.D.resize(N);
    f.seed_k.resize(N);
    const auto Gp = scattering_rates(g, cfg.scatter);
    f.Gp.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto& m = g.modes[i];
        f.gamma[i] = rate_per_ps(cfg.decay_scale * m.gamma);
        f.D[i] = m.degeneracy;
        f.Gp[i] = rate_per_ps(Gp[i]);
        const double u = (m.k - cfg.seed.k) / cfg.seed.sigma_k;
        f.seed_k[i] = std::exp(-0.5 * u * u);
    }
    f.gamma_P = rate_per_ps(cfg.decay_scale * g.gamma_exc);
    f.pump = cfg.pump;
    f.seed = cfg.seed;

    Eigen::VectorXd y = Eigen::VectorXd::Zero(N + 1);
    y[0] = cfg.initial_reservoir;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cfg.initial.size()); ++i) y[i + 1] = cfg.initial[i];

    SimTrajectory tr;
    tr.grid = g;
    tr.peak.assign(N, 0.0);
    tr.integrated.assign(N, 0.0);
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.n_P.push_back(y[0]);
        tr.n.emplace_back(y.data() + 1, y.data() + 1 + N);
    };
    for (Eigen::Index i = 0; i < N; ++i) tr.peak[i] = y[i + 1];
    record(0.0);

    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    const double h = cfg.dt;
    Eigen::VectorXd k1(N + 1), k2(N + 1), k3(N + 1), k4(N + 1), tmp(N + 1);
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t = (s - 1) * h;
        f(t, y, k1);
        tmp = y + 0.5 * h * k1;
        f(t + 0.5 * h, tmp, k2);
        tmp = y + 0.5 * h * k2;
        f(t + 0.5 * h, tmp, k3);
        tmp = y + h * k3;
        f(t + h, tmp, k4);
        const Eigen::VectorXd prev = y;
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!y.allFinite() || y.minCoeff() < -1e-9)
            throw IntegrationError(fmt::format("occupation became negative or non-finite at t = {:.6g} ps; "
                                               "reduce dt (now {:.3g} ps)",
                                               t + h, h));
        for (Eigen::Index i = 0; i < N; ++i) {
            tr.peak[i] = std::max(tr.peak[i], y[i + 1]);
            tr.integrated[i] += 0.5 * h * (prev[i + 1] + y[i + 1]);
        }
        if (s % static_cast<std::size_t>(cfg.save_stride) == 0 || s == steps) record(t + h);
    }
    tr.steps = steps;
    tr.final_state.assign(y.data() + 1, y.data() + 1 + N);
    return tr;
}

double peak_ground_occupation(const SimConfig& cfg, double pump_amplitude)
{
    SimConfig c = cfg;
    c.pump.amplitude = pump_amplitude;
    c.save_stride = std::max<int>(c.save_stride, static_cast<int>(c.t_end / c.dt));
    return simulate(c).peak.at(0);
}

ThresholdResult find_threshold(const SimConfig& templ, const ThresholdOptions& opts)
{
    double lo = opts.lo, hi = opts.hi;
    if (opts.jitter_seed) {
        std::mt19937_64 rng(*opts.jitter_seed);
        std::uniform_real_distribution<double> u(0.9, 1.1);
        lo *= u(rng);
        hi *= u(rng);
    }
    if (!(lo > 0.0) || !(hi > lo)) throw SearchError("threshold bracket needs 0 < lo < hi");
    ThresholdResult r;
    auto eval = [&](double P) {
        ++r.evaluations;
        return peak_ground_occupation(templ, P);
    };
    const double flo = eval(lo);
    // a run far above threshold can be too stiff for the fixed step; pull
    // the upper end down until it integrates
    double fhi = 0.0;
    for (;;) {
        try {
            fhi = eval(hi);
            break;
        } catch (const IntegrationError&) {
            if (hi / lo < 1.0 + opts.rel_tol) throw;
            hi = std::sqrt(lo * hi);
        }
    }
    if (flo >= opts.target || fhi < opts.target)
        throw SearchError(fmt::format("peak n_0 does not cross {} inside the bracket [{:.3g}, {:.3g}] "
                                      "(peak n_0 = {:.3g} .. {:.3g})",
                                      opts.target, lo, hi, flo, fhi));
    const double scan_lo = lo, scan_hi = hi;
    while (hi / lo > 1.0 + opts.rel_tol) {
        const double mid = std::sqrt(lo * hi);
        (eval(mid) < opts.target ? lo : hi) = mid;
    }
    r.amplitude = std::sqrt(lo * hi);
    const double a = eval(r.amplitude * 0.95), b = eval(r.amplitude * 1.05);
    r.sharpness = (std::log(b) - std::log(a)) / (std::log(1.05) - std::log(0.95));
    for (int i = 0; i < opts.scan_points; ++i) {
        const double f = opts.scan_points == 1 ? 0.5 : double(i) / (opts.scan_points - 1);
        const double P = scan_lo * std::pow(scan_hi / scan_lo, f);
        r.scan.emplace_back(P, eval(P));
    }
    return r;
}

std::vector<EkPoint> ek_distribution(const SimTrajectory& tr, EkMode mode, double t)
{
    std::vector<double> occ;
    switch (mode) {
    case EkMode::final_state: occ = tr.final_state; break;
    case EkMode::time_integrated: occ = tr.integrated; break;
    case EkMode::at_time: {
        if (tr.times.empty()) throw DomainError("empty trajectory");
        const auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t);
        std::size_t i = it == tr.times.end() ? tr.times.size() - 1 : static_cast<std::size_t>(it - tr.times.begin());
        if (i > 0 && std::abs(tr.times[i - 1] - t) < std::abs(tr.times[i] - t)) --i;
        occ = tr.n[i];
        break;
    }
    }
    std::vector<EkPoint> out;
    for (std::size_t i = 0; i < tr.grid.modes.size(); ++i)
        out.push_back({tr.grid.modes[i].k, tr.grid.modes[i].omega, i < occ.size() ? occ[i] : 0.0});
    return out;
}

double relaxation_time(const SimTrajectory& tr, std::size_t mode, double fraction)
{
    const double target = fraction * tr.final_state.at(mode);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        if (tr.n[i][mode] >= target) return tr.times[i];
    return tr.times.back();
}

} // namespace vibrotherm
