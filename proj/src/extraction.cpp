#include "vibrotherm/extraction.hpp"
#include "vibrotherm/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vibrotherm {

PeakModel PeakModel::replica_aware(const std::vector<VibrationalMode>& high_modes, Temperature T, int shape_terms)
{
    PeakModel m;
    m.shape_terms = shape_terms;
    m.replicas.clear();
    for (const auto& t : vibronic_progression(high_modes, T))
        if (t.weight >= 1e-7) m.replicas.push_back(t);
    return m;
}

PeakHint locate_00_peak(const SpectralCurve& c, double significance)
{
    const auto& x = c.grid;
    const auto& y = c.intensity;
    const std::size_t n = y.size();
    if (n < 3) throw ExtractionError("curve too short to locate a peak");
    const double ymax = *std::max_element(y.begin(), y.end());
    if (!(ymax > 0.0)) throw ExtractionError("curve has no positive intensity");

    const bool emission = c.kind == SpectrumKind::emission;
    std::size_t best = n;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (y[i] < significance * ymax || y[i] < y[i - 1] || y[i] <= y[i + 1]) continue;
        if (best == n || emission) best = i;
        if (!emission) break;
    }
    if (best == n) throw ExtractionError("no significant maximum found");

    // parabolic refinement of the maximum
    double center = x[best];
    const double d = y[best - 1] - 2.0 * y[best] + y[best + 1];
    if (d < 0.0) center += 0.5 * (x[best + 1] - x[best]) * (y[best - 1] - y[best + 1]) / d;

    // one standard deviation: where the clean flank drops to exp(-1/2)
    const double level = y[best] * std::exp(-0.5);
    const long step = emission ? 1 : -1;
    for (long j = static_cast<long>(best); j >= 1 && j + 1 < static_cast<long>(n); j += step) {
        const long k = j + step;
        if (y[k] <= level) {
            const double f = (y[j] - level) / (y[j] - y[k]);
            const double xe = x[j] + f * (x[k] - x[j]);
            return {center, std::abs(xe - center)};
        }
    }
    throw ExtractionError("peak flank does not fall off inside the grid");
}

PeakWindow default_window(const PeakHint& h, double half_widths)
{
    return {h.center - half_widths * h.sigma, h.center + half_widths * h.sigma};
}

namespace {

// y = a * sum_r w_r phi(u_r) [1 + h3 He3(u_r)/6 + h4 He4(u_r)/24],
// u_r = (x - c - sign*s_r)/sigma; parameters (c, sigma, a, h3, h4) in
// coordinates shifted by x0 and scaled by y0.
struct BandFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const Eigen::VectorXd& x;
    const Eigen::VectorXd& y;
    const PeakModel& model;
    double sign;
    int np;

    int inputs() const { return np; }
    int values() const { return static_cast<int>(x.size()); }

    void eval(const Eigen::VectorXd& p, Eigen::VectorXd* f, Eigen::MatrixXd* J) const
    {
        const double c = p[0], s = p[1], a = p[2];
        const double h3 = np > 3 ? p[3] : 0.0;
        const double h4 = np > 4 ? p[4] : 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double val = 0.0, dval = 0.0, g3 = 0.0, g4 = 0.0;
            for (const auto& r : model.replicas) {
                const double u = (x[i] - c - sign * r.shift) / s;
                const double phi = r.weight * std::exp(-0.5 * u * u);
                const double he3 = u * u * u - 3.0 * u;
                const double he4 = u * u * u * u - 6.0 * u * u + 3.0;
                const double P = 1.0 + h3 * he3 / 6.0 + h4 * he4 / 24.0;
                const double dP = h3 * (u * u - 1.0) / 2.0 + h4 * he3 / 6.0;
                val += phi * P;
                dval += phi * (dP - u * P) * (-1.0 / s);
                g3 += phi * he3 / 6.0;
                g4 += phi * he4 / 24.0;
                if (J) (*J)(i, 1) += a * phi * (dP - u * P) * (-u / s);
            }
            if (f) (*f)[i] = a * val - y[i];
            if (J) {
                (*J)(i, 0) = a * dval;
                (*J)(i, 2) = val;
                if (np > 3) (*J)(i, 3) = a * g3;
                if (np > 4) (*J)(i, 4) = a * g4;
            }
        }
    }
    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const
    {
        eval(p, &f, nullptr);
        return 0;
    }
    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const
    {
        J.setZero(values(), np);
        eval(p, nullptr, &J);
        return 0;
    }
};

} // namespace

PeakFit fit_00_peak(const SpectralCurve& curve, const PeakWindow& window, const PeakModel& model, double max_rms)
{
    if (!(window.hi > window.lo)) throw ExtractionError("empty fit window");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        if (curve.grid[i] >= window.lo && curve.grid[i] <= window.hi) {
            xs.push_back(curve.grid[i]);
            ys.push_back(curve.intensity[i]);
        }
    const int np = 3 + std::clamp(model.shape_terms, 0, 2);
    if (static_cast<int>(xs.size()) < np + 2) throw ExtractionError("too few grid points inside the fit window");

    const double y0 = *std::max_element(ys.begin(), ys.end());
    if (!(y0 > 0.0)) throw ExtractionError("no signal inside the fit window");
    const std::size_t imax = std::max_element(ys.begin(), ys.end()) - ys.begin();
    const double x0 = xs[imax];

    Eigen::VectorXd X(xs.size()), Y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        X[i] = xs[i] - x0;
        Y[i] = ys[i] / y0;
    }
    const double sign = curve.kind == SpectrumKind::emission ? -1.0 : 1.0;
    BandFunctor fn{X, Y, model, sign, np};

    Eigen::VectorXd p = Eigen::VectorXd::Zero(np);
    p[1] = std::max((window.hi - window.lo) / 6.0, 1e-6);
    p[2] = 1.0;
    Eigen::LevenbergMarquardt<BandFunctor> lm(fn);
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 100000;
    auto status = lm.minimizeInit(p);
    int it = 0;
    for (; it < 200; ++it) {
        status = lm.minimizeOneStep(p);
        if (status != Eigen::LevenbergMarquardtSpace::Running) break;
    }
    if (status == Eigen::LevenbergMarquardtSpace::Running)
        throw ExtractionError("0-0 peak fit did not converge in 200 iterations");
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !p.allFinite())
        throw ExtractionError("0-0 peak fit failed");

    Eigen::VectorXd f(X.size());
    fn(p, f);
    PeakFit out;
    out.center = p[0] + x0;
    out.sigma = std::abs(p[1]);
    out.amplitude = p[2] * y0;
    out.residual_rms = std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
    out.skew = np > 3 ? p[3] : 0.0;
    out.kurtosis = np > 4 ? p[4] : 0.0;
    out.iterations = it + 1;
    if (!(out.sigma > 0.0)) throw ExtractionError("0-0 peak fit returned zero width");
    if (out.residual_rms > max_rms)
        throw ExtractionError(fmt::format("0-0 peak fit residual {:.3g} exceeds {:.3g} of the peak; "
                                          "the window probably contains more than one feature",
                                          out.residual_rms, max_rms));
    return out;
}

StokesMeasurement measure_stokes(const SpectralCurve& em, const SpectralCurve& abs, const StokesOptions& opts)
{
    if (em.kind != SpectrumKind::emission || abs.kind != SpectrumKind::absorption)
        throw ExtractionError("stokes_shift needs an emission and an absorption curve");
    if (std::abs(em.temperature - abs.temperature) > 1e-9)
        throw ExtractionError("emission and absorption curves are at different temperatures");
    PeakModel model = PeakModel::gaussian();
    if (opts.replica_aware)
        model = PeakModel::replica_aware(opts.known_high_modes, Temperature(em.temperature), opts.shape_terms);
    const auto fe = fit_00_peak(em, default_window(locate_00_peak(em), opts.window_half_widths), model);
    const auto fa = fit_00_peak(abs, default_window(locate_00_peak(abs), opts.window_half_widths), model);
    return {fa.center - fe.center, fe, fa};
}

namespace {

struct Line {
    double slope, intercept;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ExtractionError("regression needs distinct temperatures");
    const double b = sxy / sxx;
    return {b, my - b * mx};
}

} // namespace

ExtractionReport extract_net(const std::vector<SeriesPoint>& series, double omega_M, const ExtractOptions& opts)
{
    if (!(omega_M > 0.0)) throw ExtractionError("omega_M must be > 0");
    const double kB = constants::kB_meV_per_K;
    std::size_t n_high = 0, n_low = 0;
    for (const auto& s : series) {
        if (kB * s.T >= omega_M) ++n_high;
        if (kB * s.T <= omega_M / 4.0) ++n_low;
    }
    if (n_high < 3 || n_low < 1)
        throw ExtractionError(fmt::format("temperature series must contain >= 3 points with kB*T >= omega_M and "
                                          ">= 1 with kB*T <= omega_M/4 (omega_M = {:.4g} meV; have {} and {})",
                                          omega_M, n_high, n_low));

    ExtractionReport rep;
    rep.rows.resize(series.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(series.size()); ++i) {
        const auto& s = series[i];
        const auto m = measure_stokes(s.em, s.abs, opts.stokes);
        rep.rows[i] = {s.T, m.shift, m.em.sigma * m.em.sigma, m.em, m.abs};
    }
    std::sort(rep.rows.begin(), rep.rows.end(), [](const SeriesRow& a, const SeriesRow& b) { return a.T < b.T; });

    double sum = 0.0;
    for (const auto& r : rep.rows) sum += r.stokes;
    rep.mean_stokes = sum / static_cast<double>(rep.rows.size());

    std::vector<double> kt, var, inv, resid;
    for (const auto& r : rep.rows)
        if (kB * r.T >= omega_M) {
            kt.push_back(kB * r.T);
            var.push_back(r.gamma_em2);
        }
    rep.high_T_points = kt.size();
    const auto lin = ols(kt, var);
    rep.linear_slope = lin.slope;
    rep.linear_intercept = lin.intercept;
    for (std::size_t i = 0; i < kt.size(); ++i) {
        inv.push_back(1.0 / kt[i]);
        resid.push_back(var[i] - rep.mean_stokes * kt[i]);
    }
    const auto cor = ols(inv, resid);
    rep.inverse_T_coeff = cor.slope;
    rep.corrected_intercept = cor.intercept;

    if (rep.mean_stokes > 0.0 && std::abs(lin.slope - rep.mean_stokes) > 0.1 * rep.mean_stokes)
        rep.warnings.push_back(fmt::format("high-T slope of gamma_em^2 vs kB*T ({:.4g} meV) deviates more than 10% "
                                           "from the measured Stokes shift ({:.4g} meV)",
                                           lin.slope, rep.mean_stokes));

    const double gamma2 = opts.inverse_T_correction ? cor.intercept : lin.intercept;
    if (!(gamma2 > 0.0)) throw ExtractionError("regression gives a non-positive Gamma^2");
    const double plateau = rep.rows.front().gamma_em2;
    double A2 = plateau - gamma2;
    if (A2 < 0.0) {
        if (A2 < -1e-4 * plateau)
            throw ExtractionError(fmt::format("negative A2 ({:.4g} meV^2): inconsistent temperature series", A2));
        A2 = 0.0;
    }
    double A1 = rep.mean_stokes / 2.0;
    if (A1 < 0.0) {
        if (A1 < -1e-4 * std::sqrt(plateau))
            throw ExtractionError(fmt::format("negative Stokes shift ({:.4g} meV)", rep.mean_stokes));
        A1 = 0.0;
    }
    rep.net = {std::sqrt(gamma2), A1, A2, omega_M};
    return rep;
}

} // namespace vibrotherm
