#include "vibrotherm/cli.hpp"
#include "vibrotherm/condensim.hpp"
#include "vibrotherm/config.hpp"
#include "vibrotherm/csv_io.hpp"
#include "vibrotherm/errors.hpp"
#include "vibrotherm/extraction.hpp"
#include "vibrotherm/rates.hpp"
#include "vibrotherm/spectra.hpp"
#include "vibrotherm/svg.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace vibrotherm::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    RunConfig cfg;
    fs::path out_dir;
    std::optional<double> T;
    std::uint64_t seed = 20240501;
    bool seed_given = false;
    std::string command;
    std::ostream* out;
    std::ostream* err;

    std::vector<std::string> comments(const std::vector<std::string>& extra = {}) const
    {
        std::vector<std::string> c{"generated by: vibrotherm " + command};
        if (T) c.push_back("override T_K = " + format_number(*T));
        c.insert(c.end(), extra.begin(), extra.end());
        c.push_back("resolved config:");
        std::istringstream ss(cfg.resolved);
        for (std::string line; std::getline(ss, line);) c.push_back("  " + line);
        return c;
    }
    fs::path path(const std::string& name) const { return out_dir / name; }
    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows, const std::vector<std::string>& extra = {}) const
    {
        write_csv(path(name), comments(extra), header, rows);
        *out << "wrote " << path(name).string() << "\n";
    }
    void svg(const std::string& name, const std::string& text) const
    {
        if (!cfg.output.svg) return;
        write_text_atomic(path(name), text);
        *out << "wrote " << path(name).string() << "\n";
    }
    void warn(const std::string& w) const { *err << "warning: " << w << "\n"; }
};

double parse_temperature(const std::string& s)
{
    std::string t = s;
    t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
    if (!t.empty() && (t.back() == 'K' || t.back() == 'k')) t.pop_back();
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size() || !(v >= 0.0)) throw std::invalid_argument("bad");
        return v;
    } catch (const std::exception&) {
        throw UsageError("--T expects a temperature such as 300K, got '" + s + "'");
    }
}

std::string tag(double T) { return fmt::format("{}K", format_number(T)); }

double rate_in(double meV, const std::string& unit)
{
    if (unit == "eV") return meV / constants::meV_per_eV;
    if (unit == "ps-1") return rate_per_ps(meV);
    return meV;
}

std::string rate_label(const std::string& unit) { return unit == "ps-1" ? "ps^-1" : unit; }

// ---------------------------------------------------------------- spectra

SpectralCurve make_curve(const MolecularSystem& sys, const std::string& model, SpectrumKind kind, double T,
                         const std::vector<double>& grid)
{
    const Temperature t(T);
    const bool em = kind == SpectrumKind::emission;
    if (model == "reduced") return em ? emission_reduced(sys, t, grid) : absorption_reduced(sys, t, grid);
    if (model == "homogeneous") return em ? emission_homogeneous(sys, t, grid) : absorption_homogeneous(sys, t, grid);
    return em ? emission_exact(sys, t, grid) : absorption_exact(sys, t, grid);
}

std::vector<double> spectrum_grid(const Context& ctx, const MolecularSystem& sys)
{
    return uniform_grid(sys.omega_0 - 800.0, sys.omega_0 + 800.0, ctx.cfg.output.grid_step);
}

void write_pair_svg(const Context& ctx, const std::string& name, const SpectralCurve& em, const SpectralCurve& ab,
                    const std::string& title)
{
    auto ev = [](const std::vector<double>& g) {
        std::vector<double> v;
        for (double x : g) v.push_back(x / constants::meV_per_eV);
        return v;
    };
    auto per_ev = [](const std::vector<double>& y) {
        std::vector<double> v;
        for (double x : y) v.push_back(x * constants::meV_per_eV);
        return v;
    };
    ctx.svg(name, svg::line_plot({{"emission", ev(em.grid), per_ev(em.intensity), "#1f77b4", false, false},
                                  {"absorption", ev(ab.grid), per_ev(ab.intensity), "#d62728", true, false}},
                                 {title, "photon energy (eV)", "intensity (1/eV)", false}));
}

std::vector<double> temperatures(const Context& ctx)
{
    if (ctx.T) return {*ctx.T};
    if (ctx.cfg.output.temperatures.empty()) throw UsageError("no temperature given (--T or [output] temperatures_K)");
    return ctx.cfg.output.temperatures;
}

void cmd_spectra(const Context& ctx, std::string model)
{
    const auto& sys = ctx.cfg.require_molecule();
    if (model.empty()) model = ctx.cfg.output.model;
    const auto grid = spectrum_grid(ctx, sys);
    for (double T : temperatures(ctx)) {
        const auto em = make_curve(sys, model, SpectrumKind::emission, T, grid);
        const auto ab = make_curve(sys, model, SpectrumKind::absorption, T, grid);
        for (const auto* c : {&em, &ab}) {
            const auto name = fmt::format("{}_{}_{}.csv", to_string(c->kind), model, tag(T));
            write_spectrum(ctx.path(name), *c, ctx.comments());
            *ctx.out << "wrote " << ctx.path(name).string() << "\n";
        }
        write_pair_svg(ctx, fmt::format("spectra_{}_{}.svg", model, tag(T)), em, ab,
                       fmt::format("{} model, T = {} K", model, format_number(T)));
    }
}

// ------------------------------------------------------------- extraction

void extraction_outputs(const Context& ctx, const std::vector<SeriesPoint>& series, double omega_M,
                        const std::vector<VibrationalMode>& high_modes)
{
    ExtractOptions opts;
    opts.stokes.known_high_modes = high_modes;
    if (high_modes.empty()) {
        opts.stokes.replica_aware = false;
        ctx.warn("no high-frequency modes known; fitting plain Gaussians to the 0-0 peaks");
    }
    const auto rep = extract_net(series, omega_M, opts);
    for (const auto& w : rep.warnings) ctx.warn(w);

    std::vector<std::vector<double>> st, lw;
    for (const auto& r : rep.rows) {
        st.push_back({r.T, r.stokes, r.em.center / 1e3, r.abs.center / 1e3});
        lw.push_back({r.T, constants::kB_meV_per_K * r.T, std::sqrt(r.gamma_em2), r.gamma_em2, r.abs.sigma,
                      rep.linear_intercept + rep.linear_slope * constants::kB_meV_per_K * r.T, r.em.residual_rms,
                      r.abs.residual_rms});
    }
    const std::vector<std::string> diag{
        fmt::format("mean Stokes shift = {} meV", format_number(rep.mean_stokes)),
        fmt::format("high-T linear fit: slope = {} meV, intercept = {} meV^2 ({} points)",
                    format_number(rep.linear_slope), format_number(rep.linear_intercept), rep.high_T_points),
        fmt::format("1/kT-corrected intercept = {} meV^2, 1/kT coefficient = {} meV^4",
                    format_number(rep.corrected_intercept), format_number(rep.inverse_T_coeff))};
    ctx.csv("stokes_vs_T.csv", {"T_K", "stokes_meV", "em_center_eV", "abs_center_eV"}, st, diag);
    ctx.csv("linewidth_vs_T.csv",
            {"T_K", "kT_meV", "gamma_em_meV", "gamma_em2_meV2", "gamma_abs_meV", "high_T_asymptote_meV2",
             "residual_em", "residual_abs"},
            lw, diag);

    std::string net;
    for (const auto& c : ctx.comments(diag)) net += "# " + c + "\n";
    net += fmt::format("gamma_inhom_meV = {}\nA1_meV = {}\nA2_meV2 = {}\nomega_M_meV = {}\n",
                       format_number(rep.net.gamma_inhom), format_number(rep.net.A1), format_number(rep.net.A2),
                       format_number(rep.net.omega_M));
    write_text_atomic(ctx.path("net.txt"), net);
    *ctx.out << "wrote " << ctx.path("net.txt").string() << "\n";
    *ctx.out << fmt::format("Gamma = {:.4f} meV, A1 = {:.4f} meV, A2 = {:.3f} meV^2, omega_M = {:.4f} meV\n",
                            rep.net.gamma_inhom, rep.net.A1, rep.net.A2, rep.net.omega_M);

    std::vector<double> T, S, G2, fit;
    for (const auto& r : rep.rows) {
        T.push_back(r.T);
        S.push_back(r.stokes);
        G2.push_back(r.gamma_em2);
        fit.push_back(rep.linear_intercept + rep.linear_slope * constants::kB_meV_per_K * r.T);
    }
    ctx.svg("stokes_vs_T.svg", svg::line_plot({{"Stokes shift", T, S, "#1f77b4", false, true}},
                                              {"Stokes shift vs temperature", "T (K)", "Stokes shift (meV)", false}));
    ctx.svg("linewidth_vs_T.svg",
            svg::line_plot({{"gamma_em^2", T, G2, "#1f77b4", false, true}, {"high-T asymptote", T, fit, "#d62728", true, false}},
                           {"0-0 linewidth vs temperature", "T (K)", "gamma_em^2 (meV^2)", false}));
}

std::vector<SeriesPoint> generate_series(const Context& ctx, const MolecularSystem& sys, const std::string& model)
{
    const auto grid = spectrum_grid(ctx, sys);
    std::vector<SeriesPoint> series;
    for (double T : ctx.cfg.output.temperatures)
        series.push_back({T, make_curve(sys, model, SpectrumKind::emission, T, grid),
                          make_curve(sys, model, SpectrumKind::absorption, T, grid)});
    return series;
}

std::vector<SeriesPoint> import_series(const fs::path& dir)
{
    std::map<double, SeriesPoint> by_T;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        SpectralCurve c;
        try {
            c = read_spectrum(f);
        } catch (const ConfigError&) {
            continue;   // not a spectrum file
        }
        auto& p = by_T.try_emplace(c.temperature, SeriesPoint{c.temperature, {}, {}}).first->second;
        auto& slot = c.kind == SpectrumKind::emission ? p.em : p.abs;
        if (!slot.grid.empty())
            throw UsageError(fmt::format("two {} spectra at {} K in {}", to_string(c.kind), c.temperature, dir.string()));
        slot = std::move(c);
    }
    std::vector<SeriesPoint> out;
    for (auto& [T, p] : by_T) {
        if (p.em.grid.empty() || p.abs.grid.empty())
            throw UsageError(fmt::format("temperature {} K lacks an emission or absorption spectrum", T));
        out.push_back(std::move(p));
    }
    if (out.empty()) throw UsageError("no spectrum CSV files found in " + dir.string());
    return out;
}

void cmd_extract(const Context& ctx, const std::string& input)
{
    const auto& cfg = ctx.cfg;
    double omega_M = 0.0;
    if (cfg.net) omega_M = cfg.net->omega_M;
    else if (cfg.molecule) omega_M = cfg.molecule->omega_M;
    if (!(omega_M > 0.0)) throw UsageError("extract needs omega_M from [net] or [molecule]");
    std::vector<VibrationalMode> high;
    if (cfg.molecule)
        for (const auto& m : cfg.molecule->modes)
            if (m.omega > omega_M) high.push_back(m);
    std::vector<SeriesPoint> series;
    if (!input.empty()) series = import_series(input);
    else series = generate_series(ctx, cfg.require_molecule(), cfg.output.model == "homogeneous" ? "exact" : cfg.output.model);
    extraction_outputs(ctx, series, omega_M, high);
}

// --------------------------------------------------------------- polariton

void cmd_dispersion(const Context& ctx, double k_max, int points)
{
    const auto& s = ctx.cfg.require_cavity();
    if (points < 2 || !(k_max > 0.0)) throw UsageError("dispersion needs --points >= 2 and --k-max > 0");
    std::vector<std::vector<double>> rows;
    std::vector<double> K, lo, up;
    for (int i = 0; i < points; ++i) {
        const double k = k_max * i / (points - 1);
        const auto b = branch_energies(s, k);
        rows.push_back({k, b.lower / 1e3, b.upper / 1e3, excitonic_fraction(s, k)});
        K.push_back(k);
        lo.push_back(b.lower / 1e3);
        up.push_back(b.upper / 1e3);
    }
    const std::vector<std::string> info{fmt::format("alpha_pol_meV_um2 = {}", format_number(alpha_pol(s))),
                                        fmt::format("delta_omega_min_meV = {}", format_number(delta_omega_min(s)))};
    ctx.csv("dispersion.csv", {"k_per_um", "omega_low_eV", "omega_up_eV", "sin2phi"}, rows, info);
    ctx.svg("dispersion.svg", svg::line_plot({{"lower", K, lo, "#1f77b4", false, false}, {"upper", K, up, "#d62728", false, false}},
                                             {"polariton dispersion", "k (1/um)", "energy (eV)", false}));
    *ctx.out << fmt::format("omega_low(0) = {:.6f} eV, alpha_pol = {:.5f} meV um^2, delta_omega_min = {:.6g} meV\n",
                            lower_branch(s, 0.0) / 1e3, alpha_pol(s), delta_omega_min(s));
}

// ------------------------------------------------------------------- rates

SpectralDensity density_for(const RatesSection& r, const LowFreqNet& net)
{
    return r.spectral_density == "flat_A2" ? SpectralDensity::flat_A2(net) : SpectralDensity::flat_A1(net);
}

void cmd_rates(const Context& ctx, std::optional<double> k_opt, std::optional<double> kp_opt)
{
    const auto& s = ctx.cfg.require_cavity();
    const auto& net = ctx.cfg.require_net();
    const auto& r = ctx.cfg.require_rates();
    const double T = ctx.T.value_or(r.T);
    const double kp = kp_opt.value_or(r.kprime);
    double k = k_opt.value_or(r.k);
    if (k == 0.0 && kp == 0.0) k = k_for_gap(s, delta_omega_min(s));
    const auto sd = density_for(r, net);
    const auto p = therm_rate_pair(s, sd, k, kp, Temperature(T));
    const auto mix = sin2_mixing(s, k, kp);
    const auto hi = high_T_estimate(s, net, Temperature(T));
    const auto lo = low_T_estimates(s, net, delta_omega_min(s), Temperature(T));
    if (hi.warning) ctx.warn(*hi.warning);
    if (p.out_of_band) ctx.warn("level spacing exceeds omega_M: no low-frequency vibration bridges it, rates are zero");
    const auto u = r.rate_unit;
    ctx.csv("rates.csv",
            {"k_per_um", "kprime_per_um", "T_K", "delta_omega_meV", "sin2_exact", "sin2_approx",
             "gamma_down_" + rate_label(u), "gamma_up_" + rate_label(u), "out_of_band",
             "high_T_estimate_" + rate_label(u), "low_T_nn_down_" + rate_label(u)},
            {{k, kp, T, p.delta_omega, mix.exact, mix.approx, rate_in(p.gamma_down, u), rate_in(p.gamma_up, u),
              p.out_of_band ? 1.0 : 0.0, rate_in(hi.value, u), rate_in(lo.gamma_down, u)}},
            {"spectral density: " + r.spectral_density});
    *ctx.out << fmt::format("k = {:.6g}, k' = {:.6g} 1/um, dw = {:.6g} meV, T = {} K\n", k, kp, p.delta_omega,
                            format_number(T));
    *ctx.out << fmt::format("gamma_down = {:.6g} {u}, gamma_up = {:.6g} {u}\n", rate_in(p.gamma_down, u),
                            rate_in(p.gamma_up, u), fmt::arg("u", rate_label(u)));
    *ctx.out << fmt::format("high-T estimate = {:.6g} {u}, low-T nearest-neighbour estimate = {:.6g} {u}\n",
                            rate_in(hi.value, u), rate_in(lo.gamma_down, u), fmt::arg("u", rate_label(u)));
}

void cmd_map(const Context& ctx)
{
    const auto& s = ctx.cfg.require_cavity();
    const auto& net = ctx.cfg.require_net();
    const auto& r = ctx.cfg.require_rates();
    const double T = ctx.T.value_or(r.T);
    const auto m = rate_map(s, net, r.map_rabi, r.map_ground, Temperature(T));
    if (m.flagged) ctx.warn(fmt::format("{} cells need positive detuning and are left empty (nan)", m.flagged));
    std::vector<std::string> header{"omega_low0_eV \\ rabi_meV"};
    for (double x : m.rabi) header.push_back(format_number(x));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.ground.size(); ++i) {
        std::vector<double> row{m.ground[i] / 1e3};
        for (std::size_t j = 0; j < m.rabi.size(); ++j) row.push_back(rate_in(m.at(i, j), r.rate_unit));
        rows.push_back(std::move(row));
    }
    ctx.csv("rate_map.csv", header, rows,
            {fmt::format("nearest-neighbour downhill rate in {} at T = {} K", rate_label(r.rate_unit), format_number(T))});
    std::vector<double> g_ev, vals;
    for (double g : m.ground) g_ev.push_back(g / 1e3);
    for (double v : m.values) vals.push_back(rate_in(v, r.rate_unit));
    ctx.svg("rate_map.svg", svg::heatmap(m.rabi, g_ev, vals,
                                         {fmt::format("thermalization rate ({}), T = {} K", rate_label(r.rate_unit), format_number(T)),
                                          "Rabi energy (meV)", "ground state energy (eV)", false}));
}

void cmd_ratevt(const Context& ctx)
{
    const auto& s = ctx.cfg.require_cavity();
    const auto& net = ctx.cfg.require_net();
    const auto& r = ctx.cfg.require_rates();
    std::vector<double> k;
    for (int i = 1; i <= r.ratevt_k_count; ++i) k.push_back(r.ratevt_k_max * i / r.ratevt_k_count);
    const auto Ts = ctx.T ? std::vector<double>{*ctx.T} : r.ratevt_T;
    const auto res = rate_vs_temperature(s, SpectralDensity::flat_A2(net), k, Ts);
    const auto u = r.rate_unit;
    std::vector<std::string> header{"T_K \\ k_per_um"};
    for (double x : k) header.push_back(format_number(x));
    std::vector<std::vector<double>> up, down, nn;
    std::vector<double> nnd, nnu, est;
    for (std::size_t it = 0; it < Ts.size(); ++it) {
        std::vector<double> ru{Ts[it]}, rd{Ts[it]};
        for (std::size_t ik = 0; ik < k.size(); ++ik) {
            ru.push_back(rate_in(res.up_at(it, ik), u));
            rd.push_back(rate_in(res.down_at(it, ik), u));
        }
        up.push_back(std::move(ru));
        down.push_back(std::move(rd));
        const double e = high_T_estimate(s, net, Temperature(Ts[it])).value;
        nn.push_back({Ts[it], rate_in(res.nn_down[it], u), rate_in(res.nn_up[it], u), rate_in(e, u),
                      double(res.thermalization_length[it])});
        nnd.push_back(rate_in(res.nn_down[it], u));
        nnu.push_back(rate_in(res.nn_up[it], u));
        est.push_back(rate_in(e, u));
    }
    ctx.csv("rate_vs_T_up.csv", header, up, {"uphill rate 0 -> k in " + rate_label(u)});
    ctx.csv("rate_vs_T_down.csv", header, down, {"downhill rate k -> 0 in " + rate_label(u)});
    ctx.csv("rate_vs_T_nn.csv",
            {"T_K", "nn_down_" + rate_label(u), "nn_up_" + rate_label(u), "high_T_estimate_" + rate_label(u),
             "thermalization_length"},
            nn);
    ctx.svg("rate_vs_T.svg", svg::line_plot({{"nearest neighbour, down", Ts, nnd, "#1f77b4", false, true},
                                             {"nearest neighbour, up", Ts, nnu, "#2ca02c", false, true},
                                             {"high-T estimate", Ts, est, "#d62728", true, false}},
                                            {"thermalization rate vs temperature", "T (K)", "rate (" + rate_label(u) + ")", false}));
}

// -------------------------------------------------------------- condensim

SimConfig sim_config(const RunConfig& cfg, std::optional<double> T)
{
    const auto& s = cfg.require_cavity();
    const auto& m = cfg.require_simulation();
    SimConfig c;
    c.grid = build_mode_grid(s, m.n_modes, m.k_max, m.decay);
    c.gamma_therm = m.gamma_therm;
    c.T = Temperature(T.value_or(m.T));
    c.pump = m.pump;
    c.seed = m.seed;
    c.scatter = m.scatter;
    c.dt = m.dt;
    c.t_end = m.t_end;
    c.save_stride = m.save_stride;
    return c;
}

ThresholdOptions threshold_options(const Context& ctx)
{
    auto o = ctx.cfg.require_simulation().threshold;
    if (ctx.seed_given) o.jitter_seed = ctx.seed;
    return o;
}

void write_ek(const Context& ctx, const std::string& stem, const SimTrajectory& tr)
{
    const auto fin = ek_distribution(tr, EkMode::final_state);
    const auto integ = ek_distribution(tr, EkMode::time_integrated);
    std::vector<std::vector<double>> rows;
    std::vector<double> K, F, I, P;
    for (std::size_t i = 0; i < fin.size(); ++i) {
        rows.push_back({fin[i].k, fin[i].omega / 1e3, fin[i].occupation, tr.peak[i], integ[i].occupation});
        K.push_back(fin[i].k);
        F.push_back(fin[i].occupation);
        P.push_back(tr.peak[i]);
        I.push_back(integ[i].occupation);
    }
    ctx.csv(stem + "_ek.csv", {"k_per_um", "E_eV", "n_final", "n_peak", "n_time_integrated_ps"}, rows);
    ctx.svg(stem + "_ek.svg", svg::line_plot({{"peak", K, P, "#1f77b4", false, true},
                                              {"time-integrated (ps)", K, I, "#d62728", false, true},
                                              {"final", K, F, "#2ca02c", true, true}},
                                             {"E,k occupation: " + stem, "k (1/um)", "occupation", true}));
    const auto amax = [](const std::vector<double>& v) { return std::max_element(v.begin(), v.end()) - v.begin(); };
    *ctx.out << fmt::format("{}: argmax k (final) = {:.4g}, (peak) = {:.4g}, (integrated) = {:.4g} 1/um\n", stem,
                            K[amax(F)], K[amax(P)], K[amax(I)]);
}

void write_trajectory(const Context& ctx, const std::string& stem, const SimTrajectory& tr,
                      const std::vector<std::string>& extra)
{
    std::vector<std::string> header{"t_ps", "n_P"};
    for (std::size_t i = 0; i < tr.grid.modes.size(); ++i) header.push_back(fmt::format("n_{}", i));
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        std::vector<double> r{tr.times[s], tr.n_P[s]};
        r.insert(r.end(), tr.n[s].begin(), tr.n[s].end());
        rows.push_back(std::move(r));
    }
    ctx.csv(stem + "_trajectory.csv", header, rows, extra);
}

void cmd_simulate(const Context& ctx)
{
    auto c = sim_config(ctx.cfg, ctx.T);
    const auto& m = ctx.cfg.require_simulation();
    std::vector<std::string> extra;
    if (m.pump_ratio) {
        const auto th = find_threshold(c, threshold_options(ctx));
        c.pump.amplitude = *m.pump_ratio * th.amplitude;
        extra.push_back(fmt::format("threshold amplitude = {}, pump = {} x threshold", format_number(th.amplitude),
                                    format_number(*m.pump_ratio)));
        *ctx.out << fmt::format("P_th = {:.6g}, running at {:.6g}\n", th.amplitude, c.pump.amplitude);
    }
    const auto tr = simulate(c);
    write_trajectory(ctx, "simulation", tr, extra);
    write_ek(ctx, "simulation", tr);
}

void cmd_threshold(const Context& ctx)
{
    auto c = sim_config(ctx.cfg, ctx.T);
    c.seed.amplitude = 0.0;
    const auto th = find_threshold(c, threshold_options(ctx));
    std::vector<std::vector<double>> rows;
    for (auto [P, n0] : th.scan) rows.push_back({P, n0});
    ctx.csv("threshold_scan.csv", {"pump_amplitude", "peak_n0"}, rows,
            {fmt::format("threshold amplitude = {}", format_number(th.amplitude)),
             fmt::format("knee sharpness dln(n0)/dln(P) = {}", format_number(th.sharpness))});
    std::string txt;
    for (const auto& l : ctx.comments()) txt += "# " + l + "\n";
    txt += fmt::format("P_th = {}\nsharpness = {}\nevaluations = {}\n", format_number(th.amplitude),
                       format_number(th.sharpness), th.evaluations);
    write_text_atomic(ctx.path("threshold.txt"), txt);
    *ctx.out << fmt::format("P_th = {:.6g} (sharpness {:.3g}, {} simulations)\n", th.amplitude, th.sharpness,
                            th.evaluations);
    std::vector<double> P, N;
    for (auto [p, n] : th.scan) {
        P.push_back(std::log10(p));
        N.push_back(n);
    }
    ctx.svg("threshold_scan.svg", svg::line_plot({{"peak n_0", P, N, "#1f77b4", false, true}},
                                                 {"threshold scan", "log10 pump amplitude", "peak n_0", true}));
}

// -------------------------------------------------------------- reproduce

void reproduce(Context& ctx, const std::string& fig)
{
    const auto& sys = ctx.cfg.require_molecule();
    if (fig == "fig1") {
        const MolecularSystem no_low = [&] {
            MolecularSystem m = sys;
            m.modes = sys.high_modes();
            return m;
        }();
        const auto grid = spectrum_grid(ctx, sys);
        for (double T : {6.0, 300.0}) {
            for (const auto& [name, model, s] : {std::tuple{"exact", "exact", &sys}, std::tuple{"reduced", "reduced", &sys},
                                                 std::tuple{"exact_no_low_modes", "exact", &no_low}}) {
                const auto em = make_curve(*s, model, SpectrumKind::emission, T, grid);
                const auto ab = make_curve(*s, model, SpectrumKind::absorption, T, grid);
                for (const auto* c : {&em, &ab}) {
                    const auto file = fmt::format("fig1_{}_{}_{}.csv", name, to_string(c->kind), tag(T));
                    write_spectrum(ctx.path(file), *c, ctx.comments());
                    *ctx.out << "wrote " << ctx.path(file).string() << "\n";
                }
                write_pair_svg(ctx, fmt::format("fig1_{}_{}.svg", name, tag(T)), em, ab,
                               fmt::format("{}, T = {} K", name, format_number(T)));
            }
        }
    } else if (fig == "fig2") {
        ctx.T.reset();
        extraction_outputs(ctx, generate_series(ctx, sys, "exact"), ctx.cfg.require_net().omega_M, sys.high_modes());
    } else if (fig == "fig3") {
        cmd_map(ctx);
    } else if (fig == "fig4") {
        cmd_ratevt(ctx);
    } else if (fig == "fig5") {
        auto c = sim_config(ctx.cfg, ctx.T);
        const double ratio = ctx.cfg.require_simulation().pump_ratio.value_or(2.0);
        auto ground = c;
        ground.seed.amplitude = 0.0;
        const auto th = find_threshold(ground, threshold_options(ctx));
        *ctx.out << fmt::format("P_th = {:.6g}\n", th.amplitude);
        ground.pump.amplitude = ratio * th.amplitude;
        auto seeded = ground;
        seeded.seed = c.seed;
        const std::vector<std::string> extra{fmt::format("threshold amplitude = {}, pump = {} x threshold",
                                                         format_number(th.amplitude), format_number(ratio))};
        const auto tg = simulate(ground);
        write_trajectory(ctx, "fig5_ground", tg, extra);
        write_ek(ctx, "fig5_ground", tg);
        const auto ts = simulate(seeded);
        write_trajectory(ctx, "fig5_seeded", ts, extra);
        write_ek(ctx, "fig5_seeded", ts);
    } else {
        throw UsageError("reproduce expects one of fig1, fig2, fig3, fig4, fig5");
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"vibrotherm: vibronic spectra, polariton thermalization rates and condensation kinetics"};
    app.require_subcommand(1);
    std::string config_path, out_dir, T_str, model, input, figure;
    std::uint64_t seed = 20240501;
    int threads = 0;
    double k_max = 3.0;
    int points = 301;
    std::optional<double> k, kp;

    app.add_option("--config", config_path, "configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--T", T_str, "temperature, e.g. 300K");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized steps");
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)");

    auto* c_spectra = app.add_subcommand("spectra", "emission/absorption spectra")->fallthrough();
    c_spectra->add_option("--model", model, "exact | reduced | homogeneous")
        ->check(CLI::IsMember({"exact", "reduced", "homogeneous"}));
    auto* c_extract = app.add_subcommand("extract", "Stokes shift, linewidths and net parameters")->fallthrough();
    c_extract->add_option("--input", input, "directory with spectrum CSVs (default: generate from [molecule])");
    auto* c_disp = app.add_subcommand("dispersion", "polariton branches and Hopfield fractions")->fallthrough();
    c_disp->add_option("--k-max", k_max, "largest k in 1/um");
    c_disp->add_option("--points", points, "number of k samples");
    auto* c_rates = app.add_subcommand("rates", "thermalization rates for one pair of states")->fallthrough();
    c_rates->add_option("--k", k, "upper state wavevector, 1/um");
    c_rates->add_option("--kprime", kp, "lower state wavevector, 1/um");
    auto* c_map = app.add_subcommand("map", "rate vs Rabi energy and ground-state energy")->fallthrough();
    auto* c_ratevt = app.add_subcommand("ratevt", "rates vs temperature")->fallthrough();
    auto* c_sim = app.add_subcommand("simulate", "condensation rate equations")->fallthrough();
    auto* c_thr = app.add_subcommand("threshold", "pump threshold search")->fallthrough();
    auto* c_rep = app.add_subcommand("reproduce", "reference figures from the bundled configuration")->fallthrough();
    c_rep->add_option("figure", figure, "fig1 | fig2 | fig3 | fig4 | fig5")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();   // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (threads > 0) omp_set_num_threads(threads);
        Context ctx;
        ctx.out = &out;
        ctx.err = &err;
        ctx.seed = seed;
        ctx.seed_given = seed_opt->count() > 0;
        ctx.command = app.get_subcommands().front()->get_name();
        if (c_rep->parsed()) {
            ctx.command += " " + figure;
            if (!config_path.empty()) throw UsageError("reproduce always uses the bundled configuration");
            ctx.cfg = load_config(bundled_config());
        } else {
            if (config_path.empty()) throw UsageError("--config is required");
            ctx.cfg = load_config_file(config_path);
        }
        if (!T_str.empty()) ctx.T = parse_temperature(T_str);
        ctx.out_dir = !out_dir.empty() ? fs::path(out_dir)
                                       : (c_rep->parsed() ? fs::path(ctx.cfg.output.dir) / figure : fs::path(ctx.cfg.output.dir));

        if (c_spectra->parsed()) cmd_spectra(ctx, model);
        else if (c_extract->parsed()) cmd_extract(ctx, input);
        else if (c_disp->parsed()) cmd_dispersion(ctx, k_max, points);
        else if (c_rates->parsed()) cmd_rates(ctx, k, kp);
        else if (c_map->parsed()) cmd_map(ctx);
        else if (c_ratevt->parsed()) cmd_ratevt(ctx);
        else if (c_sim->parsed()) cmd_simulate(ctx);
        else if (c_thr->parsed()) cmd_threshold(ctx);
        else if (c_rep->parsed()) reproduce(ctx, figure);
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace vibrotherm::cli
