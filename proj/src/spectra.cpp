#include "vibrotherm/spectra.hpp"
#include "vibrotherm/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace vibrotherm {

std::vector<VibrationalMode> MolecularSystem::low_modes() const
{
    std::vector<VibrationalMode> out;
    for (const auto& m : modes)
        if (m.omega <= omega_M) out.push_back(m);
    return out;
}

std::vector<VibrationalMode> MolecularSystem::high_modes() const
{
    std::vector<VibrationalMode> out;
    for (const auto& m : modes)
        if (m.omega > omega_M) out.push_back(m);
    return out;
}

void MolecularSystem::validate(LineShape shape) const
{
    if (!std::isfinite(omega_0) || omega_0 <= 0.0) throw DomainError("omega_0 must be > 0");
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const auto& m = modes[j];
        if (!(m.omega > 0.0) || !std::isfinite(m.omega))
            throw DomainError(fmt::format("mode {}: frequency must be > 0", j));
        if (!(m.huang_rhys_sq >= 0.0) || !std::isfinite(m.huang_rhys_sq))
            throw DomainError(fmt::format("mode {}: Huang-Rhys square must be finite and >= 0", j));
        if (m.gamma < 0.0) throw DomainError(fmt::format("mode {}: damping must be >= 0", j));
        if (j > 0 && modes[j - 1].omega > m.omega)
            throw DomainError("modes must be sorted by ascending frequency");
    }
    if (gamma_diss < 0.0) throw DomainError("gamma_diss must be >= 0");
    if (shape == LineShape::gaussian) {
        if (!(gamma_inhom > 0.0)) throw DomainError("gamma_inhom must be > 0 for the Gaussian model");
        if (gamma_inhom < broadening_ratio * gamma_diss / 2.0)
            throw DomainError(fmt::format("Gaussian model needs gamma_inhom >= {} x gamma_diss/2 ({} vs {} meV)",
                                          broadening_ratio, gamma_inhom, gamma_diss / 2.0));
    }
}

double cutoff_from_width(const std::vector<VibrationalMode>& sorted_modes, double gamma_inhom)
{
    double cut = 0.0;
    for (const auto& m : sorted_modes)
        if (m.omega < gamma_inhom) cut = m.omega;
    return cut;
}

MolecularSystem make_system(double omega_0, double gamma_inhom, std::vector<VibrationalMode> modes,
                            std::optional<double> omega_M, double gamma_diss)
{
    std::sort(modes.begin(), modes.end(),
              [](const VibrationalMode& a, const VibrationalMode& b) { return a.omega < b.omega; });
    MolecularSystem s;
    s.omega_0 = omega_0;
    s.gamma_inhom = gamma_inhom;
    s.gamma_diss = gamma_diss;
    s.omega_M = omega_M ? *omega_M : cutoff_from_width(modes, gamma_inhom);
    s.modes = std::move(modes);
    return s;
}

double SpectralCurve::integral() const
{
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        acc += 0.5 * (intensity[i] + intensity[i - 1]) * (grid[i] - grid[i - 1]);
    return acc;
}

const char* to_string(SpectrumKind k) { return k == SpectrumKind::emission ? "emission" : "absorption"; }

namespace {

std::vector<double> truncated_poisson(double x, const TruncationPolicy& p, std::size_t j, double omega)
{
    std::vector<double> w;
    double cum = 0.0;
    for (int k = 0; k <= p.max_quanta; ++k) {
        const double z = poisson_weight(k, x);
        w.push_back(z);
        cum += z;
        if (cum >= 1.0 - p.epsilon) return w;
    }
    throw NumericError(fmt::format("Poisson truncation for mode {} (omega = {:.4g} meV, mean quanta {:.3g}) "
                                   "did not converge within {} quanta",
                                   j, omega, x, p.max_quanta));
}

struct ModeEntry {
    int net;
    int quanta;
    double weight;
};

std::vector<ModeEntry> mode_entries(const VibrationalMode& m, std::size_t j, Temperature T,
                                    const TruncationPolicy& p, bool keep_damping)
{
    const double n = bose_occupation(m.omega, T);
    const auto thermal = truncated_poisson(n * m.huang_rhys_sq, p, j, m.omega);
    const auto emitted = truncated_poisson((1.0 + n) * m.huang_rhys_sq, p, j, m.omega);
    std::vector<ModeEntry> out;
    if (keep_damping) {
        for (std::size_t kp = 0; kp < thermal.size(); ++kp)
            for (std::size_t k = 0; k < emitted.size(); ++k)
                out.push_back({int(k) - int(kp), int(k + kp), thermal[kp] * emitted[k]});
        return out;
    }
    std::map<int, double> merged;
    for (std::size_t kp = 0; kp < thermal.size(); ++kp)
        for (std::size_t k = 0; k < emitted.size(); ++k)
            merged[int(k) - int(kp)] += thermal[kp] * emitted[k];
    for (auto [net, w] : merged) out.push_back({net, 0, w});
    return out;
}

std::vector<LineTerm> to_lines(const std::vector<ProgressionTerm>& terms, double origin, double sign,
                               double width)
{
    std::vector<LineTerm> lines;
    lines.reserve(terms.size());
    for (const auto& t : terms) lines.push_back({origin + sign * t.shift, t.weight, width});
    return lines;
}

SpectralCurve make_curve(const std::vector<double>& grid, std::vector<double> y, SpectrumKind kind,
                         Temperature T, const char* model)
{
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("spectral grid must be strictly increasing");
    SpectralCurve c;
    c.grid = grid;
    c.intensity = std::move(y);
    c.kind = kind;
    c.temperature = T.kelvin;
    c.model = model;
    return c;
}

double sign_of(SpectrumKind k) { return k == SpectrumKind::emission ? -1.0 : 1.0; }

SpectralCurve exact_curve(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                          const TruncationPolicy& policy, SpectrumKind kind)
{
    sys.validate(LineShape::gaussian);
    auto y = kernels::superpose_parallel(exact_lines(sys, T, kind, policy), grid, LineShape::gaussian);
    return make_curve(grid, std::move(y), kind, T, "exact");
}

SpectralCurve homogeneous_curve(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                                const TruncationPolicy& policy, SpectrumKind kind)
{
    sys.validate(LineShape::lorentzian);
    const auto terms = vibronic_progression(sys.modes, T, policy, true);
    std::vector<LineTerm> lines;
    lines.reserve(terms.size());
    for (const auto& t : terms) {
        const double hwhm = sys.gamma_diss / 2.0 + t.damping;
        if (!(hwhm > 0.0)) throw NumericError("homogeneous line with zero total linewidth");
        lines.push_back({sys.omega_0 + sign_of(kind) * t.shift, t.weight, hwhm});
    }
    auto y = kernels::superpose_parallel(std::move(lines), grid, LineShape::lorentzian);
    return make_curve(grid, std::move(y), kind, T, "homogeneous");
}

SpectralCurve reduced_curve(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                            const TruncationPolicy& policy, SpectrumKind kind)
{
    sys.validate(LineShape::gaussian);
    const auto pk = effective_peak_params(sys, T);
    const auto terms = vibronic_progression(sys.high_modes(), Temperature(0.0), policy);
    const double origin = kind == SpectrumKind::emission ? pk.omega_em : pk.omega_abs;
    auto y = kernels::superpose_parallel(to_lines(terms, origin, sign_of(kind), pk.gamma_em), grid,
                                         LineShape::gaussian);
    return make_curve(grid, std::move(y), kind, T, "reduced");
}

} // namespace

std::vector<ProgressionTerm> vibronic_progression(const std::vector<VibrationalMode>& modes, Temperature T,
                                                  const TruncationPolicy& policy, bool keep_damping)
{
    std::vector<ProgressionTerm> terms{{0.0, 1.0, 0.0}};
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const auto entries = mode_entries(modes[j], j, T, policy, keep_damping);
        std::vector<ProgressionTerm> next;
        next.reserve(terms.size() * 4);
        for (const auto& t : terms)
            for (const auto& e : entries) {
                const double w = t.weight * e.weight;
                if (w < policy.prune) continue;
                next.push_back({t.shift + e.net * modes[j].omega, w, t.damping + e.quanta * modes[j].gamma});
            }
        terms = std::move(next);
    }
    double total = 0.0;
    for (const auto& t : terms) total += t.weight;
    for (auto& t : terms) t.weight /= total;
    return terms;
}

std::vector<LineTerm> exact_lines(const MolecularSystem& sys, Temperature T, SpectrumKind kind,
                                  const TruncationPolicy& policy)
{
    return to_lines(vibronic_progression(sys.modes, T, policy), sys.omega_0, sign_of(kind), sys.gamma_inhom);
}

std::vector<double> uniform_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi > lo)) throw DomainError("grid needs hi > lo and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * step;
    return g;
}

std::vector<double> default_grid(const MolecularSystem& sys)
{
    return uniform_grid(sys.omega_0 - 800.0, sys.omega_0 + 800.0, 0.5);
}

std::vector<double> covering_grid(const MolecularSystem& sys, Temperature T, double step,
                                  const TruncationPolicy& policy)
{
    double reach = 0.0;
    for (const auto& t : vibronic_progression(sys.modes, T, policy)) reach = std::max(reach, std::abs(t.shift));
    const auto pk = effective_peak_params(sys, T);
    const double width = std::max(sys.gamma_inhom, pk.gamma_em);
    const double half = std::ceil((reach + std::abs(sys.omega_0 - pk.omega_em) + 10.0 * width) / step) * step;
    const auto n = static_cast<long>(std::lround(half / step));
    std::vector<double> g;
    g.reserve(2 * n + 1);
    for (long i = -n; i <= n; ++i) g.push_back(sys.omega_0 + static_cast<double>(i) * step);
    return g;
}

PeakParams effective_peak_params(const MolecularSystem& sys, Temperature T)
{
    double shift = 0.0, var = sys.gamma_inhom * sys.gamma_inhom;
    for (const auto& m : sys.low_modes()) {
        shift += m.huang_rhys_sq * m.omega;
        var += m.huang_rhys_sq * m.omega * m.omega * (1.0 + 2.0 * bose_occupation(m.omega, T));
    }
    return {sys.omega_0 - shift, sys.omega_0 + shift, std::sqrt(var)};
}

SpectralCurve emission_exact(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                             const TruncationPolicy& policy)
{
    return exact_curve(sys, T, grid, policy, SpectrumKind::emission);
}

SpectralCurve absorption_exact(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                               const TruncationPolicy& policy)
{
    return exact_curve(sys, T, grid, policy, SpectrumKind::absorption);
}

SpectralCurve emission_homogeneous(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                                   const TruncationPolicy& policy)
{
    return homogeneous_curve(sys, T, grid, policy, SpectrumKind::emission);
}

SpectralCurve absorption_homogeneous(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                                     const TruncationPolicy& policy)
{
    return homogeneous_curve(sys, T, grid, policy, SpectrumKind::absorption);
}

SpectralCurve emission_reduced(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                               const TruncationPolicy& policy)
{
    return reduced_curve(sys, T, grid, policy, SpectrumKind::emission);
}

SpectralCurve absorption_reduced(const MolecularSystem& sys, Temperature T, const std::vector<double>& grid,
                                 const TruncationPolicy& policy)
{
    return reduced_curve(sys, T, grid, policy, SpectrumKind::absorption);
}

} // namespace vibrotherm
