#include "vibrotherm/config.hpp"
#include "vibrotherm/errors.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace vibrotherm {

namespace {

const std::set<std::string> known_sections{"molecule", "cavity", "net", "rates", "simulation", "output"};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s, int line)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError(fmt::format("line {}: cannot parse '{}' as a number", line, s));
    return v;
}

std::string_view strip_comment(std::string_view s)
{
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

} // namespace

ConfigDocument ConfigDocument::parse(std::string_view text)
{
    ConfigDocument doc;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = trim(strip_comment(text.substr(pos, eol - pos)));
        ++line_no;
        pos = eol + 1;
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header", line_no));
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_sections.count(current))
                throw ConfigError(fmt::format("line {}: unknown section [{}]", line_no, current));
            if (doc.sections.count(current))
                throw ConfigError(fmt::format("line {}: duplicate section [{}]", line_no, current));
            doc.sections[current];
            doc.section_lines[current] = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
        if (current.empty()) throw ConfigError(fmt::format("line {}: key outside of any section", line_no));
        ConfigEntry e;
        e.key = std::string(trim(line.substr(0, eq)));
        e.line = line_no;
        if (e.key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
        for (const auto& other : doc.sections[current])
            if (other.key == e.key)
                throw ConfigError(fmt::format("line {}: duplicate key '{}' in [{}]", line_no, e.key, current));
        const std::string_view v = trim(line.substr(eq + 1));
        if (v.empty()) throw ConfigError(fmt::format("line {}: missing value for '{}'", line_no, e.key));
        if (v.front() == '"') {
            if (v.size() < 2 || v.back() != '"') throw ConfigError(fmt::format("line {}: unterminated string", line_no));
            e.value = std::string(v.substr(1, v.size() - 2));
        } else if (v == "true" || v == "false") {
            e.value = v == "true";
        } else if (v.front() == '[') {
            if (v.back() != ']') throw ConfigError(fmt::format("line {}: unterminated array", line_no));
            std::vector<double> arr;
            std::string_view body = trim(v.substr(1, v.size() - 2));
            while (!body.empty()) {
                const auto c = body.find(',');
                const auto item = trim(body.substr(0, c));
                if (item.empty() && c == std::string_view::npos) break;
                arr.push_back(parse_number(item, line_no));
                if (c == std::string_view::npos) break;
                body = trim(body.substr(c + 1));
            }
            e.value = std::move(arr);
        } else {
            e.value = parse_number(v, line_no);
        }
        doc.sections[current].push_back(std::move(e));
    }
    return doc;
}

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::string num_list(const std::vector<double>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

class Section {
public:
    Section(const ConfigDocument& doc, std::string name, std::string& resolved)
        : name_(std::move(name)), out_(resolved)
    {
        static const std::vector<ConfigEntry> none;
        auto it = doc.sections.find(name_);
        entries_ = it == doc.sections.end() ? &none : &it->second;
        out_ += "[" + name_ + "]\n";
    }

    // energy with a unit suffix, returned in meV
    std::optional<double> energy(const std::string& base)
    {
        auto [e, unit] = suffixed(base, {"eV", "meV", "cm1", "K"});
        if (!e) return std::nullopt;
        return to_meV(scalar(*e), parse_energy_unit(unit));
    }
    double energy(const std::string& base, double def)
    {
        const double v = energy(base).value_or(def);
        record(base + "_meV", num(v));
        return v;
    }
    double energy_req(const std::string& base)
    {
        auto v = energy(base);
        if (!v) throw missing(base + "_<eV|meV|cm1|K>");
        record(base + "_meV", num(*v));
        return *v;
    }
    std::optional<double> energy_opt(const std::string& base)
    {
        auto v = energy(base);
        if (v) record(base + "_meV", num(*v));
        return v;
    }
    std::optional<std::vector<double>> energy_list(const std::string& base)
    {
        auto [e, unit] = suffixed(base, {"eV", "meV", "cm1", "K"});
        if (!e) return std::nullopt;
        auto v = list(*e);
        for (auto& x : v) x = to_meV(x, parse_energy_unit(unit));
        record(base + "_meV", num_list(v));
        return v;
    }
    double energy_squared_req(const std::string& base)
    {
        auto [e, unit] = suffixed(base, {"eV2", "meV2"});
        if (!e) throw missing(base + "_<eV2|meV2>");
        double v = scalar(*e) * (unit == "eV2" ? 1e6 : 1.0);
        record(base + "_meV2", num(v));
        return v;
    }
    double duration(const std::string& base, double def_ps)
    {
        auto [e, unit] = suffixed(base, {"fs", "ps"});
        const double v = e ? scalar(*e) * (unit == "fs" ? 1e-3 : 1.0) : def_ps;
        record(base + "_ps", num(v));
        return v;
    }
    double temperature(const std::string& base, double def)
    {
        const auto* e = take(base + "_K");
        const double v = e ? scalar(*e) : def;
        if (v < 0.0) throw ConfigError(fmt::format("line {}: temperature must be >= 0 K", e ? e->line : 0));
        record(base + "_K", num(v));
        return v;
    }
    std::vector<double> temperature_list(const std::string& base, std::vector<double> def = {})
    {
        const auto* e = take(base + "_K");
        auto v = e ? list(*e) : def;
        for (double t : v)
            if (t < 0.0) throw ConfigError(fmt::format("line {}: temperature must be >= 0 K", e ? e->line : 0));
        record(base + "_K", num_list(v));
        return v;
    }
    std::optional<double> number_opt(const std::string& key)
    {
        const auto* e = take(key);
        if (!e) return std::nullopt;
        const double v = scalar(*e);
        record(key, num(v));
        return v;
    }
    double number(const std::string& key, double def)
    {
        const auto* e = take(key);
        const double v = e ? scalar(*e) : def;
        record(key, num(v));
        return v;
    }
    double number_req(const std::string& key)
    {
        const auto* e = take(key);
        if (!e) throw missing(key);
        const double v = scalar(*e);
        record(key, num(v));
        return v;
    }
    int integer(const std::string& key, int def)
    {
        const auto* e = take(key);
        if (!e) {
            record(key, std::to_string(def));
            return def;
        }
        const double v = scalar(*e);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw ConfigError(fmt::format("line {}: '{}' must be an integer", e->line, key));
        record(key, std::to_string(static_cast<int>(v)));
        return static_cast<int>(v);
    }
    std::optional<std::vector<double>> number_list(const std::string& key)
    {
        const auto* e = take(key);
        if (!e) return std::nullopt;
        auto v = list(*e);
        record(key, num_list(v));
        return v;
    }
    bool boolean(const std::string& key, bool def)
    {
        const auto* e = take(key);
        bool v = def;
        if (e) {
            if (!std::holds_alternative<bool>(e->value))
                throw ConfigError(fmt::format("line {}: '{}' must be true or false", e->line, key));
            v = std::get<bool>(e->value);
        }
        record(key, v ? "true" : "false");
        return v;
    }
    std::string text(const std::string& key, const std::string& def, const std::vector<std::string>& allowed = {})
    {
        const auto* e = take(key);
        std::string v = def;
        if (e) {
            if (!std::holds_alternative<std::string>(e->value))
                throw ConfigError(fmt::format("line {}: '{}' must be a quoted string", e->line, key));
            v = std::get<std::string>(e->value);
            if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end())
                throw ConfigError(fmt::format("line {}: '{}' must be one of {}", e->line, key,
                                              fmt::join(allowed, ", ")));
        }
        record(key, "\"" + v + "\"");
        return v;
    }
    int line_of(const std::string& key) const
    {
        for (const auto& e : *entries_)
            if (e.key == key) return e.line;
        return 0;
    }

    void finish() const
    {
        for (std::size_t i = 0; i < entries_->size(); ++i)
            if (!used_.count(i))
                throw ConfigError(fmt::format("line {}: unknown key '{}' in [{}]", (*entries_)[i].line,
                                              (*entries_)[i].key, name_));
    }

private:
    std::string name_;
    std::string& out_;
    const std::vector<ConfigEntry>* entries_;
    std::set<std::size_t> used_;

    void record(const std::string& key, const std::string& value) { out_ += key + " = " + value + "\n"; }

    ConfigError missing(const std::string& key) const
    {
        return ConfigError(fmt::format("missing required key '{}' in [{}]", key, name_));
    }

    const ConfigEntry* take(const std::string& key)
    {
        for (std::size_t i = 0; i < entries_->size(); ++i)
            if ((*entries_)[i].key == key) {
                used_.insert(i);
                return &(*entries_)[i];
            }
        return nullptr;
    }

    std::pair<const ConfigEntry*, std::string> suffixed(const std::string& base, const std::vector<std::string>& units)
    {
        const ConfigEntry* found = nullptr;
        std::string unit;
        for (const auto& u : units) {
            const auto* e = take(base + "_" + u);
            if (!e) continue;
            if (found)
                throw ConfigError(fmt::format("line {}: '{}' given twice with different units", e->line, base));
            found = e;
            unit = u;
        }
        return {found, unit};
    }

    static double scalar(const ConfigEntry& e)
    {
        if (!std::holds_alternative<double>(e.value))
            throw ConfigError(fmt::format("line {}: '{}' must be a number", e.line, e.key));
        return std::get<double>(e.value);
    }
    static std::vector<double> list(const ConfigEntry& e)
    {
        if (std::holds_alternative<double>(e.value)) return {std::get<double>(e.value)};
        if (!std::holds_alternative<std::vector<double>>(e.value))
            throw ConfigError(fmt::format("line {}: '{}' must be an array of numbers", e.line, e.key));
        return std::get<std::vector<double>>(e.value);
    }
};

std::vector<double> linspace(double a, double b, int n)
{
    if (n < 1) throw ConfigError("sweep counts must be >= 1");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

template <class Fn>
void guarded(const Section& sec, const std::string& key, Fn&& fn)
{
    try {
        fn();
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("line {}: {}", sec.line_of(key), e.what()));
    }
}

} // namespace

RunConfig load_config(std::string_view text)
{
    const auto doc = ConfigDocument::parse(text);
    RunConfig cfg;
    std::string& out = cfg.resolved;

    if (doc.has("molecule")) {
        Section s(doc, "molecule", out);
        const double w0 = s.energy_req("omega_0");
        const double gamma = s.energy_req("gamma_inhom");
        const double gdiss = s.energy("gamma_diss", 0.0);
        const auto cut = s.energy_opt("omega_M");
        const auto freqs = s.energy_list("modes").value_or(std::vector<double>{});
        const auto hr = s.number_list("huang_rhys_sq").value_or(std::vector<double>{});
        const auto damp = s.energy_list("mode_damping");
        const double ratio = s.number("broadening_ratio", 5.0);
        if (freqs.size() != hr.size())
            throw ConfigError(fmt::format("line {}: modes and huang_rhys_sq have different lengths ({} vs {})",
                                          s.line_of("huang_rhys_sq"), freqs.size(), hr.size()));
        if (damp && damp->size() != freqs.size())
            throw ConfigError("mode_damping must list one value per mode");
        std::vector<VibrationalMode> modes;
        for (std::size_t i = 0; i < freqs.size(); ++i) modes.push_back({freqs[i], hr[i], damp ? (*damp)[i] : 0.0});
        auto sys = make_system(w0, gamma, modes, cut, gdiss);
        sys.broadening_ratio = ratio;
        if (!cut) out += "omega_M_meV = " + num(sys.omega_M) + "  # from the width rule\n";
        s.finish();
        for (const auto& m : sys.modes)
            if (!(m.omega > 0.0) || m.huang_rhys_sq < 0.0) throw ConfigError("[molecule] mode frequencies must be > 0 and Huang-Rhys squares >= 0");
        cfg.molecule = std::move(sys);
    }

    if (doc.has("cavity")) {
        Section s(doc, "cavity", out);
        PolaritonSetup p;
        p.cavity.omega_cav0 = s.energy_req("omega_cav0");
        p.cavity.alpha_cav = s.number_req("alpha_cav_meV_um2");
        p.cavity.area = s.number_req("area_um2");
        p.rabi = s.energy_req("rabi");
        p.n_mol = s.number_req("n_mol");
        auto exc = s.energy_opt("omega_exc");
        if (!exc && cfg.molecule) {
            exc = cfg.molecule->omega_0;
            out += "omega_exc_meV = " + num(*exc) + "  # from [molecule]\n";
        }
        if (!exc) throw ConfigError("[cavity] needs omega_exc_<unit> when there is no [molecule] section");
        p.omega_0 = *exc;
        s.finish();
        guarded(s, "rabi", [&] { p.validate(); });
        cfg.cavity = p;
    }

    if (doc.has("net")) {
        Section s(doc, "net", out);
        LowFreqNet n;
        n.gamma_inhom = s.energy("gamma_inhom", 0.0);
        n.A1 = s.energy_req("A1");
        n.A2 = s.energy_squared_req("A2");
        n.omega_M = s.energy_req("omega_M");
        s.finish();
        if (n.A1 < 0.0 || n.A2 < 0.0 || !(n.omega_M > 0.0))
            throw ConfigError("[net] needs A1 >= 0, A2 >= 0 and omega_M > 0");
        cfg.net = n;
    }

    if (doc.has("rates")) {
        Section s(doc, "rates", out);
        RatesSection r;
        r.T = s.temperature("T", r.T);
        r.k = s.number("k_per_um", r.k);
        r.kprime = s.number("kprime_per_um", r.kprime);
        r.spectral_density = s.text("spectral_density", r.spectral_density, {"flat_A1", "flat_A2"});
        const double rmin = s.energy("map_rabi_min", 40.0), rmax = s.energy("map_rabi_max", 150.0);
        const int rn = s.integer("map_rabi_count", 23);
        const double gmin = s.energy("map_ground_min", 2450.0), gmax = s.energy("map_ground_max", 2650.0);
        const int gn = s.integer("map_ground_count", 21);
        r.map_rabi = linspace(rmin, rmax, rn);
        r.map_ground = linspace(gmin, gmax, gn);
        r.ratevt_T = s.temperature_list("ratevt_T", {6, 25, 50, 100, 150, 200, 250, 300, 350, 400});
        r.ratevt_k_max = s.number("ratevt_k_max_per_um", r.ratevt_k_max);
        r.ratevt_k_count = s.integer("ratevt_k_count", r.ratevt_k_count);
        r.rate_unit = s.text("rate_unit", r.rate_unit, {"eV", "meV", "ps-1"});
        s.finish();
        cfg.rates = r;
    }

    if (doc.has("simulation")) {
        Section s(doc, "simulation", out);
        SimulationSection m;
        m.n_modes = s.integer("n_modes", m.n_modes);
        m.k_max = s.number("k_max_per_um", m.k_max);
        m.decay.gamma_cav = s.energy("gamma_cav", m.decay.gamma_cav);
        m.decay.gamma_exc = s.energy("gamma_exc", m.decay.gamma_exc);
        m.gamma_therm = s.energy("gamma_therm", m.gamma_therm);
        m.T = s.temperature("T", m.T);
        m.scatter.omega_vib = s.energy("omega_vib", m.scatter.omega_vib);
        m.scatter.gamma_vib = s.energy("gamma_vib", m.scatter.gamma_vib);
        m.scatter.g = s.energy("g", m.scatter.g);
        m.scatter.gamma0 = s.energy_opt("gamma0");
        m.pump.amplitude = s.number("pump_amplitude", m.pump.amplitude);
        m.pump_ratio = s.number_opt("pump_ratio");
        m.pump.t0 = s.duration("pump_t0", m.pump.t0);
        m.pump.fwhm = s.duration("pump_fwhm", m.pump.fwhm);
        m.seed.amplitude = s.number("seed_amplitude", m.seed.amplitude);
        m.seed.k = s.number("seed_k_per_um", m.seed.k);
        m.seed.sigma_k = s.number("seed_sigma_per_um", m.seed.sigma_k);
        m.seed.t0 = s.duration("seed_t0", m.seed.t0);
        m.seed.fwhm = s.duration("seed_fwhm", m.seed.fwhm);
        m.dt = s.duration("dt", m.dt);
        m.t_end = s.duration("t_end", m.t_end);
        m.save_stride = s.integer("save_stride", m.save_stride);
        m.threshold.lo = s.number("threshold_lo", m.threshold.lo);
        m.threshold.hi = s.number("threshold_hi", m.threshold.hi);
        m.threshold.rel_tol = s.number("threshold_rel_tol", m.threshold.rel_tol);
        m.threshold.scan_points = s.integer("threshold_scan_points", 25);
        s.finish();
        cfg.simulation = m;
    }

    {
        Section s(doc, "output", out);
        auto& o = cfg.output;
        o.dir = s.text("dir", o.dir);
        o.svg = s.boolean("svg", o.svg);
        o.temperatures = s.temperature_list("temperatures", {6, 50, 100, 150, 200, 250, 300, 350, 400});
        o.grid_step = s.energy("grid_step", o.grid_step);
        o.model = s.text("model", o.model, {"exact", "reduced", "homogeneous"});
        s.finish();
        if (!(o.grid_step > 0.0)) throw ConfigError("[output] grid_step must be > 0");
    }
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return load_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {
UsageError missing_section(const char* name)
{
    return UsageError(fmt::format("this command needs a [{}] section in the config", name));
}
} // namespace

const MolecularSystem& RunConfig::require_molecule() const
{
    if (!molecule) throw missing_section("molecule");
    return *molecule;
}
const PolaritonSetup& RunConfig::require_cavity() const
{
    if (!cavity) throw missing_section("cavity");
    return *cavity;
}
const LowFreqNet& RunConfig::require_net() const
{
    if (!net) throw missing_section("net");
    return *net;
}
const RatesSection& RunConfig::require_rates() const
{
    if (!rates) throw missing_section("rates");
    return *rates;
}
const SimulationSection& RunConfig::require_simulation() const
{
    if (!simulation) throw missing_section("simulation");
    return *simulation;
}

} // namespace vibrotherm
