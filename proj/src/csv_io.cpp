#include "vibrotherm/csv_io.hpp"
#include "vibrotherm/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vibrotherm {

namespace fs = std::filesystem;

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ConfigError("CSV has no column '" + name + "'");
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

namespace {

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool in_q = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_q) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_q = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_q = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& s, std::size_t line)
{
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(fmt::format("CSV line {}: cannot parse '{}' as a number", line, s));
    return v;
}

} // namespace

std::string render_csv(const std::vector<std::string>& comments, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows)
{
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + quote(header[i]);
    out += "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_number(r[i]);
        out += "\n";
    }
    return out;
}

void write_text_atomic(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw UsageError("cannot write '" + tmp.string() + "'");
        f << text;
        if (!f.flush()) throw UsageError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

void write_csv(const fs::path& path, const std::vector<std::string>& comments, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows)
{
    write_text_atomic(path, render_csv(comments, header, rows));
}

CsvTable read_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path.string() + "'");
    CsvTable t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        auto cells = split_row(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), n, t.header.size(),
                                          cells.size()));
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_cell(c, n));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw ConfigError("'" + path.string() + "' has no header row");
    return t;
}

void write_spectrum(const fs::path& path, const SpectralCurve& c, std::vector<std::string> comments)
{
    comments.push_back(fmt::format("kind = {}", to_string(c.kind)));
    comments.push_back(fmt::format("model = {}", c.model));
    comments.push_back(fmt::format("temperature_K = {}", format_number(c.temperature)));
    std::vector<std::vector<double>> rows;
    rows.reserve(c.grid.size());
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        rows.push_back({c.grid[i] / constants::meV_per_eV, c.intensity[i] * constants::meV_per_eV});
    write_csv(path, comments, {"energy_eV", "intensity_per_eV"}, rows);
}

SpectralCurve read_spectrum(const fs::path& path)
{
    const auto t = read_csv(path);
    SpectralCurve c;
    bool have_kind = false, have_T = false;
    for (const auto& line : t.comments) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        const auto key = line.substr(0, eq), val = line.substr(eq + 3);
        if (key == "kind") {
            if (val != "emission" && val != "absorption") throw ConfigError(path.string() + ": unknown kind " + val);
            c.kind = val == "emission" ? SpectrumKind::emission : SpectrumKind::absorption;
            have_kind = true;
        } else if (key == "temperature_K") {
            c.temperature = parse_cell(val, 0);
            have_T = true;
        } else if (key == "model") {
            c.model = val;
        }
    }
    if (!have_kind || !have_T)
        throw ConfigError(path.string() + ": spectrum CSV needs '# kind = ...' and '# temperature_K = ...' lines");
    const auto ie = t.column("energy_eV"), ii = t.column("intensity_per_eV");
    for (const auto& r : t.rows) {
        c.grid.push_back(r[ie] * constants::meV_per_eV);
        c.intensity.push_back(r[ii] / constants::meV_per_eV);
    }
    for (std::size_t i = 1; i < c.grid.size(); ++i)
        if (!(c.grid[i] > c.grid[i - 1])) throw ConfigError(path.string() + ": energies must be strictly increasing");
    return c;
}

} // namespace vibrotherm
