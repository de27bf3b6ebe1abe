#include "vibrotherm/cli.hpp"
#include "vibrotherm/csv_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using vibrotherm::read_csv;

namespace {

const fs::path source_dir = VIBROTHERM_SOURCE_DIR;
const std::string bundled = (source_dir / "configs" / "melppp.toml").string();

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "vibrotherm");
    std::ostringstream out, err;
    const int code = vibrotherm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / "vibrotherm_test_cli" / name;
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text)
{
    const auto p = fs::temp_directory_path() / "vibrotherm_test_cli" / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
    return p;
}

// the bundled configuration with some lines replaced
std::string bundled_with(const std::vector<std::pair<std::string, std::string>>& edits)
{
    std::string text = slurp(bundled);
    for (const auto& [pattern, repl] : edits) text = std::regex_replace(text, std::regex(pattern), repl);
    return text;
}

} // namespace

TEST_CASE("usage errors exit with 2")
{
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"spectra", "--config", bundled, "--bogus"}).code == 2);
    CHECK(run({"spectra"}).code == 2);   // no config
    CHECK(run({"reproduce", "fig9"}).code == 2);
    CHECK(run({"reproduce", "fig1", "--config", bundled}).code == 2);
    CHECK(run({"spectra", "--config", "/nonexistent.toml"}).code == 2);
    const auto r = run({"spectra", "--config", bundled, "--T", "hot"});
    CHECK(r.code == 2);
    CHECK(r.err.find("usage error") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config errors name the line")
{
    const auto p = write_config("bad.toml", "[net]\nA1_meV = 18\nA2_meV2 = 200\nomega_M_cm1 = 200\ntypo = 3\n");
    const auto r = run({"rates", "--config", p.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 5") != std::string::npos);
}

TEST_CASE("domain errors exit with 1")
{
    const auto d = fresh_dir("domain");
    const auto r = run({"rates", "--config", bundled, "--out", d.string(), "--k", "0.3", "--kprime", "0.3"});
    CHECK(r.code == 1);
    CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("spectra at one temperature")
{
    const auto d = fresh_dir("spectra");
    const auto r = run({"spectra", "--config", bundled, "--T", "300K", "--out", d.string()});
    REQUIRE(r.code == 0);
    for (const char* f : {"emission_exact_300K.csv", "absorption_exact_300K.csv", "spectra_exact_300K.svg"})
        CHECK(fs::exists(d / f));
    const auto t = read_csv(d / "emission_exact_300K.csv");
    CHECK(t.header[0] == "energy_eV");
    CHECK(t.rows.size() > 3000);
    const auto text = slurp(d / "emission_exact_300K.csv");
    CHECK(text.find("generated by: vibrotherm spectra") != std::string::npos);
    CHECK(text.find("resolved config:") != std::string::npos);
    CHECK(text.find("omega_0_meV = 2720") != std::string::npos);
    CHECK(slurp(d / "spectra_exact_300K.svg").rfind("<svg", 200) != std::string::npos);

    // identical inputs give byte-identical files
    const auto d2 = fresh_dir("spectra_again");
    REQUIRE(run({"spectra", "--config", bundled, "--T", "300K", "--out", d2.string()}).code == 0);
    for (const auto& e : fs::directory_iterator(d)) CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
}

TEST_CASE("reproduce the extraction figure")
{
    const auto d = fresh_dir("fig2");
    REQUIRE(run({"reproduce", "fig2", "--out", d.string()}).code == 0);
    const auto t = read_csv(d / "stokes_vs_T.csv");
    REQUIRE(t.rows.size() == 9);
    CHECK(t.rows.front()[0] == 6);
    CHECK(t.rows.back()[0] == 400);
    CHECK(fs::exists(d / "linewidth_vs_T.csv"));
    const auto net = slurp(d / "net.txt");
    for (const char* key : {"gamma_inhom_meV", "A1_meV", "A2_meV2", "omega_M_meV"})
        CHECK(net.find(key) != std::string::npos);
}

TEST_CASE("dispersion, rates and rate-vs-temperature outputs")
{
    const auto d = fresh_dir("polariton");
    REQUIRE(run({"dispersion", "--config", bundled, "--out", d.string(), "--points", "11"}).code == 0);
    const auto disp = read_csv(d / "dispersion.csv");
    CHECK(disp.rows.size() == 11);
    REQUIRE(run({"rates", "--config", bundled, "--out", d.string()}).code == 0);
    const auto rates = read_csv(d / "rates.csv");
    REQUIRE(rates.rows.size() == 1);
    REQUIRE(run({"ratevt", "--config", bundled, "--out", d.string()}).code == 0);
    for (const char* f : {"rate_vs_T_up.csv", "rate_vs_T_down.csv", "rate_vs_T_nn.csv"}) CHECK(fs::exists(d / f));
}

TEST_CASE("short simulation")
{
    const auto cfg = write_config("short.toml", bundled_with({{"pump_ratio\\s*=.*", "pump_amplitude = 1e5"},
                                                               {"t_end_ps\\s*=.*", "t_end_ps = 2"},
                                                               {"svg\\s*=.*", "svg = false"}}));
    const auto d = fresh_dir("simulate");
    const auto r = run({"simulate", "--config", cfg.string(), "--out", d.string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const auto traj = read_csv(d / "simulation_trajectory.csv");
    CHECK(traj.header.size() == 33);   // t, n_P, n_0 .. n_30
    CHECK(traj.rows.back()[0] == doctest::Approx(2.0));
    const auto ek = read_csv(d / "simulation_ek.csv");
    CHECK(ek.rows.size() == 31);
    CHECK(ek.column("n_time_integrated_ps") == 4);
    CHECK_FALSE(fs::exists(d / "simulation_ek.svg"));
}
