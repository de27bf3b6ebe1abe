#include "fixtures.hpp"

#include "vibrotherm/config.hpp"
#include "vibrotherm/csv_io.hpp"
#include "vibrotherm/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

using namespace vibrotherm;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text)
{
    try {
        load_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "vibrotherm_test_config_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("bundled configuration")
{
    const auto c = load_config(bundled_config());
    REQUIRE(c.molecule);
    REQUIRE(c.cavity);
    REQUIRE(c.net);
    REQUIRE(c.rates);
    REQUIRE(c.simulation);
    CHECK(c.molecule->omega_0 == Approx(2720));
    CHECK(c.molecule->low_modes().size() == 2);
    CHECK(c.molecule->high_modes().size() == 3);
    CHECK(c.molecule->omega_M == Approx(200 * fixtures::cm1));
    CHECK(c.cavity->rabi == Approx(85));
    CHECK(c.cavity->cavity.omega_cav0 == Approx(2640));
    CHECK(c.net->A2 == Approx(200));
    CHECK(c.simulation->gamma_therm == Approx(5e-7));
    CHECK(c.simulation->pump.fwhm == Approx(0.2));
    CHECK(c.simulation->n_modes == 31);
    CHECK(c.output.temperatures.size() == 9);
    CHECK(c.resolved.find("omega_0_meV = 2720") != std::string::npos);
}

TEST_CASE("unit suffixes")
{
    const auto a = load_config("[net]\ngamma_inhom_eV = 0.034\nA1_meV = 18\nA2_eV2 = 2e-4\nomega_M_cm1 = 200\n");
    CHECK(a.net->gamma_inhom == Approx(34));
    CHECK(a.net->A2 == Approx(200));
    CHECK(a.net->omega_M == Approx(24.7968).epsilon(1e-5));
    CHECK(error_of("[net]\ngamma_inhom_eV = 0.034\ngamma_inhom_meV = 34\nA1_meV = 1\nA2_meV2 = 1\nomega_M_meV = 20\n")
              .find("line 3") != std::string::npos);
}

TEST_CASE("config errors carry line numbers")
{
    CHECK(error_of("[net]\nA1_meV = 18\nbogus = 1\nA2_meV2 = 1\nomega_M_meV = 20\n").find("line 3") != std::string::npos);
    CHECK(error_of("# c\n\n[nonsense]\nx = 1\n").find("line 3") != std::string::npos);
    CHECK(error_of("[net]\nA1_meV = 18\nA1_meV = 19\n").find("line 3") != std::string::npos);
    CHECK(error_of("[net]\nA1_meV = 18\n[net]\n").find("line 3") != std::string::npos);
    CHECK(error_of("[net]\nA1_meV = [1, 2\n").find("line 2") != std::string::npos);
    CHECK(error_of("[net]\nA1_meV = abc\n").find("line 2") != std::string::npos);
    CHECK(error_of("[output]\nmodel = \"wrong\"\n").find("line 2") != std::string::npos);
    CHECK_FALSE(error_of("[net]\ngamma_inhom_meV = 34\n").empty());   // missing required keys
}

TEST_CASE("missing sections are usage errors")
{
    const auto c = load_config("[output]\ndir = \"x\"\n");
    CHECK_THROWS_AS(c.require_molecule(), UsageError);
    CHECK_THROWS_AS(c.require_cavity(), UsageError);
    CHECK_THROWS_AS(c.require_net(), UsageError);
    CHECK_THROWS_AS(c.require_rates(), UsageError);
    CHECK_THROWS_AS(c.require_simulation(), UsageError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/vibrotherm.toml"), UsageError);
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    for (double v : {1.0 / 3.0, 2.72e-8, -1234.5678, 1e300, 5e-324})
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
}

TEST_CASE("csv writing and reading")
{
    const auto p = scratch("table.csv");
    write_csv(p, {"made by a test", "T = 300"}, {"x", "value, with comma", "q\"uote"},
              {{1, 2.5, -3}, {4, std::numeric_limits<double>::quiet_NaN(), 1e-9}});
    const auto text = slurp(p);
    CHECK(text.find("\"value, with comma\"") != std::string::npos);
    CHECK(text.find("\"q\"\"uote\"") != std::string::npos);
    CHECK(text.find("\r\n") == std::string::npos);
    for (const auto& e : fs::directory_iterator(p.parent_path()))
        CHECK(e.path().extension() != ".tmp");

    const auto t = read_csv(p);
    CHECK(t.comments.size() == 2);
    CHECK(t.header[1] == "value, with comma");
    CHECK(t.header[2] == "q\"uote");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == 2.5);
    CHECK(std::isnan(t.rows[1][1]));
    CHECK(t.rows[1][2] == 1e-9);
    CHECK(t.column("x") == 0);
    CHECK_THROWS_AS(t.column("missing"), ConfigError);
    CHECK(render_csv({}, {"a"}, {{1}}) == "a\n1\n");
}

TEST_CASE("spectrum files round trip")
{
    const auto sys = fixtures::melppp();
    const auto c = emission_exact(sys, Temperature(300), covering_grid(sys, Temperature(300), 2.0));
    const auto p = scratch("em.csv");
    write_spectrum(p, c, {"note"});
    const auto back = read_spectrum(p);
    CHECK(back.kind == c.kind);
    CHECK(back.temperature == Approx(300));
    REQUIRE(back.grid.size() == c.grid.size());
    for (std::size_t i = 0; i < c.grid.size(); i += 37) {
        CHECK(back.grid[i] == Approx(c.grid[i]).epsilon(1e-15));
        CHECK(back.intensity[i] == Approx(c.intensity[i]).epsilon(1e-13));   // per eV on disk
    }
}
