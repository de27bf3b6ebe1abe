#include "vibrotherm/errors.hpp"
#include "vibrotherm/units.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace vibrotherm;
using doctest::Approx;

TEST_CASE("constants in eV units")
{
    CHECK(constants::meV_per_cm1 / 1e3 == Approx(1.239841984e-4).epsilon(1e-15));
    CHECK(constants::kB_meV_per_K / 1e3 == Approx(8.617333262e-5).epsilon(1e-15));
    CHECK(constants::hbar_meV_ps == Approx(0.6582119569).epsilon(1e-15));
}

TEST_CASE("energy conversion")
{
    CHECK(convert_energy(Energy::cm1(48), EnergyUnit::meV).value == Approx(5.9512).epsilon(1e-5));
    CHECK(convert_energy(Energy::meV(0), EnergyUnit::eV).value == 0.0);
    CHECK(convert_energy(Energy::eV(1), EnergyUnit::meV).value == Approx(1000.0).epsilon(1e-15));
    CHECK(convert_energy(Energy::kelvin(300), EnergyUnit::meV).value == Approx(25.851999786).epsilon(1e-10));
    CHECK(parse_energy_unit("cm1") == EnergyUnit::cm1);
    CHECK_THROWS_AS(parse_energy_unit("furlong"), ConfigError);
}

TEST_CASE("eV -> cm-1 -> eV round trip for random energies")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-6.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, u(rng));
        const auto back = convert_energy(convert_energy(Energy::eV(x), EnergyUnit::cm1), EnergyUnit::eV);
        worst = std::max(worst, std::abs(back.value - x) / x);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("temperature")
{
    CHECK(Temperature(0.0).kT() == 0.0);
    CHECK_THROWS_AS(Temperature(-1.0), DomainError);
    CHECK_THROWS_AS(Temperature(NAN), DomainError);
}

TEST_CASE("Bose occupation")
{
    CHECK(bose_occupation(5.0, Temperature(0)) == 0.0);
    CHECK(bose_occupation(0.0, Temperature(0)) == 0.0);
    const Temperature T(123.0);
    CHECK(bose_occupation(T.kT() * std::log(2.0), T) == Approx(1.0).epsilon(1e-14));
    CHECK(bose_occupation(25.85, Temperature(300)) == Approx(0.5820).epsilon(2e-4));
    CHECK_THROWS_AS(bose_occupation(0.0, T), DomainError);
    CHECK_THROWS_AS(bose_occupation(-1.0, T), DomainError);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ue(1e-3, 200.0), uT(0.5, 1000.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double dE = ue(rng);
        const Temperature t(uT(rng));
        const double n = bose_occupation(dE, t);
        if (n == 0.0) continue;
        worst = std::max(worst, std::abs(n * std::exp(dE / t.kT()) / (1.0 + n) - 1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("Poisson weights")
{
    CHECK(poisson_weight(0, 0.0) == 1.0);
    CHECK(poisson_weight(3, 0.0) == 0.0);
    CHECK(poisson_weight(1, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(std::isfinite(poisson_weight(170, 150.0)));
    CHECK(poisson_weight(400, 380.0) > 0.0);
    CHECK_THROWS_AS(poisson_weight(-1, 1.0), DomainError);

    for (double x : {0.082, 0.5, 0.7, 3.0, 10.0}) {
        double sum = 0.0, prev = -1.0;
        bool monotone = true;
        for (int n = 0; n < 80; ++n) {
            sum += poisson_weight(n, x);
            monotone = monotone && sum >= prev;
            prev = sum;
        }
        CHECK(monotone);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}
