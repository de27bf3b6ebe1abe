#include "fixtures.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>

using namespace vibrotherm;

namespace {

double max_rel(const std::vector<double>& a, const std::vector<double>& b)
{
    double peak = 0.0, worst = 0.0;
    for (double v : a) peak = std::max(peak, v);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double m = std::max(a[i], b[i]);
        if (m < 1e-12 * peak) continue;
        worst = std::max(worst, std::abs(a[i] - b[i]) / m);
    }
    return worst;
}

} // namespace

TEST_CASE("parallel superposition matches the serial reference")
{
    const auto sys = fixtures::melppp();
    const auto grid = default_grid(sys);
    for (double T : {6.0, 300.0}) {
        const auto lines = exact_lines(sys, Temperature(T), SpectrumKind::emission);
        const auto ref = kernels::superpose_serial(lines, grid, LineShape::gaussian);
        const auto par = kernels::superpose_parallel(lines, grid, LineShape::gaussian);
        CHECK(max_rel(ref, par) < 1e-12);
    }
}

TEST_CASE("random line sets, both shapes")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-50, 50), w(0.1, 5), a(0, 1);
    std::vector<LineTerm> lines;
    for (int i = 0; i < 500; ++i) lines.push_back({c(rng), a(rng), w(rng)});
    const auto grid = uniform_grid(-80, 80, 0.1);
    CHECK(max_rel(kernels::superpose_serial(lines, grid, LineShape::gaussian),
                  kernels::superpose_parallel(lines, grid, LineShape::gaussian)) < 1e-12);
    CHECK(max_rel(kernels::superpose_serial(lines, grid, LineShape::lorentzian),
                  kernels::superpose_parallel(lines, grid, LineShape::lorentzian)) < 1e-12);
}

TEST_CASE("result does not depend on the thread count")
{
    const auto sys = fixtures::melppp();
    const auto grid = default_grid(sys);
    const auto lines = exact_lines(sys, Temperature(300), SpectrumKind::absorption);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = kernels::superpose_parallel(lines, grid, LineShape::gaussian);
    omp_set_num_threads(4);
    const auto four = kernels::superpose_parallel(lines, grid, LineShape::gaussian);
    omp_set_num_threads(saved);
    CHECK(one == four);
}
