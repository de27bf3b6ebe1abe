#include "vibrotherm/lineshape_kernels.hpp"
#include "vibrotherm/units.hpp"

#include <algorithm>
#include <cmath>

namespace vibrotherm::kernels {

namespace {

inline double line_value(const LineTerm& t, double x, LineShape shape)
{
    const double d = x - t.center;
    if (shape == LineShape::gaussian) {
        const double u = d / t.width;
        return t.weight * std::exp(-0.5 * u * u) / (std::sqrt(2.0 * constants::pi) * t.width);
    }
    return t.weight * t.width / (constants::pi * (d * d + t.width * t.width));
}

} // namespace

std::vector<double> superpose_serial(const std::vector<LineTerm>& terms,
                                     const std::vector<double>& grid, LineShape shape)
{
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (const auto& t : terms) acc += line_value(t, grid[i], shape);
        out[i] = acc;
    }
    return out;
}

std::vector<double> superpose_parallel(std::vector<LineTerm> terms,
                                       const std::vector<double>& grid, LineShape shape,
                                       double cutoff_widths)
{
    const long n = static_cast<long>(grid.size());
    std::vector<double> out(grid.size(), 0.0);
    if (terms.empty()) return out;

    if (shape == LineShape::lorentzian) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
            double acc = 0.0;
            for (const auto& t : terms) acc += line_value(t, grid[i], shape);
            out[i] = acc;
        }
        return out;
    }

    std::sort(terms.begin(), terms.end(),
              [](const LineTerm& a, const LineTerm& b) { return a.center < b.center; });
    double wmax = 0.0;
    for (const auto& t : terms) wmax = std::max(wmax, t.width);
    const double reach = cutoff_widths * wmax;

    auto by_center = [](const LineTerm& t, double x) { return t.center < x; };
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const double x = grid[i];
        auto lo = std::lower_bound(terms.begin(), terms.end(), x - reach, by_center);
        auto hi = std::lower_bound(lo, terms.end(), x + reach, by_center);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it) acc += line_value(*it, x, shape);
        out[i] = acc;
    }
    return out;
}

} // namespace vibrotherm::kernels
