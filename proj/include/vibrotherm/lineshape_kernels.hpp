#pragma once

#include <vector>

namespace vibrotherm {

enum class LineShape { gaussian, lorentzian };

// One broadened line: centre, integrated weight, and width
// (standard deviation for Gaussians, HWHM for Lorentzians).
struct LineTerm {
    double center;
    double weight;
    double width;
};

namespace kernels {

// Reference: every term evaluated at every grid point, no cutoff.
std::vector<double> superpose_serial(const std::vector<LineTerm>& terms,
                                     const std::vector<double>& grid, LineShape shape);

// OpenMP over grid points. Gaussian terms are sorted by centre and only
// those within cutoff_widths of the point are summed (the neglected tail is
// below exp(-cutoff^2/2) of a line's peak). Lorentzian terms have no cutoff.
// Deterministic: each point is summed in the same order for any thread count.
std::vector<double> superpose_parallel(std::vector<LineTerm> terms,
                                       const std::vector<double>& grid, LineShape shape,
                                       double cutoff_widths = 12.0);

} // namespace kernels
} // namespace vibrotherm
