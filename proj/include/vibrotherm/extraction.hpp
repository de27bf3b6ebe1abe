#pragma once

#include "vibrotherm/spectra.hpp"

#include <string>
#include <vector>

namespace vibrotherm {

struct PeakFit {
    double center = 0.0;        // meV
    double sigma = 0.0;         // meV
    double amplitude = 0.0;
    double residual_rms = 0.0;  // relative to the peak height in the window
    double skew = 0.0;          // Gram-Charlier h3 (0 for the plain Gaussian)
    double kurtosis = 0.0;      // Gram-Charlier h4
    int iterations = 0;
};

struct PeakWindow {
    double lo;
    double hi;
};

struct PeakHint {
    double center;
    double sigma;
};

// Shape fitted to the 0-0 feature. The default is a single Gaussian. The
// replica-aware form repeats the band at the known high-frequency vibronic
// offsets (weights fixed by their Poisson progression at the curve
// temperature) and lets the band carry Gram-Charlier skew/kurtosis, so the
// fitted centre and sigma stay the band's mean and standard deviation even
// when the window overlaps the first replica.
struct PeakModel {
    std::vector<ProgressionTerm> replicas{{0.0, 1.0, 0.0}};
    int shape_terms = 0;   // 0: Gaussian, 1: + skew, 2: + skew and kurtosis

    static PeakModel gaussian() { return {}; }
    static PeakModel replica_aware(const std::vector<VibrationalMode>& high_modes, Temperature T,
                                   int shape_terms = 2);
};

// Highest-energy (emission) / lowest-energy (absorption) local maximum above
// `significance` of the global maximum, with a width estimated on the side
// free of replicas.
PeakHint locate_00_peak(const SpectralCurve& curve, double significance = 0.1);
PeakWindow default_window(const PeakHint& hint, double half_widths = 3.0);

PeakFit fit_00_peak(const SpectralCurve& curve, const PeakWindow& window,
                    const PeakModel& model = PeakModel::gaussian(), double max_rms = 0.05);

struct StokesOptions {
    bool replica_aware = true;
    std::vector<VibrationalMode> known_high_modes;
    int shape_terms = 2;
    double window_half_widths = 3.0;
};

struct StokesMeasurement {
    double shift;   // absorption centre minus emission centre
    PeakFit em;
    PeakFit abs;
};

StokesMeasurement measure_stokes(const SpectralCurve& em, const SpectralCurve& abs,
                                 const StokesOptions& opts = {});
inline double stokes_shift(const SpectralCurve& em, const SpectralCurve& abs, const StokesOptions& opts = {})
{
    return measure_stokes(em, abs, opts).shift;
}

struct LowFreqNet {
    double gamma_inhom = 0.0;   // meV
    double A1 = 0.0;            // meV
    double A2 = 0.0;            // meV^2
    double omega_M = 0.0;       // meV
};

struct SeriesPoint {
    double T;
    SpectralCurve em;
    SpectralCurve abs;
};

struct SeriesRow {
    double T;
    double stokes;
    double gamma_em2;   // fitted emission variance
    PeakFit em;
    PeakFit abs;
};

struct ExtractionReport {
    LowFreqNet net;
    std::vector<SeriesRow> rows;
    double mean_stokes = 0.0;
    // plain OLS of gamma_em^2 against kB*T over the high-temperature subset
    double linear_slope = 0.0;
    double linear_intercept = 0.0;
    // OLS of (gamma_em^2 - stokes*kB*T) against 1/(kB*T); intercept -> Gamma^2
    double corrected_intercept = 0.0;
    double inverse_T_coeff = 0.0;
    std::size_t high_T_points = 0;
    std::vector<std::string> warnings;
};

struct ExtractOptions {
    StokesOptions stokes;
    // false: Gamma^2 from the plain linear intercept
    bool inverse_T_correction = true;
};

ExtractionReport extract_net(const std::vector<SeriesPoint>& series, double omega_M,
                             const ExtractOptions& opts = {});

} // namespace vibrotherm
