#pragma once

#include "vibrotherm/condensim.hpp"
#include "vibrotherm/extraction.hpp"
#include "vibrotherm/polariton.hpp"
#include "vibrotherm/spectra.hpp"

#include <vector>

namespace fixtures {

using namespace vibrotherm;

inline constexpr double cm1 = constants::meV_per_cm1;

// MeLPPP: two low-frequency and three high-frequency modes
inline MolecularSystem melppp()
{
    return make_system(2720.0, 34.0,
                       {{48 * cm1, 0.7, 0.0}, {160 * cm1, 0.5, 0.0}, {1320 * cm1, 0.3, 0.0},
                        {1568 * cm1, 0.23, 0.0}, {1604 * cm1, 0.082, 0.0}},
                       200 * cm1);
}

inline PolaritonSetup melppp_cavity()
{
    PolaritonSetup s;
    s.cavity = {2640.0, 2.2, 500.0};
    s.omega_0 = 2720.0;
    s.rabi = 85.0;
    s.n_mol = 1e8;
    return s;
}

inline LowFreqNet melppp_net() { return {34.0, 18.0, 200.0, 200 * cm1}; }

inline SimConfig reference_sim(double gamma_therm_meV = 5e-7)
{
    SimConfig c;
    c.grid = build_mode_grid(melppp_cavity(), 31, 3.0, {4.4, 60.0});
    c.gamma_therm = gamma_therm_meV;
    c.T = Temperature(300.0);
    c.dt = 5e-4;
    c.t_end = 10.0;
    c.save_stride = 100;
    return c;
}

inline std::vector<double> series_temperatures() { return {6, 50, 100, 150, 200, 250, 300, 350, 400}; }

} // namespace fixtures
