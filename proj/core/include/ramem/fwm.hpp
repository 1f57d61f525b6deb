#pragma once

#include <span>
#include <vector>

#include "ramem/model.hpp"
#include "ramem/solver.hpp"
#include "ramem/types.hpp"

namespace ramem {

/// -g_a * int_0^1 e^{-i dk z} s(z) dz for a spinwave sampled on a uniform
/// grid over [0,1] (trapezoid). This is the anti-Stokes amplitude radiated by
/// a spinwave slice to first order in g_a/g_s.
cplx anti_stokes_output(std::span<const cplx> s, double delta_k, double g_a);

/// int_0^1 |anti_stokes_output(s(., p))|^2 dp over every p-level of a stage.
double anti_stokes_energy(const ComplexGrid& s, double delta_k, double g_a);

/// Length of the shortest z-interval holding `fraction` of int |s|^2 dz.
double support_width(std::span<const cplx> s, double fraction = 0.99);

struct NoiseReport {
  cplx e_a_out;  // anti_stokes_output of the stored spinwave
  double n_a = 0.0;
  double epsilon = 0.0;
  double support_width = 0.0;
};

/// epsilon = n_a / n_r. n_a comes from the full-mode boundary records when the
/// run carried anti-Stokes dynamics, otherwise from the spinwave estimate.
NoiseReport noise_metrics(const MemoryResult& memory, const DerivedCouplings& couplings);

struct GainRow {
  double n_in = 0.0;
  double n_a = 0.0;
};

/// N_a versus N_in in full-FWM mode. The mean-field model only produces the
/// stimulated part, so a constant floor n_a0 is added to every row.
std::vector<GainRow> fwm_gain_sweep(const PhysicalParams& params,
                                    const ControlWaveform& write_waveform,
                                    const ControlWaveform& read_waveform,
                                    const SignalPulse& signal, std::span<const double> n_in_list,
                                    GridSpec grid, Direction direction, double n_a0 = 0.0);

}  // namespace ramem
