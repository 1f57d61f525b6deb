#pragma once

#include <cstddef>
#include <span>

#include "ramem/model.hpp"
#include "ramem/types.hpp"

namespace ramem {

/// Scaled time p(t) = int_{t0}^{t} |Omega|^2 dt' / W sampled on a uniform
/// t-grid. p is non-decreasing with p(t0) = 0 and p(t1) = 1 exactly; it has
/// plateaus wherever the control vanishes.
struct MonotoneMap {
  RealVector t_grid;
  RealVector p_grid;
  RealVector jacobian;  // dt/dp = W / |Omega|^2, +inf where Omega == 0
  double energy = 0.0;  // trapezoid W on this grid, used for the normalization

  std::size_t size() const noexcept { return t_grid.size(); }
  double dt() const noexcept { return t_grid[1] - t_grid[0]; }
};

MonotoneMap scaled_time_map(const ControlWaveform& waveform, std::size_t n_samples);

/// Smallest t with p(t) = p (left edge of any plateau). Throws OutOfRange
/// outside [0, 1].
double invert_scaled_time(const MonotoneMap& map, double p);

/// Inverse transforms divide by Omega only where it exceeds
/// kControlFloor * max|Omega|.
inline constexpr double kControlFloor = 1e-8;

/// Fields of one raw-frame slice: light at fixed position z sampled on the
/// map's t-grid, and the spinwave S(z) at one instant t on a uniform z-grid.
struct RawFrameFields {
  ComplexVector signal;       // E_s(z, t_i)
  ComplexVector anti_stokes;  // E_a^dagger(z, t_i)
  ComplexVector spinwave;     // S(z_k, t)
  double z = 0.0;             // position of the light samples
  double t = 0.0;             // instant of the spinwave slice
};

/// The same slice in the flux-preserving normalized frame. Light samples sit
/// at the map's (generally non-uniform) p values; the spinwave slice at p(t).
struct NormalizedFrameFields {
  RealVector p;
  ComplexVector signal;       // a_s(z, p_i)
  ComplexVector anti_stokes;  // a_a^dagger(z, p_i)
  ComplexVector spinwave;     // s(z_k, p)
  double z = 0.0;
  double p_spin = 0.0;
};

/// a_s = E_s sqrt(W)/Omega e^{i phi_s}, a_a^dagger = E_a^dagger sqrt(W)/Omega
/// e^{i phi_a}, s = S e^{i phi_s}, with phi_s = stark p + kappa_s z and
/// phi_a = stark p - kappa_a z. Because dt/dp = W/Omega^2 this equals
/// Omega E (dt/dp) W^{-1/2}, which keeps int |a|^2 dp = int |E|^2 dt.
///
/// Light samples are only divisible where the control is above the floor;
/// a non-negligible field where it is not raises DivisionNearZeroControl.
NormalizedFrameFields to_normalized_frame(const RawFrameFields& raw, const MonotoneMap& map,
                                          const ControlWaveform& waveform,
                                          const DerivedCouplings& couplings,
                                          std::span<const double> z_grid);

/// Exact inverse of to_normalized_frame on the map's samples. Requires the
/// light fields to vanish wherever the control is below the floor, otherwise
/// the round trip cannot be exact and DivisionNearZeroControl is raised.
RawFrameFields from_normalized_frame(const NormalizedFrameFields& normalized,
                                     const MonotoneMap& map, const ControlWaveform& waveform,
                                     const DerivedCouplings& couplings,
                                     std::span<const double> z_grid);

/// Conservative remap of a raw signal onto n_p uniform scaled-time nodes at
/// z = 0. Each node carries the energy of its dual cell, so the trapezoid sum
/// of |a|^2 equals the raw energy up to the map's quadrature; the phase is
/// taken from the pointwise transform. Energy arriving while the control is
/// off lands on the node adjacent to the plateau.
ComplexVector resample_signal(const SignalPulse& signal, const MonotoneMap& map,
                              const DerivedCouplings& couplings, std::size_t n_p);

/// Pointwise transform of an analytic signal onto uniform p nodes at z = 0.
/// Throws DivisionNearZeroControl where the control is below the floor but
/// the signal is not.
ComplexVector signal_on_uniform_p(const SignalPulse& signal, const MonotoneMap& map,
                                  const ControlWaveform& waveform,
                                  const DerivedCouplings& couplings, std::size_t n_p);

}  // namespace ramem
