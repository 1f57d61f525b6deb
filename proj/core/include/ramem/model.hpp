#pragma once

#include <string>
#include <vector>

#include "ramem/types.hpp"

namespace ramem {

// All quantities are dimensionless: time in units of the excited-state decay
// time, position in units of the ensemble length, detunings and Rabi
// frequencies in units of the decay rate.

struct PhysicalParams {
  double d = 400.0;          // optical depth
  double delta_s = 20.0;     // signal detuning
  double delta_hf = 100.0;   // ground-state hyperfine splitting
  double w_write = 1.0;      // write control energy, integral of |Omega|^2 dt
  double w_read = 1.0;       // read control energy

  double delta_a() const noexcept { return delta_s + delta_hf; }

  /// Throws Error{BadParams} when an invariant is violated.
  void validate() const;
};

/// Couplings for one stage (write or read) at control energy W.
///
///   g_s   = sqrt(d W) / delta_s
///   g_a   = sqrt(d W) / delta_a
///   g     = sqrt(g_s^2 - g_a^2)
///   kappa_s = d / delta_s, kappa_a = d / (delta_a + delta_hf),
///   delta_k = kappa_s + kappa_a
///   stark = (1/delta_s - 1/delta_a) W   (AC-Stark phase per unit scaled time)
struct DerivedCouplings {
  double g_s = 0.0;
  double g_a = 0.0;
  double g = 0.0;
  double delta_k = 0.0;
  double xi = 0.0;
  double stark = 0.0;
  double kappa_s = 0.0;
  double kappa_a = 0.0;
  double energy = 0.0;

  /// Pure bright-mode coupling (no anti-Stokes, no phases). Handy for tests and
  /// for the analytic oracle.
  static DerivedCouplings bright(double g);
};

DerivedCouplings derive_couplings(const PhysicalParams& params, double stage_energy);

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 1.0;

  double length() const noexcept { return t1 - t0; }
  bool contains(double t) const noexcept { return t >= t0 && t <= t1; }
};

enum class WaveformKind { square, gaussian, spline };

struct SquareShape {
  double start = 0.0;
  double duration = 1.0;
  double amplitude = 1.0;
};

/// |Omega|^2 = amplitude^2 exp(-(t - center)^2 / tau^2).
struct GaussianShape {
  double center = 0.0;
  double tau = 1.0;
  double amplitude = 1.0;
};

/// Monotone cubic (PCHIP) interpolation through non-negative knots; zero
/// outside the knot span.
struct SplineShape {
  RealVector knot_times;
  RealVector knot_amplitudes;
};

/// Real, non-negative control Rabi-frequency envelope on a finite window.
class ControlWaveform {
 public:
  static ControlWaveform square(const SquareShape& shape, TimeWindow window);
  static ControlWaveform gaussian(const GaussianShape& shape, TimeWindow window);
  static ControlWaveform spline(SplineShape shape, TimeWindow window);

  WaveformKind kind() const noexcept { return kind_; }
  const TimeWindow& window() const noexcept { return window_; }
  const SquareShape& square_shape() const noexcept { return square_; }
  const GaussianShape& gaussian_shape() const noexcept { return gaussian_; }
  const SplineShape& spline_shape() const noexcept { return spline_; }

  double operator()(double t) const;

  /// Integral of |Omega|^2 over the window (closed form for every kind).
  double energy() const noexcept { return energy_; }
  double peak() const;

  /// Times where the envelope or its derivative is discontinuous.
  RealVector breakpoints() const;

  /// Same shape with the amplitude rescaled so that energy() == target.
  ControlWaveform with_energy(double target) const;

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  ControlWaveform() = default;
  void finish();

  WaveformKind kind_ = WaveformKind::square;
  TimeWindow window_;
  SquareShape square_;
  GaussianShape gaussian_;
  SplineShape spline_;
  RealVector slopes_;  // PCHIP derivatives at the knots
  double energy_ = 0.0;
  std::vector<std::string> warnings_;
};

/// Parameters of make_waveform; which fields are read depends on kind.
struct WaveformSpec {
  WaveformKind kind = WaveformKind::gaussian;
  SquareShape square;
  GaussianShape gaussian;
  SplineShape spline;
};

ControlWaveform make_waveform(const WaveformSpec& spec, TimeWindow window);

/// Composite Gauss-Legendre integral of |Omega|^2 that respects breakpoints.
/// Independent of the closed forms in energy(); used to cross-check them.
double quadrature_energy(const ControlWaveform& waveform, int panels_per_segment = 64);

enum class SignalKind { gaussian, flat, sampled };

/// Raw-frame input signal E_s,in(t). Gaussian and flat shapes are evaluated
/// analytically; sampled envelopes are linearly interpolated.
class SignalPulse {
 public:
  /// |E|^2 has full width at half maximum `fwhm`.
  static SignalPulse gaussian(double center, double fwhm, double peak, TimeWindow window);
  /// Constant amplitude on [start, start + duration].
  static SignalPulse flat(double start, double duration, double amplitude, TimeWindow window);
  static SignalPulse sampled(ComplexVector envelope, TimeWindow window);

  SignalKind kind() const noexcept { return kind_; }
  const TimeWindow& window() const noexcept { return window_; }
  double duration() const noexcept { return duration_; }
  double center() const noexcept { return center_; }

  cplx operator()(double t) const;

  /// Photon-number integral of |E|^2 over the window.
  double energy() const noexcept { return energy_; }

  /// Same shape scaled so that energy() == target.
  SignalPulse with_energy(double target) const;

  ComplexVector sample(std::span<const double> t_grid) const;

 private:
  SignalPulse() = default;
  void compute_energy();

  SignalKind kind_ = SignalKind::gaussian;
  TimeWindow window_;
  double center_ = 0.0;
  double duration_ = 1.0;
  double start_ = 0.0;
  double amplitude_ = 1.0;
  ComplexVector envelope_;
  double energy_ = 0.0;
};

}  // namespace ramem
