#include "ramem/scaledtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ramem/error.hpp"
#include "ramem/quadrature.hpp"

namespace ramem {

namespace {

double forward_p(const MonotoneMap& map, double t) {
  const double t0 = map.t_grid.front();
  const double t1 = map.t_grid.back();
  if (t <= t0) return 0.0;
  if (t >= t1) return 1.0;
  const double pos = (t - t0) / map.dt();
  const auto i = std::min(static_cast<std::size_t>(pos), map.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return map.p_grid[i] + frac * (map.p_grid[i + 1] - map.p_grid[i]);
}

double max_abs(std::span<const cplx> f) {
  double m = 0.0;
  for (const auto& v : f) m = std::max(m, std::abs(v));
  return m;
}

struct ControlSamples {
  RealVector omega;
  double floor = 0.0;
};

ControlSamples sample_control(const ControlWaveform& waveform, std::span<const double> t) {
  ControlSamples out;
  out.omega.resize(t.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.omega[i] = waveform(t[i]);
    peak = std::max(peak, out.omega[i]);
  }
  out.floor = kControlFloor * peak;
  return out;
}

}  // namespace

MonotoneMap scaled_time_map(const ControlWaveform& waveform, std::size_t n_samples) {
  if (n_samples < 2) throw Error(ErrorCode::BadParams, "scaled_time_map needs >= 2 samples");
  MonotoneMap map;
  map.t_grid = uniform_grid(n_samples, waveform.window().t0, waveform.window().t1);
  RealVector intensity(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double w = waveform(map.t_grid[i]);
    intensity[i] = w * w;
  }
  map.p_grid = cumulative_trapezoid(intensity, map.dt());
  map.energy = map.p_grid.back();
  if (!(map.energy > 0.0)) {
    throw Error(ErrorCode::ZeroEnergyWaveform, "control waveform has no energy on the sample grid");
  }
  for (double& p : map.p_grid) p /= map.energy;
  map.p_grid.front() = 0.0;
  map.p_grid.back() = 1.0;
  map.jacobian.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    map.jacobian[i] = intensity[i] > 0.0 ? map.energy / intensity[i]
                                         : std::numeric_limits<double>::infinity();
  }
  return map;
}

double invert_scaled_time(const MonotoneMap& map, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "scaled time must lie in [0, 1]");
  }
  const auto it = std::lower_bound(map.p_grid.begin(), map.p_grid.end(), p);
  const auto i = static_cast<std::size_t>(std::distance(map.p_grid.begin(), it));
  if (i == 0) return map.t_grid.front();
  const double p_lo = map.p_grid[i - 1];
  const double p_hi = map.p_grid[i];
  const double frac = (p - p_lo) / (p_hi - p_lo);
  return map.t_grid[i - 1] + frac * (map.t_grid[i] - map.t_grid[i - 1]);
}

NormalizedFrameFields to_normalized_frame(const RawFrameFields& raw, const MonotoneMap& map,
                                          const ControlWaveform& waveform,
                                          const DerivedCouplings& couplings,
                                          std::span<const double> z_grid) {
  if (raw.signal.size() != map.size() || raw.anti_stokes.size() != map.size()) {
    throw Error(ErrorCode::GridMismatch, "light samples must match the scaled-time map grid");
  }
  if (raw.spinwave.size() != z_grid.size()) {
    throw Error(ErrorCode::GridMismatch, "spinwave slice must match the z grid");
  }
  const auto control = sample_control(waveform, map.t_grid);
  const double root_w = std::sqrt(map.energy);
  const double signal_floor = kControlFloor * max_abs(raw.signal);
  const double anti_floor = kControlFloor * max_abs(raw.anti_stokes);

  NormalizedFrameFields out;
  out.z = raw.z;
  out.p = map.p_grid;
  out.signal.resize(map.size());
  out.anti_stokes.resize(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double omega = control.omega[i];
    const double p = map.p_grid[i];
    const cplx phase_s = std::polar(1.0, couplings.stark * p + couplings.kappa_s * raw.z);
    const cplx phase_a = std::polar(1.0, couplings.stark * p - couplings.kappa_a * raw.z);
    if (omega > control.floor) {
      out.signal[i] = raw.signal[i] * (root_w / omega) * phase_s;
      out.anti_stokes[i] = raw.anti_stokes[i] * (root_w / omega) * phase_a;
    } else if (std::abs(raw.signal[i]) > signal_floor ||
               std::abs(raw.anti_stokes[i]) > anti_floor) {
      throw Error(ErrorCode::DivisionNearZeroControl,
                  "light field present where the control vanishes (sample " + std::to_string(i) +
                      ")");
    }
  }

  out.p_spin = forward_p(map, raw.t);
  out.spinwave.resize(z_grid.size());
  for (std::size_t k = 0; k < z_grid.size(); ++k) {
    out.spinwave[k] = raw.spinwave[k] *
                      std::polar(1.0, couplings.stark * out.p_spin + couplings.kappa_s * z_grid[k]);
  }
  return out;
}

RawFrameFields from_normalized_frame(const NormalizedFrameFields& normalized,
                                     const MonotoneMap& map, const ControlWaveform& waveform,
                                     const DerivedCouplings& couplings,
                                     std::span<const double> z_grid) {
  if (normalized.signal.size() != map.size() || normalized.anti_stokes.size() != map.size()) {
    throw Error(ErrorCode::GridMismatch, "light samples must match the scaled-time map grid");
  }
  if (normalized.spinwave.size() != z_grid.size()) {
    throw Error(ErrorCode::GridMismatch, "spinwave slice must match the z grid");
  }
  const auto control = sample_control(waveform, map.t_grid);
  const double root_w = std::sqrt(map.energy);
  const double signal_floor = kControlFloor * max_abs(normalized.signal);
  const double anti_floor = kControlFloor * max_abs(normalized.anti_stokes);

  RawFrameFields out;
  out.z = normalized.z;
  out.signal.resize(map.size());
  out.anti_stokes.resize(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double omega = control.omega[i];
    const double p = map.p_grid[i];
    if (omega > control.floor) {
      out.signal[i] = normalized.signal[i] * (omega / root_w) *
                      std::polar(1.0, -(couplings.stark * p + couplings.kappa_s * normalized.z));
      out.anti_stokes[i] =
          normalized.anti_stokes[i] * (omega / root_w) *
          std::polar(1.0, -(couplings.stark * p - couplings.kappa_a * normalized.z));
    } else if (std::abs(normalized.signal[i]) > signal_floor ||
               std::abs(normalized.anti_stokes[i]) > anti_floor) {
      throw Error(ErrorCode::DivisionNearZeroControl,
                  "normalized field supported where the control vanishes (sample " +
                      std::to_string(i) + ")");
    }
  }

  out.t = invert_scaled_time(map, std::clamp(normalized.p_spin, 0.0, 1.0));
  out.spinwave.resize(z_grid.size());
  for (std::size_t k = 0; k < z_grid.size(); ++k) {
    out.spinwave[k] =
        normalized.spinwave[k] *
        std::polar(1.0, -(couplings.stark * normalized.p_spin + couplings.kappa_s * z_grid[k]));
  }
  return out;
}

ComplexVector resample_signal(const SignalPulse& signal, const MonotoneMap& map,
                              const DerivedCouplings& couplings, std::size_t n_p) {
  if (n_p < 2) throw Error(ErrorCode::GridTooCoarse, "resample_signal needs >= 2 nodes");
  RealVector intensity(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) intensity[i] = std::norm(signal(map.t_grid[i]));
  const RealVector cumulative = cumulative_trapezoid(intensity, map.dt());
  const double t0 = map.t_grid.front();
  auto cumulative_at = [&](double t) {
    const double pos = (t - t0) / map.dt();
    if (pos <= 0.0) return 0.0;
    if (pos >= static_cast<double>(map.size() - 1)) return cumulative.back();
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return cumulative[i] + frac * (cumulative[i + 1] - cumulative[i]);
  };

  const double h = 1.0 / static_cast<double>(n_p - 1);
  RealVector edges(n_p + 1);
  edges.front() = map.t_grid.front();
  edges.back() = map.t_grid.back();
  for (std::size_t j = 1; j < n_p; ++j) {
    edges[j] = invert_scaled_time(map, (static_cast<double>(j) - 0.5) * h);
  }

  ComplexVector out(n_p);
  for (std::size_t j = 0; j < n_p; ++j) {
    const double cell_energy = std::max(0.0, cumulative_at(edges[j + 1]) - cumulative_at(edges[j]));
    const double width = (j == 0 || j + 1 == n_p) ? 0.5 * h : h;
    const double p = static_cast<double>(j) * h;
    const cplx point = signal(invert_scaled_time(map, p));
    const double arg = std::abs(point) > 0.0 ? std::arg(point) : 0.0;
    out[j] = std::polar(std::sqrt(cell_energy / width), arg + couplings.stark * p);
  }
  return out;
}

ComplexVector signal_on_uniform_p(const SignalPulse& signal, const MonotoneMap& map,
                                  const ControlWaveform& waveform,
                                  const DerivedCouplings& couplings, std::size_t n_p) {
  if (n_p < 2) throw Error(ErrorCode::GridTooCoarse, "signal_on_uniform_p needs >= 2 nodes");
  const double peak = waveform.peak();
  const double floor = kControlFloor * peak;
  const double root_w = std::sqrt(map.energy);
  ComplexVector out(n_p);
  double signal_peak = 0.0;
  for (double t : map.t_grid) signal_peak = std::max(signal_peak, std::abs(signal(t)));
  for (std::size_t j = 0; j < n_p; ++j) {
    const double p = static_cast<double>(j) / static_cast<double>(n_p - 1);
    const double t = invert_scaled_time(map, p);
    const double omega = waveform(t);
    const cplx e = signal(t);
    if (omega > floor) {
      out[j] = e * (root_w / omega) * std::polar(1.0, couplings.stark * p);
    } else if (std::abs(e) > kControlFloor * signal_peak) {
      throw Error(ErrorCode::DivisionNearZeroControl,
                  "signal present where the control vanishes (node " + std::to_string(j) + ")");
    }
  }
  return out;
}

}  // namespace ramem
