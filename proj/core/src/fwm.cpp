#include "ramem/fwm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ramem/error.hpp"
#include "ramem/quadrature.hpp"

namespace ramem {

cplx anti_stokes_output(std::span<const cplx> s, double delta_k, double g_a) {
  if (s.size() < 2) return cplx(0.0);
  const double h = 1.0 / static_cast<double>(s.size() - 1);
  // Rotate by a fixed step instead of calling polar per sample.
  const cplx step = std::polar(1.0, -delta_k * h);
  cplx phase(1.0);
  cplx sum(0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i % 64 == 0) phase = std::polar(1.0, -delta_k * static_cast<double>(i) * h);
    const double w = (i == 0 || i + 1 == s.size()) ? 0.5 : 1.0;
    sum += w * phase * s[i];
    phase *= step;
  }
  return -g_a * h * sum;
}

double anti_stokes_energy(const ComplexGrid& s, double delta_k, double g_a) {
  if (s.n_p() < 2) return 0.0;
  ComplexVector out(s.n_p());
  for (std::size_t j = 0; j < s.n_p(); ++j) out[j] = anti_stokes_output(s.level(j), delta_k, g_a);
  return unit_energy(out);
}

double support_width(std::span<const cplx> s, double fraction) {
  const std::size_t n = s.size();
  if (n < 2) throw Error(ErrorCode::DegenerateInput, "support_width needs >= 2 samples");
  const double h = 1.0 / static_cast<double>(n - 1);
  RealVector density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = std::norm(s[i]);
  const RealVector c = cumulative_trapezoid(density, h);
  const double total = c.back();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateInput, "spinwave carries no energy");
  const double target = fraction * total;

  // Position where the cumulative energy reaches `level` (c is non-decreasing).
  auto position = [&](double level) {
    const auto it = std::lower_bound(c.begin(), c.end(), level);
    if (it == c.end()) return 1.0;
    const auto i = static_cast<std::size_t>(std::distance(c.begin(), it));
    if (i == 0) return 0.0;
    const double span = c[i] - c[i - 1];
    const double frac = span > 0.0 ? (level - c[i - 1]) / span : 0.0;
    return (static_cast<double>(i - 1) + frac) * h;
  };

  double best = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = static_cast<double>(i) * h;
    if (c[i] + target <= total) best = std::min(best, position(c[i] + target) - z);
    if (c[i] >= target) best = std::min(best, z - position(c[i] - target));
  }
  return std::clamp(best, std::numeric_limits<double>::min(), 1.0);
}

NoiseReport noise_metrics(const MemoryResult& memory, const DerivedCouplings& couplings) {
  if (!(memory.n_r > 0.0)) {
    throw Error(ErrorCode::DegenerateInput, "no retrieved signal, noise ratio undefined");
  }
  NoiseReport r;
  r.e_a_out = anti_stokes_output(memory.write.s_w, couplings.delta_k, couplings.g_a);
  r.n_a = memory.mode == Mode::full_fwm ? memory.n_a : memory.n_a_estimate;
  r.epsilon = r.n_a / memory.n_r;
  r.support_width = support_width(memory.write.s_w);
  return r;
}

std::vector<GainRow> fwm_gain_sweep(const PhysicalParams& params,
                                    const ControlWaveform& write_waveform,
                                    const ControlWaveform& read_waveform,
                                    const SignalPulse& signal, std::span<const double> n_in_list,
                                    GridSpec grid, Direction direction, double n_a0) {
  for (std::size_t i = 0; i < n_in_list.size(); ++i) {
    if (!(n_in_list[i] > 0.0) || (i > 0 && !(n_in_list[i] > n_in_list[i - 1]))) {
      throw Error(ErrorCode::BadParams, "n_in list must be positive and ascending");
    }
  }
  std::vector<GainRow> rows;
  rows.reserve(n_in_list.size());
  for (double n_in : n_in_list) {
    const MemoryResult m = full_memory(params, write_waveform, read_waveform,
                                       signal.with_energy(n_in), grid, Mode::full_fwm, direction);
    rows.push_back({n_in, n_a0 + m.n_a});
  }
  return rows;
}

}  // namespace ramem
