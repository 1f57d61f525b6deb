#include "ramem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ramem/error.hpp"
#include "ramem/fwm.hpp"
#include "ramem/quadrature.hpp"
#include "ramem/scaledtime.hpp"

namespace ramem {

namespace {

void check_grid(GridSpec grid) {
  if (grid.n_z < kMinGridPoints || grid.n_p < kMinGridPoints) {
    throw Error(ErrorCode::GridTooCoarse, "grid must be at least 32 x 32");
  }
}

void check_length(std::span<const cplx> f, std::size_t n, const char* what) {
  if (f.size() != n) {
    throw Error(ErrorCode::GridMismatch, std::string(what) + " has " + std::to_string(f.size()) +
                                             " samples, grid expects " + std::to_string(n));
  }
}

bool any_nonzero(std::span<const cplx> f) {
  return std::any_of(f.begin(), f.end(), [](const cplx& v) { return v != cplx(0.0); });
}

void check_finite(std::span<const cplx> f, const char* what, std::size_t level) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double m = std::abs(f[i]);
    if (!std::isfinite(m) || m > kBlowUpThreshold) {
      throw Error(ErrorCode::NonFiniteField, std::string(what) + " diverged at grid index (z=" +
                                                 std::to_string(i) +
                                                 ", level=" + std::to_string(level) + ")");
    }
  }
}

// Light fields at one p-level from the spinwave at that level.
struct LightSweep {
  double g_s;
  double g_a;
  double h;
  bool anti_stokes;
  std::span<const cplx> phase_minus;  // e^{-i dk z}

  void operator()(std::span<const cplx> s, cplx a_s0, cplx a_a0, std::span<cplx> a_s,
                  std::span<cplx> a_a) const {
    const double cs = 0.5 * h * g_s;
    a_s[0] = a_s0;
    for (std::size_t i = 1; i < s.size(); ++i) a_s[i] = a_s[i - 1] - cs * (s[i - 1] + s[i]);
    if (!anti_stokes) return;
    const double ca = 0.5 * h * g_a;
    a_a[0] = a_a0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      a_a[i] = a_a[i - 1] - ca * (s[i - 1] * phase_minus[i - 1] + s[i] * phase_minus[i]);
    }
  }
};

}  // namespace

FieldEvolution solve_normalized(const DerivedCouplings& couplings, std::span<const cplx> a_s_in,
                                std::span<const cplx> a_a_in, std::span<const cplx> s_in,
                                GridSpec grid, Mode mode) {
  check_grid(grid);
  check_length(a_s_in, grid.n_p, "signal input");
  check_length(a_a_in, grid.n_p, "anti-Stokes input");
  check_length(s_in, grid.n_z, "initial spinwave");
  if (mode == Mode::ideal_bright && any_nonzero(a_a_in)) {
    throw Error(ErrorCode::ModeMismatch,
                "ideal bright-mode solve cannot carry an anti-Stokes input; use full mode");
  }

  const std::size_t nz = grid.n_z;
  const std::size_t np = grid.n_p;
  FieldEvolution ev;
  ev.z_grid = uniform_grid(nz);
  ev.p_grid = uniform_grid(np);
  ev.couplings = couplings;
  ev.mode = mode;
  ev.a_s = ComplexGrid(nz, np);
  ev.a_a_dag = ComplexGrid(nz, np);
  ev.s = ComplexGrid(nz, np);

  const bool full = mode == Mode::full_fwm;
  const double g_s = full ? couplings.g_s : couplings.g;
  const double g_a = full ? couplings.g_a : 0.0;
  const double dk = full ? couplings.delta_k : 0.0;
  const bool with_anti_stokes = full && (g_a != 0.0 || any_nonzero(a_a_in));

  ComplexVector phase_plus(nz), phase_minus(nz);
  for (std::size_t i = 0; i < nz; ++i) {
    phase_plus[i] = std::polar(1.0, dk * ev.z_grid[i]);
    phase_minus[i] = std::conj(phase_plus[i]);
  }
  const double hz = 1.0 / static_cast<double>(nz - 1);
  const double hp = 1.0 / static_cast<double>(np - 1);
  const LightSweep sweep{g_s, g_a, hz, with_anti_stokes, phase_minus};

  auto source = [&](std::span<const cplx> a_s, std::span<const cplx> a_a, std::size_t i) {
    cplx f = g_s * a_s[i];
    if (with_anti_stokes) f -= g_a * a_a[i] * phase_plus[i];
    return f;
  };

  ComplexVector s_pred(nz), a_s_pred(nz), a_a_pred(nz, cplx(0.0));
  std::copy(s_in.begin(), s_in.end(), ev.s.level(0).begin());
  sweep(ev.s.level(0), a_s_in[0], a_a_in[0], ev.a_s.level(0), ev.a_a_dag.level(0));

  for (std::size_t j = 0; j + 1 < np; ++j) {
    auto s0 = ev.s.level(j);
    auto as0 = ev.a_s.level(j);
    auto aa0 = ev.a_a_dag.level(j);
    for (std::size_t i = 0; i < nz; ++i) s_pred[i] = s0[i] + hp * source(as0, aa0, i);
    sweep(s_pred, a_s_in[j + 1], a_a_in[j + 1], a_s_pred, a_a_pred);

    auto s1 = ev.s.level(j + 1);
    for (std::size_t i = 0; i < nz; ++i) {
      s1[i] = s0[i] + 0.5 * hp * (source(as0, aa0, i) + source(a_s_pred, a_a_pred, i));
    }
    sweep(s1, a_s_in[j + 1], a_a_in[j + 1], ev.a_s.level(j + 1), ev.a_a_dag.level(j + 1));
    check_finite(s1, "spinwave", j + 1);
    check_finite(ev.a_s.level(j + 1), "signal", j + 1);
    if (with_anti_stokes) check_finite(ev.a_a_dag.level(j + 1), "anti-Stokes", j + 1);
  }

  if (full) {
    ev.b = ComplexGrid(nz, np);
    const double g = couplings.g;
    for (std::size_t j = 0; j < np; ++j) {
      for (std::size_t i = 0; i < nz; ++i) {
        ev.b(i, j) = g > 0.0 ? (couplings.g_s * ev.a_s(i, j) -
                                couplings.g_a * ev.a_a_dag(i, j) * phase_plus[i]) /
                                   g
                             : ev.a_s(i, j);
      }
    }
  } else {
    ev.b = ev.a_s;
  }
  ev.signal_out = ev.a_s.column(nz - 1);
  ev.anti_stokes_out = ev.a_a_dag.column(nz - 1);
  return ev;
}

WriteResult write_stage(const DerivedCouplings& couplings, std::span<const cplx> a_s_in,
                        GridSpec grid, Mode mode) {
  check_grid(grid);
  check_length(a_s_in, grid.n_p, "signal input");
  const double n_in = unit_energy(a_s_in);
  if (!(n_in > 0.0)) throw Error(ErrorCode::DegenerateInput, "write input carries no energy");

  const ComplexVector vacuum(grid.n_p, cplx(0.0));
  const ComplexVector empty(grid.n_z, cplx(0.0));
  WriteResult r;
  r.fields = solve_normalized(couplings, a_s_in, vacuum, empty, grid, mode);
  r.s_w.assign(r.fields.s.level(grid.n_p - 1).begin(), r.fields.s.level(grid.n_p - 1).end());
  r.leakage_field = r.fields.signal_out;
  r.anti_stokes_out = r.fields.anti_stokes_out;
  r.n_in = n_in;
  r.eta_w = unit_energy(r.s_w) / n_in;
  r.leak = unit_energy(r.leakage_field) / n_in;
  r.n_a = unit_energy(r.anti_stokes_out);
  return r;
}

ReadResult read_stage(const DerivedCouplings& couplings, std::span<const cplx> s_init,
                      GridSpec grid, Mode mode, Direction direction) {
  check_grid(grid);
  check_length(s_init, grid.n_z, "stored spinwave");
  const double stored = unit_energy(s_init);
  if (!(stored > 0.0)) throw Error(ErrorCode::DegenerateInput, "no spinwave to retrieve");

  const ComplexVector start = direction == Direction::backward
                                  ? reflect(s_init)
                                  : ComplexVector(s_init.begin(), s_init.end());
  const ComplexVector vacuum(grid.n_p, cplx(0.0));
  ReadResult r;
  r.fields = solve_normalized(couplings, vacuum, vacuum, start, grid, mode);
  r.b_out = r.fields.signal_out;
  r.s_l.assign(r.fields.s.level(grid.n_p - 1).begin(), r.fields.s.level(grid.n_p - 1).end());
  r.anti_stokes_out = r.fields.anti_stokes_out;
  r.n_stored = stored;
  r.eta_r = unit_energy(r.b_out) / stored;
  r.residual = unit_energy(r.s_l) / stored;
  r.n_a = unit_energy(r.anti_stokes_out);
  return r;
}

MemoryResult memory_from_normalized(const DerivedCouplings& write_couplings,
                                    const DerivedCouplings& read_couplings,
                                    std::span<const cplx> a_in, double n_in, GridSpec grid,
                                    Mode mode, Direction direction) {
  if (!(n_in > 0.0)) throw Error(ErrorCode::DegenerateInput, "input signal carries no energy");
  MemoryResult m;
  m.mode = mode;
  m.direction = direction;
  m.write_couplings = write_couplings;
  m.read_couplings = read_couplings;
  m.n_in = n_in;
  m.write = write_stage(write_couplings, a_in, grid, mode);
  m.read = read_stage(read_couplings, m.write.s_w, grid, mode, direction);

  const double stored = m.read.n_stored;
  m.n_r = unit_energy(m.read.b_out);
  m.eta_w = stored / n_in;
  m.eta_r = m.read.eta_r;
  if (mode == Mode::full_fwm) {
    m.n_a = m.write.n_a + m.read.n_a;
    m.n_a_estimate = m.n_a;
  } else {
    m.n_a = 0.0;
    m.n_a_estimate =
        anti_stokes_energy(m.write.fields.s, write_couplings.delta_k, write_couplings.g_a) +
        anti_stokes_energy(m.read.fields.s, read_couplings.delta_k, read_couplings.g_a);
  }
  m.eta_total = (m.n_r - m.n_a) / n_in;
  m.epsilon = m.n_r > 0.0 ? m.n_a / m.n_r : 0.0;
  m.mu1 = m.eta_total != 0.0 ? m.n_a / m.eta_total : 0.0;
  return m;
}

MemoryResult full_memory(const PhysicalParams& params, const ControlWaveform& write_waveform,
                         const ControlWaveform& read_waveform, const SignalPulse& signal,
                         GridSpec grid, Mode mode, Direction direction) {
  check_grid(grid);
  params.validate();
  const ControlWaveform write = write_waveform.with_energy(params.w_write);
  const ControlWaveform read = read_waveform.with_energy(params.w_read);
  const DerivedCouplings cw = derive_couplings(params, write.energy());
  const DerivedCouplings cr = derive_couplings(params, read.energy());

  const std::size_t n_map = std::max<std::size_t>(4097, 16 * grid.n_p + 1);
  const MonotoneMap map = scaled_time_map(write, n_map);
  const ComplexVector a_in = resample_signal(signal, map, cw, grid.n_p);
  return memory_from_normalized(cw, cr, a_in, signal.energy(), grid, mode, direction);
}

// ---------------------------------------------------------------------------

RawFieldEvolution solve_raw(const PhysicalParams& params, const ControlWaveform& waveform,
                            std::span<const cplx> e_s_in, GridSpec grid) {
  check_grid(grid);
  params.validate();
  check_length(e_s_in, grid.n_p, "raw signal input");
  const std::size_t nz = grid.n_z;
  const std::size_t nt = grid.n_p;

  RawFieldEvolution ev;
  ev.z_grid = uniform_grid(nz);
  ev.t_grid = uniform_grid(nt, waveform.window().t0, waveform.window().t1);
  ev.e_s = ComplexGrid(nz, nt);
  ev.e_a_dag = ComplexGrid(nz, nt);
  ev.spin = ComplexGrid(nz, nt);

  const double root_d = std::sqrt(params.d);
  const double kappa_s = params.d / params.delta_s;
  const double kappa_a = params.d / (params.delta_a() + params.delta_hf);
  const double stark_rate = 1.0 / params.delta_s - 1.0 / params.delta_a();
  const double hz = 1.0 / static_cast<double>(nz - 1);
  const double dt = ev.t_grid[1] - ev.t_grid[0];

  RealVector omega(nt), intensity(nt);
  for (std::size_t n = 0; n < nt; ++n) {
    omega[n] = waveform(ev.t_grid[n]);
    intensity[n] = omega[n] * omega[n];
  }
  const RealVector stark_phase = [&] {
    RealVector c = cumulative_trapezoid(intensity, dt);
    for (double& v : c) v *= stark_rate;
    return c;
  }();

  const cplx step_s = std::polar(1.0, -kappa_s * hz);
  const cplx step_a = std::polar(1.0, kappa_a * hz);

  // z-sweep with the propagation phase integrated exactly.
  auto sweep = [&](std::span<const cplx> spin, cplx e_in, double om, std::span<cplx> e_s,
                   std::span<cplx> e_a) {
    const double cs = 0.5 * hz * root_d * om / params.delta_s;
    const double ca = 0.5 * hz * root_d * om / params.delta_a();
    e_s[0] = e_in;
    e_a[0] = 0.0;
    for (std::size_t i = 1; i < nz; ++i) {
      e_s[i] = step_s * e_s[i - 1] - cs * (step_s * spin[i - 1] + spin[i]);
      e_a[i] = step_a * e_a[i - 1] - ca * (step_a * spin[i - 1] + spin[i]);
    }
  };
  auto source = [&](std::span<const cplx> e_s, std::span<const cplx> e_a, double om,
                    std::size_t i) {
    return root_d * om * (e_s[i] / params.delta_s - e_a[i] / params.delta_a());
  };

  sweep(ev.spin.level(0), e_s_in[0], omega[0], ev.e_s.level(0), ev.e_a_dag.level(0));
  ComplexVector spin_pred(nz), es_pred(nz), ea_pred(nz);
  for (std::size_t n = 0; n + 1 < nt; ++n) {
    const cplx rotate = std::polar(1.0, -(stark_phase[n + 1] - stark_phase[n]));
    auto s0 = ev.spin.level(n);
    auto es0 = ev.e_s.level(n);
    auto ea0 = ev.e_a_dag.level(n);
    for (std::size_t i = 0; i < nz; ++i) {
      spin_pred[i] = rotate * (s0[i] + dt * source(es0, ea0, omega[n], i));
    }
    sweep(spin_pred, e_s_in[n + 1], omega[n + 1], es_pred, ea_pred);
    auto s1 = ev.spin.level(n + 1);
    for (std::size_t i = 0; i < nz; ++i) {
      s1[i] = rotate * (s0[i] + 0.5 * dt * source(es0, ea0, omega[n], i)) +
              0.5 * dt * source(es_pred, ea_pred, omega[n + 1], i);
    }
    sweep(s1, e_s_in[n + 1], omega[n + 1], ev.e_s.level(n + 1), ev.e_a_dag.level(n + 1));
    check_finite(s1, "raw spinwave", n + 1);
  }
  return ev;
}

double FrameComparison::worst() const noexcept {
  return std::max({spinwave, signal, anti_stokes});
}

FrameComparison compare_frames(const PhysicalParams& params, const ControlWaveform& waveform,
                               const SignalPulse& signal, GridSpec grid) {
  check_grid(grid);
  const std::size_t nz = grid.n_z;
  const std::size_t nt = grid.n_p;
  const MonotoneMap coarse = scaled_time_map(waveform, nt);
  const DerivedCouplings c = derive_couplings(params, coarse.energy);

  const RawFieldEvolution raw = solve_raw(params, waveform, signal.sample(coarse.t_grid), grid);

  const MonotoneMap fine = scaled_time_map(waveform, 16 * (nt - 1) + 1);
  MonotoneMap fine_scaled = fine;
  fine_scaled.energy = coarse.energy;
  const ComplexVector a_in = signal_on_uniform_p(signal, fine_scaled, waveform, c, grid.n_p);
  const ComplexVector vacuum(grid.n_p, cplx(0.0));
  const ComplexVector empty(nz, cplx(0.0));
  const FieldEvolution norm = solve_normalized(c, a_in, vacuum, empty, grid, Mode::full_fwm);

  const double root_w = std::sqrt(coarse.energy);
  const double floor = kControlFloor * waveform.peak();
  const double hz = 1.0 / static_cast<double>(nz - 1);

  // Normalized field interpolated in p at a raw sample's scaled time.
  auto at_p = [&](const ComplexGrid& f, std::size_t iz, double p) {
    const double pos = p * static_cast<double>(grid.n_p - 1);
    const auto j = std::min(static_cast<std::size_t>(pos), grid.n_p - 2);
    const double frac = pos - static_cast<double>(j);
    return f(iz, j) + frac * (f(iz, j + 1) - f(iz, j));
  };

  double num_s = 0, den_s = 0, num_a = 0, den_a = 0, num_aa = 0, den_aa = 0;
  for (std::size_t n = 0; n < nt; ++n) {
    const double p = coarse.p_grid[n];
    const double p_lo = coarse.p_grid[n == 0 ? 0 : n - 1];
    const double p_hi = coarse.p_grid[n + 1 == nt ? n : n + 1];
    const double wp = 0.5 * (p_hi - p_lo);
    if (wp <= 0.0) continue;
    const double om = waveform(raw.t_grid[n]);
    for (std::size_t i = 0; i < nz; ++i) {
      const double z = raw.z_grid[i];
      const double w = wp * hz * ((i == 0 || i + 1 == nz) ? 0.5 : 1.0);
      const cplx phase_s = std::polar(1.0, c.stark * p + c.kappa_s * z);
      const cplx phase_a = std::polar(1.0, c.stark * p - c.kappa_a * z);

      const cplx s_ref = at_p(norm.s, i, p);
      num_s += w * std::norm(raw.spin(i, n) * phase_s - s_ref);
      den_s += w * std::norm(s_ref);
      if (om > floor) {
        const cplx a_ref = at_p(norm.a_s, i, p);
        const cplx aa_ref = at_p(norm.a_a_dag, i, p);
        num_a += w * std::norm(raw.e_s(i, n) * (root_w / om) * phase_s - a_ref);
        den_a += w * std::norm(a_ref);
        num_aa += w * std::norm(raw.e_a_dag(i, n) * (root_w / om) * phase_a - aa_ref);
        den_aa += w * std::norm(aa_ref);
      }
    }
  }
  auto ratio = [](double num, double den) { return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num); };
  return {ratio(num_s, den_s), ratio(num_a, den_a), ratio(num_aa, den_aa)};
}

}  // namespace ramem
