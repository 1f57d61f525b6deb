// Acceptance suite. `acceptance` runs every criterion; `acceptance AC3` runs one.
// Each criterion prints a single "ACn PASS|FAIL ..." line; the exit status is
// non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "profiles.hpp"
#include "ramem/bessel.hpp"
#include "ramem/fwm.hpp"
#include "ramem/hankel.hpp"
#include "ramem/optimize.hpp"
#include "ramem/quadrature.hpp"
#include "ramem/scaledtime.hpp"
#include "ramem/solver.hpp"

using namespace ramem;
using namespace ramem::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Shape {
  const char* name;
  ComplexVector (*make)(std::size_t);
};

const Shape kShapes[] = {
    {"flat", flat_profile},
    {"gaussian", [](std::size_t n) { return gaussian_profile(n); }},
    {"two_hump", two_hump_profile},
};

// Solver vs closed form for a write with input b_in and no initial spinwave.
double oracle_error(double g, const ComplexVector& b_in, std::size_t n) {
  const ComplexVector empty(n);
  const FieldEvolution f = solve_normalized(DerivedCouplings::bright(g), b_in, empty, empty,
                                            {n, n}, Mode::ideal_bright);
  const AnalyticFields a = analytic_fields(b_in, empty, g, {n, n});
  return std::max(relative_l2(f.s, a.s), relative_l2(f.b, a.b));
}

double total_efficiency(double g, const ComplexVector& b_in, std::size_t n) {
  const DerivedCouplings c = DerivedCouplings::bright(g);
  return memory_from_normalized(c, c, b_in, unit_energy(b_in), {n, n}, Mode::ideal_bright,
                                Direction::backward)
      .eta_total;
}

PowerIterationResult optimum(double g_w, double g_r, GridSpec grid, std::size_t iterations) {
  try {
    return optimal_mode_power_iteration(g_w, g_r, grid, iterations);
  } catch (const NoConvergenceError& e) {
    return e.last();
  }
}

// Average ranks, so ties (flat stretches of a trace) are handled.
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = 0.5 * double(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = double(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

// Reference scenario on [-3, 3]: Gaussian signal of unit FWHM at the centre,
// read control Gaussian with tau = 1 at the centre.
MemoryProblem reference_problem(double w, Mode mode, GridSpec grid) {
  const TimeWindow window{-3.0, 3.0};
  PhysicalParams p;
  p.w_write = p.w_read = w;
  return MemoryProblem{p,
                       SignalPulse::gaussian(0.0, 1.0, 1.0, window),
                       ControlWaveform::gaussian({0.0, 1.0, 1.0}, window),
                       window,
                       Parametrization::gaussian_ct,
                       grid,
                       mode,
                       Direction::backward};
}

const std::vector<Bounds> kCtBounds{{-1.5, 1.5}, {0.2, 3.0}};

Outcome ac1() {
  Outcome o;
  double worst512 = 0.0, worst1024 = 0.0, slowest = 0.0;
  for (double g : {0.5, 1.0, 2.0}) {
    for (const Shape& s : kShapes) {
      for (std::size_t n : {512u, 1024u}) {
        const auto t0 = std::chrono::steady_clock::now();
        const double e = oracle_error(g, s.make(n), n);
        slowest = std::max(slowest, seconds_since(t0));
        (n == 512 ? worst512 : worst1024) = std::max(n == 512 ? worst512 : worst1024, e);
      }
    }
  }
  o.require(worst512 <= 1e-3, fmt("max rel L2 at 512^2 %.3e (<= 1e-3)", worst512));
  o.require(worst1024 <= 2.5e-4, fmt("at 1024^2 %.3e (<= 2.5e-4)", worst1024));
  o.require(slowest <= 60.0, fmt("slowest case %.2f s (<= 60 s)", slowest));
  return o;
}

Outcome ac2() {
  Outcome o;
  double worst = 0.0;
  for (double g : {0.5, 1.0, 2.0}) {
    for (const Shape& s : kShapes) {
      const WriteResult w =
          write_stage(DerivedCouplings::bright(g), s.make(512), {512, 512}, Mode::ideal_bright);
      worst = std::max(worst, std::abs(w.eta_w + w.leak - 1.0));
    }
  }
  o.require(worst <= 1e-4, fmt("max |eta_w + leak - 1| %.3e (<= 1e-4)", worst));
  const double exact = 1.0 - std::pow(bessel_j0(2.0), 2) - std::pow(bessel_j1(2.0), 2);
  for (std::size_t n : {512u, 2048u}) {
    const double eta =
        write_stage(DerivedCouplings::bright(1.0), flat_profile(n), {n, n}, Mode::ideal_bright)
            .eta_w;
    o.require(std::abs(eta - exact) <= 1e-3,
              fmt("flat g=1 at %zu^2: eta_w %.7f vs %.7f", n, eta, exact));
  }
  return o;
}

Outcome ac3() {
  Outcome o;
  PhysicalParams p;  // d = 400, delta_s = 20, delta_hf = 100
  const TimeWindow window{0.0, 1.0};
  const SignalPulse signal = SignalPulse::gaussian(0.5, 0.12, 1.0, window);
  struct Case {
    const char* name;
    ControlWaveform control;
  };
  const Case cases[] = {
      {"square", ControlWaveform::square({0.0, 1.0, 3.0}, window)},
      {"gaussian", ControlWaveform::gaussian({0.5, 0.15, 5.0}, window)},
  };
  for (const Case& c : cases) {
    p.w_write = c.control.energy();
    const FrameComparison f = compare_frames(p, c.control, signal, {1024, 1024});
    o.require(f.worst() <= 1e-3, fmt("%s W=%.3g: spin %.2e signal %.2e anti-Stokes %.2e", c.name,
                                     p.w_write, f.spinwave, f.signal, f.anti_stokes));
  }
  return o;
}

Outcome ac4() {
  Outcome o;
  const std::size_t n = 512;
  const RealVector k = uniform_grid(201);
  const ComplexVector empty(n);
  const ComplexVector profile = gaussian_profile(n, 0.6, 0.15);
  for (double g : {1.0, 2.0}) {
    const AnalyticFields from_signal = analytic_fields(profile, empty, g, {n, n});
    const AnalyticFields from_spin = analytic_fields(empty, profile, g, {n, n});

    const auto stored = from_signal.s.level(n - 1);
    const HankelSpectrum sz = hankel_spectrum(stored, 1.0, SpectralAxis::spatial_kz, g, k);
    const ComplexVector retrieved = from_spin.b.column(n - 1);
    const HankelSpectrum sp = hankel_spectrum(retrieved, 1.0, SpectralAxis::temporal_kp, g, k);

    ComplexVector expected(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      expected[i] = interpolate_uniform(profile, 0.0, 1.0, 1.0 - k[i]) / g;
    }
    const double ez = relative_l2(sz.values, expected);
    const double ep = relative_l2(sp.values, expected);
    o.require(ez <= 0.02, fmt("g=%g spatial %.3f", g, ez));
    o.require(ep <= 0.02, fmt("temporal %.3f (<= 0.02)", ep));
  }
  return o;
}

Outcome ac5() {
  Outcome o;
  const std::size_t n = 256;
  for (double g : {1.0, 2.0, 3.0}) {
    const PowerIterationResult r = optimum(g, g, {n, n}, 400);
    bool monotone = true;
    for (std::size_t i = 1; i < r.trace.size(); ++i) monotone &= r.trace[i] >= r.trace[i - 1];
    o.require(monotone, fmt("g=%g trace non-decreasing over %zu iterations", g, r.iterations));

    const double best = total_efficiency(g, r.b_opt, n);
    double rival = std::max(total_efficiency(g, flat_profile(n), n),
                            total_efficiency(g, gaussian_profile(n), n));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      rival = std::max(rival, total_efficiency(g, random_profile(n, seed), n));
    }
    o.require(best > rival, fmt("eta optimum %.5f vs best other %.5f", best, rival));
  }
  return o;
}

Outcome ac6() {
  Outcome o;
  {
    DEConfig c;
    c.bounds = {{-2.0, 2.0}, {-2.0, 2.0}};
    c.generations = 200;
    c.stall_tol = 0.0;
    const DEResult r = de_optimize(
        [](std::span<const double> x) {
          return -(x[0] - 0.3) * (x[0] - 0.3) - (x[1] + 0.7) * (x[1] + 0.7);
        },
        c);
    const double err = std::hypot(r.best_params[0] - 0.3, r.best_params[1] + 0.7);
    o.require(err <= 1e-3, fmt("(a) quadratic optimum error %.2e", err));
  }

  const MemoryProblem problem = reference_problem(4.0, Mode::ideal_bright, {128, 128});
  const Objective objective = [&](std::span<const double> x) {
    return memory_objective(x, problem);
  };
  DEConfig c;
  c.bounds = kCtBounds;
  c.seed = 11;
  const DEResult de = de_optimize(objective, c);

  double scan = -1.0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double x[2] = {kCtBounds[0].lo + (kCtBounds[0].hi - kCtBounds[0].lo) * i / 100.0,
                           kCtBounds[1].lo + (kCtBounds[1].hi - kCtBounds[1].lo) * j / 100.0};
      scan = std::max(scan, objective(x).fitness);
    }
  }
  o.require(de.best_eta >= scan - 0.005,
            fmt("(b) DE %.5f vs 101x101 scan %.5f", de.best_eta, scan));

  c.threads = 1;
  const DEResult one = de_optimize(objective, c);
  c.threads = 3;
  const DEResult three = de_optimize(objective, c);
  bool identical = one.trace.size() == three.trace.size() && one.best_params == three.best_params;
  for (std::size_t i = 0; identical && i < one.trace.size(); ++i) {
    identical = one.trace[i].best_eta == three.trace[i].best_eta &&
                one.trace[i].best_epsilon == three.trace[i].best_epsilon &&
                one.trace[i].mean_eta == three.trace[i].mean_eta;
  }
  o.require(identical, "(c) traces bit-identical across thread counts");
  return o;
}

Outcome ac7() {
  Outcome o;
  const MemoryProblem problem = reference_problem(1.0, Mode::full_fwm, {256, 256});
  DEConfig c;
  c.bounds = kCtBounds;
  c.seed = 42;
  const auto t0 = std::chrono::steady_clock::now();
  const DEResult r = de_optimize(
      [&](std::span<const double> x) { return memory_objective(x, problem); }, c);
  const double elapsed = seconds_since(t0);
  std::vector<double> eta, eps;
  for (const auto& t : r.trace) {
    eta.push_back(t.best_eta);
    eps.push_back(t.best_epsilon);
  }
  const double rho = spearman(eta, eps);
  o.require(rho <= -0.5, fmt("Spearman(best_eta, best_epsilon) %.3f over %zu generations", rho,
                             r.trace.size()));
  o.require(elapsed <= 600.0, fmt("runtime %.1f s", elapsed));
  return o;
}

Outcome ac8() {
  Outcome o;
  const std::size_t n = 4001;
  const double h = 1.0 / double(n - 1);
  const double g_a = 0.17;
  double worst = 0.0;
  for (std::size_t m : {8u, 40u, 400u, 2000u}) {
    const double w = double(m) * h;
    ComplexVector s(n);
    for (std::size_t i = 1000; i < 1000 + m; ++i) s[i] = 1.0 / std::sqrt(w);
    worst = std::max(worst, std::abs(std::abs(anti_stokes_output(s, 0.0, g_a)) - g_a * std::sqrt(w)));
  }
  o.require(worst <= 1e-8, fmt("max | |E_a| - g_a sqrt(w) | %.2e", worst));

  const std::size_t m = 400;
  const double w = double(m) * h;
  ComplexVector s(n);
  for (std::size_t i = 1000; i < 1000 + m; ++i) s[i] = 1.0 / std::sqrt(w);
  const double zero = std::abs(anti_stokes_output(s, 2.0 * std::numbers::pi / w, g_a));
  o.require(zero <= 1e-8, fmt("|E_a| at dk w = 2 pi: %.2e", zero));
  return o;
}

Outcome ac9() {
  Outcome o;
  const GridSpec grid{256, 256};
  auto matched_eta = [&](const PhysicalParams& p) {
    const DerivedCouplings cw = derive_couplings(p, p.w_write);
    const DerivedCouplings cr = derive_couplings(p, p.w_read);
    ComplexVector a_in = optimum(cw.g, cr.g, grid, 2000).b_opt;
    for (auto& v : a_in) v *= cw.g / cw.g_s;
    return memory_from_normalized(cw, cr, a_in, unit_energy(a_in), grid, Mode::full_fwm,
                                  Direction::backward)
        .eta_total;
  };
  const TimeWindow window{-3.0, 3.0};
  const auto mismatched = ControlWaveform::gaussian({-1.2, 3.0, 1.0}, window);
  const auto read = ControlWaveform::gaussian({0.0, 1.0, 1.0}, window);
  const auto signal = SignalPulse::gaussian(0.0, 1.0, 1.0, window);

  std::vector<double> eta_w, eps_w, eta_d;
  for (double w : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    PhysicalParams p;
    p.w_write = p.w_read = w;
    eta_w.push_back(matched_eta(p));
    eps_w.push_back(
        full_memory(p, mismatched, read, signal, grid, Mode::full_fwm, Direction::backward)
            .epsilon);
  }
  for (double d : {50.0, 100.0, 200.0, 400.0, 800.0, 1600.0}) {
    PhysicalParams p;
    p.d = d;
    eta_d.push_back(matched_eta(p));
  }
  auto non_decreasing = [](const std::vector<double>& v) {
    return std::is_sorted(v.begin(), v.end());
  };
  auto strictly_increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  o.require(non_decreasing(eta_w), fmt("matched eta over W %.4f -> %.4f", eta_w.front(), eta_w.back()));
  o.require(non_decreasing(eta_d), fmt("over d %.4f -> %.4f", eta_d.front(), eta_d.back()));
  o.require(strictly_increasing(eps_w),
            fmt("mismatched epsilon over W %.3e -> %.3e", eps_w.front(), eps_w.back()));
  return o;
}

Outcome ac10() {
  Outcome o;
  for (double g : {1.0, 2.0}) {
    const double e1 = oracle_error(g, two_hump_profile(128), 128);
    const double e2 = oracle_error(g, two_hump_profile(256), 256);
    const double e3 = oracle_error(g, two_hump_profile(512), 512);
    o.require(e1 / e2 >= 3.5 && e2 / e3 >= 3.5,
              fmt("g=%g errors %.2e %.2e %.2e, ratios %.2f %.2f", g, e1, e2, e3, e1 / e2, e2 / e3));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
  std::vector<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) {
      continue;
    }
    Outcome r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s %s\n", id.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
    failures += r.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
