#include "ramem/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ramem/bessel.hpp"
#include "ramem/quadrature.hpp"

namespace ramem {

namespace {

constexpr double kSmallArgument = 1e-4;

// Gregory end corrections; short panels fall back to Newton-Cotes.
void weights(std::size_t intervals, std::vector<double>& w) {
  w.assign(intervals + 1, 1.0);
  switch (intervals) {
    case 0:
      w[0] = 0.0;
      return;
    case 1:
      w = {0.5, 0.5};
      return;
    case 2:
      w = {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
      return;
    case 3:
      w = {3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0};
      return;
    case 4:
      w = {1.0 / 3.0, 4.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
      return;
    default:
      break;
  }
  const double end[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (std::size_t k = 0; k < 3; ++k) {
    w[k] = end[k];
    w[intervals - k] = end[k];
  }
}

// Precomputed Gregory weights for every panel length up to n - 1.
class WeightTable {
 public:
  explicit WeightTable(std::size_t n) : rows_(n) {
    for (std::size_t j = 0; j < n; ++j) weights(j, rows_[j]);
  }
  const std::vector<double>& operator[](std::size_t j) const { return rows_[j]; }

 private:
  std::vector<std::vector<double>> rows_;
};

// out[j] = sum_{k<=j} w_jk kernel[j-k] f[k]. The bulk of the sum uses unit
// weights; only the short panels and the Gregory end nodes are corrected.
void causal_convolution(std::span<const double> kernel, std::span<const cplx> f,
                        const WeightTable& table, std::vector<cplx>& out) {
  const std::size_t n = f.size();
  out.assign(n, cplx(0.0));
  for (std::size_t j = 1; j < n; ++j) {
    const auto& w = table[j];
    double re = 0.0, im = 0.0;
    if (j < 8) {
      for (std::size_t k = 0; k <= j; ++k) {
        const double c = w[k] * kernel[j - k];
        re += c * f[k].real();
        im += c * f[k].imag();
      }
    } else {
      for (std::size_t k = 3; k + 3 <= j; ++k) {
        const double c = kernel[j - k];
        re += c * f[k].real();
        im += c * f[k].imag();
      }
      for (std::size_t k = 0; k < 3; ++k) {
        const double c0 = w[k] * kernel[j - k];
        re += c0 * f[k].real();
        im += c0 * f[k].imag();
        const std::size_t kk = j - k;
        const double c1 = w[kk] * kernel[k];
        re += c1 * f[kk].real();
        im += c1 * f[kk].imag();
      }
    }
    out[j] = cplx(re, im);
  }
}

bool all_zero(std::span<const cplx> f) {
  return std::all_of(f.begin(), f.end(), [](const cplx& v) { return v == cplx(0.0); });
}

}  // namespace

double bessel_kernel(int m, double x, double y, double g) {
  if (m != 0 && m != 1) throw Error(ErrorCode::BadParams, "kernel order must be 0 or 1");
  if (x < 0.0 || y < 0.0) throw Error(ErrorCode::BadParams, "kernel arguments must be >= 0");
  const double arg = 2.0 * g * std::sqrt(x * y);
  if (m == 0) return bessel_j0(arg);
  if (arg < kSmallArgument) return g * y * (1.0 - 0.5 * g * g * x * y);
  return std::sqrt(y / x) * bessel_j1(arg);
}

cplx modified_hankel(int m, std::span<const cplx> f, double x_max, double y, double g) {
  if (f.size() < 2) return cplx(0.0);
  const std::size_t n = f.size();
  const double h = x_max / static_cast<double>(n - 1);
  std::vector<double> w;
  weights(n - 1, w);
  cplx sum(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = x_max - static_cast<double>(k) * h;
    sum += w[k] * bessel_kernel(m, std::max(x, 0.0), y, g) * f[k];
  }
  return g * h * sum;
}

ComplexVector modified_hankel(int m, std::span<const cplx> f, double x_max,
                              std::span<const double> y_grid, double g) {
  ComplexVector out(y_grid.size());
  for (std::size_t i = 0; i < y_grid.size(); ++i) out[i] = modified_hankel(m, f, x_max, y_grid[i], g);
  return out;
}

AnalyticFields analytic_fields(std::span<const cplx> b_in, std::span<const cplx> s_in, double g,
                               GridSpec grid) {
  const std::size_t nz = grid.n_z;
  const std::size_t np = grid.n_p;
  if (nz < 2 || np < 2) throw Error(ErrorCode::GridTooCoarse, "analytic grid needs >= 2 points");
  if (b_in.size() != np || s_in.size() != nz) {
    throw Error(ErrorCode::GridMismatch, "analytic_fields inputs do not match the grid");
  }
  AnalyticFields out;
  out.z_grid = uniform_grid(nz);
  out.p_grid = uniform_grid(np);
  out.b = ComplexGrid(nz, np);
  out.s = ComplexGrid(nz, np);
  const double hz = 1.0 / static_cast<double>(nz - 1);
  const double hp = 1.0 / static_cast<double>(np - 1);

  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < nz; ++i) {
      out.s(i, j) = s_in[i];
      out.b(i, j) = b_in[j];
    }
  }
  if (g == 0.0) return out;

  std::vector<double> k0, k1;
  std::vector<cplx> conv0, conv1;

  // Transforms along p of b_in, one z row at a time.
  if (!all_zero(b_in)) {
    const WeightTable table(np);
    k0.resize(np);
    k1.resize(np);
    for (std::size_t i = 0; i < nz; ++i) {
      const double z = out.z_grid[i];
      for (std::size_t m = 0; m < np; ++m) {
        const double x = static_cast<double>(m) * hp;
        k0[m] = bessel_kernel(0, x, z, g);
        k1[m] = bessel_kernel(1, x, z, g);
      }
      causal_convolution(k0, b_in, table, conv0);
      causal_convolution(k1, b_in, table, conv1);
      for (std::size_t j = 0; j < np; ++j) {
        out.s(i, j) += g * hp * conv0[j];
        out.b(i, j) -= g * hp * conv1[j];
      }
    }
  }

  // Transforms along z of s_in, one p column at a time.
  if (!all_zero(s_in)) {
    const WeightTable table(nz);
    k0.resize(nz);
    k1.resize(nz);
    for (std::size_t j = 0; j < np; ++j) {
      const double p = out.p_grid[j];
      for (std::size_t m = 0; m < nz; ++m) {
        const double x = static_cast<double>(m) * hz;
        k0[m] = bessel_kernel(0, x, p, g);
        k1[m] = bessel_kernel(1, x, p, g);
      }
      causal_convolution(k0, s_in, table, conv0);
      causal_convolution(k1, s_in, table, conv1);
      for (std::size_t i = 0; i < nz; ++i) {
        out.b(i, j) -= g * hz * conv0[i];
        out.s(i, j) -= g * hz * conv1[i];
      }
    }
  }
  return out;
}

HankelSpectrum hankel_spectrum(std::span<const cplx> slice, double extent, SpectralAxis axis,
                               double g, std::span<const double> k_grid) {
  if (!(extent > 0.0)) throw Error(ErrorCode::BadParams, "spectrum extent must be positive");
  if (!std::is_sorted(k_grid.begin(), k_grid.end()) ||
      (!k_grid.empty() && k_grid.front() < 0.0)) {
    throw Error(ErrorCode::BadParams, "k grid must be ascending and non-negative");
  }
  HankelSpectrum out;
  out.k_grid.assign(k_grid.begin(), k_grid.end());
  out.values.assign(k_grid.size(), cplx(0.0));
  out.axis = axis;
  out.g = g;
  if (slice.size() < 2) return out;
  const std::size_t n = slice.size();
  const double h = extent / static_cast<double>(n - 1);
  std::vector<double> w;
  weights(n - 1, w);
  for (std::size_t q = 0; q < k_grid.size(); ++q) {
    cplx sum(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sum += w[i] * bessel_j0(2.0 * g * std::sqrt(k_grid[q] * static_cast<double>(i) * h)) *
             slice[i];
    }
    out.values[q] = g * h * sum;
  }
  return out;
}

ComplexVector time_reversed_input(std::span<const cplx> profile) { return reflect(profile); }

StorageKernels storage_kernels(double g_write, double g_read, GridSpec grid, Direction direction) {
  StorageKernels k;
  k.n_z = grid.n_z;
  k.n_p = grid.n_p;
  const RealVector z = uniform_grid(grid.n_z);
  const RealVector p = uniform_grid(grid.n_p);
  k.write.resize(k.n_z * k.n_p);
  k.read.resize(k.n_p * k.n_z);
  for (std::size_t i = 0; i < k.n_z; ++i) {
    for (std::size_t j = 0; j < k.n_p; ++j) {
      k.write[i * k.n_p + j] = g_write * bessel_j0(2.0 * g_write * std::sqrt((1.0 - p[j]) * z[i]));
      // Backward retrieval reads the mirrored spinwave, which undoes the 1 - z.
      const double depth = direction == Direction::backward ? z[i] : 1.0 - z[i];
      k.read[j * k.n_z + i] = g_read * bessel_j0(2.0 * g_read * std::sqrt(depth * p[j]));
    }
  }
  return k;
}

namespace {

RealVector trapezoid_weights(std::size_t n) {
  RealVector w(n, 1.0 / static_cast<double>(n - 1));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

// y = A (w .* x) for a row-major A of shape rows x cols.
void apply(std::span<const double> a, std::size_t rows, std::size_t cols,
           std::span<const double> w, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a.data() + r * cols;
    double re = 0.0, im = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = row[c] * w[c];
      re += v * x[c].real();
      im += v * x[c].imag();
    }
    y[r] = cplx(re, im);
  }
}

// y = A^T x for a row-major A of shape rows x cols (y has cols entries).
void apply_transpose(std::span<const double> a, std::size_t rows, std::size_t cols,
                     std::span<const cplx> x, std::span<cplx> y) {
  std::fill(y.begin(), y.end(), cplx(0.0));
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * x[r];
  }
}

struct KernelOps {
  const StorageKernels& k;
  RealVector wz;
  RealVector wp;
  ComplexVector spin;

  explicit KernelOps(const StorageKernels& kernels)
      : k(kernels), wz(trapezoid_weights(kernels.n_z)), wp(trapezoid_weights(kernels.n_p)),
        spin(kernels.n_z) {}

  void forward(std::span<const cplx> b_in, std::span<cplx> b_out) {
    apply(k.write, k.n_z, k.n_p, wp, b_in, spin);
    apply(k.read, k.n_p, k.n_z, wz, spin, b_out);
  }

  // Adjoint with respect to the trapezoid inner product on p.
  void adjoint(std::span<const cplx> b_out, std::span<cplx> b_in) {
    ComplexVector weighted(k.n_p);
    for (std::size_t j = 0; j < k.n_p; ++j) weighted[j] = wp[j] * b_out[j];
    apply_transpose(k.read, k.n_p, k.n_z, weighted, spin);
    for (std::size_t i = 0; i < k.n_z; ++i) spin[i] *= wz[i];
    apply_transpose(k.write, k.n_z, k.n_p, spin, b_in);
  }
};

void normalise(std::span<cplx> f) {
  const double e = unit_energy(f);
  if (!(e > 0.0)) return;
  const double scale = 1.0 / std::sqrt(e);
  for (auto& v : f) v *= scale;
}

}  // namespace

double kernel_efficiency(const StorageKernels& kernels, std::span<const cplx> b_in) {
  if (b_in.size() != kernels.n_p) {
    throw Error(ErrorCode::GridMismatch, "input mode does not match the kernel grid");
  }
  const double e_in = unit_energy(b_in);
  if (!(e_in > 0.0)) throw Error(ErrorCode::DegenerateInput, "input mode carries no energy");
  KernelOps ops(kernels);
  ComplexVector out(kernels.n_p);
  ops.forward(b_in, out);
  return unit_energy(out) / e_in;
}

PowerIterationResult optimal_mode_power_iteration(double g, GridSpec grid, std::size_t n_iter,
                                                  Direction direction) {
  return optimal_mode_power_iteration(g, g, grid, n_iter, direction);
}

PowerIterationResult optimal_mode_power_iteration(double g_write, double g_read, GridSpec grid,
                                                  std::size_t n_iter, Direction direction) {
  if (n_iter < 1) throw Error(ErrorCode::BadParams, "power iteration needs n_iter >= 1");
  if (!(g_write > 0.0) || !(g_read > 0.0)) {
    throw Error(ErrorCode::BadParams, "power iteration needs positive couplings");
  }
  if (grid.n_z < 2 || grid.n_p < 2) throw Error(ErrorCode::GridTooCoarse, "grid too small");

  const StorageKernels kernels = storage_kernels(g_write, g_read, grid, direction);
  KernelOps ops(kernels);
  PowerIterationResult r;
  r.b_opt.assign(grid.n_p, cplx(1.0));
  ComplexVector out(grid.n_p);

  auto efficiency = [&](std::span<const cplx> b) {
    ops.forward(b, out);
    return unit_energy(out);
  };
  r.trace.push_back(efficiency(r.b_opt));
  ComplexVector previous;
  bool stagnated = false;
  for (std::size_t it = 0; it < n_iter; ++it) {
    previous = r.b_opt;
    // `out` holds T b from the last efficiency call.
    ops.adjoint(out, r.b_opt);
    normalise(r.b_opt);
    const double eta = efficiency(r.b_opt);
    // Below rounding level the quotient only jitters: keep the last iterate.
    if (eta <= r.trace.back() && r.trace.back() - eta <= 1e-12 * r.trace.back()) {
      r.b_opt = std::move(previous);
      stagnated = true;
      break;
    }
    r.trace.push_back(eta);
    r.iterations = it + 1;
  }
  r.eta_max = r.trace.back();
  const double change =
      r.trace.size() < 2 ? 0.0 : std::abs(r.trace.back() - r.trace[r.trace.size() - 2]);
  if (!stagnated && change > 1e-6) {
    throw NoConvergenceError("power iteration still moving after " + std::to_string(n_iter) +
                                 " iterations (last change " + std::to_string(change) + ")",
                             r);
  }
  return r;
}

}  // namespace ramem
