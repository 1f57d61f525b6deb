#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ramem/error.hpp"
#include "ramem/solver.hpp"
#include "ramem/types.hpp"

namespace ramem {

/// j_m(x, y) = (y/x)^{m/2} J_m(2 g sqrt(x y)) for m in {0, 1}.
/// j_1 tends to g y as x -> 0; the series branch covers 2 g sqrt(x y) < 1e-4.
double bessel_kernel(int m, double x, double y, double g);

/// H_m{f}(y) = g int_0^X j_m(X - x', y) f(x') dx' with f sampled on n uniform
/// points over [0, X]. Fourth-order end-corrected trapezoid.
cplx modified_hankel(int m, std::span<const cplx> f, double x_max, double y, double g);
ComplexVector modified_hankel(int m, std::span<const cplx> f, double x_max,
                              std::span<const double> y_grid, double g);

struct AnalyticFields {
  RealVector z_grid;
  RealVector p_grid;
  ComplexGrid b;
  ComplexGrid s;
};

/// Closed-form solution of dz b = -g s, dp s = g b on the unit square:
///   s = H0{b_in}(p; z) + s_in - H1{s_in}(z; p)
///   b = b_in - H1{b_in}(p; z) - H0{s_in}(z; p)
/// b_in has grid.n_p samples on [0,1], s_in grid.n_z samples on [0,1].
AnalyticFields analytic_fields(std::span<const cplx> b_in, std::span<const cplx> s_in, double g,
                               GridSpec grid);

enum class SpectralAxis { spatial_kz, temporal_kp };

struct HankelSpectrum {
  RealVector k_grid;
  ComplexVector values;
  SpectralAxis axis = SpectralAxis::spatial_kz;
  double g = 0.0;
};

/// g int_0^L J0(2 g sqrt(k x)) f(x) dx for a slice sampled uniformly on
/// [0, L]. The physical fields live on L = 1; larger L is for slices evaluated
/// beyond the medium.
HankelSpectrum hankel_spectrum(std::span<const cplx> slice, double extent, SpectralAxis axis,
                               double g, std::span<const double> k_grid);

/// f(x) -> f(1 - x) on a uniform grid.
ComplexVector time_reversed_input(std::span<const cplx> profile);

/// Write kernel from b_in(p) to s(z, p=1) and read kernel from the stored
/// spinwave to b_out(p), both on the trapezoid grid. Rows index the output.
struct StorageKernels {
  std::vector<double> write;  // n_z x n_p
  std::vector<double> read;   // n_p x n_z
  std::size_t n_z = 0;
  std::size_t n_p = 0;
};

StorageKernels storage_kernels(double g_write, double g_read, GridSpec grid, Direction direction);

/// Total efficiency of an input mode under the kernel model.
double kernel_efficiency(const StorageKernels& kernels, std::span<const cplx> b_in);

struct PowerIterationResult {
  ComplexVector b_opt;  // unit energy on the p grid
  double eta_max = 0.0;
  std::vector<double> trace;  // efficiency after each iteration, trace[0] for the flat start
  std::size_t iterations = 0;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, PowerIterationResult last)
      : Error(ErrorCode::NoConvergence, what), last_(std::move(last)) {}
  const PowerIterationResult& last() const noexcept { return last_; }

 private:
  PowerIterationResult last_;
};

/// Write -> read -> time-reverse -> renormalise, starting from a flat input.
/// Each step applies T^dagger T where T maps b_in to b_out, so the efficiency
/// is non-decreasing. Stops early, keeping the previous iterate, once a step
/// no longer raises the efficiency beyond rounding (1e-12 relative). Throws
/// NoConvergenceError (carrying the last iterate) when the final step still
/// changed the efficiency by more than 1e-6.
PowerIterationResult optimal_mode_power_iteration(double g, GridSpec grid, std::size_t n_iter,
                                                  Direction direction = Direction::backward);
PowerIterationResult optimal_mode_power_iteration(double g_write, double g_read, GridSpec grid,
                                                  std::size_t n_iter,
                                                  Direction direction = Direction::backward);

}  // namespace ramem
