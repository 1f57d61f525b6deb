#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "ramem/types.hpp"

namespace ramem {

/// n equally spaced samples covering [lo, hi], endpoints exact.
RealVector uniform_grid(std::size_t n, double lo = 0.0, double hi = 1.0);

/// Composite trapezoid on a uniform grid with spacing h.
double trapezoid(std::span<const double> f, double h);
cplx trapezoid(std::span<const cplx> f, double h);

/// Trapezoid of |f|^2 on a uniform grid.
double energy(std::span<const cplx> f, double h);

/// Unit-interval energy for a field sampled on n uniform points over [0,1].
inline double unit_energy(std::span<const cplx> f) {
  return f.size() < 2 ? 0.0 : energy(f, 1.0 / static_cast<double>(f.size() - 1));
}

/// Running trapezoid integral; out[0] = 0.
RealVector cumulative_trapezoid(std::span<const double> f, double h);

/// sqrt(sum w|a-b|^2 / sum w|b|^2) with trapezoid weights on a uniform grid.
double relative_l2(std::span<const cplx> a, std::span<const cplx> reference);

/// Same as relative_l2 over two grids of equal shape (trapezoid in z and p).
double relative_l2(const ComplexGrid& a, const ComplexGrid& reference);

/// Linear interpolation of uniformly sampled data on [lo, hi].
cplx interpolate_uniform(std::span<const cplx> f, double lo, double hi, double x);

/// Reverse sample order: f(x) -> f(1 - x) on a uniform grid.
ComplexVector reflect(std::span<const cplx> f);

}  // namespace ramem
