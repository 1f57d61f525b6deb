#pragma once

namespace ramem {

/// Bessel functions of the first kind, orders 0 and 1, for real arguments.
/// Absolute error below 1e-14 over the range used by the kernels.
double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace ramem
