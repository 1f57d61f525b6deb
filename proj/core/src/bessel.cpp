#include "ramem/bessel.hpp"

#include <cmath>
#include <numbers>

namespace ramem {

namespace {

constexpr double kSeriesLimit = 8.0;
constexpr double kAsymptoticLimit = 30.0;

// sum_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)
double series(int m, double x) {
  const double q = -0.25 * x * x;
  double term = m == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + m));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's backward recurrence normalised with J0 + 2 sum J_{2k} = 1.
void miller(double x, double& j0, double& j1) {
  int n = static_cast<int>(x + 30.0 + 10.0 * std::cbrt(x));
  n += n % 2;
  double next = 0.0;
  double cur = 1e-300;
  double even_sum = 0.0;
  double f0 = 0.0, f1 = 0.0;
  for (int k = n; k >= 1; --k) {
    const double prev = 2.0 * k / x * cur - next;
    next = cur;
    cur = prev;  // cur is now J_{k-1}
    if ((k - 1) % 2 == 0 && k - 1 > 0) even_sum += cur;
    if (k - 1 == 1) f1 = cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      even_sum *= 1e-250;
      f1 *= 1e-250;
    }
  }
  f0 = cur;
  const double norm = f0 + 2.0 * even_sum;
  j0 = f0 / norm;
  j1 = f1 / norm;
}

// Hankel asymptotic expansion.
double asymptotic(int m, double x) {
  const double mu = 4.0 * m * m;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
    if (k % 2 == 1) {
      q += (k % 4 == 1 ? 1.0 : -1.0) * term;
    } else {
      p += (k % 4 == 0 ? 1.0 : -1.0) * term;
    }
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * m + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= kSeriesLimit) return series(0, x);
  if (x >= kAsymptoticLimit) return asymptotic(0, x);
  double j0 = 0.0, j1 = 0.0;
  miller(x, j0, j1);
  return j0;
}

double bessel_j1(double x) {
  const double sign = x < 0.0 ? -1.0 : 1.0;
  x = std::abs(x);
  if (x <= kSeriesLimit) return sign * series(1, x);
  if (x >= kAsymptoticLimit) return sign * asymptotic(1, x);
  double j0 = 0.0, j1 = 0.0;
  miller(x, j0, j1);
  return sign * j1;
}

}  // namespace ramem
