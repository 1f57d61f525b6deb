#include "ramem/quadrature.hpp"

#include <algorithm>

#include "ramem/error.hpp"

namespace ramem {

RealVector uniform_grid(std::size_t n, double lo, double hi) {
  RealVector x(n);
  if (n == 1) {
    x[0] = lo;
    return x;
  }
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
  if (n > 0) x.back() = hi;
  return x;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * h;
}

cplx trapezoid(std::span<const cplx> f, double h) {
  if (f.size() < 2) return 0.0;
  cplx sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * h;
}

double energy(std::span<const cplx> f, double h) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (std::norm(f.front()) + std::norm(f.back()));
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += std::norm(f[i]);
  return sum * h;
}

RealVector cumulative_trapezoid(std::span<const double> f, double h) {
  RealVector out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return out;
}

double relative_l2(std::span<const cplx> a, std::span<const cplx> reference) {
  if (a.size() != reference.size()) {
    throw Error(ErrorCode::GridMismatch, "relative_l2: size mismatch");
  }
  const std::size_t n = a.size();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    num += w * std::norm(a[i] - reference[i]);
    den += w * std::norm(reference[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_l2(const ComplexGrid& a, const ComplexGrid& reference) {
  if (a.n_z() != reference.n_z() || a.n_p() != reference.n_p()) {
    throw Error(ErrorCode::GridMismatch, "relative_l2: grid shape mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t ip = 0; ip < a.n_p(); ++ip) {
    const double wp = (ip == 0 || ip + 1 == a.n_p()) ? 0.5 : 1.0;
    for (std::size_t iz = 0; iz < a.n_z(); ++iz) {
      const double w = wp * ((iz == 0 || iz + 1 == a.n_z()) ? 0.5 : 1.0);
      num += w * std::norm(a(iz, ip) - reference(iz, ip));
      den += w * std::norm(reference(iz, ip));
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

cplx interpolate_uniform(std::span<const cplx> f, double lo, double hi, double x) {
  if (f.empty()) return 0.0;
  if (f.size() == 1 || x <= lo) return f.front();
  if (x >= hi) return f.back();
  const double pos = (x - lo) / (hi - lo) * static_cast<double>(f.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), f.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return f[i] + frac * (f[i + 1] - f[i]);
}

ComplexVector reflect(std::span<const cplx> f) { return ComplexVector(f.rbegin(), f.rend()); }

}  // namespace ramem
