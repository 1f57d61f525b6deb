#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ramem {

using cplx = std::complex<double>;
using RealVector = std::vector<double>;
using ComplexVector = std::vector<cplx>;

/// Dense complex field sampled on an (n_z x n_p) grid. Storage is p-major so
/// that one p-level (all z samples) is contiguous; the solvers march in p.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t n_z, std::size_t n_p)
      : n_z_(n_z), n_p_(n_p), data_(n_z * n_p) {}

  std::size_t n_z() const noexcept { return n_z_; }
  std::size_t n_p() const noexcept { return n_p_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t iz, std::size_t ip) { return data_[ip * n_z_ + iz]; }
  const cplx& operator()(std::size_t iz, std::size_t ip) const {
    return data_[ip * n_z_ + iz];
  }

  std::span<cplx> level(std::size_t ip) { return {data_.data() + ip * n_z_, n_z_}; }
  std::span<const cplx> level(std::size_t ip) const {
    return {data_.data() + ip * n_z_, n_z_};
  }

  /// Samples along p at fixed z (copied, since storage is strided).
  ComplexVector column(std::size_t iz) const;

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }

 private:
  std::size_t n_z_ = 0;
  std::size_t n_p_ = 0;
  ComplexVector data_;
};

inline ComplexVector ComplexGrid::column(std::size_t iz) const {
  ComplexVector out(n_p_);
  for (std::size_t ip = 0; ip < n_p_; ++ip) out[ip] = (*this)(iz, ip);
  return out;
}

}  // namespace ramem
