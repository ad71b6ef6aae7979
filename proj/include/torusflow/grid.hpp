// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <memory>

namespace torusflow {

using Index = Eigen::Index;
using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;
using Complex = std::complex<double>;

inline constexpr int kMaxDim = 4;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

namespace detail {
struct GridData;
}

/// Uniform periodic grid on [0, 2π)^dim with n points per axis.
///
/// Samples are stored row-major: axis 0 varies slowest. Wavenumbers along each
/// axis are the integers in [-n/2, n/2). The forward transform divides by the
/// total number of samples, so spectral coefficient 0 is the field mean.
///
/// Copies share the transform plans; grids of equal (dim, n) compare equal.
class TorusGrid {
 public:
  TorusGrid(int dim, int n);

  int dim() const noexcept;
  int n() const noexcept;
  Index size() const noexcept;
  double spacing() const noexcept { return kTwoPi / n(); }
  /// Volume of one cell, (2π/n)^dim.
  double cell_volume() const noexcept;
  /// Total volume (2π)^dim.
  double volume() const noexcept;

  Index stride(int axis) const noexcept;
  std::array<int, kMaxDim> multi_index(Index flat) const noexcept;
  /// Flat index of a multi-index, wrapping each entry periodically.
  Index flat_index(const std::array<int, kMaxDim>& idx) const noexcept;
  double coordinate(Index flat, int axis) const noexcept;

  /// Signed wavenumber of the i-th transform index along an axis.
  int wavenumber_of(int i) const noexcept { return i < n() / 2 ? i : i - n(); }
  /// Wavenumber component along `axis` for every flat spectral index.
  const Eigen::ArrayXi& wavenumbers(int axis) const noexcept;
  /// Wavenumber components with the Nyquist entry zeroed, the symbol of odd-order derivatives.
  const RealArray& odd_wavenumbers(int axis) const noexcept;
  /// |ξ|² for every flat spectral index.
  const RealArray& wavenumber_sq() const noexcept;
  /// 1 where the mode survives the 2/3 rule (all |k_a| <= n/3), 0 otherwise.
  const RealArray& dealias_mask() const noexcept;
  int dealias_cutoff() const noexcept { return n() / 3; }
  bool is_nyquist(int k) const noexcept { return k == -n() / 2; }

  /// Normalized forward transform of real samples.
  void forward(const RealArray& values, ComplexArray& spectral) const;
  /// Normalized forward transform of complex samples.
  void forward(const ComplexArray& values, ComplexArray& spectral) const;
  /// Inverse transform (no scaling; inverse of the normalized forward).
  void inverse(const ComplexArray& spectral, ComplexArray& values) const;
  RealArray inverse_real(const ComplexArray& spectral) const;

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) noexcept {
    return a.dim() == b.dim() && a.n() == b.n();
  }

 private:
  std::shared_ptr<const detail::GridData> data_;
};

}  // namespace torusflow
