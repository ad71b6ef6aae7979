// SPDX-License-Identifier: Apache-2.0
#include "torusflow/grid.hpp"

#include "torusflow/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace torusflow {

namespace detail {

struct GridData {
  int dim = 0;
  int n = 0;
  Index size = 0;
  std::array<Index, kMaxDim> strides{};
  std::array<Eigen::ArrayXi, kMaxDim> wavenumbers;
  std::array<RealArray, kMaxDim> odd_wavenumbers;
  RealArray wavenumber_sq;
  RealArray dealias_mask;
  fftw_plan forward_plan = nullptr;
  fftw_plan backward_plan = nullptr;
};

}  // namespace detail

namespace {

// fftw planning is not thread safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const detail::GridData> make_grid_data(int dim, int n) {
  auto data = std::make_shared<detail::GridData>();
  data->dim = dim;
  data->n = n;
  Index size = 1;
  for (int a = 0; a < dim; ++a) size *= n;
  data->size = size;
  Index s = 1;
  for (int a = dim - 1; a >= 0; --a) {
    data->strides[a] = s;
    s *= n;
  }
  data->wavenumber_sq = RealArray::Zero(size);
  data->dealias_mask = RealArray::Ones(size);
  const int cutoff = n / 3;
  for (int a = 0; a < dim; ++a) {
    auto& ks = data->wavenumbers[a];
    ks.resize(size);
    auto& odd = data->odd_wavenumbers[a];
    odd.resize(size);
    for (Index f = 0; f < size; ++f) {
      const int i = static_cast<int>((f / data->strides[a]) % n);
      const int k = i < n / 2 ? i : i - n;
      ks[f] = k;
      odd[f] = k == -n / 2 ? 0.0 : static_cast<double>(k);
      data->wavenumber_sq[f] += static_cast<double>(k) * k;
      if (std::abs(k) > cutoff) data->dealias_mask[f] = 0.0;
    }
  }

  std::array<int, kMaxDim> dims{};
  for (int a = 0; a < dim; ++a) dims[a] = n;
  auto* in = fftw_alloc_complex(static_cast<size_t>(size));
  auto* out = fftw_alloc_complex(static_cast<size_t>(size));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  data->forward_plan = fftw_plan_dft(dim, dims.data(), in, out, FFTW_FORWARD, flags);
  data->backward_plan = fftw_plan_dft(dim, dims.data(), in, out, FFTW_BACKWARD, flags);
  fftw_free(in);
  fftw_free(out);
  if (data->forward_plan == nullptr || data->backward_plan == nullptr) {
    throw Error(ErrorKind::InvalidArgument, "could not plan transform for grid");
  }
  return data;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

TorusGrid::TorusGrid(int dim, int n) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorKind::InvalidArgument, "grid dimension must be in [1, 4], got " + std::to_string(dim));
  }
  if (n < 8 || !is_power_of_two(n)) {
    throw Error(ErrorKind::InvalidArgument,
                "points per axis must be a power of two >= 8, got " + std::to_string(n));
  }
  // Grids are few and small; the registry keeps their plans for the process lifetime.
  static std::map<std::pair<int, int>, std::shared_ptr<const detail::GridData>> registry;
  std::lock_guard lock(planner_mutex());
  auto& slot = registry[{dim, n}];
  if (!slot) slot = make_grid_data(dim, n);
  data_ = slot;
}

int TorusGrid::dim() const noexcept { return data_->dim; }
int TorusGrid::n() const noexcept { return data_->n; }
Index TorusGrid::size() const noexcept { return data_->size; }

double TorusGrid::cell_volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing();
  return v;
}

double TorusGrid::volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= kTwoPi;
  return v;
}

Index TorusGrid::stride(int axis) const noexcept { return data_->strides[axis]; }

std::array<int, kMaxDim> TorusGrid::multi_index(Index flat) const noexcept {
  std::array<int, kMaxDim> idx{};
  for (int a = 0; a < dim(); ++a) idx[a] = static_cast<int>((flat / data_->strides[a]) % n());
  return idx;
}

Index TorusGrid::flat_index(const std::array<int, kMaxDim>& idx) const noexcept {
  Index flat = 0;
  const int m = n();
  for (int a = 0; a < dim(); ++a) {
    int i = idx[a] % m;
    if (i < 0) i += m;
    flat += i * data_->strides[a];
  }
  return flat;
}

double TorusGrid::coordinate(Index flat, int axis) const noexcept {
  return spacing() * static_cast<double>((flat / data_->strides[axis]) % n());
}

const Eigen::ArrayXi& TorusGrid::wavenumbers(int axis) const noexcept { return data_->wavenumbers[axis]; }
const RealArray& TorusGrid::odd_wavenumbers(int axis) const noexcept { return data_->odd_wavenumbers[axis]; }
const RealArray& TorusGrid::wavenumber_sq() const noexcept { return data_->wavenumber_sq; }
const RealArray& TorusGrid::dealias_mask() const noexcept { return data_->dealias_mask; }

void TorusGrid::forward(const RealArray& values, ComplexArray& spectral) const {
  ComplexArray tmp = values.cast<Complex>();
  forward(tmp, spectral);
}

void TorusGrid::forward(const ComplexArray& values, ComplexArray& spectral) const {
  spectral.resize(size());
  // fftw never writes to the input of an out-of-place complex transform.
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(values.data()));
  auto* out = reinterpret_cast<fftw_complex*>(spectral.data());
  if (in == out) {
    ComplexArray copy = values;
    fftw_execute_dft(data_->forward_plan, reinterpret_cast<fftw_complex*>(copy.data()), out);
  } else {
    fftw_execute_dft(data_->forward_plan, in, out);
  }
  spectral /= static_cast<double>(size());
}

void TorusGrid::inverse(const ComplexArray& spectral, ComplexArray& values) const {
  values.resize(size());
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(spectral.data()));
  auto* out = reinterpret_cast<fftw_complex*>(values.data());
  if (in == out) {
    ComplexArray copy = spectral;
    fftw_execute_dft(data_->backward_plan, reinterpret_cast<fftw_complex*>(copy.data()), out);
  } else {
    fftw_execute_dft(data_->backward_plan, in, out);
  }
}

RealArray TorusGrid::inverse_real(const ComplexArray& spectral) const {
  ComplexArray values;
  inverse(spectral, values);
  return values.real();
}

}  // namespace torusflow
