// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "torusflow/error.hpp"
#include "torusflow/random_fields.hpp"
#include "torusflow/spectral.hpp"

#include <doctest.h>
#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

using namespace torusflow;

namespace {

ScalarField sin_x(const TorusGrid& g) {
  return ScalarField::from_function(g, [](const Point& x) { return std::sin(x[0]); });
}

double max_diff(const ScalarField& a, const ScalarField& b) { return (a.values() - b.values()).abs().maxCoeff(); }

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid layout and wavenumbers") {
  TorusGrid g(2, 8);
  CHECK(g.size() == 64);
  CHECK(g.stride(0) == 8);
  CHECK(g.stride(1) == 1);
  CHECK(g.wavenumber_of(3) == 3);
  CHECK(g.wavenumber_of(4) == -4);
  CHECK(g.wavenumber_of(7) == -1);
  CHECK(g.flat_index({-1, 9, 0, 0}) == 7 * 8 + 1);
  CHECK(g.dealias_cutoff() == 2);
  CHECK(TorusGrid(2, 64).dealias_cutoff() == 21);
  CHECK(TorusGrid(2, 32).dealias_cutoff() == 10);
  CHECK_THROWS_AS(TorusGrid(2, 12), Error);
  CHECK_THROWS_AS(TorusGrid(2, 4), Error);
  CHECK_THROWS_AS(TorusGrid(5, 8), Error);
}

TEST_CASE("round trip and mean normalization") {
  Rng rng(1);
  for (int dim = 1; dim <= 3; ++dim) {
    TorusGrid g(dim, 16);
    RealArray v = RealArray::Random(g.size()) + 2.5;
    ScalarField f(g, v);
    CHECK(f.mean() == doctest::Approx(v.mean()).epsilon(1e-14));
    CHECK(oracle::rel_diff(g.inverse_real(f.spectral()), v) < 1e-13);
  }
}

TEST_CASE("transform matches direct summation") {
  TorusGrid g(2, 8);
  RealArray v = RealArray::Random(g.size());
  ScalarField f(g, v);
  const ComplexArray ref = oracle::dft(g, v);
  CHECK((f.spectral() - ref).abs().maxCoeff() < 1e-14);
}

TEST_CASE("derivative") {
  TorusGrid g(2, 32);
  const auto f = sin_x(g);
  const auto df = derivative(f, 0);
  const auto cosx = ScalarField::from_function(g, [](const Point& x) { return std::cos(x[0]); });
  CHECK(max_diff(df, cosx) < 1e-13);
  CHECK(derivative(f, 1).max_abs() < 1e-13);
  CHECK(derivative(ScalarField::constant(g, 3.7), 1).max_abs() == 0.0);
  CHECK_THROWS_AS(derivative(f, 2), Error);
  try {
    derivative(f, 2);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AxisOutOfRange);
  }
}

TEST_CASE("derivative against differentiated DFT sum") {
  TorusGrid g(2, 16);
  Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = random_bandlimited(g, 4, rng);
    const ComplexArray c = oracle::dft(g, f.values());
    for (int axis = 0; axis < 2; ++axis) {
      const RealArray ref = oracle::synthesize(g, c, [&](const oracle::Wavevector& k) {
        return g.is_nyquist(k[axis]) ? Complex(0.0) : Complex(0.0, k[axis]);
      });
      CHECK(oracle::rel_diff(derivative(f, axis).values(), ref) < 1e-12);
    }
  }
}

TEST_CASE("laplacian and inverse") {
  TorusGrid g(2, 16);
  const auto f = sin_x(g);
  CHECK(max_diff(laplacian(f), -1.0 * f) < 1e-13);
  CHECK(max_diff(inverse_laplacian(f), -1.0 * f) < 1e-13);
  // mode (1,1): coefficient c maps to −c/2
  const auto m = ScalarField::from_function(g, [](const Point& x) { return std::cos(x[0] + x[1]); });
  CHECK(max_diff(inverse_laplacian(m), -0.5 * m) < 1e-13);
  try {
    inverse_laplacian(ScalarField::constant(g, 1.0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonZeroMean);
  }
  Rng rng(3);
  const auto r = random_bandlimited(g, 7, rng) + ScalarField::constant(g, 0.4);
  const auto back = inverse_laplacian(laplacian(r));
  CHECK(max_diff(back, r - ScalarField::constant(g, r.mean())) < 1e-12 * r.max_abs());
}

TEST_CASE("fractional laplacian") {
  TorusGrid g(2, 16);
  const auto f = sin_x(g);
  CHECK(max_diff(fractional_laplacian(f, 0.5), f) < 1e-13);
  Rng rng(11);
  const auto r = random_bandlimited(g, 7, rng);
  const auto twice = fractional_laplacian(fractional_laplacian(r, 0.5), 0.5);
  CHECK(max_diff(twice, -1.0 * laplacian(r)) < 1e-12 * laplacian(r).max_abs());
  CHECK_THROWS_AS(fractional_laplacian(ScalarField::constant(g, 2.0), -0.5), Error);
}

TEST_CASE("hodge decomposition") {
  TorusGrid g(2, 16);
  const auto c = hodge_decompose(VectorField::constant(g, {2.0, -1.0}));
  CHECK(c.harmonic_part[0].values().isApproxToConstant(2.0));
  CHECK(c.harmonic_part[1].values().isApproxToConstant(-1.0));
  CHECK(c.divfree_part.max_abs() < 1e-14);
  CHECK(c.gradient_part.max_abs() < 1e-14);

  const auto u = perp_gradient(sin_x(g));
  const auto p = hodge_decompose(u);
  CHECK(oracle::l2_rel(p.divfree_part, u) < 1e-13);
  CHECK(p.gradient_part.max_abs() < 1e-14);

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    VectorField r(std::vector<ScalarField>{ScalarField(g, RealArray::Random(g.size())),
                                           ScalarField(g, RealArray::Random(g.size()))});
    const auto h = hodge_decompose(r);
    const double n2 = r.l2_norm() * r.l2_norm();
    CHECK(oracle::l2_rel(h.gradient_part + h.divfree_part + h.harmonic_part, r) < 1e-13);
    CHECK(std::abs(l2_inner(h.gradient_part, h.divfree_part)) < 1e-12 * n2);
    CHECK(std::abs(l2_inner(h.gradient_part, h.harmonic_part)) < 1e-12 * n2);
    CHECK(std::abs(l2_inner(h.divfree_part, h.harmonic_part)) < 1e-12 * n2);
    CHECK(divergence(h.divfree_part).max_abs() < 1e-11 * r.max_abs());
    CHECK(rot(h.gradient_part).max_abs() < 1e-11 * r.max_abs());
  }
}

TEST_CASE("hodge gradient part equals least-squares gradient fit") {
  // Least squares over the discrete gradient range, built from dense differentiation matrices on 8².
  TorusGrid g(2, 8);
  const int n = 8;
  const Eigen::MatrixXd d1 = oracle::first_derivative_matrix(n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd dx = Eigen::kroneckerProduct(d1, eye);
  Eigen::MatrixXd dy = Eigen::kroneckerProduct(eye, d1);
  Eigen::MatrixXd grad(2 * g.size(), g.size());
  grad << dx, dy;
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    VectorField r(std::vector<ScalarField>{ScalarField(g, RealArray::Random(g.size())),
                                           ScalarField(g, RealArray::Random(g.size()))});
    Eigen::VectorXd rhs(2 * g.size());
    rhs << r[0].values().matrix(), r[1].values().matrix();
    const Eigen::VectorXd phi = grad.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd fit = grad * phi;
    const auto h = hodge_decompose(r);
    Eigen::VectorXd got(2 * g.size());
    got << h.gradient_part[0].values().matrix(), h.gradient_part[1].values().matrix();
    CHECK((fit - got).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("inertia operators") {
  TorusGrid g(2, 16);
  const VectorField u{sin_x(g), ScalarField(g)};
  InertiaSpec id{0, 1.0};
  CHECK(oracle::l2_rel(apply_inertia(u, id), u) == 0.0);
  InertiaSpec one{1, 1.0};
  CHECK(oracle::l2_rel(apply_inertia(u, one), 2.0 * u) < 1e-14);
  const auto c2y = ScalarField::from_function(g, [](const Point& x) { return std::cos(2 * x[1]); });
  InertiaSpec two{2, 0.5};
  CHECK(max_diff(apply_inertia(c2y, two), 4.0 * c2y) < 1e-13);
  Rng rng(2);
  const auto r = random_bandlimited_vector(g, 7, rng);
  CHECK(oracle::l2_rel(apply_inertia(solve_inertia(r, two), two), r) < 1e-12);
  CHECK(oracle::l2_rel(inertia_power(inertia_power(r, two, 0.5), two, 0.5), apply_inertia(r, two)) < 1e-12);
  CHECK_THROWS_AS(validate(InertiaSpec{-1, 1.0}), Error);
  CHECK_THROWS_AS(validate(InertiaSpec{1, 0.0}), Error);
}

TEST_CASE("sobolev norm") {
  TorusGrid g(2, 32);
  CHECK(sobolev_norm(VectorField(g), 1.0) == 0.0);
  const VectorField u{sin_x(g), ScalarField(g)};
  const double l2 = std::sqrt(2.0 * M_PI * M_PI);
  CHECK(sobolev_norm(u, 0.0) == doctest::Approx(l2).epsilon(1e-13));
  CHECK(sobolev_norm(u, 1.0) == doctest::Approx(std::sqrt(2.0) * l2).epsilon(1e-13));
  Rng rng(4);
  const auto r = random_bandlimited_vector(g, 10, rng);
  CHECK(sobolev_norm(r, 0.0) == doctest::Approx(r.l2_norm()).epsilon(1e-12));
}

TEST_CASE("perp gradient, rot and divergence") {
  TorusGrid g(2, 32);
  const auto pg = perp_gradient(sin_x(g));
  CHECK(pg[0].max_abs() < 1e-14);
  const auto cosx = ScalarField::from_function(g, [](const Point& x) { return std::cos(x[0]); });
  CHECK(max_diff(pg[1], cosx) < 1e-13);
  Rng rng(8);
  const auto f = random_bandlimited(g, 10, rng);
  CHECK(max_diff(rot(perp_gradient(f)), laplacian(f)) < 1e-12 * laplacian(f).max_abs());
  CHECK(divergence(perp_gradient(f)).max_abs() < 1e-12 * f.max_abs());
  const VectorField shear{ScalarField::from_function(g, [](const Point& x) { return std::sin(x[1]); }), ScalarField(g)};
  const auto cosy = ScalarField::from_function(g, [](const Point& x) { return std::cos(x[1]); });
  CHECK(max_diff(rot(shear), -1.0 * cosy) < 1e-13);
  CHECK(rot(gradient(f)).max_abs() < 1e-12 * f.max_abs());
  CHECK_THROWS_AS(rot(VectorField(TorusGrid(3, 8))), Error);
  CHECK_THROWS_AS(perp_gradient(ScalarField(TorusGrid(1, 8))), Error);
}

TEST_CASE("rot against centered differences") {
  TorusGrid g(2, 64);
  Rng rng(12);
  const auto u = random_bandlimited_vector(g, 3, rng);
  const double h = g.spacing();
  RealArray fd(g.size());
  for (Index p = 0; p < g.size(); ++p) {
    auto idx = g.multi_index(p);
    auto at = [&](int a, int da, int comp) {
      auto j = idx;
      j[a] += da;
      return u[comp].values()[g.flat_index(j)];
    };
    fd[p] = (at(0, 1, 1) - at(0, -1, 1)) / (2 * h) - (at(1, 1, 0) - at(1, -1, 0)) / (2 * h);
  }
  const double err = (rot(u).values() - fd).abs().maxCoeff() / rot(u).max_abs();
  CHECK(err < 10 * h * h);
  CHECK(err > 1e-6);
}

TEST_CASE("dealiased product keeps only the 2/3 band") {
  TorusGrid g(1, 16);
  const auto a = ScalarField::from_function(g, [](const Point& x) { return std::cos(3 * x[0]); });
  const auto p = dealiased_product(a, a);
  // cos²(3x) = ½ + ½cos(6x); 6 > 16/3 so the harmonic is removed.
  CHECK(p.values().isApproxToConstant(0.5, 1e-14));
  const auto b = ScalarField::from_function(g, [](const Point& x) { return std::cos(2 * x[0]); });
  const auto q = dealiased_product(b, b);
  const auto ref = ScalarField::from_function(g, [](const Point& x) { return std::pow(std::cos(2 * x[0]), 2); });
  CHECK(max_diff(q, ref) < 1e-14);
}

TEST_CASE("translation equivariance") {
  TorusGrid g(2, 16);
  Rng rng(13);
  const auto f = random_bandlimited(g, 7, rng);
  const std::array<int, kMaxDim> s{1, 0, 0, 0};
  CHECK(max_diff(shift_by_cells(derivative(f, 1), s), derivative(shift_by_cells(f, s), 1)) < 1e-12);
  CHECK(max_diff(shift_by_cells(laplacian(f), s), laplacian(shift_by_cells(f, s))) < 1e-12);
  CHECK(max_diff(shift_by_cells(fractional_laplacian(f, 0.5), s), fractional_laplacian(shift_by_cells(f, s), 0.5)) <
        1e-12);
}

}
