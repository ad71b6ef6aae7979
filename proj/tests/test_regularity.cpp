// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "torusflow/error.hpp"
#include "torusflow/regularity.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

using namespace torusflow;

namespace {

IntegrationOptions horizon(double T, double dt, int checkpoints) {
  IntegrationOptions o;
  o.T = T;
  o.dt = dt;
  o.checkpoints = checkpoints;
  return o;
}

ScalarField shear_vorticity(const TorusGrid& g) {
  return ScalarField::from_function(g, [](const Point& x) { return -std::cos(x[1]); });
}

GeodesicTrajectory shear_geodesic(int n, int checkpoints = 101) {
  TorusGrid g(2, n);
  return integrate_euler2d(shear_vorticity(g), {0, 0}, horizon(1.0, 1e-2, checkpoints));
}

GeodesicTrajectory rest_geodesic(const TorusGrid& g, std::vector<double> mean, int checkpoints = 11) {
  return integrate_euler2d(ScalarField(g), mean, horizon(1.0, 1e-2, checkpoints));
}

VectorField mode_field(const TorusGrid& g, int kx, int ky) {
  return VectorField{ScalarField::from_function(g, [=](const Point& x) { return std::sin(kx * x[0] + ky * x[1]); }),
                     ScalarField(g)};
}

double max_diff(const VectorField& a, const VectorField& b) { return (a - b).max_abs(); }

}  // namespace

TEST_SUITE("regularity") {

TEST_CASE("P lambda at the identity and translations") {
  TorusGrid g(2, 32);
  const auto P = build_p_lambda(identity_map(g), 1.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK((P.coeff(i, j).values() == (i == j ? 1.0 : 0.0)).all());
  const auto v = mode_field(g, 1, 0);
  CHECK(max_diff(apply_p_lambda(P, v), 2.0 * v) < 1e-13);
  const auto c = VectorField::constant(g, {0.4, -1.2});
  CHECK(max_diff(apply_p_lambda(P, c), c) < 1e-14);

  const auto T = build_p_lambda(translation_map(g, {0.3, -0.7}), 2.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK((T.coeff(i, j).values() - (i == j ? 1.0 : 0.0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("P lambda on a shear map matches the hand formula") {
  TorusGrid g(2, 64);
  const double a = 0.4;
  const DiffeoMap gamma(VectorField{ScalarField::from_function(g, [a](const Point& x) { return a * std::sin(x[1]); }),
                                    ScalarField(g)});
  const auto P = build_p_lambda(gamma, 1.0);
  const auto p11 = ScalarField::from_function(g, [a](const Point& x) { return 1 + a * a * std::pow(std::cos(x[1]), 2); });
  const auto p12 = ScalarField::from_function(g, [a](const Point& x) { return a * std::cos(x[1]); });
  CHECK((P.coeff(0, 0) - p11).max_abs() < 1e-7);
  CHECK((P.coeff(0, 1) - p12).max_abs() < 1e-7);
  CHECK((P.coeff(1, 0) - p12).max_abs() < 1e-7);
  CHECK((P.coeff(1, 1) - ScalarField::constant(g, 1.0)).max_abs() < 1e-7);
}

TEST_CASE("P lambda matches a dense differentiation-matrix assembly") {
  const int n = 32;
  TorusGrid g(2, n);
  Rng rng(4);
  const DiffeoMap gamma(random_divergence_free(g, 2, 0.15, rng));
  const auto P = build_p_lambda(gamma, 1.5);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd D1 = oracle::first_derivative_matrix(n);
  const Eigen::MatrixXd D2 = oracle::second_derivative_matrix(n);
  // Axis 0 is the slow index.
  const Eigen::MatrixXd dxx = Eigen::kroneckerProduct(D2, I);
  const Eigen::MatrixXd dyy = Eigen::kroneckerProduct(I, D2);
  const Eigen::MatrixXd dxy = Eigen::kroneckerProduct(D1, I) * Eigen::kroneckerProduct(I, D1);
  const Eigen::MatrixXd op = 1.5 * Eigen::MatrixXd::Identity(n * n, n * n) -
                             P.coeff(0, 0).values().matrix().asDiagonal() * dxx -
                             2.0 * P.coeff(0, 1).values().matrix().asDiagonal() * dxy -
                             P.coeff(1, 1).values().matrix().asDiagonal() * dyy;
  const auto v = random_bandlimited_vector(g, 3, rng);
  const auto got = apply_p_lambda(P, v);
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd ref = op * v[c].values().matrix();
    CHECK((got[c].values().matrix() - ref).norm() < 1e-4 * ref.norm());
  }
}

TEST_CASE("P lambda is self-adjoint up to lower order") {
  TorusGrid g(2, 32);
  Rng rng(6);
  const DiffeoMap gamma(random_divergence_free(g, 2, 0.3, rng));
  const auto P = build_p_lambda(gamma, 1.0);
  double c1 = 0.0, c2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      c1 += derivative(P.coeff(i, j), i).max_abs() + derivative(P.coeff(i, j), j).max_abs();
      c2 += second_derivative(P.coeff(i, j), i, j).max_abs();
    }
  for (int k = 0; k < 10; ++k) {
    const auto v = random_bandlimited_vector(g, 6, rng);
    const auto w = random_bandlimited_vector(g, 6, rng);
    const double gap = std::abs(l2_inner(apply_p_lambda(P, v), w) - l2_inner(v, apply_p_lambda(P, w)));
    const double bound = c1 * v.l2_norm() * sobolev_norm(w, 1.0) + c2 * v.l2_norm() * w.l2_norm();
    CHECK(gap <= 1.01 * bound + 1e-10);
  }
}

TEST_CASE("coercivity quotients") {
  TorusGrid g(2, 32);
  const auto P = build_p_lambda(identity_map(g), 1.0);
  CHECK(rayleigh_quotient(P, mode_field(g, 1, 0)) == doctest::Approx(1.0).epsilon(1e-13));
  for (double lambda : {0.5, 3.0, 40.0}) {
    const auto Q = build_p_lambda(identity_map(g), lambda);
    for (auto [kx, ky] : {std::pair{1, 0}, {2, 1}, {3, 4}, {0, 7}}) {
      const double k2 = kx * kx + ky * ky;
      CHECK(std::abs(rayleigh_quotient(Q, mode_field(g, kx, ky)) - (lambda + k2) / (1 + k2)) < 1e-10);
    }
    const auto r = coercivity_scan(Q, {20, 3});
    CHECK(r.min >= std::min(lambda, 1.0) - 1e-12);
    CHECK(r.max <= std::max(lambda, 1.0) + 1e-12);
  }
  CHECK_THROWS_AS(rayleigh_quotient(P, VectorField(g)), Error);
  const auto again = coercivity_scan(P, {5, 9});
  CHECK(again.min == coercivity_scan(P, {5, 9}).min);
}

TEST_CASE("lambda search on the shear geodesic") {
  const auto traj = shear_geodesic(32, 11);
  const auto s = search_lambda(traj, {20, 1});
  CHECK(s.converged);
  CHECK(s.range.min >= 0.1);
  CHECK(s.range.max / s.range.min < 100);
}

TEST_CASE("integral identity") {
  TorusGrid g(2, 32);
  CHECK(verify_integral_identity(rest_geodesic(g, {0.3, -0.2}, 51), 1.0).residual < 1e-10);
  CHECK(verify_integral_identity(rest_geodesic(g, {0, 0}, 51), 1.0).residual == 0.0);
  CHECK(verify_integral_identity(shear_geodesic(32), 1.0).residual < 1e-3);
  CHECK(verify_integral_identity(shear_geodesic(32), 7.0).residual < 1e-3);
  CHECK_THROWS_AS(verify_integral_identity(shear_geodesic(32, 11), 1.0), Error);
}

TEST_CASE("integral identity converges at the Simpson rate") {
  TorusGrid g(2, 32);
  Rng rng(12);
  const auto u0 = random_divergence_free(g, 2, 0.3, rng);
  const auto traj = integrate_euler2d(rot(u0), {0, 0}, horizon(1.0, 1.0 / 512, 129));
  std::vector<double> r;
  for (int stride : {64, 32, 16}) r.push_back(verify_integral_identity(traj, 1.0, stride, 3).residual);
  CHECK(std::abs(std::log2(r[0] / r[1]) - 4.0) < 0.5);
  CHECK(std::abs(std::log2(r[1] / r[2]) - 4.0) < 0.5);
}

TEST_CASE("M operator at the identity") {
  TorusGrid g(2, 32);
  const auto traj = rest_geodesic(g, {0, 0});
  MetricConfig inc;
  const double lambda = 1.0;
  const VectorField v = perp_gradient(ScalarField::from_function(g, [](const Point& x) { return std::sin(x[0]); }));
  CHECK(max_diff(apply_m_operator(v, traj, inc, lambda), (lambda + 1.0) * v) < 1e-10);
  const auto w = mode_field(g, 2, 1);
  CHECK(max_diff(apply_m_operator(w, traj, inc, 3.0), ((3.0 + 5.0) / 5.0) * w) < 1e-10);

  MetricConfig comp;
  comp.family = MetricFamily::hr_compressible;
  comp.inertia = {1, 1.0};
  const auto ctraj = integrate_epdiff_lagrangian(VectorField(g), comp.inertia, horizon(1.0, 0.1, 11));
  const auto e1 = mode_field(g, 1, 0);
  CHECK(max_diff(apply_m_operator(e1, ctraj, comp, 2.0), 3.0 * e1) < 1e-10);

  const MOperator M(traj, inc, 1.0);
  // (λ + |ξ|²)/|ξ|² lies in (1, λ + 1].
  const double q = m_coercivity(M, {10, 4});
  CHECK(q > 1.0);
  CHECK(q <= 2.0 + 1e-10);
  CHECK_THROWS_AS(m_coercivity(M, {0, 4}), Error);
  CHECK_THROWS_AS(M.apply(w + VectorField::constant(g, {1.0, 0.0})), Error);
}

TEST_CASE("M operator is linear and translation invariant") {
  TorusGrid g(2, 32);
  Rng rng(31);
  const auto shear = shear_geodesic(32, 11);
  MetricConfig inc;
  const MOperator M(shear, inc, 2.0);
  const auto v = random_bandlimited_vector(g, 4, rng);
  const auto w = random_bandlimited_vector(g, 4, rng);
  const auto lhs = M.apply(0.7 * v - 1.3 * w);
  const auto rhs = 0.7 * M.apply(v) - 1.3 * M.apply(w);
  CHECK(max_diff(lhs, rhs) < 1e-11 * rhs.max_abs());

  MetricConfig comp;
  comp.family = MetricFamily::hr_compressible;
  comp.inertia = {1, 1.0};
  InversionOptions exact;
  exact.tol = 1e-14;
  exact.interp = {InterpolationScheme::trigonometric, 7};
  const auto moving =
      integrate_epdiff_lagrangian(VectorField::constant(g, {0.3, 0.2}), comp.inertia, horizon(1.0, 0.1, 11));
  const auto still = integrate_epdiff_lagrangian(VectorField(g), comp.inertia, horizon(1.0, 0.1, 11));
  const auto a = MOperator(moving, comp, 2.0, exact).apply(v);
  const auto b = MOperator(still, comp, 2.0, exact).apply(v);
  CHECK(max_diff(a, b) < 1e-10 * b.max_abs());
}

TEST_CASE("M is coercive along geodesics") {
  TorusGrid g(2, 32);
  MetricConfig inc;
  CHECK(m_coercivity(shear_geodesic(32, 11), inc, 1.0, {10, 2}) > 0.0);
  Rng rng(17);
  const auto u0 = random_divergence_free(g, 3, 0.5, rng);
  const auto traj = integrate_euler2d(rot(u0), u0.mean(), horizon(1.0, 1e-2, 11));
  CHECK(m_coercivity(traj, inc, 1.0, {10, 2}) > 0.0);

  MetricConfig comp;
  comp.family = MetricFamily::hr_compressible;
  comp.inertia = {1, 1.0};
  const auto c0 = random_bandlimited_vector(g, 2, rng);
  const auto ctraj = integrate_epdiff_lagrangian((0.3 / c0.max_abs()) * c0, comp.inertia, horizon(1.0, 1e-2, 11));
  CHECK(m_coercivity(ctraj, comp, 1.0, {10, 2}) > 0.0);
}

TEST_CASE("conservation residual tables") {
  TorusGrid g(2, 32);
  for (const auto& row : conservation_residuals(rest_geodesic(g, {0, 0}))) CHECK(row.residual == 0.0);
  const auto shear = conservation_residuals(shear_geodesic(32, 11));
  bool saw = false;
  for (const auto& row : shear) {
    if (row.law == "vorticity_transport") {
      saw = true;
      CHECK(row.residual < 1e-3);
    }
  }
  CHECK(saw);
  InertiaSpec a{1, 1.0};
  const auto moving = integrate_epdiff_lagrangian(VectorField::constant(g, {0.3, 0.2}), a, horizon(1.0, 0.1, 11));
  for (const auto& row : conservation_residuals(moving)) CHECK(row.residual < 1e-12);
}

TEST_CASE("regularity report") {
  TorusGrid g(2, 64);
  const auto single = regularity_report(mode_field(g, 3, 0));
  CHECK_FALSE(single.slope_defined);
  double total = 0.0;
  for (const auto& s : single.shells) {
    if (s.radius != 3) CHECK(s.energy < 1e-24);
    total += s.energy;
  }
  CHECK(total == doctest::Approx(std::pow(sobolev_norm(mode_field(g, 3, 0), 0.0), 2)).epsilon(1e-10));

  Rng rng(3);
  const VectorField u{power_law_field(g, 4.0, 20, rng), power_law_field(g, 4.0, 20, rng)};
  const auto rep = regularity_report(u);
  CHECK(rep.slope_defined);
  CHECK(rep.decay_slope == doctest::Approx(-8.0).epsilon(0.025));
  double sum = 0.0;
  for (const auto& s : rep.shells) sum += s.energy;
  CHECK(std::abs(sum - std::pow(sobolev_norm(u, 0.0), 2)) < 1e-10 * sum);
  CHECK(rep.sobolev_table.size() == 4);
  CHECK_THROWS_AS(regularity_report(VectorField(g)), Error);
}

}
