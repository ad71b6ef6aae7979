// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "torusflow/error.hpp"
#include "torusflow/shooting.hpp"

#include <doctest.h>

#include <cmath>

using namespace torusflow;

namespace {

const InterpolationOptions kCubic{InterpolationScheme::bspline, 3};

VectorField unit(const VectorField& v) { return (1.0 / v.l2_norm()) * v; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("shooting") {

TEST_CASE("exp of simple fields") {
  TorusGrid g(2, 32);
  MetricConfig c;
  CHECK(exp_map(VectorField(g), c, 1e-2).displacement().max_abs() == 0.0);
  const auto t = exp_map(VectorField::constant(g, {0.3, -0.1}), c, 1e-2);
  CHECK((t.displacement() - VectorField::constant(g, {0.3, -0.1})).max_abs() < 1e-13);
  const VectorField shear{ScalarField::from_function(g, [](const Point& x) { return std::sin(x[1]); }), ScalarField(g)};
  const auto s = exp_map(shear, c, 1e-2);
  CHECK((s.displacement() - shear).max_abs() < 1e-6);
}

TEST_CASE("dexp action") {
  TorusGrid g(2, 16);
  MetricConfig c;
  const auto w = unit(VectorField::constant(g, {1.0, 2.0}));
  CHECK((dexp_action(VectorField(g), w, c, 1e-2, 0.0, kCubic) - w).max_abs() < 1e-8);
  CHECK_THROWS_AS(dexp_action(VectorField(g), 2.0 * w, c, 1e-2), Error);

  Rng rng(5);
  const auto u0 = random_divergence_free(g, 2, 0.2, rng);
  const auto v = unit(random_divergence_free(g, 2, 1.0, rng));
  const auto a = dexp_action(u0, v, c, 1e-2, 0.05, kCubic);
  const auto b = dexp_action(u0, -1.0 * v, c, 1e-2, 0.05, kCubic);
  CHECK((a + b).max_abs() == 0.0);
  const auto d1 = dexp_action(u0, v, c, 1e-2, 0.2, kCubic);
  const auto d2 = dexp_action(u0, v, c, 1e-2, 0.1, kCubic);
  const auto d3 = dexp_action(u0, v, c, 1e-2, 0.05, kCubic);
  const double order = std::log2((d1 - d2).l2_norm() / (d2 - d3).l2_norm());
  CHECK(std::abs(order - 2.0) < 0.3);
}

TEST_CASE("admissible basis") {
  TorusGrid g(2, 16);
  MetricConfig c;
  const auto B = admissible_basis(g, c, 2);
  CHECK(B.cols() == 26);
  CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() < 1e-12);
  for (Index j = 0; j < B.cols(); ++j) {
    const auto v = from_coefficients(g, 2, B, Eigen::VectorXd::Unit(B.cols(), j));
    CHECK(divergence(v).max_abs() < 1e-12);
    CHECK(v.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  MetricConfig comp;
  comp.family = MetricFamily::hr_compressible;
  comp.inertia = {1, 1.0};
  CHECK(admissible_basis(g, comp, 2).cols() == 50);
}

TEST_CASE("d exp is well conditioned at zero") {
  TorusGrid g(2, 16);
  CHECK(dexp_condition(VectorField(g), MetricConfig{}, 1e-2, 2, kCubic) < 10.0);
}

TEST_CASE("shooting trivial targets") {
  TorusGrid g(2, 16);
  MetricConfig c;
  ShootingProblem id{identity_map(g), c, 1e-2};
  const auto r0 = shoot(id);
  CHECK(r0.converged);
  CHECK(r0.residual_history.size() <= 2);
  CHECK(r0.u0.max_abs() == 0.0);

  ShootingProblem tr{translation_map(g, {0.3, 0.0}), c, 1e-2};
  const auto r1 = shoot(tr);
  CHECK(r1.converged);
  CHECK((r1.u0 - VectorField::constant(g, {0.3, 0.0})).max_abs() < 1e-8);
}

TEST_CASE("shooting round trip") {
  TorusGrid g(2, 16);
  MetricConfig c;
  Rng rng(7);
  const auto truth = random_divergence_free(g, 2, 0.2, rng);
  ShootingProblem p{exp_map(truth, c, 1e-2, kCubic), c, 1e-2};
  p.coarse_to_fine = {1, 2};
  const auto rep = shoot(p);
  CHECK(rep.converged);
  CHECK(oracle::l2_rel(rep.u0, truth) < 1e-3);
  for (std::size_t k = 1; k < rep.residual_history.size(); ++k) {
    CHECK(rep.residual_history[k] <= rep.residual_history[k - 1]);
  }
  CHECK(rep.residual_history.back() <= p.tol);
  CHECK(divergence(rep.u0).max_abs() < 1e-10);
  CHECK(rep.dexp_condition < 10.0);

  const auto cmp = regularity_experiment(p, rep);
  CHECK(cmp.recovered.slope_defined);
  CHECK(cmp.recovered_steep);
}

TEST_CASE("shooting guards") {
  TorusGrid g(2, 16);
  MetricConfig c;
  CHECK(kind_of([&] { shoot({translation_map(g, {0.6, 0.0}), c, 1e-2}); }) == ErrorKind::BasinGuard);
  CHECK(kind_of([&] { shoot({identity_map(TorusGrid(1, 16)), c, 1e-2}); }) == ErrorKind::FamilyMismatch);
  ShootingProblem p{translation_map(g, {0.2, 0.1}), c, 1e-2};
  ShootingReport bad{VectorField(g), {1.0}, false, 0.0, 0, "tolerance not reached"};
  CHECK(kind_of([&] { regularity_experiment(p, bad); }) == ErrorKind::NotConverged);
}

}
