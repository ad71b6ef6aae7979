// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "torusflow/diffeo.hpp"
#include "torusflow/error.hpp"
#include "torusflow/random_fields.hpp"
#include "torusflow/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace torusflow;

namespace {

VectorField shear_velocity(const TorusGrid& g, double a = 1.0) {
  return VectorField{ScalarField::from_function(g, [a](const Point& x) { return a * std::sin(x[1]); }), ScalarField(g)};
}

DiffeoMap shear_map(const TorusGrid& g, double a) { return DiffeoMap(shear_velocity(g, a)); }

VectorField scaled(const VectorField& v, double amplitude) { return (amplitude / v.max_abs()) * v; }

double max_disp_diff(const DiffeoMap& a, const DiffeoMap& b) { return (a.displacement() - b.displacement()).max_abs(); }

}  // namespace

TEST_SUITE("flowmap") {

TEST_CASE("identity map") {
  TorusGrid g(2, 16);
  const auto id = identity_map(g);
  CHECK(id.displacement().max_abs() == 0.0);
  CHECK(id.determinant().isApproxToConstant(1.0));
  const auto s = shear_map(g, 0.3);
  CHECK(max_disp_diff(compose(id, s), s) == 0.0);
}

TEST_CASE("pullback") {
  TorusGrid g(2, 64);
  const VectorField u{ScalarField::from_function(g, [](const Point& x) { return std::sin(x[0]); }), ScalarField(g)};
  CHECK(oracle::l2_rel(pullback(u, identity_map(g)), u) < 1e-13);
  const double c = 0.37;
  const auto shifted = pullback(u, translation_map(g, {c, 0.0}));
  const auto ref = ScalarField::from_function(g, [c](const Point& x) { return std::sin(x[0] + c); });
  CHECK((shifted[0].values() - ref.values()).abs().maxCoeff() < 1e-7);

  Rng rng(3);
  const auto v = random_bandlimited_vector(g, 4, rng);
  const DiffeoMap gamma(scaled(random_bandlimited_vector(g, 3, rng), 0.05));
  const auto got = pullback(v, gamma);
  const auto exact = pullback(v, gamma, {InterpolationScheme::trigonometric, 7});
  CHECK((got - exact).max_abs() < 1e-7 * v.max_abs());
}

TEST_CASE("advance flow on constant and shear fields") {
  TorusGrid g(2, 64);
  const auto c = VectorField::constant(g, {0.3, -0.2});
  const auto gc = integrate_flow([&](double) { return c; }, g, 1.0, {0.01});
  CHECK((gc.displacement()[0].values() - 0.3).abs().maxCoeff() < 1e-13);
  CHECK((gc.displacement()[1].values() + 0.2).abs().maxCoeff() < 1e-13);

  const auto s = shear_velocity(g);
  const auto gs = integrate_flow([&](double) { return s; }, g, 1.0, {0.01});
  CHECK(max_disp_diff(gs, shear_map(g, 1.0)) < 1e-8);

  const auto g0 = integrate_flow([&](double) { return VectorField(g); }, g, 1.0, {0.01});
  CHECK(g0.displacement().max_abs() == 0.0);
}

TEST_CASE("CFL guard") {
  TorusGrid g(2, 16);
  const auto c = VectorField::constant(g, {10.0, 0.0});
  try {
    advance_flow(identity_map(g), [&](double) { return c; }, 0.0, 0.1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CflViolation);
  }
}

TEST_CASE("Jacobian transport") {
  TorusGrid g(2, 64);
  const auto c = VectorField::constant(g, {0.3, 0.1});
  FlowIntegratorConfig ode{0.01, JacobianMode::transport_ode};
  const auto gc = integrate_flow([&](double) { return c; }, g, 1.0, ode);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK((gc.jacobian(i, j).values() - (i == j ? 1.0 : 0.0)).abs().maxCoeff() < 1e-13);

  const auto s = shear_velocity(g);
  const auto gs = integrate_flow([&](double) { return s; }, g, 1.0, ode);
  const auto cosy = ScalarField::from_function(g, [](const Point& x) { return std::cos(x[1]); });
  CHECK((gs.jacobian(0, 1).values() - cosy.values()).abs().maxCoeff() < 1e-8);
  CHECK((gs.jacobian(0, 0).values() - 1.0).abs().maxCoeff() < 1e-8);
  CHECK((gs.jacobian(1, 0).values()).abs().maxCoeff() < 1e-8);

  Rng rng(5);
  const auto u = random_divergence_free(g, 3, 0.3, rng);
  const auto gu = integrate_flow([&](double) { return u; }, g, 1.0, ode);
  const auto spec = spectral_jacobian(gu.displacement());
  double err = 0.0;
  for (int e = 0; e < 4; ++e) err = std::max(err, (spec[e].values() - gu.jacobian()[e].values()).abs().maxCoeff());
  CHECK(err < 1e-6);
}

TEST_CASE("map inversion") {
  TorusGrid g(2, 64);
  const auto id = invert_map(identity_map(g));
  CHECK(id.displacement().max_abs() < 1e-15);
  const auto tr = invert_map(translation_map(g, {0.2, -0.4}));
  CHECK((tr.displacement()[0].values() + 0.2).abs().maxCoeff() < 1e-9);
  CHECK((tr.displacement()[1].values() - 0.4).abs().maxCoeff() < 1e-9);
  const auto inv = invert_map(shear_map(g, 0.3));
  CHECK(max_disp_diff(inv, shear_map(g, -0.3)) < 1e-8);

  Rng rng(7);
  const DiffeoMap gamma(scaled(random_bandlimited_vector(g, 3, rng), 0.1));
  const auto gi = invert_map(gamma);
  CHECK(compose(gamma, gi).displacement().max_abs() < 1e-8);
  // gi is not band-limited, so evaluating it off the grid is limited by the scheme.
  CHECK(compose(gi, gamma, {InterpolationScheme::trigonometric, 7}).displacement().max_abs() < 1e-8);
  CHECK(compose(gi, gamma).displacement().max_abs() < 1e-7);

  const DiffeoMap fold(VectorField{ScalarField::from_function(g, [](const Point& x) { return 0.95 * std::sin(x[0]); }),
                                   ScalarField(g)});
  try {
    invert_map(fold);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonInvertible);
  }
}

TEST_CASE("volume defect") {
  TorusGrid g(2, 32);
  CHECK(volume_defect(identity_map(g)) < 1e-15);
  CHECK(volume_defect(shear_map(g, 0.3)) < 1e-12);
  const DiffeoMap squeeze(VectorField{ScalarField::from_function(g, [](const Point& x) { return 0.2 * std::sin(x[0]); }),
                                      ScalarField(g)});
  CHECK(volume_defect(squeeze) == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("volume defect converges at fourth order") {
  TorusGrid g(2, 64);
  Rng rng(17);
  const auto u = random_divergence_free(g, 2, 0.25, rng);
  auto defect = [&](double dt) { return volume_defect(integrate_flow([&](double) { return u; }, g, 1.0, {dt})); };
  const double coarse = defect(0.1);
  const double fine = defect(0.05);
  CHECK(coarse / fine > 12.0);
  CHECK(coarse / fine < 20.0);
}

TEST_CASE("group property of steady flows") {
  TorusGrid g(2, 32);
  Rng rng(19);
  const auto u = random_divergence_free(g, 2, 0.3, rng);
  auto provider = [&](double) { return u; };
  const auto a = integrate_flow(provider, g, 0.4, {0.01});
  const auto b = integrate_flow(provider, g, 0.6, {0.01});
  const auto ab = integrate_flow(provider, g, 1.0, {0.01});
  CHECK(max_disp_diff(compose(a, b), ab) < 1e-7);
}

TEST_CASE("snapshot provider interpolates linearly") {
  TorusGrid g(1, 8);
  auto p = snapshot_provider({0.0, 1.0}, {VectorField::constant(g, {1.0}), VectorField::constant(g, {3.0})});
  CHECK(p(0.25)[0].values()[0] == doctest::Approx(1.5));
  CHECK(p(2.0)[0].values()[0] == doctest::Approx(3.0));
}

}
