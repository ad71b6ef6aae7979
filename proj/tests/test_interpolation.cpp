// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "torusflow/interpolation.hpp"
#include "torusflow/random_fields.hpp"
#include "torusflow/snapshot.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace torusflow;

TEST_SUITE("interpolation") {

TEST_CASE("spline weights") {
  double w[8];
  bspline_weights(3, 0.0, w);
  CHECK(w[0] == doctest::Approx(1.0 / 6));
  CHECK(w[1] == doctest::Approx(2.0 / 3));
  CHECK(w[2] == doctest::Approx(1.0 / 6));
  CHECK(w[3] == doctest::Approx(0.0));
  for (int deg : {1, 3, 5, 7}) {
    bspline_weights(deg, 0.37, w);
    double s = 0.0;
    for (int m = 0; m <= deg; ++m) s += w[m];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("sin at pi/2") {
  TorusGrid g(2, 64);
  const auto f = ScalarField::from_function(g, [](const Point& x) { return std::sin(x[0]); });
  PointSet p(2, 1);
  p << M_PI / 2, 0.3;
  CHECK(std::abs(evaluate_at(f, p)[0] - 1.0) < 1e-8);
}

TEST_CASE("node values reproduced") {
  TorusGrid g(2, 16);
  Rng rng(1);
  const ScalarField f(g, RealArray::Random(g.size()));
  const PointSet nodes = grid_points(g);
  for (int deg : {3, 7}) {
    const auto v = evaluate_at(f, nodes, {InterpolationScheme::bspline, deg});
    double err = 0.0;
    for (Index i = 0; i < g.size(); ++i) err = std::max(err, std::abs(v[i] - f.values()[i]));
    CHECK(err < 1e-13);
  }
  const auto t = evaluate_at(f, nodes, {InterpolationScheme::trigonometric, 7});
  for (Index i = 0; i < g.size(); ++i) CHECK(std::abs(t[i] - f.values()[i]) < 1e-13);
}

TEST_CASE("band-limited random field at random points") {
  TorusGrid g(2, 64);
  Rng rng(21);
  const auto f = random_bandlimited(g, 4, rng);
  std::uniform_real_distribution<double> U(0.0, kTwoPi);
  PointSet p(2, 100);
  for (Index i = 0; i < p.cols(); ++i) p.col(i) << U(rng), U(rng);
  const auto v = evaluate_at(f, p);
  const auto t = evaluate_at(f, p, {InterpolationScheme::trigonometric, 7});
  double err = 0.0, terr = 0.0;
  for (Index i = 0; i < p.cols(); ++i) {
    const double ref = oracle::fourier_value(f, {p(0, i), p(1, i), 0, 0});
    err = std::max(err, std::abs(v[i] - ref));
    terr = std::max(terr, std::abs(t[i] - ref));
  }
  CHECK(err < 1e-7 * f.max_abs());
  CHECK(terr < 1e-12 * f.max_abs());
}

TEST_CASE("higher dimensions and points outside the fundamental cell") {
  TorusGrid g(3, 16);
  const auto f = ScalarField::from_function(g, [](const Point& x) { return std::sin(x[0]) * std::cos(x[1] - x[2]); });
  PointSet p(3, 2);
  p << 0.4, 0.4 + kTwoPi, 1.1, 1.1 - 3 * kTwoPi, -0.7, -0.7;
  const auto v = evaluate_at(f, p);
  const double ref = std::sin(0.4) * std::cos(1.1 + 0.7);
  CHECK(v[0] == doctest::Approx(ref).epsilon(1e-6));
  CHECK(v[1] == doctest::Approx(v[0]).epsilon(1e-12));
}

TEST_CASE("bad degree rejected") {
  CHECK_THROWS(validate(InterpolationOptions{InterpolationScheme::bspline, 4}));
  CHECK_THROWS(validate(InterpolationOptions{InterpolationScheme::bspline, 13}));
}

TEST_CASE("snapshot round trip") {
  TorusGrid g(2, 8);
  Rng rng(2);
  const auto u = random_bandlimited_vector(g, 3, rng);
  const auto path = std::filesystem::temp_directory_path() / "torusflow_snapshot_test.tfs";
  write_snapshot(path, u, "velocity");
  const auto s = read_snapshot(path);
  CHECK(s.tag == "velocity");
  CHECK(s.field.components() == 2);
  CHECK((s.field[1].values() - u[1].values()).abs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

}
