#include <doctest.h>

#include <cmath>
#include <random>

#include "cdfo/subproblem.hpp"
#include "oracles.hpp"

using namespace cdfo;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

QuadraticModel model(Vector g, Matrix h, Vector base) {
  QuadraticModel m;
  m.gradient = std::move(g);
  m.hessian = std::move(h);
  m.base = std::move(base);
  return m;
}

const auto nonneg = ConvexRegion::box(v2(0, 0), v2(INFINITY, INFINITY));

// Best step over t in a fine grid of projected-gradient steps P(x - t g) - x,
// capped to the ball. Brute force, used as a decrease oracle.
double linesearch_decrease(const QuadraticModel& m, const ConvexRegion& region, double delta) {
  double best = 0.0;
  for (int k = -400; k <= 400; ++k) {
    const double t = std::pow(10.0, k / 100.0);
    Vector y = project(region, m.base - t * m.gradient);
    Vector s = y - m.base;
    if (s.norm() > delta) s *= delta / s.norm();
    best = std::max(best, m.decrease(s));
  }
  return best;
}

}  // namespace

TEST_CASE("trust-region step: hand-solved instances") {
  const auto ws = ConvexRegion::whole_space(2);
  CHECK(solve_trust_region(model(v2(0, 0), Matrix::Zero(2, 2), v2(0, 0)), ws, 1.0).step.norm() == 0.0);

  const auto lin = solve_trust_region(model(v2(3, 4), Matrix::Zero(2, 2), v2(0, 0)), ws, 1.0);
  CHECK((lin.step - v2(-0.6, -0.8)).norm() < 1e-12);

  const auto newton = solve_trust_region(model(v2(1, 0), Matrix::Identity(2, 2), v2(0, 0)), ws, 10.0);
  CHECK((newton.step - v2(-1, 0)).norm() < 1e-8);

  // x1 >= 0 at x = 0 with g = (2,0), H = I: every feasible step raises the model.
  const auto half = ConvexRegion::halfspace(v2(-1, 0), 0.0);
  const auto stuck = solve_trust_region(model(v2(2, 0), Matrix::Identity(2, 2), v2(0, 0)), half, 1.0);
  CHECK(stuck.step.norm() < 1e-12);
}

TEST_CASE("trust-region step never raises the model and stays feasible") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 4;
    const Matrix b = Matrix::NullaryExpr(n, n, [&] { return nd(rng); });
    Matrix h = 0.5 * (b + b.transpose());  // indefinite on purpose
    const Vector g = Vector::NullaryExpr(n, [&] { return nd(rng); });
    ConvexRegion region = trial % 3 == 0   ? ConvexRegion::ball(Vector::Zero(n), 1.0)
                          : trial % 3 == 1 ? ConvexRegion::halfspace(Vector::Ones(n), 0.2)
                                           : ConvexRegion::box(Vector::Constant(n, -0.5), Vector::Constant(n, 0.5));
    const Vector x = project(region, 0.3 * Vector::NullaryExpr(n, [&] { return nd(rng); }));
    const double delta = 0.05 + std::abs(nd(rng));
    const auto m = model(g, h, x);
    const auto step = solve_trust_region(m, region, delta);
    CHECK(m.value_at_step(step.step) <= m.value_at_step(Vector::Zero(n)) + 1e-12);
    CHECK(contains(region, x + step.step, 1e-10));
    CHECK(step.step.norm() <= delta * (1 + 1e-12));
  }
}

TEST_CASE("trust-region step matches a refined grid in 2-D") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  const std::vector<ConvexRegion> regions = {
      ConvexRegion::whole_space(2), ConvexRegion::box(v2(-0.4, -0.1), v2(0.6, 0.5)),
      ConvexRegion::ball(v2(0.2, 0.1), 0.5), ConvexRegion::halfspace(v2(1, 2), 0.1)};
  for (const auto& region : regions) {
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix b = Matrix::NullaryExpr(2, 2, [&] { return nd(rng); });
      const Matrix h = b * b.transpose();
      const Vector g = v2(nd(rng), nd(rng));
      const Vector x = project(region, 0.2 * v2(nd(rng), nd(rng)));
      const auto m = model(g, h, x);
      const auto step = solve_trust_region(m, region, 0.6);
      const auto grid = oracle::grid_minimum_2d(g, h, region, x, 0.6);
      const double got = g.dot(step.step) + 0.5 * step.step.dot(h * step.step);
      CHECK(got <= grid.value + 1e-6);
      CHECK(got >= grid.value - 1e-3);
    }
  }
}

TEST_CASE("criticality measure") {
  const auto ws = ConvexRegion::whole_space(3);
  const Vector g = Vector::LinSpaced(3, 1, 3);
  CHECK(criticality_measure(g, ws, Vector::Zero(3)).value == doctest::Approx(g.norm()).epsilon(1e-12));
  CHECK(criticality_measure(Vector::Zero(3), ws, Vector::Zero(3)).value == 0.0);

  CHECK(criticality_measure(v2(1, 1), nonneg, v2(0, 0)).value == doctest::Approx(0.0));
  const auto c = criticality_measure(v2(1, -1), nonneg, v2(0, 0));
  CHECK(c.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((c.direction - v2(0, 1)).norm() < 1e-12);
}

TEST_CASE("criticality measure is 1-Lipschitz in the gradient") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + trial % 3;
    ConvexRegion region = trial % 2 ? ConvexRegion::ball(Vector::Zero(n), 0.7)
                                    : ConvexRegion::halfspace(Vector::NullaryExpr(n, [&] { return nd(rng); }), 0.0);
    const Vector x = project(region, Vector::NullaryExpr(n, [&] { return nd(rng); }));
    const Vector g1 = Vector::NullaryExpr(n, [&] { return nd(rng); });
    const Vector g2 = Vector::NullaryExpr(n, [&] { return nd(rng); });
    const double p1 = criticality_measure(g1, region, x).value;
    const double p2 = criticality_measure(g2, region, x).value;
    CHECK(std::abs(p1 - p2) <= (g1 - g2).norm() + 1e-8);
  }
}

TEST_CASE("Cauchy decrease check and fallback step") {
  const auto ws = ConvexRegion::whole_space(2);
  const auto lin = model(v2(3, 4), Matrix::Zero(2, 2), v2(0, 0));
  const Vector s = -0.5 * v2(0.6, 0.8);  // exact minimizer for delta = 0.5
  CHECK(cauchy_decrease_holds(lin, s, 5.0, 0.5, 0.5));
  CHECK(lin.decrease(s) == doctest::Approx(5.0 * 0.5));
  CHECK_FALSE(cauchy_decrease_holds(lin, Vector::Zero(2), 5.0, 0.5, 0.1));

  // Linear model, no constraints: the fallback moves along -g.
  const Vector fb = fallback_cauchy_step(lin, ws, 0.5);
  CHECK(std::abs(fb.normalized().dot(-lin.gradient.normalized()) - 1.0) < 1e-12);
  CHECK(fb.norm() <= 0.5 * (1 + 1e-12));
  CHECK(fallback_cauchy_step(model(v2(0, 0), Matrix::Identity(2, 2), v2(0, 0)), ws, 1.0).norm() == 0.0);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 3;
    const Matrix b = Matrix::NullaryExpr(n, n, [&] { return nd(rng); });
    const Matrix h = b * b.transpose();
    const Vector g = Vector::NullaryExpr(n, [&] { return nd(rng); });
    ConvexRegion region = trial % 2 ? ConvexRegion::ball(Vector::Constant(n, 0.3), 0.5)
                                    : ConvexRegion::halfspace(Vector::Ones(n), 0.0);
    const Vector x = project(region, 0.4 * Vector::NullaryExpr(n, [&] { return nd(rng); }));
    const auto m = model(g, h, x);
    const double delta = 0.05 + std::abs(nd(rng));
    const double pi = criticality_measure(g, region, x).value;

    const auto step = solve_trust_region(m, region, delta);
    CHECK(cauchy_decrease_holds(m, step.step, pi, delta, 0.1));
    const Vector f = fallback_cauchy_step(m, region, delta);
    CHECK(cauchy_decrease_holds(m, f, pi, delta, 0.1));
    CHECK(contains(region, x + f));
    // The brute-force linesearch reaches the Cauchy level too.
    CHECK(linesearch_decrease(m, region, delta) >= cauchy_threshold(m, pi, delta, 0.1) * (1 - 1e-9));
  }
}

TEST_CASE("norm estimates") {
  Matrix h(2, 2);
  h << 2, 1, 1, 2;
  CHECK(spectral_norm(h) == doctest::Approx(3.0));
  CHECK(lipschitz_estimate(h) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(lipschitz_estimate(Matrix::Zero(2, 2)) == 0.0);
  Matrix indef(2, 2);
  indef << 0, 1, 1, 0;  // eigenvalues +-1: power iteration does not settle
  CHECK(lipschitz_estimate(indef) >= 1.0 - 1e-12);
}
