#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "cdfo/problems.hpp"
#include "cdfo/solver.hpp"

using namespace cdfo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Objective distance_squared(const Vector& a) {
  return Objective::scalar([a](const Vector& x) { return (x - a).squaredNorm(); });
}

// Linear model m(x + s) = 1 + s1 on the simplex at the origin.
SolverState linear_state(bool fully_linear) {
  Matrix pts(2, 3);
  pts << 0, 0.1, 0, 0, 0, 0.1;
  Matrix vals(3, 1);
  vals << 1.0, 1.1, 1.0;
  InterpolationSet set(pts, vals);
  auto model = build_model(set, false);
  return SolverState{0, v2(0, 0), 1.0, 0.1, std::move(set), std::move(model), fully_linear, 3};
}

void check_history_invariants(const SolveResult& r) {
  double last_f = kInf;
  for (const auto& h : r.history) {
    CHECK(h.f_best <= last_f);
    last_f = h.f_best;
    if (h.branch == Branch::kModelImproving) CHECK_FALSE(h.model_fully_linear);
    if (h.branch == Branch::kCriticality && h.radius_reduced) CHECK(h.model_fully_linear);
    if (h.branch != Branch::kCriticality && h.model_decrease > 0.0) {
      CHECK(h.model_decrease >= h.cauchy_required * (1 - 1e-12));
    }
  }
}

}  // namespace

TEST_CASE("config defaults and validation") {
  SolverConfig c;
  CHECK(c.resolved_delta0(v2(-1.2, 1)) == doctest::Approx(0.12));
  CHECK(c.resolved_delta0(v2(0.3, 0.2)) == doctest::Approx(0.1));
  CHECK(c.resolved_gamma_dec() == 0.5);
  CHECK(c.resolved_max_evaluations(2) == 300);
  c.noise_mode = true;
  CHECK(c.resolved_gamma_dec() == 0.98);
  CHECK(c.eta == 0.1);
  CHECK(c.gamma_inc == 2.0);
  CHECK(c.eps_c == 1e-2);
  CHECK(c.mu == 1.0);
  CHECK(c.c1 == 0.1);
  CHECK(c.lambda == 10.0);
  CHECK(c.beta == 1.0);
  CHECK(c.delta_max == 1e10);
  CHECK(c.delta_end == 1e-8);

  SolverConfig bad;
  bad.gamma_inc = 1.0;
  CHECK_THROWS_AS(bad.validate(2, v2(0, 0)), InvalidArgument);
  bad = {};
  bad.eta = 1.0;
  CHECK_THROWS_AS(bad.validate(2, v2(0, 0)), InvalidArgument);
  bad = {};
  bad.lambda = 1.0;
  CHECK_THROWS_AS(bad.validate(2, v2(0, 0)), InvalidArgument);
  bad = {};
  bad.delta0 = -1.0;
  CHECK_THROWS_AS(bad.validate(2, v2(0, 0)), InvalidArgument);
}

TEST_CASE("objective wrappers") {
  const auto r = Objective::residual([](const Vector& x) { return Vector(2 * x); }, 2);
  CHECK(r.is_residual());
  CHECK(r.objective(r.values(v2(1, 2))) == doctest::Approx(10.0));
  const auto s = Objective::scalar([](const Vector&) { return std::nan(""); });
  CHECK(std::isinf(s.objective(s.values(v2(0, 0)))));
}

TEST_CASE("update_after_step: the three branches") {
  SolverConfig cfg;
  const Vector step = v2(-0.1, 0);  // model decrease 0.1

  auto ok = update_after_step(linear_state(true), step, Vector::Constant(1, 1.0 - 0.09), false, cfg);
  CHECK(ok.branch == Branch::kSuccessful);
  CHECK(ok.rho == doctest::Approx(0.9));
  CHECK(ok.state.delta == doctest::Approx(0.2));
  CHECK((ok.state.x - step).norm() == 0.0);
  CHECK((ok.state.set.base() - step).norm() == 0.0);
  // Farthest point from the new base, (0.1, 0), was dropped.
  for (Index t = 0; t < 3; ++t) CHECK((ok.state.set.point(t) - v2(0.1, 0)).norm() > 0.0);

  auto bad = update_after_step(linear_state(true), step, Vector::Constant(1, 1.0 - 0.005), false, cfg);
  CHECK(bad.branch == Branch::kUnsuccessful);
  CHECK(bad.state.delta == doctest::Approx(0.05));
  CHECK(bad.state.x.norm() == 0.0);

  auto improve = update_after_step(linear_state(false), step, Vector::Constant(1, 1.0 - 0.005), false, cfg);
  CHECK(improve.branch == Branch::kModelImproving);
  CHECK(improve.state.delta == 0.1);

  cfg.delta_max = 0.15;
  auto capped = update_after_step(linear_state(true), step, Vector::Constant(1, 0.0), false, cfg);
  CHECK(capped.state.delta == 0.15);
}

TEST_CASE("make_fully_linear") {
  const auto ws = ConvexRegion::whole_space(2);
  const auto quad = Objective::scalar([](const Vector& x) { return x.squaredNorm(); });
  SolverConfig cfg;

  auto poised = linear_state(false);
  EvaluationBudget b1(quad, 100);
  const auto o1 = make_fully_linear(poised, ws, b1, cfg);
  CHECK(o1.new_evaluations == 0);
  CHECK(o1.swaps == 0);
  CHECK(poised.fully_linear);

  SolverState flat = linear_state(false);
  Matrix pts(2, 3);
  pts << 0, 0.09, 0.09, 0, 0, 1e-5;
  Matrix vals(3, 1);
  for (Index t = 0; t < 3; ++t) vals(t, 0) = pts.col(t).squaredNorm();
  flat.set = InterpolationSet(pts, vals);
  const double det_before = flat.set.abs_det();
  EvaluationBudget b2(quad, 100);
  const auto o2 = make_fully_linear(flat, ws, b2, cfg);
  CHECK(o2.swaps >= 1);
  CHECK(o2.new_evaluations == b2.used());
  CHECK(flat.set.abs_det() > det_before);
  CHECK(flat.fully_linear);
  CHECK(flat.set.fully_evaluated());
}

TEST_CASE("solve: projection of an infeasible target onto a ball and a halfspace") {
  // ||x - a||^2 written as residuals sqrt(2) (x - a).
  SolverConfig cfg;
  cfg.pi_tol = 1e-6;
  cfg.max_evaluations = 200;
  const std::pair<ConvexRegion, Vector> cases[] = {{ConvexRegion::ball(v2(0, 0), 1.0), v2(2, 1)},
                                                   {ConvexRegion::halfspace(v2(1, 1), 1.0), v2(2, 2)}};
  for (const auto& [region, a] : cases) {
    const auto obj = Objective::residual([a = a](const Vector& x) { return Vector(std::sqrt(2.0) * (x - a)); }, 2);
    const auto r = solve(obj, region, v2(0, 0), cfg);
    CHECK((r.x - project(region, a)).norm() <= 1e-6);
    CHECK(r.pi_m <= 1e-6);
    CHECK(r.fully_linear);
    CHECK(r.evaluations <= 200);
    check_history_invariants(r);
  }

  // Scalar form on the ball: still feasible and monotone, converges more slowly.
  const auto ball = ConvexRegion::ball(v2(0, 0), 1.0);
  const auto s = solve(distance_squared(v2(2, 1)), ball, v2(0, 0), cfg);
  CHECK(contains(ball, s.x));
  CHECK((s.x - project(ball, v2(2, 1))).norm() <= 1e-2);
  check_history_invariants(s);
}

TEST_CASE("solve: linear objective over a box ends at the optimal vertex") {
  const auto box = ConvexRegion::box(v2(-1, 0), v2(2, 3));
  const Vector c = v2(1, -2);
  // Vertex enumeration: minimize c^T x over the four corners.
  double best = kInf;
  Vector vertex;
  for (double x1 : {-1.0, 2.0}) {
    for (double x2 : {0.0, 3.0}) {
      if (c.dot(v2(x1, x2)) < best) {
        best = c.dot(v2(x1, x2));
        vertex = v2(x1, x2);
      }
    }
  }
  const auto r = solve(Objective::scalar([c](const Vector& x) { return c.dot(x); }), box, v2(0.5, 1.0));
  CHECK((r.x - vertex).norm() <= 1e-6);
}

TEST_CASE("solve: unconstrained strongly convex quadratic") {
  SolverConfig cfg;
  cfg.pi_tol = 1e-6;
  const auto r = solve(Objective::scalar([](const Vector& x) { return x.squaredNorm(); }),
                       ConvexRegion::whole_space(2), v2(1, 1), cfg);
  CHECK(r.x.norm() <= 1e-5);
  CHECK(r.pi_m <= 1e-6);
  CHECK(r.reason == Termination::kStationary);
  CHECK(r.fully_linear);
}

TEST_CASE("solve: strict feasibility and history invariants on suite problems") {
  for (const char* name : {"rosenbrock", "freudenstein_roth", "wood", "powell_badly_scaled"}) {
    const auto* p = find_problem(name);
    REQUIRE(p != nullptr);
    for (auto kind : kAllConstraints) {
      const auto region = constraint_region(kind, p->n);
      double worst = 0.0;
      const auto fn = [&](const Vector& x) {
        worst = std::max(worst, distance(region, x));
        return p->residuals(x);
      };
      const auto r = solve(Objective::residual(fn, p->m), region, p->x0);
      CHECK(worst <= kFeasibilityTol);
      CHECK(contains(region, r.x));
      CHECK(r.evaluations <= 100 * (p->n + 1));
      check_history_invariants(r);
    }
  }
}

TEST_CASE("solve: Rosenbrock reaches its minimizer") {
  const auto* p = find_problem("rosenbrock");
  const auto r = solve(Objective::residual(p->residuals, p->m), ConvexRegion::whole_space(2), p->x0);
  CHECK((r.x - v2(1, 1)).norm() <= 1e-4);
  CHECK(r.delta0 == doctest::Approx(0.12));
}

TEST_CASE("solve: non-finite values shrink toward the base") {
  // Undefined for x1 > 0.05: replacement points there are pulled back.
  const auto obj = Objective::scalar([](const Vector& x) {
    return x(0) > 0.05 ? std::nan("") : (x - v2(-1, 0.5)).squaredNorm();
  });
  const auto r = solve(obj, ConvexRegion::whole_space(2), v2(0, 0));
  CHECK(std::isfinite(r.f));
  CHECK(r.f < 1.25);
}

TEST_CASE("trace CSV") {
  const auto r = solve(distance_squared(v2(1, 1)), ConvexRegion::whole_space(2), v2(0, 0));
  std::ostringstream out;
  write_trace_csv(out, r.history);
  const auto text = out.str();
  CHECK(text.rfind("# schema: cdfo-trace v1\nk,branch,delta_before,delta_after,pi_m,rho,f_best,n_evals\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(r.history.size()) + 2);
}
