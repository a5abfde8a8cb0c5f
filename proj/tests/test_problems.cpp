#include <doctest.h>

#include <cmath>
#include <set>

#include "cdfo/problems.hpp"

using namespace cdfo;

namespace {

const LeastSquaresProblem& get(const char* name) {
  const auto* p = find_problem(name);
  REQUIRE(p != nullptr);
  return *p;
}

}  // namespace

TEST_CASE("suite size and names") {
  CHECK(suite().size() == 58);
  CHECK(suite().size() * kAllConstraints.size() == 232);
  std::set<std::string> names;
  for (const auto& p : suite()) names.insert(p.name);
  CHECK(names.size() == 58);
  for (const char* extra : {"biggs_exp6", "dixon", "gulf", "powell_badly_scaled", "wood"}) {
    CHECK(find_problem(extra) != nullptr);
  }
  CHECK(find_problem("no_such_problem") == nullptr);
}

TEST_CASE("spot checks at the standard starts") {
  // r = (10 (x2 - x1^2), 1 - x1) at (-1.2, 1): (-4.4, 2.2).
  const auto& rosen = get("rosenbrock");
  CHECK(rosen.objective(rosen.x0) == doctest::Approx(0.5 * (4.4 * 4.4 + 2.2 * 2.2)));
  CHECK(rosen.objective(Vector::Ones(2)) == 0.0);
  CHECK(*rosen.fstar == 0.0);

  // (0.5, -2): r = (19.5, -4.5).
  const auto& fr = get("freudenstein_roth");
  CHECK(fr.objective(fr.x0) == doctest::Approx(0.5 * (19.5 * 19.5 + 4.5 * 4.5)));

  // (-1, 0, 0): theta = 1/2, r = (10 (0 - 10 * 0.5), 10 (1 - 1), 0).
  const auto& hv = get("helical_valley");
  CHECK(hv.objective(hv.x0) == doctest::Approx(0.5 * 2500.0));

  // (-3, -1, -3, -1): r = (-100, 4, -sqrt(90) 10, 4, -4 sqrt(10), 0).
  const auto& wood = get("wood");
  CHECK(wood.n == 4);
  CHECK(wood.m == 6);
  CHECK(wood.objective(wood.x0) == doctest::Approx(0.5 * 19192.0));

  // (0, 1): r = (1e4 * 0 - 1, e^0 + e^-1 - 1.0001).
  const auto& pbs = get("powell_badly_scaled");
  CHECK(pbs.n == 2);
  const Vector r = pbs.residuals(pbs.x0);
  CHECK(r.allFinite());
  CHECK(r(0) == doctest::Approx(-1.0));
  CHECK(r(1) == doctest::Approx(std::exp(-1.0) - 0.0001).epsilon(1e-14));

  // The x10 variants start ten times farther out.
  CHECK((get("rosenbrock_x10").x0 - 10.0 * rosen.x0).norm() < 1e-12);
}

TEST_CASE("every problem is finite at x0 and at its projection for every region") {
  for (const auto& p : suite()) {
    CHECK_MESSAGE(p.residuals(p.x0).allFinite(), p.name);
    CHECK(p.residuals(p.x0).size() == p.m);
    for (auto kind : kAllConstraints) {
      const auto region = constraint_region(kind, p.n);
      CHECK_MESSAGE(p.residuals(project(region, p.x0)).allFinite(), p.name);
    }
  }
}

TEST_CASE("constraint variants") {
  const auto box = constraint_region(ConstraintKind::kBox, 2);
  CHECK((box.lower() - Vector::Constant(2, 0.1)).norm() == 0.0);
  CHECK((box.upper() - Vector::Constant(2, 20.0)).norm() == 0.0);
  const auto ball = constraint_region(ConstraintKind::kBall, 3);
  CHECK((ball.center() - Vector::Constant(3, 5.0)).norm() == 0.0);
  CHECK(ball.radius() == 6.9);
  for (Index n : {2, 7}) {
    const auto hs = constraint_region(ConstraintKind::kHalfspace, n);
    CHECK((hs.normal() - Vector::Ones(n)).norm() == 0.0);
    CHECK(hs.offset() == 1.0);
  }
  CHECK(constraint_region(ConstraintKind::kUnconstrained, 4).kind() == RegionKind::kWholeSpace);
  CHECK(parse_constraint_kind("ball") == ConstraintKind::kBall);
  CHECK_THROWS_AS(parse_constraint_kind("cone"), InvalidArgument);
  CHECK(parse_noise_kind("additive") == NoiseKind::kAdditive);
  CHECK_THROWS_AS(parse_noise_kind("loud"), InvalidArgument);
}

TEST_CASE("noise models and ledger") {
  LeastSquaresProblem p;
  p.name = "const";
  p.n = 1;
  p.m = 2;
  p.residuals = [](const Vector&) { return (Vector(2) << 2.0, 0.0).finished(); };
  const Vector x = Vector::Zero(1);

  std::mt19937_64 rng(1);
  EvaluationLedger ledger;
  CHECK((evaluate(p, x, NoiseSpec{NoiseKind::kMultiplicative, 0.0, 1}, rng, ledger) - p.residuals(x)).norm() == 0.0);

  // Same draws replayed from an identical stream.
  std::mt19937_64 mirror(99);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double z1 = nd(mirror);
  const double z2 = nd(mirror);
  std::mt19937_64 stream(99);
  const Vector mult = evaluate(p, x, NoiseSpec{NoiseKind::kMultiplicative, 0.05, 0}, stream, ledger);
  CHECK(mult(0) == 2.0 * (1.0 + 0.05 * z1));
  CHECK(mult(1) == 0.0);  // zero residuals are unaffected
  (void)z2;

  std::mt19937_64 s2(99);
  const Vector add = evaluate(p, x, NoiseSpec{NoiseKind::kAdditive, 0.05, 0}, s2, ledger);
  CHECK(add(0) == 2.0 + 0.05 * z1);
  CHECK(add(1) == 0.05 * z2);
  CHECK(ledger.count == 3);

  // Streams advance per call and replay under the same seed.
  NoisyResiduals a(p, NoiseSpec{NoiseKind::kAdditive, 0.1, 7});
  NoisyResiduals b(p, NoiseSpec{NoiseKind::kAdditive, 0.1, 7});
  const Vector a1 = a(x);
  const Vector a2 = a(x);
  CHECK((a1 - a2).norm() > 0.0);
  CHECK((b(x) - a1).norm() == 0.0);
  CHECK((b(x) - a2).norm() == 0.0);
  CHECK(a.ledger().count == 2);
  CHECK_THROWS_AS(NoisyResiduals(p, NoiseSpec{NoiseKind::kAdditive, -1.0, 0}), InvalidArgument);
}
