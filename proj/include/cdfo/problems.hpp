#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cdfo/convex_sets.hpp"

namespace cdfo {

struct LeastSquaresProblem {
  std::string name;
  Index n = 0;
  Index m = 0;
  std::function<Vector(const Vector&)> residuals;
  Vector x0;
  std::optional<double> fstar;  // known unconstrained optimum of 1/2 ||r||^2

  double objective(const Vector& x) const { return 0.5 * residuals(x).squaredNorm(); }
};

enum class NoiseKind { kNone, kMultiplicative, kAdditive };
std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kNone;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Counts residual evaluations.
struct EvaluationLedger {
  long count = 0;
};

/// Per-instance noise stream: each call draws fresh i.i.d. N(0, sigma^2)
/// perturbations in call order, so a run is reproducible from its seed.
class NoisyResiduals {
 public:
  NoisyResiduals(const LeastSquaresProblem& problem, const NoiseSpec& noise);

  Vector operator()(const Vector& x);
  const EvaluationLedger& ledger() const { return ledger_; }

 private:
  const LeastSquaresProblem* problem_;
  NoiseSpec noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  EvaluationLedger ledger_;
};

/// Residuals at x under the given noise, drawing from `rng` and incrementing
/// the ledger. Non-finite residual entries are passed through unchanged.
Vector evaluate(const LeastSquaresProblem& problem, const Vector& x, const NoiseSpec& noise,
                std::mt19937_64& rng, EvaluationLedger& ledger);

enum class ConstraintKind { kUnconstrained, kBox, kBall, kHalfspace };
std::string_view to_string(ConstraintKind kind);
ConstraintKind parse_constraint_kind(std::string_view text);
inline constexpr std::array<ConstraintKind, 4> kAllConstraints = {
    ConstraintKind::kUnconstrained, ConstraintKind::kBox, ConstraintKind::kBall, ConstraintKind::kHalfspace};

/// 0.1 <= x <= 20; B((5,...,5), 6.9); 1^T x <= 1; or R^n.
ConvexRegion constraint_region(ConstraintKind kind, Index n);
/// The four regions in the order of kAllConstraints.
std::array<ConvexRegion, 4> constraint_variants(Index n);

/// The 53 Moré-Wild benchmark problems followed by Biggs EXP6, Dixon,
/// Gulf research and development, Powell badly scaled and Wood.
const std::vector<LeastSquaresProblem>& suite();
const LeastSquaresProblem* find_problem(std::string_view name);

}  // namespace cdfo
