#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "cdfo/composite_models.hpp"
#include "cdfo/convex_sets.hpp"
#include "cdfo/interpolation.hpp"
#include "cdfo/subproblem.hpp"

namespace cdfo {

struct SolverConfig {
  std::optional<double> delta0;  // unset: 0.1 * max(||x0||_inf, 1)
  double delta_max = 1e10;
  std::optional<double> gamma_dec;  // unset: 0.5, or 0.98 in noise mode
  double gamma_inc = 2.0;
  double eps_c = 1e-2;
  double mu = 1.0;
  double eta = 0.1;
  double c1 = 0.1;
  double lambda = 10.0;
  double beta = 1.0;
  std::optional<int> max_evaluations;  // unset: 100 (n + 1)
  double delta_end = 1e-8;
  std::optional<double> pi_tol;
  bool noise_mode = false;
  std::uint64_t rng_seed = 0;
  FistaSettings fista{};

  double resolved_gamma_dec() const { return gamma_dec.value_or(noise_mode ? 0.98 : 0.5); }
  double resolved_delta0(const Vector& x0) const;
  int resolved_max_evaluations(Index n) const { return max_evaluations.value_or(100 * static_cast<int>(n + 1)); }
  /// Throws InvalidArgument on parameters outside their admissible ranges.
  void validate(Index n, const Vector& x0) const;
};

/// Black-box objective: either a scalar f(x) or a residual vector r(x) with
/// f = 1/2 ||r||^2. Non-finite outputs count as f = +inf.
class Objective {
 public:
  using ScalarFn = std::function<double(const Vector&)>;
  using ResidualFn = std::function<Vector(const Vector&)>;

  static Objective scalar(ScalarFn fn);
  static Objective residual(ResidualFn fn, Index residual_count);

  bool is_residual() const { return static_cast<bool>(residual_); }
  Index value_dim() const { return is_residual() ? residual_count_ : 1; }
  /// Raw values at x: one entry (scalar mode) or the residual vector.
  Vector values(const Vector& x) const;
  /// f from raw values; +inf when any entry is non-finite.
  double objective(const Vector& values) const;

 private:
  ScalarFn scalar_;
  ResidualFn residual_;
  Index residual_count_ = 0;
};

enum class Branch { kCriticality, kSuccessful, kModelImproving, kUnsuccessful };
std::string_view to_string(Branch branch);

struct IterationRecord {
  int k = 0;
  Branch branch = Branch::kCriticality;
  double delta_before = 0.0;
  double delta_after = 0.0;
  double pi_m = 0.0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double f_best = 0.0;
  int n_evals = 0;

  bool model_fully_linear = false;  // flag at the start of the iteration
  bool pi_certified = true;
  bool radius_reduced = false;
  // Trust-region branches only.
  double model_decrease = std::numeric_limits<double>::quiet_NaN();
  double cauchy_required = std::numeric_limits<double>::quiet_NaN();
  bool fallback_used = false;
};

enum class Termination { kBudget, kSmallRadius, kStationary, kDegenerate, kEvaluationFailure, kStalled };
std::string_view to_string(Termination reason);
/// Clean terminations (small radius, stationarity) map to true.
bool is_clean(Termination reason);

struct SolverState {
  int k = 0;
  Vector x;
  double f = 0.0;
  double delta = 0.0;
  InterpolationSet set;
  QuadraticModel model;
  bool fully_linear = false;
  int evaluations = 0;
};

/// Evaluates the objective under a fixed budget.
class EvaluationBudget {
 public:
  EvaluationBudget(const Objective& objective, int budget) : objective_(objective), budget_(budget) {}

  /// Raw values at x, or nullopt when the budget is spent.
  std::optional<Vector> evaluate(const Vector& x);
  int used() const { return used_; }
  int remaining() const { return budget_ - used_; }
  const Objective& objective() const { return objective_; }

 private:
  const Objective& objective_;
  int budget_;
  int used_ = 0;
};

QuadraticModel build_model(const InterpolationSet& set, bool residual);

struct FullyLinearOutcome {
  int new_evaluations = 0;
  int swaps = 0;
  bool budget_exhausted = false;
  bool degenerate = false;
};

/// Repairs the interpolation set to be Lambda-poised (t >= 1) in
/// B(x_k, delta_k) ∩ C with all points within beta * min(delta_k, 1),
/// evaluating only the replaced points, and rebuilds the model.
FullyLinearOutcome make_fully_linear(SolverState& state, const ConvexRegion& region,
                                     EvaluationBudget& budget, const SolverConfig& config);

struct StepOutcome {
  SolverState state;
  Branch branch = Branch::kUnsuccessful;
  double rho = 0.0;
};

/// Applies the acceptance test and radius update for an evaluated trial
/// point x_k + step with raw values `trial_values`. Successful steps move the
/// base to the trial point and drop the point farthest from it; unsuccessful
/// steps swap the trial point in for the point farthest from x_k. A model
/// decrease <= 0 counts as unsuccessful.
StepOutcome update_after_step(const SolverState& state, const Vector& step, const Vector& trial_values,
                              bool residual, const SolverConfig& config);

struct SolveResult {
  Vector x;
  double f = 0.0;
  double pi_m = 0.0;
  bool fully_linear = false;
  std::vector<IterationRecord> history;
  Termination reason = Termination::kBudget;
  int evaluations = 0;
  double delta0 = 0.0;
  std::string message;
};

SolveResult solve(const Objective& objective, const ConvexRegion& region, const Vector& x0,
                  const SolverConfig& config = {});

/// CSV with header k,branch,delta_before,delta_after,pi_m,rho,f_best,n_evals
/// preceded by a schema comment line.
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& history);

}  // namespace cdfo
