#include "cdfo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace cdfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Moves a replacement point toward the base until its values are finite.
// Shrinking along y - y_0 scales l_t(y), so independence is preserved.
constexpr int kShrinkAttempts = 10;

}  // namespace

double SolverConfig::resolved_delta0(const Vector& x0) const {
  if (delta0) return *delta0;
  const double inf_norm = x0.size() > 0 ? x0.cwiseAbs().maxCoeff() : 0.0;
  return 0.1 * std::max(inf_norm, 1.0);
}

void SolverConfig::validate(Index n, const Vector& x0) const {
  const double gd = resolved_gamma_dec();
  if (!(gd > 0.0 && gd < 1.0)) throw InvalidArgument("config: gamma_dec must lie in (0,1)");
  if (!(gamma_inc > 1.0)) throw InvalidArgument("config: gamma_inc must exceed 1");
  const double d0 = resolved_delta0(x0);
  if (!(d0 > 0.0)) throw InvalidArgument("config: delta0 must be positive");
  if (!(d0 <= delta_max)) throw InvalidArgument("config: delta0 must not exceed delta_max");
  if (!(eps_c > 0.0) || !(mu > 0.0)) throw InvalidArgument("config: eps_c and mu must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("config: eta must lie in (0,1)");
  if (!(c1 > 0.0 && c1 < 1.0)) throw InvalidArgument("config: c1 must lie in (0,1)");
  if (!(lambda > 1.0)) throw InvalidArgument("config: lambda must exceed 1");
  if (!(beta >= 1.0)) throw InvalidArgument("config: beta must be at least 1");
  if (!(delta_end > 0.0)) throw InvalidArgument("config: delta_end must be positive");
  if (resolved_max_evaluations(n) < n + 1) {
    throw InvalidArgument("config: max_evaluations must be at least n + 1");
  }
  if (pi_tol && !(*pi_tol >= 0.0)) throw InvalidArgument("config: pi_tol must be nonnegative");
}

Objective Objective::scalar(ScalarFn fn) {
  Objective o;
  o.scalar_ = std::move(fn);
  return o;
}

Objective Objective::residual(ResidualFn fn, Index residual_count) {
  if (residual_count < 1) throw InvalidArgument("objective: residual count must be positive");
  Objective o;
  o.residual_ = std::move(fn);
  o.residual_count_ = residual_count;
  return o;
}

Vector Objective::values(const Vector& x) const {
  if (residual_) {
    Vector r = residual_(x);
    if (r.size() != residual_count_) throw InvalidArgument("objective: residual length mismatch");
    return r;
  }
  Vector v(1);
  v(0) = scalar_(x);
  return v;
}

double Objective::objective(const Vector& values) const {
  if (!values.allFinite()) return kInf;
  const double f = residual_ ? 0.5 * values.squaredNorm() : values(0);
  return std::isfinite(f) ? f : kInf;
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::kCriticality: return "criticality";
    case Branch::kSuccessful: return "successful";
    case Branch::kModelImproving: return "model-improving";
    case Branch::kUnsuccessful: return "unsuccessful";
  }
  return "unknown";
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::kBudget: return "evaluation budget exhausted";
    case Termination::kSmallRadius: return "trust-region radius below delta_end";
    case Termination::kStationary: return "criticality measure below pi_tol";
    case Termination::kDegenerate: return "degenerate geometry";
    case Termination::kEvaluationFailure: return "objective evaluation failed";
    case Termination::kStalled: return "no progress";
  }
  return "unknown";
}

bool is_clean(Termination reason) {
  return reason == Termination::kSmallRadius || reason == Termination::kStationary;
}

std::optional<Vector> EvaluationBudget::evaluate(const Vector& x) {
  if (used_ >= budget_) return std::nullopt;
  ++used_;
  return objective_.values(x);
}

QuadraticModel build_model(const InterpolationSet& set, bool residual) {
  if (residual) return gauss_newton_model(build_residual_model(set));
  const auto lm = build_linear_model(set);
  return QuadraticModel::linear(lm.constant, lm.gradient, lm.base);
}

FullyLinearOutcome make_fully_linear(SolverState& state, const ConvexRegion& region,
                                     EvaluationBudget& budget, const SolverConfig& config) {
  FullyLinearOutcome out;
  const bool residual = budget.objective().is_residual();
  auto geo = improve_geometry(state.set, region, state.delta, config.lambda, config.beta, config.fista);
  out.swaps = geo.swaps;
  bool certified = geo.certified;
  InterpolationSet set = geo.set;
  const Vector y0 = set.base();
  for (Index t : geo.replaced) {
    Vector y = set.point(t);
    bool done = false;
    for (int attempt = 0; attempt <= kShrinkAttempts && !done; ++attempt) {
      auto values = budget.evaluate(y);
      if (!values) {
        out.budget_exhausted = true;
        break;
      }
      ++out.new_evaluations;
      if (values->allFinite()) {
        set = attempt == 0 ? set.with_value(t, *values) : set.with_point(t, y, *values);
        done = true;
      } else {
        certified = false;
        y = y0 + 0.5 * (y - y0);
      }
    }
    if (out.budget_exhausted) break;
    if (!done) {
      out.degenerate = true;
      break;
    }
  }
  state.evaluations = budget.used();
  if (out.budget_exhausted || out.degenerate) {
    state.fully_linear = false;
    return out;
  }
  state.set = std::move(set);
  state.model = build_model(state.set, residual);
  state.fully_linear = certified;
  return out;
}

StepOutcome update_after_step(const SolverState& state, const Vector& step, const Vector& trial_values,
                              bool residual, const SolverConfig& config) {
  StepOutcome out{state, Branch::kUnsuccessful, -kInf};
  SolverState& next = out.state;
  const double model_decrease = state.model.decrease(step);
  const double f_trial = [&] {
    if (!trial_values.allFinite()) return kInf;
    const double f = residual ? 0.5 * trial_values.squaredNorm() : trial_values(0);
    return std::isfinite(f) ? f : kInf;
  }();
  if (model_decrease > 0.0) out.rho = (state.f - f_trial) / model_decrease;

  const Vector trial = state.x + step;
  const Index n = state.set.dim();

  if (model_decrease > 0.0 && out.rho >= config.eta) {
    out.branch = Branch::kSuccessful;
    next.x = trial;
    next.f = f_trial;
    next.delta = std::min(config.gamma_inc * state.delta, config.delta_max);
    // New base at the trial point; drop the old point farthest from it.
    std::vector<Index> order(static_cast<std::size_t>(n + 1));
    std::iota(order.begin(), order.end(), Index{0});
    std::vector<double> dist(order.size());
    for (Index t = 0; t <= n; ++t) dist[static_cast<std::size_t>(t)] = (state.set.point(t) - trial).norm();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return dist[static_cast<std::size_t>(a)] > dist[static_cast<std::size_t>(b)];
    });
    for (Index drop : order) {
      Matrix pts(n, n + 1);
      Matrix vals(n + 1, state.set.value_dim());
      pts.col(0) = trial;
      vals.row(0) = trial_values.transpose();
      Index col = 1;
      for (Index t = 0; t <= n; ++t) {
        if (t == drop) continue;
        pts.col(col) = state.set.point(t);
        vals.row(col) = state.set.values().row(t);
        ++col;
      }
      try {
        next.set = InterpolationSet(std::move(pts), std::move(vals));
        break;
      } catch (const GeometryDegenerate&) {
      }
    }
    next.model = build_model(next.set, residual);
    next.fully_linear = false;
    return out;
  }

  if (model_decrease > 0.0 && !state.fully_linear) {
    out.branch = Branch::kModelImproving;
    return out;
  }

  out.branch = Branch::kUnsuccessful;
  next.delta = config.resolved_gamma_dec() * state.delta;
  if (std::isfinite(f_trial) && model_decrease > 0.0) {
    std::vector<Index> order;
    for (Index t = 1; t <= n; ++t) order.push_back(t);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return (state.set.point(a) - state.x).norm() > (state.set.point(b) - state.x).norm();
    });
    for (Index t : order) {
      try {
        next.set = state.set.with_point(t, trial, trial_values);
        next.model = build_model(next.set, residual);
        next.fully_linear = false;
        break;
      } catch (const GeometryDegenerate&) {
      }
    }
  }
  return out;
}

SolveResult solve(const Objective& objective, const ConvexRegion& region, const Vector& x0_in,
                  const SolverConfig& config) {
  const Index n = region.dim();
  if (x0_in.size() != n) throw InvalidArgument("solve: starting point dimension mismatch");
  config.validate(n, x0_in);

  Vector x0 = x0_in;
  if (!contains(region, x0)) {
    try {
      x0 = project(region, x0);
    } catch (const ConvergenceFailure& e) {
      throw InvalidArgument(std::string("solve: infeasible start could not be projected: ") + e.what());
    }
  }

  SolveResult result;
  result.delta0 = config.resolved_delta0(x0_in);
  EvaluationBudget budget(objective, config.resolved_max_evaluations(n));
  const bool residual = objective.is_residual();
  const double gamma_dec = config.resolved_gamma_dec();

  auto finish = [&](Termination reason, const SolverState* state) {
    result.reason = reason;
    result.evaluations = budget.used();
    if (state != nullptr) {
      result.x = state->x;
      result.f = state->f;
      result.fully_linear = state->fully_linear;
    }
    return result;
  };

  result.x = x0;
  result.f = kInf;
  std::optional<SolverState> live;
  try {
    auto v0 = budget.evaluate(x0);
    const double f0 = objective.objective(*v0);
    result.f = f0;
    if (!std::isfinite(f0)) {
      result.message = "objective is not finite at the starting point";
      return finish(Termination::kDegenerate, nullptr);
    }

    InterpolationSet set0 = initial_feasible_set(region, x0, config.beta * std::min(result.delta0, 1.0),
                                                 config.rng_seed, objective.value_dim());
    set0 = set0.with_value(0, *v0);
    SolverState& state =
        live.emplace(SolverState{0, x0, f0, result.delta0, set0, QuadraticModel{}, false, budget.used()});
    for (Index t = 1; t <= n; ++t) {
      Vector y = set0.point(t);
      bool done = false;
      for (int attempt = 0; attempt <= kShrinkAttempts && !done; ++attempt) {
        auto v = budget.evaluate(y);
        if (!v) return finish(Termination::kBudget, &state);
        if (v->allFinite()) {
          state.set = state.set.with_point(t, y, *v);
          done = true;
        } else {
          y = x0 + 0.5 * (y - x0);
        }
      }
      if (!done) {
        result.message = "no finite objective values near the starting point";
        return finish(Termination::kDegenerate, &state);
      }
    }
    state.model = build_model(state.set, residual);
    state.evaluations = budget.used();

    int idle_iterations = 0;
    const long iteration_cap = 50L * budget.remaining() + 1000L;
    for (long iter = 0;; ++iter) {
      if (budget.remaining() <= 0) return finish(Termination::kBudget, &state);
      if (iter >= iteration_cap) {
        result.message = "iteration cap reached without new evaluations";
        return finish(Termination::kStalled, &state);
      }

      const auto crit = criticality_measure(state.model.gradient, region, state.x, config.fista);
      result.pi_m = crit.value;
      // An uncertified criticality value is handled as if the model were not
      // fully linear, unless repeated repairs have stopped changing anything.
      const bool treat_fully_linear = state.fully_linear && (crit.certified || idle_iterations >= 2);

      if (config.pi_tol && crit.value <= *config.pi_tol && treat_fully_linear) {
        return finish(Termination::kStationary, &state);
      }

      IterationRecord rec;
      rec.k = state.k;
      rec.delta_before = state.delta;
      rec.pi_m = crit.value;
      rec.model_fully_linear = treat_fully_linear;
      rec.pi_certified = crit.certified;
      const int evals_before = budget.used();
      const double delta_before = state.delta;

      bool set_changed = false;
      if (crit.value < config.eps_c && (crit.value < state.delta / config.mu || !treat_fully_linear)) {
        rec.branch = Branch::kCriticality;
        if (treat_fully_linear) {
          state.delta *= gamma_dec;
          rec.radius_reduced = true;
        }
        if (state.delta >= config.delta_end) {
          const auto fl = make_fully_linear(state, region, budget, config);
          set_changed = fl.swaps > 0 || fl.new_evaluations > 0;
          if (fl.degenerate) {
            rec.delta_after = state.delta;
            rec.f_best = state.f;
            rec.n_evals = budget.used();
            result.history.push_back(rec);
            result.message = "replacement points evaluate to non-finite values";
            return finish(Termination::kDegenerate, &state);
          }
          if (fl.budget_exhausted) {
            rec.delta_after = state.delta;
            rec.f_best = state.f;
            rec.n_evals = budget.used();
            result.history.push_back(rec);
            return finish(Termination::kBudget, &state);
          }
        }
      } else {
        auto tr = solve_trust_region(state.model, region, state.delta, config.fista);
        Vector step = std::move(tr.step);
        double decrease = state.model.decrease(step);
        const double required = cauchy_threshold(state.model, crit.value, state.delta, config.c1);
        if (decrease < required) {
          step = fallback_cauchy_step(state.model, region, state.delta, config.fista, config.c1, &crit);
          decrease = state.model.decrease(step);
          rec.fallback_used = true;
        }
        rec.model_decrease = decrease;
        rec.cauchy_required = required;

        Vector trial_values = Vector::Constant(objective.value_dim(), kInf);
        if (decrease > 0.0) {
          auto v = budget.evaluate(state.x + step);
          if (!v) return finish(Termination::kBudget, &state);
          trial_values = std::move(*v);
        }
        // update_after_step sees the flag the branch logic used.
        SolverState view = state;
        view.fully_linear = treat_fully_linear;
        auto outcome = update_after_step(view, step, trial_values, residual, config);
        rec.branch = outcome.branch;
        if (decrease > 0.0) rec.rho = outcome.rho;
        state = std::move(outcome.state);
        state.k = rec.k;
        set_changed = outcome.branch != Branch::kModelImproving;
        if (outcome.branch == Branch::kUnsuccessful) rec.radius_reduced = true;
        if (outcome.branch == Branch::kModelImproving) {
          const auto fl = make_fully_linear(state, region, budget, config);
          set_changed = true;
          if (fl.degenerate || fl.budget_exhausted) {
            rec.delta_after = state.delta;
            rec.f_best = state.f;
            rec.n_evals = budget.used();
            result.history.push_back(rec);
            if (fl.degenerate) result.message = "replacement points evaluate to non-finite values";
            return finish(fl.degenerate ? Termination::kDegenerate : Termination::kBudget, &state);
          }
        }
      }

      state.evaluations = budget.used();
      rec.delta_after = state.delta;
      rec.f_best = state.f;
      rec.n_evals = budget.used();
      result.history.push_back(rec);
      ++state.k;

      const bool idle = budget.used() == evals_before && state.delta == delta_before && !set_changed;
      idle_iterations = idle ? idle_iterations + 1 : 0;

      if (state.delta < config.delta_end) return finish(Termination::kSmallRadius, &state);
    }
  } catch (const GeometryDegenerate& e) {
    result.message = e.what();
    return finish(Termination::kDegenerate, live ? &*live : nullptr);
  } catch (const ConvergenceFailure& e) {
    result.message = e.what();
    return finish(Termination::kDegenerate, live ? &*live : nullptr);
  } catch (const std::exception& e) {
    result.message = e.what();
    return finish(Termination::kEvaluationFailure, live ? &*live : nullptr);
  }
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "# schema: cdfo-trace v1\n";
  out << "k,branch,delta_before,delta_after,pi_m,rho,f_best,n_evals\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.k,
                  std::string(to_string(r.branch)).c_str(), r.delta_before, r.delta_after, r.pi_m, r.rho,
                  r.f_best, r.n_evals);
    out << buf;
  }
}

}  // namespace cdfo
