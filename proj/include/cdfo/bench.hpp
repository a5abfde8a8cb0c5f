#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cdfo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct EvaluationEntry {
  int index = 0;  // 1-based
  bool feasible = true;
  double f_value = kInf;  // +inf for infeasible points
};

struct BenchRecord {
  std::string solver;
  std::string problem;
  std::string constraint;
  std::string noise;
  std::vector<EvaluationEntry> evaluations;
  double f0 = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> fstar;

  /// Smallest feasible value, +inf when there is none.
  double best_feasible() const;
  /// Instance key shared by all solvers on the same problem instance.
  std::string instance_key() const;
};

/// Index of the first evaluation whose running-best feasible value is at most
/// fstar + tau (f0 - fstar); +inf when the threshold is never met, the history
/// is empty, or fstar is unresolved.
double evals_to_solve(const BenchRecord& record, double tau);

/// Known optimum for unconstrained instances (when supplied), otherwise the
/// best feasible value over all records; nullopt when no record has one.
std::optional<double> resolve_fstar(const std::vector<const BenchRecord*>& records,
                                    std::optional<double> known_unconstrained);

/// Groups records by instance and fills fstar via resolve_fstar. `known` maps
/// (problem, constraint) to the known optimum. Returns the keys of instances
/// left without any feasible value.
std::vector<std::string> resolve_all(
    std::vector<BenchRecord>& records,
    const std::function<std::optional<double>(const std::string& problem, const std::string& constraint)>&
        known);

struct ProfileCurve {
  double tau = 0.0;
  int problem_count = 0;  // |P|, including instances no solver solved
  std::vector<std::string> solvers;
  /// Per solver: (alpha, pi) breakpoints, alpha ascending, starting at 1.
  std::vector<std::vector<std::pair<double, double>>> steps;

  /// pi_{S,tau}(alpha); 0 for alpha < 1 and for unknown solvers.
  double value(std::string_view solver, double alpha) const;
};

/// Performance profile over all instances present in `records` (fstar must be
/// resolved). Solvers appear in order of first occurrence.
ProfileCurve performance_profile(const std::vector<BenchRecord>& records, double tau);

/// Writes "solver,problem,constraint,noise,eval_index,feasible,f_value" after
/// a schema comment line and any extra `# key: value` metadata lines.
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records,
                     const std::vector<std::pair<std::string, std::string>>& metadata = {});
/// Parses the bench CSV; consecutive rows sharing solver and instance form one
/// record. Throws InvalidArgument on malformed input.
std::vector<BenchRecord> read_bench_csv(std::istream& in);

void write_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves);

/// Shortest decimal text that reads back to the same double; "inf" for +inf.
std::string format_double(double value);

}  // namespace cdfo
