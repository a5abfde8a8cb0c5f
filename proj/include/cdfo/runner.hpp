#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cdfo/bench.hpp"
#include "cdfo/problems.hpp"
#include "cdfo/solver.hpp"

namespace cdfo {

struct SolverVariant {
  std::string id = "cdfo";
  SolverConfig config{};
};

/// Benchmark matrix: every solver variant on every selected problem under
/// every selected constraint, with one noise setting.
struct RunManifest {
  std::vector<std::string> problems;  // empty: the whole suite
  std::vector<ConstraintKind> constraints{kAllConstraints.begin(), kAllConstraints.end()};
  NoiseKind noise = NoiseKind::kNone;
  double sigma = 0.0;
  std::vector<SolverVariant> solvers{SolverVariant{}};
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Outcome of one (solver, problem, constraint, noise) run.
struct InstanceResult {
  BenchRecord record;
  SolveResult result;
  std::uint64_t seed = 0;
  double max_infeasibility = 0.0;  // largest distance to C over all evaluated points
  int infeasible_evaluations = 0;  // evaluations with distance > kFeasibilityTol
  std::string error;               // non-empty when the run threw
};

/// hash(global seed, solver, problem, constraint, noise), independent of
/// scheduling order.
std::uint64_t instance_seed(std::uint64_t global_seed, std::string_view solver, std::string_view problem,
                            std::string_view constraint, std::string_view noise);

/// Noiseless 1/2 ||r||^2 at proj_C(x0).
double starting_value(const LeastSquaresProblem& problem, ConstraintKind constraint);

/// Known optimum used for f* resolution: the problem's f* when unconstrained.
std::optional<double> known_optimum(const std::string& problem, const std::string& constraint);

/// Runs one instance. The record's f_value column holds the noiseless
/// objective at each evaluated point, so noisy runs are scored on the true f.
InstanceResult run_instance(const SolverVariant& variant, const LeastSquaresProblem& problem,
                            ConstraintKind constraint, NoiseKind noise, double sigma, std::uint64_t global_seed);

/// Runs the matrix on `manifest.jobs` worker threads. Results come back in
/// manifest order (solver, problem, constraint), whatever the scheduling.
std::vector<InstanceResult> run_matrix(const RunManifest& manifest);

/// Parses "id:key=value,key=value" into a variant, with keys named after
/// SolverConfig fields.
SolverVariant parse_variant(std::string_view text);
/// Sets one SolverConfig field by name; throws InvalidArgument on unknown keys.
void set_config_field(SolverConfig& config, std::string_view key, std::string_view value);

}  // namespace cdfo
