#include "cdfo/runner.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <thread>

namespace cdfo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view text) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // Field separator, so ("ab","c") and ("a","bc") differ.
  h ^= 0x1f;
  h *= 0x100000001b3ULL;
  return h;
}

double parse_number(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t global_seed, std::string_view solver, std::string_view problem,
                            std::string_view constraint, std::string_view noise) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, solver);
  h = fnv1a(h, problem);
  h = fnv1a(h, constraint);
  h = fnv1a(h, noise);
  return splitmix64(h ^ splitmix64(global_seed));
}

double starting_value(const LeastSquaresProblem& problem, ConstraintKind constraint) {
  const auto region = constraint_region(constraint, problem.n);
  return problem.objective(project(region, problem.x0));
}

std::optional<double> known_optimum(const std::string& problem, const std::string& constraint) {
  if (constraint != to_string(ConstraintKind::kUnconstrained)) return std::nullopt;
  const auto* p = find_problem(problem);
  return p ? p->fstar : std::nullopt;
}

InstanceResult run_instance(const SolverVariant& variant, const LeastSquaresProblem& problem,
                            ConstraintKind constraint, NoiseKind noise, double sigma, std::uint64_t global_seed) {
  InstanceResult out;
  auto& rec = out.record;
  rec.solver = variant.id;
  rec.problem = problem.name;
  rec.constraint = std::string(to_string(constraint));
  rec.noise = std::string(to_string(noise));
  out.seed = instance_seed(global_seed, rec.solver, rec.problem, rec.constraint, rec.noise);

  const auto region = constraint_region(constraint, problem.n);
  rec.f0 = problem.objective(project(region, problem.x0));

  NoisyResiduals residuals(problem, NoiseSpec{noise, sigma, out.seed});
  const bool noisy = noise != NoiseKind::kNone;
  auto fn = [&](const Vector& x) -> Vector {
    const double dist = distance(region, x);
    out.max_infeasibility = std::max(out.max_infeasibility, dist);
    const bool feasible = dist <= kFeasibilityTol;
    if (!feasible) ++out.infeasible_evaluations;
    Vector r = residuals(x);
    double f = noisy ? problem.objective(x) : 0.5 * r.squaredNorm();
    if (!std::isfinite(f)) f = kInf;
    rec.evaluations.push_back({static_cast<int>(rec.evaluations.size()) + 1, feasible, feasible ? f : kInf});
    return r;
  };

  SolverConfig config = variant.config;
  config.noise_mode = config.noise_mode || noisy;
  config.rng_seed = out.seed;
  try {
    out.result = solve(Objective::residual(fn, problem.m), region, problem.x0, config);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<InstanceResult> run_matrix(const RunManifest& manifest) {
  std::vector<const LeastSquaresProblem*> problems;
  if (manifest.problems.empty()) {
    for (const auto& p : suite()) problems.push_back(&p);
  } else {
    for (const auto& name : manifest.problems) {
      const auto* p = find_problem(name);
      if (!p) throw InvalidArgument("unknown problem '" + name + "'");
      problems.push_back(p);
    }
  }

  struct Task {
    const SolverVariant* variant;
    const LeastSquaresProblem* problem;
    ConstraintKind constraint;
  };
  std::vector<Task> tasks;
  for (const auto& v : manifest.solvers) {
    for (const auto* p : problems) {
      for (auto c : manifest.constraints) tasks.push_back({&v, p, c});
    }
  }

  std::vector<InstanceResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      results[i] = run_instance(*t.variant, *t.problem, t.constraint, manifest.noise, manifest.sigma, manifest.seed);
    }
  };
  const int jobs = std::max(1, std::min<int>(manifest.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

void set_config_field(SolverConfig& config, std::string_view key, std::string_view value) {
  auto num = [&] { return parse_number(key, value); };
  if (key == "delta0") {
    config.delta0 = num();
  } else if (key == "delta_max") {
    config.delta_max = num();
  } else if (key == "gamma_dec") {
    config.gamma_dec = num();
  } else if (key == "gamma_inc") {
    config.gamma_inc = num();
  } else if (key == "eps_c") {
    config.eps_c = num();
  } else if (key == "mu") {
    config.mu = num();
  } else if (key == "eta") {
    config.eta = num();
  } else if (key == "c1") {
    config.c1 = num();
  } else if (key == "lambda") {
    config.lambda = num();
  } else if (key == "beta") {
    config.beta = num();
  } else if (key == "max_evaluations") {
    config.max_evaluations = static_cast<int>(num());
  } else if (key == "delta_end") {
    config.delta_end = num();
  } else if (key == "pi_tol") {
    config.pi_tol = num();
  } else if (key == "noise_mode") {
    if (value != "true" && value != "false" && value != "1" && value != "0") {
      throw InvalidArgument("noise_mode expects true or false");
    }
    config.noise_mode = value == "true" || value == "1";
  } else if (key == "rng_seed") {
    config.rng_seed = static_cast<std::uint64_t>(num());
  } else {
    throw InvalidArgument("unknown solver setting '" + std::string(key) + "'");
  }
}

SolverVariant parse_variant(std::string_view text) {
  SolverVariant v;
  const auto colon = text.find(':');
  v.id = std::string(text.substr(0, colon));
  if (v.id.empty() || v.id.find(',') != std::string::npos) throw InvalidArgument("variant needs an id");
  if (colon == std::string_view::npos) return v;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("variant setting must be key=value");
    set_config_field(v.config, item.substr(0, eq), item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return v;
}

}  // namespace cdfo
