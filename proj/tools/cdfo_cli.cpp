// Command-line front end: solve, bench, geometry, problems list.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdfo/bench.hpp"
#include "cdfo/interpolation.hpp"
#include "cdfo/problems.hpp"
#include "cdfo/region_io.hpp"
#include "cdfo/runner.hpp"
#include "cdfo/solver.hpp"

namespace fs = std::filesystem;
using namespace cdfo;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUnclean = 2;

// Numeric SolverConfig flags; unset flags keep the solver defaults.
struct ConfigFlags {
  std::vector<std::pair<std::string, std::string>> values;

  void attach(CLI::App* app) {
    for (const char* name : {"delta0", "delta_max", "gamma_dec", "gamma_inc", "eps_c", "mu", "eta", "c1",
                             "lambda", "beta", "max_evaluations", "delta_end", "pi_tol", "noise_mode"}) {
      auto* slot = &storage_.emplace_back();
      app->add_option(std::string("--") + name, *slot, std::string("solver setting ") + name)
          ->each([this, name](const std::string& v) { values.emplace_back(name, v); });
    }
  }

  void apply(SolverConfig& config) const {
    for (const auto& [k, v] : values) set_config_field(config, k, v);
  }

 private:
  std::list<std::string> storage_;
};

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CDFO_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_vector(const Vector& x) {
  std::string s = "[";
  for (Index i = 0; i < x.size(); ++i) s += (i ? ", " : "") + fmt(x(i));
  return s + "]";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// One point per line, whitespace separated; the first point is the base.
Matrix read_point_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open set file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw InvalidArgument("set file: bad number in line '" + line + "'");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("set file: no points");
  const auto n = static_cast<Index>(rows.front().size());
  Matrix pts(n, static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (static_cast<Index>(rows[j].size()) != n) throw InvalidArgument("set file: points differ in dimension");
    for (Index i = 0; i < n; ++i) pts(i, static_cast<Index>(j)) = rows[j][static_cast<std::size_t>(i)];
  }
  return pts;
}

int cmd_solve(const std::string& problem_name, const std::string& constraint, const std::string& noise,
              double sigma, std::uint64_t seed, const ConfigFlags& flags, const std::string& trace,
              const std::string& out_flag) {
  const auto* problem = find_problem(problem_name);
  if (!problem) {
    std::cerr << "error: unknown problem '" << problem_name << "' (see `problems list`)\n";
    return kExitError;
  }
  SolverVariant variant;
  flags.apply(variant.config);
  const auto kind = parse_constraint_kind(constraint);
  const auto noise_kind = parse_noise_kind(noise);
  const auto result = run_instance(variant, *problem, kind, noise_kind, sigma, seed);
  SolverConfig effective = variant.config;
  effective.noise_mode = effective.noise_mode || noise_kind != NoiseKind::kNone;
  if (!result.error.empty()) {
    std::cerr << "error: " << result.error << "\n";
    return kExitError;
  }

  fs::path trace_path = trace;
  if (trace_path.empty()) {
    const auto dir = output_dir(out_flag);
    fs::create_directories(dir);
    trace_path = dir / ("trace_" + problem->name + "_" + constraint + ".csv");
  }
  std::ofstream out(trace_path);
  if (!out) {
    std::cerr << "error: cannot write " << trace_path << "\n";
    return kExitError;
  }
  write_trace_csv(out, result.result.history);

  const auto& r = result.result;
  std::cout << "problem      " << problem->name << " (n=" << problem->n << ", m=" << problem->m << ")\n"
            << "constraint   " << constraint << "\n"
            << "noise        " << noise << " sigma=" << fmt(sigma) << "\n"
            << "delta0       " << fmt(r.delta0) << "\n"
            << "gamma_dec    " << fmt(effective.resolved_gamma_dec()) << "\n"
            << "x*           " << fmt_vector(r.x) << "\n"
            << "f*           " << fmt(r.f) << "\n"
            << "pi_m         " << fmt(r.pi_m) << "\n"
            << "fully_linear " << (r.fully_linear ? "yes" : "no") << "\n"
            << "evaluations  " << r.evaluations << "\n"
            << "reason       " << to_string(r.reason) << "\n"
            << "trace        " << trace_path.string() << "\n";
  if (!r.message.empty()) std::cout << "message      " << r.message << "\n";
  return is_clean(r.reason) ? 0 : kExitUnclean;
}

int cmd_bench(const std::string& problems, const std::string& constraints, const std::string& noise, double sigma,
              std::uint64_t seed, int jobs, const std::vector<std::string>& variants,
              const std::vector<std::string>& imports, const ConfigFlags& flags, const std::string& out_flag) {
  RunManifest manifest;
  manifest.problems = split_list(problems);
  if (!constraints.empty()) {
    manifest.constraints.clear();
    for (const auto& c : split_list(constraints)) manifest.constraints.push_back(parse_constraint_kind(c));
  }
  manifest.noise = parse_noise_kind(noise);
  manifest.sigma = sigma;
  manifest.seed = seed;
  manifest.jobs = jobs;
  if (!variants.empty()) {
    manifest.solvers.clear();
    for (const auto& v : variants) manifest.solvers.push_back(parse_variant(v));
  }
  for (auto& v : manifest.solvers) flags.apply(v.config);

  const auto results = run_matrix(manifest);
  std::vector<BenchRecord> records;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      std::cerr << "warning: " << r.record.solver << " on " << r.record.instance_key() << " failed: " << r.error
                << "\n";
    }
    records.push_back(r.record);
  }
  for (const auto& path : imports) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open imported trace " + path);
    for (auto& rec : read_bench_csv(in)) {
      const auto* p = find_problem(rec.problem);
      if (!p) throw InvalidArgument("imported trace names unknown problem '" + rec.problem + "'");
      rec.f0 = starting_value(*p, parse_constraint_kind(rec.constraint));
      records.push_back(std::move(rec));
    }
  }
  for (const auto& key : resolve_all(records, known_optimum)) {
    std::cerr << "note: no feasible value for " << key << "; no solver is credited on it\n";
  }

  const auto dir = output_dir(out_flag);
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> meta = {
      {"noise", noise}, {"sigma", format_double(sigma)}, {"seed", std::to_string(seed)}};
  if (manifest.noise != NoiseKind::kNone) {
    meta.emplace_back("noise_mode", "on");
    meta.emplace_back("f_value", "noiseless objective at evaluated point");
  }
  {
    std::ofstream out(dir / "bench_records.csv");
    write_bench_csv(out, records, meta);
  }
  const std::pair<double, const char*> taus[] = {{1e-1, "1e-1"}, {1e-3, "1e-3"}, {1e-5, "1e-5"}};
  for (const auto& [tau, label] : taus) {
    std::ofstream out(dir / (std::string("profile_tau") + label + ".csv"));
    write_profile_csv(out, {performance_profile(records, tau)});
  }

  int unclean = 0;
  for (const auto& r : results) unclean += r.error.empty() && is_clean(r.result.reason) ? 0 : 1;
  std::cout << results.size() << " runs, " << records.size() << " records, " << unclean
            << " without clean termination; outputs in " << dir.string() << "\n";
  return 0;
}

int cmd_geometry(const std::string& set_file, const std::string& region_file, const std::string& constraint,
                 double delta, double lambda) {
  const Matrix pts = read_point_file(set_file);
  const Index n = pts.rows();
  if (pts.cols() != n + 1) {
    std::cerr << "error: need " << n + 1 << " points in dimension " << n << ", got " << pts.cols() << "\n";
    return kExitError;
  }
  const ConvexRegion region =
      !region_file.empty() ? load_region(region_file) : constraint_region(parse_constraint_kind(constraint), n);
  if (region.dim() != n) {
    std::cerr << "error: region dimension " << region.dim() << " does not match points\n";
    return kExitError;
  }
  bool bad = false;
  for (Index t = 0; t < pts.cols(); ++t) {
    const double d = distance(region, pts.col(t));
    if (d > kFeasibilityTol) {
      std::cerr << "infeasible point " << t << ": " << fmt_vector(pts.col(t)) << " (distance " << fmt(d) << ")\n";
      bad = true;
    }
  }
  if (bad) return kExitError;

  std::optional<InterpolationSet> set;
  try {
    set.emplace(InterpolationSet::from_points(pts, 1));
  } catch (const GeometryDegenerate& e) {
    std::cerr << "error: rank-deficient set: " << e.what() << "\n";
    return kExitError;
  }
  const auto report = poisedness_constant(*set, region, delta, {});
  std::cout << format_geometry(*set, report);
  const bool poised = report.overall() <= lambda;
  std::cout << "Lambda-poised (Lambda = " << fmt(lambda) << "): " << (poised ? "yes" : "no") << "\n";
  return poised && report.certified ? 0 : kExitUnclean;
}

int cmd_problems_list() {
  std::cout << "name,n,m,x0,fstar\n";
  for (const auto& p : suite()) {
    std::string x0;
    for (Index i = 0; i < p.n; ++i) x0 += (i ? " " : "") + fmt(p.x0(i));
    std::cout << p.name << ',' << p.n << ',' << p.m << ',' << x0 << ',' << (p.fstar ? fmt(*p.fstar) : "unknown")
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasible derivative-free trust-region solver"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "solve one problem instance and write its trace");
  std::string problem, constraint = "unconstrained", noise = "none", trace, out_dir;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  ConfigFlags solve_flags;
  solve->add_option("--problem", problem, "suite problem name")->required();
  solve->add_option("--constraint", constraint, "unconstrained, box, ball or halfspace");
  solve->add_option("--noise", noise, "none, multiplicative or additive");
  solve->add_option("--sigma", sigma, "noise standard deviation");
  solve->add_option("--seed", seed, "global seed");
  solve->add_option("--trace", trace, "trace CSV path");
  solve->add_option("--output-dir", out_dir, "output directory (default $CDFO_OUTPUT_DIR or .)");
  solve_flags.attach(solve);

  auto* bench = app.add_subcommand("bench", "run the benchmark matrix and write records and profiles");
  std::string problems, constraints, bench_noise = "none", bench_out;
  double bench_sigma = 0.0;
  std::uint64_t bench_seed = 0;
  int jobs = 1;
  std::vector<std::string> variants, imports;
  ConfigFlags bench_flags;
  bench->add_option("--problems", problems, "comma-separated problem names (default: all)");
  bench->add_option("--constraints", constraints, "comma-separated constraint kinds (default: all four)");
  bench->add_option("--noise", bench_noise, "none, multiplicative or additive");
  bench->add_option("--sigma", bench_sigma, "noise standard deviation");
  bench->add_option("--seed", bench_seed, "global seed");
  bench->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--variant", variants, "solver variant id[:key=value,...]; repeatable");
  bench->add_option("--import", imports, "external bench CSV to merge before profiling; repeatable");
  bench->add_option("--output-dir", bench_out, "output directory (default $CDFO_OUTPUT_DIR or .)");
  bench_flags.attach(bench);

  auto* geometry = app.add_subcommand("geometry", "report the Lambda-poisedness of a point set");
  std::string set_file, region_file, geo_constraint = "unconstrained";
  double delta = 1.0, lambda = 10.0;
  geometry->add_option("--set", set_file, "point file, base point first")->required()->check(CLI::ExistingFile);
  geometry->add_option("--region", region_file, "JSON region file")->check(CLI::ExistingFile);
  geometry->add_option("--constraint", geo_constraint, "suite constraint kind when no region file is given");
  geometry->add_option("--delta", delta, "trust-region radius");
  geometry->add_option("--lambda", lambda, "poisedness threshold");

  auto* problems_cmd = app.add_subcommand("problems", "problem registry");
  problems_cmd->require_subcommand(1);
  auto* list = problems_cmd->add_subcommand("list", "list suite problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(problem, constraint, noise, sigma, seed, solve_flags, trace, out_dir);
    if (*bench) {
      return cmd_bench(problems, constraints, bench_noise, bench_sigma, bench_seed, jobs, variants, imports,
                       bench_flags, bench_out);
    }
    if (*geometry) return cmd_geometry(set_file, region_file, geo_constraint, delta, lambda);
    if (*list) return cmd_problems_list();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
