#include "cdfo/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cdfo/types.hpp"

namespace cdfo {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, int line_no) {
  if (text == "inf" || text == "+inf") return kInf;
  if (text == "-inf") return -kInf;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw InvalidArgument("bench csv line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double BenchRecord::best_feasible() const {
  double best = kInf;
  for (const auto& e : evaluations) {
    if (e.feasible && e.f_value < best) best = e.f_value;
  }
  return best;
}

std::string BenchRecord::instance_key() const { return problem + "/" + constraint + "/" + noise; }

double evals_to_solve(const BenchRecord& record, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("evals_to_solve: tau must lie in (0, 1)");
  if (record.evaluations.empty() || !record.fstar) return kInf;
  const double fstar = *record.fstar;
  const double threshold = fstar + tau * (record.f0 - fstar);
  double best = kInf;
  for (const auto& e : record.evaluations) {
    if (e.feasible) best = std::min(best, e.f_value);
    if (best <= threshold) return e.index;
  }
  return kInf;
}

std::optional<double> resolve_fstar(const std::vector<const BenchRecord*>& records,
                                    std::optional<double> known_unconstrained) {
  if (records.empty()) throw InvalidArgument("resolve_fstar: no records");
  if (known_unconstrained) return known_unconstrained;
  double best = kInf;
  for (const auto* r : records) best = std::min(best, r->best_feasible());
  if (std::isinf(best)) return std::nullopt;
  return best;
}

std::vector<std::string> resolve_all(
    std::vector<BenchRecord>& records,
    const std::function<std::optional<double>(const std::string&, const std::string&)>& known) {
  std::map<std::string, std::vector<BenchRecord*>> groups;
  std::vector<std::string> order;
  for (auto& r : records) {
    auto [it, inserted] = groups.try_emplace(r.instance_key());
    if (inserted) order.push_back(it->first);
    it->second.push_back(&r);
  }
  std::vector<std::string> unresolved;
  for (const auto& key : order) {
    auto& group = groups[key];
    std::vector<const BenchRecord*> view(group.begin(), group.end());
    const auto fstar = resolve_fstar(view, known(group.front()->problem, group.front()->constraint));
    if (!fstar) unresolved.push_back(key);
    for (auto* r : group) r->fstar = fstar;
  }
  return unresolved;
}

double ProfileCurve::value(std::string_view solver, double alpha) const {
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    if (solvers[s] != solver) continue;
    double v = 0.0;
    for (const auto& [a, pi] : steps[s]) {
      if (a > alpha) break;
      v = pi;
    }
    return v;
  }
  return 0.0;
}

ProfileCurve performance_profile(const std::vector<BenchRecord>& records, double tau) {
  ProfileCurve curve;
  curve.tau = tau;
  std::vector<std::string> instances;
  std::map<std::string, std::map<std::string, double>> counts;  // instance -> solver -> N_p
  for (const auto& r : records) {
    if (std::find(curve.solvers.begin(), curve.solvers.end(), r.solver) == curve.solvers.end()) {
      curve.solvers.push_back(r.solver);
    }
    auto [it, inserted] = counts.try_emplace(r.instance_key());
    if (inserted) instances.push_back(it->first);
    it->second[r.solver] = evals_to_solve(r, tau);
  }
  curve.problem_count = static_cast<int>(instances.size());

  std::vector<std::vector<double>> ratios(curve.solvers.size());
  for (const auto& key : instances) {
    const auto& per_solver = counts[key];
    double best = kInf;
    for (const auto& [solver, n] : per_solver) best = std::min(best, n);
    if (std::isinf(best)) continue;
    for (std::size_t s = 0; s < curve.solvers.size(); ++s) {
      auto it = per_solver.find(curve.solvers[s]);
      if (it != per_solver.end() && std::isfinite(it->second)) ratios[s].push_back(it->second / best);
    }
  }

  const double denom = std::max(curve.problem_count, 1);
  curve.steps.resize(curve.solvers.size());
  for (std::size_t s = 0; s < curve.solvers.size(); ++s) {
    auto& r = ratios[s];
    std::sort(r.begin(), r.end());
    auto& steps = curve.steps[s];
    std::size_t i = 0;
    while (i < r.size() && r[i] <= 1.0) ++i;
    steps.emplace_back(1.0, static_cast<double>(i) / denom);
    while (i < r.size()) {
      const double a = r[i];
      while (i < r.size() && r[i] == a) ++i;
      steps.emplace_back(a, static_cast<double>(i) / denom);
    }
  }
  return curve;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records,
                     const std::vector<std::pair<std::string, std::string>>& metadata) {
  out << "# schema: cdfo-bench v1\n";
  for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << "\n";
  out << "solver,problem,constraint,noise,eval_index,feasible,f_value\n";
  for (const auto& r : records) {
    for (const auto& e : r.evaluations) {
      out << r.solver << ',' << r.problem << ',' << r.constraint << ',' << r.noise << ',' << e.index << ','
          << (e.feasible ? 1 : 0) << ',' << format_double(e.feasible ? e.f_value : kInf) << '\n';
    }
  }
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::vector<BenchRecord> records;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "solver,problem,constraint,noise,eval_index,feasible,f_value") {
        throw InvalidArgument("bench csv: unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw InvalidArgument("bench csv line " + std::to_string(line_no) + ": expected 7 fields");
    EvaluationEntry e;
    e.index = static_cast<int>(parse_double(f[4], line_no));
    if (f[5] == "1" || f[5] == "true") {
      e.feasible = true;
    } else if (f[5] == "0" || f[5] == "false") {
      e.feasible = false;
    } else {
      throw InvalidArgument("bench csv line " + std::to_string(line_no) + ": bad feasible flag");
    }
    e.f_value = e.feasible ? parse_double(f[6], line_no) : kInf;

    const bool same = !records.empty() && records.back().solver == f[0] && records.back().problem == f[1] &&
                      records.back().constraint == f[2] && records.back().noise == f[3];
    if (!same) {
      BenchRecord r;
      r.solver = f[0];
      r.problem = f[1];
      r.constraint = f[2];
      r.noise = f[3];
      records.push_back(std::move(r));
    }
    auto& evals = records.back().evaluations;
    const int prev = evals.empty() ? 0 : evals.back().index;
    if (e.index <= prev) {
      throw InvalidArgument("bench csv line " + std::to_string(line_no) + ": evaluation indices must increase from 1");
    }
    evals.push_back(e);
  }
  if (!header_seen) throw InvalidArgument("bench csv: missing header");
  return records;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves) {
  out << "# schema: cdfo-profile v1\n";
  out << "solver,tau,alpha,pi\n";
  for (const auto& c : curves) {
    for (std::size_t s = 0; s < c.solvers.size(); ++s) {
      for (const auto& [alpha, pi] : c.steps[s]) {
        out << c.solvers[s] << ',' << format_double(c.tau) << ',' << format_double(alpha) << ','
            << format_double(pi) << '\n';
      }
    }
  }
}

}  // namespace cdfo
