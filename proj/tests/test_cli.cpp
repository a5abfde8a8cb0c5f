#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI through the shell with stderr folded into stdout.
Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(CDFO_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cdfo_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("problems list") {
  const auto r = cli("problems list");
  CHECK(r.status == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 59);
  CHECK(r.out.rfind("name,n,m,x0,fstar\n", 0) == 0);
  CHECK(r.out.find("\nrosenbrock,2,2,") != std::string::npos);
}

TEST_CASE("solve: summary, trace file, exit codes") {
  const auto dir = scratch("solve");
  const auto r = cli("solve --problem rosenbrock --constraint ball --output-dir " + dir.string());
  CHECK(r.status == 0);
  CHECK(r.out.find("delta0       0.12\n") != std::string::npos);
  CHECK(r.out.find("x*") != std::string::npos);
  CHECK(r.out.find("reason") != std::string::npos);
  const auto trace = dir / "trace_rosenbrock_ball.csv";
  REQUIRE(fs::exists(trace));
  CHECK(slurp(trace).rfind("# schema: cdfo-trace v1\n", 0) == 0);

  const auto unknown = cli("solve --problem nope --output-dir " + dir.string());
  CHECK(unknown.status == 1);
  CHECK(unknown.out.find("unknown problem") != std::string::npos);

  // A budget exit is not clean.
  const auto budget = cli("solve --problem wood --max_evaluations 10 --output-dir " + dir.string());
  CHECK(budget.status == 2);
  CHECK(budget.out.find("evaluation budget exhausted") != std::string::npos);

  const auto badflag = cli("solve --problem wood --gamma_inc 0.5 --output-dir " + dir.string());
  CHECK(badflag.status == 1);
}

TEST_CASE("solve: noisy run is reproducible and engages noise defaults") {
  const auto a = scratch("noisy_a");
  const auto b = scratch("noisy_b");
  const std::string args = "solve --constraint box --problem wood --noise additive --sigma 1e-2 --seed 4 ";
  const auto ra = cli(args + "--output-dir " + a.string());
  const auto rb = cli(args + "--output-dir " + b.string());
  CHECK(ra.status == rb.status);
  CHECK(ra.out.find("gamma_dec    0.98\n") != std::string::npos);
  CHECK(slurp(a / "trace_wood_box.csv") == slurp(b / "trace_wood_box.csv"));
  CHECK(slurp(a / "trace_wood_box.csv").size() > 100);
}

TEST_CASE("solve: output directory from the environment") {
  const auto dir = scratch("env");
  const auto r = cli("solve --problem rosenbrock", "CDFO_OUTPUT_DIR=" + dir.string());
  CHECK(r.status == 0);
  CHECK(fs::exists(dir / "trace_rosenbrock_unconstrained.csv"));
}

TEST_CASE("bench: records, profiles, import and determinism") {
  const auto dir = scratch("bench");
  const std::string args = "bench --problems rosenbrock,wood --constraints box,ball --noise multiplicative "
                           "--sigma 1e-2 --seed 9 ";
  const auto r1 = cli(args + "--output-dir " + (dir / "one").string());
  const auto r2 = cli(args + "--jobs 2 --output-dir " + (dir / "two").string());
  CHECK(r1.status == 0);
  CHECK(r2.status == 0);
  CHECK(r1.out.find("4 runs, 4 records") != std::string::npos);
  for (const char* f : {"bench_records.csv", "profile_tau1e-1.csv", "profile_tau1e-3.csv", "profile_tau1e-5.csv"}) {
    CHECK(slurp(dir / "one" / f) == slurp(dir / "two" / f));
    CHECK(slurp(dir / "one" / f).rfind("# schema: cdfo-", 0) == 0);
  }
  const auto records = slurp(dir / "one" / "bench_records.csv");
  CHECK(records.find("# noise_mode: on\n") != std::string::npos);

  write(dir / "ext.csv",
        "solver,problem,constraint,noise,eval_index,feasible,f_value\n"
        "other,rosenbrock,box,multiplicative,1,1,100\n"
        "other,rosenbrock,box,multiplicative,2,0,inf\n"
        "other,rosenbrock,box,multiplicative,3,1,0.001\n");
  const auto r3 = cli(args + "--import " + (dir / "ext.csv").string() + " --output-dir " + (dir / "imp").string());
  CHECK(r3.status == 0);
  const auto prof = slurp(dir / "imp" / "profile_tau1e-1.csv");
  CHECK(prof.find("\nother,0.1,") != std::string::npos);
  CHECK(prof.find("\ncdfo,0.1,") != std::string::npos);

  write(dir / "bad.csv", "solver,problem\n");
  CHECK(cli(args + "--import " + (dir / "bad.csv").string() + " --output-dir " + (dir / "x").string()).status == 1);
  CHECK(cli("bench --problems nope --output-dir " + (dir / "x").string()).status == 1);
}

TEST_CASE("geometry command") {
  const auto dir = scratch("geometry");
  write(dir / "simplex.txt", "0 0\n1 0\n0 1\n");
  write(dir / "ws.json", R"({"kind":"whole-space","dim":2})");
  const auto ok = cli("geometry --set " + (dir / "simplex.txt").string() + " --region " + (dir / "ws.json").string() +
                      " --delta 1 --lambda 3");
  CHECK(ok.status == 0);
  CHECK(ok.out.find("Lambda (all t) = 2.414213562") != std::string::npos);

  write(dir / "line.txt", "0 0\n1 1\n2 2\n");
  const auto line = cli("geometry --set " + (dir / "line.txt").string() + " --region " + (dir / "ws.json").string());
  CHECK(line.status == 1);
  CHECK(line.out.find("rank") != std::string::npos);

  for (const char* eps : {"0.1", "0.01", "0.0001"}) {
    write(dir / "fig.txt", std::string("0 0\n1 0\n0 ") + eps + "\n");
    write(dir / "strip.json",
          std::string(R"({"kind":"box","lower":[null,-)") + eps + R"(],"upper":[null,)" + eps + "]}");
    const auto s = cli("geometry --set " + (dir / "fig.txt").string() + " --region " + (dir / "strip.json").string() +
                       " --delta 1 --lambda 3");
    CHECK_MESSAGE(s.status == 0, s.out);
    const auto free = cli("geometry --set " + (dir / "fig.txt").string() + " --region " + (dir / "ws.json").string() +
                          " --delta 1 --lambda 3");
    CHECK(free.status == 2);
  }

  write(dir / "far.txt", "0 0\n5 0\n0 1\n");
  write(dir / "hs.json", R"({"kind":"halfspace","normal":[1,0],"offset":1})");
  const auto infeasible = cli("geometry --set " + (dir / "far.txt").string() + " --region " + (dir / "hs.json").string());
  CHECK(infeasible.status == 1);
  CHECK(infeasible.out.find("infeasible point 1") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(cli("").status != 0);
  CHECK(cli("solve").status != 0);
  CHECK(cli("frobnicate").status != 0);
}
