#include "doctest.h"
#include "dfh/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace dfh;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream s(text);
  return parse_config(s);
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("dfh_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// runs the tool on a config text, returns its exit status
int run_tool(const fs::path& dir, const std::string& cfg) {
  const char* exe = std::getenv("DFH_RUN");
  REQUIRE(exe != nullptr);
  fs::path f = dir / "run.cfg";
  std::ofstream(f) << cfg << "out_dir = " << (dir / "out").string() << "\n";
  std::string cmd = std::string(exe) + " " + f.string() + " > " + (dir / "log.txt").string() + " 2>&1";
  int st = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(st));
  return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// data rows of a CSV, comment lines and the header dropped
std::vector<std::vector<std::string>> rows(const fs::path& p, std::string* header = nullptr) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> r;
  std::string line;
  bool seen_header = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      if (header) *header = line;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    r.push_back(cells);
  }
  return r;
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig rc = parse("# comment\nproblem = maxwell\nformulation = both\nmode = converge\nn = 2 4 8\n; other comment\ndt = 0.005\nt_end = 1\n");
  CHECK(rc.problem == Problem::maxwell);
  CHECK(rc.formulations.size() == 2);
  CHECK(rc.mode == Mode::converge);
  CHECK(rc.n == std::vector<int>{2, 4, 8});
  CHECK(rc.n_given);
  CHECK(rc.dt == 0.005);
  CHECK(parse("n = 2,4\n").n == std::vector<int>{2, 4});
  CHECK(parse("n = [2, 4]\n").n == std::vector<int>{2, 4});
  RunConfig d = parse("");
  CHECK(d.mode == Mode::conserve);
  CHECK_FALSE(d.n_given);
  CHECK(d.options(Formulation::dual).formulation == Formulation::dual);
  CHECK(d.options(Formulation::dual).n == 2);
}

TEST_CASE("config errors") {
  const char* bad[] = {"bogus = 1\n",       "degree = 2\n",       "dt = 0\n",         "dt = 0.1\nt_end = 0.05\n",
                       "dt = 0.3\nt_end = 1\n", "n = 0\n",         "n = 2 x\n",        "problem = heat\n",
                       "formulation = mixed\n", "mode = plot\n",   "gamma1 = upper\n", "mu = -1\n",
                       "threads = 0\n",      "tol = 0\n",          "dt = abc\n",       "[section]\nn = 2\n"};
  for (const char* b : bad) {
    CAPTURE(b);
    CHECK_THROWS_AS(parse(b), ConfigError);
  }
  try {
    parse("degree = 3\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("degree") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/dfh.cfg"), ConfigError);
}

TEST_CASE("sizes mode reproduces the wave primal table") {
  fs::path dir = scratch("sizes");
  REQUIRE(run_tool(dir, "mode = sizes\nproblem = wave\nformulation = primal\n") == 0);
  std::string header;
  auto r = rows(dir / "out" / "sizes.csv", &header);
  CHECK(header == "n,mixed_dofs,hybrid_dofs,ratio");
  const long long expect[5][3] = {{1, 24, 18}, {2, 168, 120}, {4, 1248, 864}, {8, 9600, 6528}, {16, 75264, 50688}};
  REQUIRE(r.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::stoll(r[i][0]) == expect[i][0]);
    CHECK(std::stoll(r[i][1]) == expect[i][1]);
    CHECK(std::stoll(r[i][2]) == expect[i][2]);
    CHECK(std::stoi(r[i][3]) == int(std::lround(100.0 * expect[i][2] / expect[i][1])));
  }
  CHECK(slurp(dir / "out" / "sizes.csv").rfind("# ", 0) == 0);
}

TEST_CASE("both formulations write separate files") {
  fs::path dir = scratch("both");
  REQUIRE(run_tool(dir, "mode = sizes\nproblem = wave\nformulation = both\nn = 1 2\n") == 0);
  auto p = rows(dir / "out" / "sizes_primal.csv"), d = rows(dir / "out" / "sizes_dual.csv");
  REQUIRE(d.size() == 2);
  CHECK(p.size() == 2);
  CHECK(d[0][1] == "44");
  CHECK(d[0][2] == "8");
  CHECK(d[1][1] == "315");
  CHECK(d[1][2] == "27");
}

TEST_CASE("conserve mode: homogeneous run keeps the energy") {
  fs::path dir = scratch("conserve");
  REQUIRE(run_tool(dir, "mode = conserve\nproblem = maxwell\nformulation = primal\nn = 2\ndt = 0.02\nt_end = 0.4\n") == 0);
  std::string header;
  auto r = rows(dir / "out" / "steps_homogeneous.csv", &header);
  CHECK(header == "t,H,boundary_power,residual,div_norm");
  REQUIRE(r.size() == 21);
  const double H0 = std::stod(r[0][1]);
  CHECK(H0 > 0);
  for (const auto& row : r) {
    CHECK(std::abs(std::stod(row[1]) - H0) / H0 <= 1e-12);
    CHECK(std::abs(std::stod(row[4]) - std::stod(r[0][4])) <= 1e-10);
  }
  auto driven = rows(dir / "out" / "steps.csv");
  REQUIRE(driven.size() == 21);
  for (const auto& row : driven) CHECK(std::abs(std::stod(row[3])) <= 1e-10 * std::max(1.0, std::abs(std::stod(row[1]))));
}

TEST_CASE("wave conserve output has no divergence column") {
  fs::path dir = scratch("wave_conserve");
  REQUIRE(run_tool(dir, "mode = conserve\nproblem = wave\nformulation = dual\ndt = 0.05\nt_end = 0.1\n") == 0);
  std::string header;
  auto r = rows(dir / "out" / "steps.csv", &header);
  CHECK(header == "t,H,boundary_power,residual");
  CHECK(r.size() == 3);
}

TEST_CASE("equivalence mode") {
  fs::path dir = scratch("equivalence");
  REQUIRE(run_tool(dir, "mode = equivalence\nproblem = maxwell\nformulation = dual\ndt = 0.05\nt_end = 0.25\n") == 0);
  std::string header;
  auto r = rows(dir / "out" / "equivalence.csv", &header);
  CHECK(header == "t,electric_l2_diff,magnetic_l2_diff");
  REQUIRE(r.size() == 6);
  for (const auto& row : r) {
    CHECK(std::stod(row[1]) <= 1e-10);
    CHECK(std::stod(row[2]) <= 1e-10);
  }
}

TEST_CASE("converge mode gives finite rates") {
  fs::path dir = scratch("converge");
  REQUIRE(run_tool(dir, "mode = converge\nproblem = wave\nformulation = dual\nprofile = quadratic\nn = 2 4\ndt = 0.05\nt_end = 0.2\n") == 0);
  std::string header;
  auto c = rows(dir / "out" / "convergence.csv", &header);
  CHECK(header == "n,h,variable,norm,error");
  CHECK(c.size() == 10);
  auto r = rows(dir / "out" / "rates.csv");
  CHECK(r.size() == 5);
  for (const auto& row : r) CHECK(std::isfinite(std::stod(row[2])));
  CHECK_FALSE(fs::exists(dir / "out" / "primal_dual.csv"));
}

TEST_CASE("identical configs give identical bytes") {
  const std::string cfg = "mode = conserve\nproblem = wave\nformulation = primal\ndt = 0.05\nt_end = 0.2\nthreads = 2\n";
  fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run_tool(a, cfg) == 0);
  REQUIRE(run_tool(b, cfg) == 0);
  CHECK(slurp(a / "out" / "steps.csv") == slurp(b / "out" / "steps.csv"));
  // 17 significant digits
  auto r = rows(a / "out" / "steps.csv");
  CHECK(r[1][1].find('.') != std::string::npos);
  CHECK(r[1][1].size() >= 18);
}

TEST_CASE("exit codes") {
  fs::path dir = scratch("exit");
  CHECK(run_tool(dir, "mode = sizes\nunknown_key = 3\n") == 2);
  CHECK(run_tool(dir, "mode = sizes\ndegree = 2\n") == 2);
  // a residual tolerance below round-off fails the first solve
  CHECK(run_tool(dir, "mode = conserve\ntol = 1e-30\ndt = 0.05\nt_end = 0.1\n") == 3);
  CHECK(slurp(dir / "log.txt").find("step 1") != std::string::npos);
  const char* exe = std::getenv("DFH_RUN");
  REQUIRE(exe != nullptr);
  int st = std::system((std::string(exe) + " /nonexistent/x.cfg > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(st) == 2);
}
