// dfh_run <config>: runs one mode of the hybrid solver and writes CSV files
// into out_dir. Exit codes: 0 ok, 2 config error, 3 numerical failure.
#include "dfh/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace dfh;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Csv {
  std::ofstream f;
  Csv(const std::filesystem::path& p, const std::string& schema, const std::string& header) : f(p) {
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << "# " << schema << "\n" << header << "\n";
  }
};

std::string suffix(const RunConfig& rc, Formulation f) {
  return rc.formulations.size() > 1 ? "_" + to_string(f) : "";
}

std::string describe(const RunConfig& rc, Formulation f) {
  return "problem=" + to_string(rc.problem) + " formulation=" + to_string(f) + " degree=1";
}

int p_of(Problem p) { return p == Problem::wave ? 3 : 2; }

void run_sizes(const RunConfig& rc, const std::filesystem::path& out) {
  std::vector<long long> ns;
  if (rc.n_given)
    for (int n : rc.n) ns.push_back(n);
  else
    ns = {1, 2, 4, 8, 16};
  for (Formulation f : rc.formulations) {
    auto rows = dof_table(f, p_of(rc.problem), ns);
    Csv csv(out / ("sizes" + suffix(rc, f) + ".csv"), "sizes v1 " + describe(rc, f), "n,mixed_dofs,hybrid_dofs,ratio");
    for (const auto& r : rows) {
      csv.f << r.n << "," << r.mixed << "," << r.hybrid << "," << r.ratio << "\n";
      std::cout << to_string(f) << " n=" << r.n << " mixed=" << r.mixed << " hybrid=" << r.hybrid << " ratio=" << r.ratio;
      if (r.mismatch()) std::cout << " (published table: " << r.reference << ")";
      std::cout << "\n";
    }
    for (const auto& r : rows)
      if (r.mismatch()) csv.f << "# n=" << r.n << ": published ratio " << r.reference << " differs from the computed one\n";
  }
}

void run_conserve_mode(const RunConfig& rc, const std::filesystem::path& out) {
  for (Formulation f : rc.formulations) {
    for (bool homogeneous : {false, true}) {
      RunOptions o = rc.options(f);
      o.zero_inputs = homogeneous;
      ConserveResult r = run_conserve(o);
      const bool div = !r.steps.empty() && r.steps.front().div_norm.has_value();
      const std::string name = std::string("steps") + (homogeneous ? "_homogeneous" : "") + suffix(rc, f) + ".csv";
      Csv csv(out / name, std::string("steps v1 ") + describe(rc, f) + " n=" + std::to_string(o.n) + (homogeneous ? " inputs=zero" : ""),
              std::string("t,H,boundary_power,residual") + (div ? ",div_norm" : ""));
      for (const auto& d : r.steps) {
        csv.f << num(d.t) << "," << num(d.H) << "," << num(d.boundary_power) << "," << num(d.residual);
        if (div) csv.f << "," << num(*d.div_norm);
        csv.f << "\n";
      }
      std::cout << to_string(f) << (homogeneous ? " zero inputs" : " driven") << ": max |residual|/max(|H|,1) = " << num(r.max_residual);
      if (homogeneous) std::cout << ", |H(T)-H(0)|/H(0) = " << num(r.energy_drift);
      if (div) std::cout << ", max |div(t)-div(0)| = " << num(r.max_div_change);
      std::cout << "\n";
    }
  }
}

void run_equivalence_mode(const RunConfig& rc, const std::filesystem::path& out) {
  for (Formulation f : rc.formulations) {
    RunOptions o = rc.options(f);
    EquivalenceResult r = run_equivalence(o);
    std::string header = "t";
    for (const auto& n : r.names) header += "," + n + "_l2_diff";
    Csv csv(out / ("equivalence" + suffix(rc, f) + ".csv"), "equivalence v1 " + describe(rc, f) + " n=" + std::to_string(o.n), header);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      csv.f << num(r.t[i]);
      for (double d : r.diff[i]) csv.f << "," << num(d);
      csv.f << "\n";
    }
    std::cout << to_string(f) << ": max relative L2 difference mixed vs hybrid = " << num(r.max_diff) << "\n";
  }
}

void run_converge_mode(const RunConfig& rc, const std::filesystem::path& out) {
  RunOptions o = rc.options(rc.formulations.front());
  ConvergenceResult r = run_converge(o, rc.n, rc.formulations);
  std::string forms;
  for (Formulation f : rc.formulations) forms += (forms.empty() ? "" : "+") + to_string(f);
  const std::string what = "problem=" + to_string(rc.problem) + " formulation=" + forms + " degree=1 profile=" + to_string(rc.profile);
  {
    Csv csv(out / "convergence.csv", "convergence v1 " + what, "n,h,variable,norm,error");
    for (const auto& row : r.rows)
      csv.f << row.n << "," << num(row.h) << "," << row.variable << "," << row.norm << "," << num(row.error) << "\n";
  }
  if (r.ns.size() >= 2) {
    Csv csv(out / "rates.csv", "rates v1 " + what, "variable,norm,rate");
    for (const auto& [key, rate] : r.rates) {
      csv.f << key.first << "," << key.second << "," << num(rate) << "\n";
      std::cout << key.first << " " << key.second << " rate " << num(rate) << "\n";
    }
  }
  if (!r.dual_difference.empty()) {
    Csv csv(out / "primal_dual.csv", "primal_dual v1 " + what, "n,variable,l2_difference");
    for (const auto& [name, d] : r.dual_difference)
      for (std::size_t i = 0; i < d.size(); ++i) csv.f << r.ns[i] << "," << name << "," << num(d[i]) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: dfh_run <config file>\n";
    return 2;
  }
  RunConfig rc;
  try {
    rc = load_config(argv[1]);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  try {
    const std::filesystem::path out(rc.out_dir);
    std::filesystem::create_directories(out);
    switch (rc.mode) {
      case Mode::sizes: run_sizes(rc, out); break;
      case Mode::conserve: run_conserve_mode(rc, out); break;
      case Mode::equivalence: run_equivalence_mode(rc, out); break;
      case Mode::converge: run_converge_mode(rc, out); break;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
