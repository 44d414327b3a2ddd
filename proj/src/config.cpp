#include "dfh/config.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace dfh {

Mode parse_mode(const std::string& s) {
  if (s == "equivalence") return Mode::equivalence;
  if (s == "conserve") return Mode::conserve;
  if (s == "converge") return Mode::converge;
  if (s == "sizes") return Mode::sizes;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::equivalence: return "equivalence";
    case Mode::conserve: return "conserve";
    case Mode::converge: return "converge";
    case Mode::sizes: return "sizes";
  }
  return "?";
}

RunOptions RunConfig::options(Formulation f) const {
  RunOptions o;
  o.problem = problem;
  o.formulation = f;
  o.profile = profile;
  o.n = n.front();
  o.dt = dt;
  o.t_end = t_end;
  o.gamma1 = gamma1;
  o.c = c;
  o.eps = eps;
  o.mu = mu;
  o.tol = tol;
  o.threads = threads;
  return o;
}

RunConfig parse_config(std::istream& in) {
  RunConfig rc;
  std::string problem = "wave", formulation = "primal", mode = "conserve", profile = "eigenmode";
  std::vector<std::string> ns{"2"};

  CLI::App app{"dfh_run"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.add_option("--problem", problem);
  app.add_option("--formulation", formulation);
  app.add_option("--mode", mode);
  app.add_option("--n", ns)->delimiter(',');
  app.add_option("--degree", rc.degree);
  app.add_option("--dt", rc.dt);
  app.add_option("--t_end", rc.t_end);
  app.add_option("--profile", profile);
  app.add_option("--gamma1", rc.gamma1);
  app.add_option("--c", rc.c);
  app.add_option("--eps", rc.eps);
  app.add_option("--mu", rc.mu);
  app.add_option("--out_dir", rc.out_dir);
  app.add_option("--tol", rc.tol);
  app.add_option("--threads", rc.threads);
  try {
    app.parse_from_stream(in);
  } catch (const CLI::ConfigError& e) {
    throw ConfigError(std::string("config: unknown key or malformed line (") + e.what() + ")");
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  try {
    rc.problem = parse_problem(problem);
    rc.profile = parse_profile(profile);
    rc.mode = parse_mode(mode);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (formulation == "primal")
    rc.formulations = {Formulation::primal};
  else if (formulation == "dual")
    rc.formulations = {Formulation::dual};
  else if (formulation == "both")
    rc.formulations = {Formulation::primal, Formulation::dual};
  else
    throw ConfigError("config: unknown formulation '" + formulation + "'");

  rc.n_given = app.count("--n") > 0;
  rc.n.clear();
  for (const auto& tok : ns) {
    std::istringstream ss(tok);
    int v;
    while (ss >> v) rc.n.push_back(v);
    if (!ss.eof()) throw ConfigError("config: bad n entry '" + tok + "'");
  }
  if (rc.n.empty()) throw ConfigError("config: n is empty");
  for (int v : rc.n)
    if (v < 1) throw ConfigError("config: n must be >= 1");

  if (rc.degree != 1)
    throw ConfigError("config: degree " + std::to_string(rc.degree) + " is not supported, only lowest-order (degree = 1) elements exist");
  if (!(rc.dt > 0)) throw ConfigError("config: dt must be positive");
  if (!(rc.t_end >= rc.dt)) throw ConfigError("config: t_end must be at least dt");
  const double r = rc.t_end / rc.dt;
  if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) throw ConfigError("config: t_end must be a multiple of dt");
  if (rc.gamma1 != "lower" && rc.gamma1 != "all" && rc.gamma1 != "none")
    throw ConfigError("config: gamma1 must be lower, all or none");
  if (!(rc.c > 0) || !(rc.eps > 0) || !(rc.mu > 0)) throw ConfigError("config: coefficients must be positive");
  if (!(rc.tol > 0)) throw ConfigError("config: tol must be positive");
  if (rc.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (rc.out_dir.empty()) throw ConfigError("config: out_dir is empty");
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read " + path);
  return parse_config(f);
}

}  // namespace dfh
