#pragma once

#include "dfh/simulation.hpp"

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfh {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { equivalence, conserve, converge, sizes };

struct RunConfig {
  Problem problem = Problem::wave;
  std::vector<Formulation> formulations{Formulation::primal};  // "both" gives two
  Mode mode = Mode::conserve;
  std::vector<int> n{2};
  bool n_given = false;  // sizes mode falls back to the table rows 1..16
  int degree = 1;
  double dt = 0.01;
  double t_end = 1.0;
  Profile profile = Profile::eigenmode;
  std::string gamma1 = "lower";
  double c = 1.0, eps = 1.0, mu = 1.0;
  std::string out_dir = ".";
  double tol = 1e-10;
  int threads = 1;

  // options of one run at the first n
  RunOptions options(Formulation f) const;
};

// flat key=value text, '#' or ';' comments; unknown keys and bad values throw
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

}  // namespace dfh
