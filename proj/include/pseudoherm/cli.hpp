#pragma once

// Command-line front end: spectrum | verify-eta | sweep | evolve | levels.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudoherm/models.hpp"
#include "pseudoherm/operators.hpp"

namespace pseudoherm::cli {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string subcommand;

  double L = 16.0;
  int N = 1600;
  int accuracy = 2;
  double tol = 1e-6;

  // Potential: a named family or an expression in x.
  std::string family = "scarf2";
  double A = 2.0;
  double B = 1.0;
  double d = 2.5;
  double k = 0.0;
  double V1 = 2.0;
  double V2 = 0.0;
  std::string V;

  double beta = 0.0;
  std::string nu = "tanh(x)";
  std::string scheme = "similarity";

  // verify-eta: '+'-separated terms from identity, parity, multiplicative,
  // first-order, second-order.
  std::string eta = "parity";
  std::string g = "2*sech(x)";
  std::string a;
  std::string r;
  double gamma = 0.0;
  double delta = 0.25;

  // spectrum / sweep: compare against the 2N grid.
  bool refine = true;
  double move_tol = 1e-3;

  // sweep
  std::string param = "V2";
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  int jobs = 1;

  // evolve
  double T = 5.0;
  double dt = 1e-3;
  std::string psi1 = "eig:0";
  std::string psi2;
  std::string weight = "eta";
  std::string trace;

  std::string out;
};

/// Potential selected by the config. Throws on constraint violations.
PotentialSpec potential_from(const RunConfig& cfg);

/// Closed-form levels for named families; empty for expressions.
std::optional<LevelSet> levels_from(const RunConfig& cfg);

std::vector<double> sweep_values(const RunConfig& cfg);

Json cmd_spectrum(const RunConfig& cfg);
Json cmd_verify_eta(const RunConfig& cfg);
/// CSV text: value,max_abs_imag,real_count,pair_count,unpaired_count,
/// bound_count,error. Rows ordered by sweep index whatever the job count.
std::string cmd_sweep(const RunConfig& cfg);
/// JSON summary; the trace CSV (t,re_Q,im_Q,defect) goes to `trace_csv`.
Json cmd_evolve(const RunConfig& cfg, std::string& trace_csv);
Json cmd_levels(const RunConfig& cfg);

/// Parses argv, runs the subcommand and returns the process exit code:
/// 0 ok, 2 configuration error, 3 solver failure, 4 non-finite state.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace pseudoherm::cli
