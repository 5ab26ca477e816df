#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "prandtl/iteration.hpp"
#include "prandtl/scheduler.hpp"

namespace prandtl {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value run configuration ('#' starts a comment, blank lines
// ignored, booleans spelled true/false). Every key has a default except
// `delta`, which the ladder commands require explicitly.
struct RunConfig {
  std::string mode = "structural";  // ledger | structural
  std::string out = "run";          // run directory (flag --out overrides)
  int threads = 0;                  // worker threads, 0 = auto

  // ---- parameter-ladder keys (mode = ledger) ----
  std::optional<double> delta;  // required by the schedule command
  double Ebar = 1.0;
  double rho = 1.0;
  double C_theta = 10.0;
  double B = 3.0;
  int steps = 50;           // ladder length
  long prec = 512;          // ladder precision bits
  double eps_override = 0.0;
  double Xi0_override = 0.0;

  // ---- construction-step keys (mode = structural) ----
  double step_B = 4.0;
  double step_C_theta = 1.0;
  double N = 8.0;
  int K = 1;                // number of construction steps
  double Ymax = 4.0;
  int D_exp = 1;
  int fourier_m = 7;
  int moll_nodes = 16;
  int flow_substeps = 16;
  int target_n = 64;
  int cancel_n = 16;
  double clearance = 50.0;
  double e_clearance = 50.0;
  bool lazy = true;
  uint64_t step_seed = 23;

  // ---- diagnostics sampling ----
  uint64_t seed = 101;
  int residual_n = 16;
  double residual_tol = 1e-4;
  int sup_n = 32;
  int holder_n = 4;
  double alpha = 0.04;
  double beta = 0.09;
  int weak_n = 64;

  // ---- shear demo: base flow, perturbation ball, initial levels, regions ----
  double U1 = 0.0, U2 = 1.0;  // far-field velocity of the heat shear
  double t0 = 0.5;            // time shift of the shear profile
  double ball_eps = 0.15;     // perturbation ball radius parameter
  double ball_t = 0.5, ball_x1 = 0.4, ball_x2 = 0.35, ball_y = 2.4;
  double ball_amplitude = 0.001;
  double demo_Xi = 500.0, demo_Eu = 2.0, demo_E1 = 2.0, demo_E2 = 1.0,
         demo_E3 = 0.2;
  double D_tmin = 0.35, D_tmax = 0.65, D_ymin = 2.25, D_ymax = 2.55;
  double w_tmin = 0.4, w_tmax = 0.6, w_ymin = 2.3, w_ymax = 2.5;
};

// Parse key = value text; unknown keys and malformed values are config_error.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Range validation shared by every command (config_error on violation).
void validate_config(const RunConfig& c);

LadderParams ladder_params(const RunConfig& c);  // requires delta
StepOptions step_options(const RunConfig& c);
RunOptions run_options(const RunConfig& c);

// Serialize the full configuration back to key = value text (defaults
// included), so a run directory records the exact parameters it used.
std::string config_text(const RunConfig& c);

}  // namespace prandtl
