#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prandtl/bigfloat.hpp"

namespace prandtl {

// Frequency-energy levels (Xi, E_u, E_1, E_2, E_3), high precision.
struct Levels {
  Big Xi, Eu, E1, E2, E3;
};

struct CheckLine {
  std::string name;
  bool pass = true;
  double margin_log2 = 0.0;  // log2(slack); negative on failure
};

struct LevelReport {
  bool pass = true;
  std::vector<CheckLine> lines;
  std::string first_failure;  // empty when pass
};

// Ordering checks 4E3 <= 2E2 <= E1 <= Eu plus Eu <= Xi^2.
LevelReport check_levels(const Levels& L);

// One recursion step: from level set n produce (level set n+1, N_{n+1}).
// n = 0 seeds E_{(1),3} = eps and uses the initial N formula.
std::pair<Levels, Big> recursion_step(const Levels& L, const Big& delta,
                                      const Big& eps, const Big& C_theta, int n);

// Admissible Holder exponent bounds (alpha_max, beta_max) at parameter delta.
std::pair<double, double> holder_bounds(double delta);

// theta = min{delta/40, log2/(4 log10)} and b = 3 delta (7/2+6d+4d^2+d^3).
Big theta_of(const Big& delta);
Big b_of(const Big& delta);

struct LadderParams {
  double delta = 0.1;
  double Ebar = 1.0;
  double rho = 1.0;
  double C_theta = 10.0;
  double B = 3.0;
  int steps = 50;
  long prec = 256;
  double eps_override = 0.0;  // > 0 forces eps (bypasses the bound)
  double Xi0_override = 0.0;  // > 0 forces Xi0
};

struct LadderStep {
  int n = 0;
  Levels L;
  // Application data producing this level set (empty at n = 0):
  Big N, lambda, ly, tau;
  Big ell;                  // Xi^{-1/2} Eu^{-1/4} of this level set
  Big dt_accum, dy_accum;   // cumulative support inflation up to D_(n)
  LevelReport levels_report;
  bool tau_chain_ok = true;  // tau <= ly <= ell_{n-1} <= 1
  bool ell_ratio_ok = true;  // ell_n / ell_{n-1} <= 1/8
  bool N_ok = true;          // N >= (Eu E1 / E3^2)^{3/2} at the previous levels
  bool NXi_ok = true;        // N >= Xi_{n-1}^theta
  bool ell_cond_ok = true;   // Xi Eu^{1/2} >= (100 C Ebar)^2
  bool lambda_monotone_ok = true;
};

struct Ladder {
  LadderParams params;
  Big delta, theta, bconst, eps, Xi0;
  std::string eps_clause;  // which bound clause determined eps
  std::vector<LadderStep> steps;  // index = n
  double closed_form_max_relerr = 0.0;  // over n >= 4 closed forms
  bool support_ok = true;  // D_(n) stays inside N(D_(0); rho, rho^{1/2})
  bool all_ok = true;
  long prec_used = 0;
};

Ladder build_ladder(const LadderParams& p);

struct ThresholdReport {
  bool pass = true;
  std::vector<std::string> failures;
  double min_margin_log2 = 0.0;   // min over n of log2 N_(n) - theta log2 Xi_(n-1)
  bool bootstrap_lower_ok = true; // 2^3 eps^{-3 delta} <= N_(k), k = 1..5
  bool xi_chain_ok = true;        // Xi_(k) <= 10^12 eps^{-120}, k = 0..4
  bool induction_ok = true;       // N_{n+1} >= C^theta N_n^{1+theta}, n >= 5
  bool upper_rough_bound_holds = true;  // informational, not part of pass
};

ThresholdReport verify_N_thresholds(const Ladder& ladder);

struct CauchyReport {
  std::vector<double> a_log2, b_log2;   // sequences a_n, b_n (n >= 1), log2
  std::vector<double> a_ratio, b_ratio; // a_{n+1}/a_n starting at n = 1
  double a_sum = 0.0, b_sum = 0.0;      // partial sums (Holder-norm ledger)
  bool a_monotone = true, b_monotone = true;  // ratios decreasing for n >= 5
  bool a_diverged = false, b_diverged = false;
  double a_final_ratio = 0.0, b_final_ratio = 0.0;
};

CauchyReport cauchy_ratios(const Ladder& ladder, double alpha, double beta);

nlohmann::json ladder_json(const Ladder& ladder);
// eps/clause/all_ok sensitivity at C_theta in {2, 10, 100}.
nlohmann::json ctheta_sensitivity(LadderParams p);

}  // namespace prandtl
