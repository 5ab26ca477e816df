#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "prandtl/stress.hpp"
#include "prandtl/verify.hpp"

namespace prandtl {

// Frequency-energy levels of one construction step, plain doubles (the
// high-precision ladder lives in the scheduler module).
struct FELevels {
  double Xi = 1, Eu = 1, E1 = 1, E2 = 1, E3 = 1;
};

// Bookkeeping of one step:
//   (Xi', Eu', E1', E2', E3') = (C N Xi, E1, 2 E2, 2 E3, N^{-1/3} sqrt(Eu E1)).
FELevels next_levels(const FELevels& L, double N, double C_theta);

// Closed-form heat shear u(t,y) = U erf(y / (2 sqrt(t + t0))), v = 0.
// Requires t0 > 0 so the profile is smooth down to t = 0.
Vec2Field shear_flow(const std::array<double, 2>& U, double t0);

// Divergence-free, x-mean-zero velocity perturbation from a scalar bump:
//   (du, dv) = (dy d2 phi, 0, -d1 d2 phi).
// phi = amplitude * product bump in all four variables with per-axis radius
// eps, so supp phi sits inside the ball of radius 2 eps around `center`.
// Throws construction_error when that ball leaves {t > 0, 0 < y < Ymax}.
struct Perturbation {
  Vec2Field du;  // (dy d2 phi, 0)
  Field dv;      // -d1 d2 phi
  Field phi;
};
Perturbation corollary_perturbation(double eps, const Point& center,
                                    double Ymax, double amplitude = 1.0);

// e^{1/2} = 2 sqrt(E1) * (indicator of N(D; 2l^2, 2l) convolved with the
// product mollifier of widths (l^2, l)). Equals 4 E1 on N(D; l^2, l) and
// vanishes outside N(D; 2.75 l^2, 2.75 l) (declared as the support box).
// Throws construction_error when N(supp e; clearance l^2, clearance l)
// leaves {t > 0} x {y > 0}.
Field energy_profile(const SupportBox& D, double l, double E1,
                     double clearance = 50.0);

// One rung of the construction: velocity, its stress error in tensor and
// frame form, the level bookkeeping and the declared (t,y) region D
// containing supp_{t,y} R.
struct IterationState {
  Vec2Field u;
  Field v;
  StressPair R;
  StressFrame Rf;
  FELevels levels;
  SupportBox D{0, 1, 0, 1};
  int step = 0;
};

struct BuildOptions {
  int fourier_m = 7;         // torus grid 2^m of the x-inverse divergence
  double tol = 1e-9;         // divergence-gate tolerance (relative)
  double mean_tol = 1e-6;    // x-mean gate, relative to the grid sup
  int check_n = 64;          // sample count of the precondition checks
  double residual_tol = 1e-6;  // relative residual certificate
  uint64_t seed = 11;
};

// Initial state around a classical solution (uC, vC):
//   R0 = (ub (x) ub - uC (x) uC, vb ub - vC uC)
//        + (calR[dt(ub - uC) - dyy(ub - uC)], 0).
// Checks that ub - uC is x-mean-zero and (ub - uC, vb - vC) divergence-free,
// then certifies the system residual of the state at sampled points
// (construction_error on any failure).
IterationState build_initial(const Vec2Field& uC, const Field& vC,
                             const Vec2Field& ub, const Field& vb,
                             const FELevels& levels, const SupportBox& D0,
                             const SampleWindow& window,
                             const BuildOptions& opt = {});

// Lazily solved oscillatory tensors: T sums the phase-expansion solutions of
// every divergence source whose cubes are active at the evaluation point, and
// `remainder` the matching telescoped remainders, so that identically
//   div T = (phased sum of all sources) - remainder.
// Solutions are cached per (cube, cube2, sign) and built on demand, which is
// what makes astronomically large atlases evaluable.
struct OscAggregate {
  SymTensor23 T;
  Vec2Field remainder;
};
OscAggregate oscillatory_aggregate(const WaveAtlas& atlas, int D);

struct StepOptions {
  double B = 4.0, C_theta = 1.0, N = 8.0;  // relaxed structural constants
  double Ymax = 4.0;
  int D_exp = 1;          // phase-expansion depth of the oscillatory solves
  int moll_nodes = 16;    // quadrature nodes of the velocity mollifier
  int flow_substeps = 64; // RK4 substeps of the transported partitions
  int target_n = 64;      // samples for the target-component selection
  int cancel_n = 16;      // anchored-cancellation spot checks
  double clearance = 50.0;  // D_{n+1} = N(D_n; clearance l^2, clearance l)
  uint64_t seed = 23;
  bool lazy = true;       // build wave profiles on demand
};

struct StepResult {
  IterationState next;
  Vec3Field w;          // velocity correction (u', v') - (u, v)
  Vec2Field remainder;  // unsolved oscillatory remainder (phased, real)
  TargetComponent target;
  LengthScales sc;
  Field e, el, Sl, Yl;  // energy profile and the anchored mollifications
  std::shared_ptr<const PartitionFamily> fam;
};

// One full construction step: select the largest stress component, mollify,
// build transported partitions and wave profiles, assemble the correction,
// collect every error stress and the solved oscillatory tensors into the new
// state. Preconditions checked by sampling: l <= 1/(1 + ||v||) and
// e >= 4 E1 on the declared stress region.
StepResult iterate_once(const IterationState& state, const Field& e,
                        const SampleWindow& window,
                        const StepOptions& opt = {});

struct RunOptions {
  StepOptions step;
  int K = 1;
  int residual_n = 64;        // residual / closure sample count
  double residual_tol = 1e-4; // relative closure tolerance
  int sup_n = 128;            // sup-norm samples
  int holder_n = 8;           // Holder seminorm base points
  double alpha = 0.04, beta = 0.09;  // Holder exponents reported
  int weak_n = 256;           // quadrature points of the weak-* indicator
  double e_clearance = 50.0;  // boundary clearance of the energy profiles
  uint64_t seed = 101;
};

struct RunOutput {
  std::vector<IterationState> states;  // [0] = initial; partial on failure
  std::vector<Vec3Field> corrections;  // one per executed step
  nlohmann::json diagnostics;          // array: one entry per state
  bool pass = true;
  std::string failure;  // empty when pass; otherwise the halting stage
};

// K steps with per-state diagnostics: sampled sup norms, Holder seminorms,
// residual-decomposition closure, support shells, and the weak-* smallness
// indicator |int w phi| for a fixed test bump. A step failure halts the run
// and preserves the partial trajectory.
RunOutput run_steps(const IterationState& initial, const SampleWindow& window,
                    const RunOptions& opt = {});

}  // namespace prandtl
