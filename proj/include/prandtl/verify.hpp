#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prandtl/field.hpp"

namespace prandtl {

// Rectangular sampling window; the x-axes default to the full torus.
struct SampleWindow {
  double tmin = 0, tmax = 1;
  double ymin = 0, ymax = 1;
  double x1min = 0, x1max = 1;
  double x2min = 0, x2max = 1;
};

// Deterministic point sets: a Halton sequence (bases 2,3,5,7 on (t,x1,x2,y),
// `skip` leading terms dropped) or a tensor grid, both mapped into the window.
struct SampleSet {
  std::vector<Point> points;
  static SampleSet halton(size_t n, uint64_t skip, const SampleWindow& w);
  static SampleSet grid(int nt, int n1, int n2, int ny, const SampleWindow& w);
};

// Sampled sup of |d-th derivative of f|: a lower bound on the true sup.
double sup_norm(const Field& f, const std::vector<Point>& pts,
                const DerivOrder& d = {});

// Anisotropic Holder quotient sup over near-diagonal pairs: each base point
// is offset along each axis by dyadic separations 2^-j, j = 1..jmax, and the
// quotient |f(p') - f(p)| / (|t-t'|^a + |x-x'|^a + |y-y'|^b) is maximised.
double holder_seminorm(const Field& f, const std::vector<Point>& base,
                       double alpha, double beta, int jmax = 20);

// Residual of the approximate system with pressure P:
//   dt u + div_x(u (x) u) + dy(v u) - dyy u + grad_x P - div_x S - dy Y
Vec2Field residual_field(const Vec2Field& u, const Field& v, const Sym2Field& S,
                         const Vec2Field& Y, const Field& P);
struct ResidualReport {
  double sup = 0;    // max |residual component| over the samples
  double scale = 0;  // max |individual term| over the samples (>= sup/13)
};
ResidualReport residual_system(const Vec2Field& u, const Field& v,
                               const Sym2Field& S, const Vec2Field& Y,
                               const Field& P, const std::vector<Point>& pts);

struct Diagnostic {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool has_tolerance = false;
  bool pass = true;
  std::string anchor;  // free-form provenance note
};
nlohmann::json diagnostics_json(const std::vector<Diagnostic>& ds);

// f is claimed to vanish outside `region`: sample a (t,y) collar of widths
// (dt, dy) around the region (several x-columns per node) and record the
// largest |f| found there; pass iff it is exactly 0.
Diagnostic support_shell_test(const Field& f, const SupportBox& region,
                              double dt, double dy, int nt = 17, int ny = 17);

// Least-squares line through (log param, log observable).
struct SweepFit {
  double slope = 0, intercept = 0, residual = 0;  // max |log misfit|
};
SweepFit scaling_sweep(const std::vector<double>& params,
                       const std::vector<double>& observables);

}  // namespace prandtl
