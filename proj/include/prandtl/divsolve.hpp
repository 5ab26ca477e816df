#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "prandtl/field.hpp"
#include "prandtl/waves.hpp"

namespace prandtl {

struct compatibility_error : std::runtime_error {
  std::array<double, 3> residuals{0, 0, 0};
  compatibility_error(const std::string& msg, std::array<double, 3> r)
      : std::runtime_error(msg), residuals(r) {}
};
struct phase_bound_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- torus operators --------------------------------------------------------
// Inverse Laplacian in x on the torus for a zero-x-mean 2-vector field, by a
// truncated Fourier series on a 2^m x 2^m grid. (t,y) pass through as
// parameters; derivatives in all four variables are spectral/exact.
Vec2Field poisson_torus(const Vec2Field& H, int m = 7);

// Symmetric 2x2 right inverse of the x-divergence on the torus:
//   calR[H] = (div Dx^-1 H) I + sym grad(P Dx^-1 H),  P = I - grad Dx^-1 div.
Sym2Field calR(const Vec2Field& H, int m = 7);

// ---- convected cylinders ----------------------------------------------------
// Space-time cylinder around the trajectory of its center under (u,v):
//   |t - t0| <= tbar  and  |z_i - Z_i(t)| <= l_i,  Z(t) the center path.
class ConvectedCylinder {
 public:
  ConvectedCylinder(Point q0, double tbar, double l1, double l2, double l3,
                    Vec2Field u, Field v, double Ymax);
  const Point& center() const { return q0_; }
  double tbar() const { return tbar_; }
  std::array<double, 3> radii() const { return {l1_, l2_, l3_}; }
  // center path at time t; jets carry nt time-derivatives (Taylor recursion)
  std::array<Jet, 3> path(double t, int nt) const;
  Point path_value(double t) const;
  bool contains(const Point& p) const;
  // the convecting velocity frozen along the center path, as fields of t
  Field frozen_velocity(int i) const;  // i = 0,1 horizontal, 2 vertical
  SupportBox bounding_box() const;     // (t,y) box containing the cylinder
 private:
  Point q0_;
  double tbar_, l1_, l2_, l3_, Ymax_;
  Vec2Field u_;
  Field v_;
  mutable std::map<std::pair<uint64_t, int>, std::array<Jet, 3>> memo_;
  mutable std::mutex mu_;
};

// ---- compact-support kernel solver -----------------------------------------
// 2x3 matrix field, symmetric in the upper 2x2 block (t21 == t12).
struct SymTensor23 {
  Field t11, t12, t22, t31, t32;
  const Field& comp(int j, int l) const;  // j = 0,1,2 (third row = y), l = 0,1
};
// Row divergence: d1 T^{1l} + d2 T^{2l} + dy T^{3l}.
Field divergence_row(const SymTensor23& T, int l);

struct CompatibilityReport {
  std::array<double, 3> residuals;  // int H1, int H2, int(x1 H2 - x2 H1)
  double scale;                     // ||H|| * |Q|
  bool ok;
};
// Quadrature check of the three moment conditions over the cylinder slice at
// its center time (and two offset times); tolerance 1e-8 relative.
CompatibilityReport check_compatibility(const Vec2Field& H,
                                        const ConvectedCylinder& cyl,
                                        int nodes = 32);

struct KernelOptions {
  int gl_nodes = 16;        // tensor midpoint nodes per axis in zbar
  int zeta_power = 8;       // cosine power of the averaging bump
  double sigma_tol = 1e-8;  // adaptive tolerance of the dilation integral
  bool check = true;        // run the compatibility check up front
};

// Solution of  sum_j d_j R^{jl} + dy R^{3l} = H^l  with R supported in the
// cylinder, built from the transported-bump kernel representation. H must be
// supported in the cylinder and satisfy the moment conditions.
SymTensor23 kernel_solve(const Vec2Field& H,
                         std::shared_ptr<const ConvectedCylinder> cyl,
                         const KernelOptions& opt = {});

// ---- oscillatory solver -----------------------------------------------------
// Smallest D with (2D-3)/3 >= 1/theta (the ledger value of the expansion
// depth; field construction caps it by config).
int structural_D(double theta);

struct OscillatoryInput {
  Vec2Field h_re, h_im;           // amplitude of the source e^{i lambda xi} h
  Field cosphi, sinphi;           // the oscillation factor
  std::array<double, 2> grad_xi;  // constant phase gradient, 1 <= |.| <= 100
  double lambda = 1;
  std::shared_ptr<const ConvectedCylinder> cyl;
  int D = 3;
  bool main_only = false;  // skip the kernel remainder (scaling sweeps)
  KernelOptions kernel;
};

struct OscillatorySolution {
  SymTensor23 T_re, T_im;        // full complex solution
  SymTensor23 main_re, main_im;  // the phase-expansion part (zero third row)
  Vec2Field rem_re, rem_im;      // remainder source amplitude h_{D+1}... as
                                 // oscillatory fields (already with phase)
  int D = 0;
};

// Solves div T = e^{i lambda xi} h by the D-term phase expansion plus a
// kernel-solver correction for the telescoped remainder.
OscillatorySolution oscillatory_solve(const OscillatoryInput& in);

}  // namespace prandtl
