#pragma once

#include <array>
#include <vector>

#include "prandtl/divsolve.hpp"
#include "prandtl/waves.hpp"

namespace prandtl {

// Symmetric horizontal stress together with its vertical flux.
struct StressPair {
  Sym2Field S;
  Vec2Field Y;
};

// Coefficients of the frame expansion
//   S = -(S1 f1 (x) f1 + S2 f2 (x) f2 + S3 f3 (x) f3),  Y = -(Y1 f1 + Y2 f2)
// with f1=(1,0), f2=(0,1), f3=(1,1)/sqrt2; the third vertical coefficient is
// zero by convention.
struct StressFrame {
  Field S1, S2, S3, Y1, Y2;
};

// Exact linear inversion of the frame expansion and its inverse.
StressFrame decompose_stress(const Sym2Field& S, const Vec2Field& Y);
StressPair reconstruct_stress(const StressFrame& fr);

// The component with the largest sampled sup-norm max(|S_i|,|Y_i|), ties going
// to the smallest index. The selected coefficient pair is handed out together
// with its frame direction; `rest` is the input frame with that slot zeroed.
struct TargetComponent {
  int index = 1;  // 1, 2 or 3 in the fixed frame numbering
  Frame frame;
  Field S, Y;  // Y = 0 for index 3
  StressFrame rest;
  std::array<double, 3> norms{0, 0, 0};
};
TargetComponent select_target_component(const StressFrame& fr,
                                        const std::vector<Point>& samples);

// Conjugate-pair interaction sums over the atlas (no oscillation left):
//   S-part  sum over pairs of Ut (x) conj(Ut),  Y-part  sum of Vt conj(Ut).
// `main` keeps only the anchored amplitudes, `cross` only the terms containing
// a corrector factor, and full = main + cross identically.
enum class PairPart { full, main, cross };
StressPair pair_interaction(const WaveAtlas& atlas, PairPart part);

// Stress-elimination error: the anchored main interaction cancels the target
// component exactly, so only the corrector cross terms survive. The pointwise
// cancellation against (el + Sl, Yl) is verified at check_pts with tolerance
// 1e-10 * E1 (construction_error on failure).
StressPair wave_stress_corrector(const WaveAtlas& atlas, const Field& el,
                                 const Field& Sl, const Field& Yl, double E1,
                                 const std::vector<Point>& check_pts);

// Mollification error: the anchored-value gap of (e, S, Y) along the frame
// direction plus the velocity-gap interaction with the correction w = (U, V).
StressPair mollification_error_stress(const Vec2Field& u, const Field& v,
                                      const Vec2Field& ul, const Field& vl,
                                      const Field& e, const Field& el,
                                      const Field& S1, const Field& Sl,
                                      const Field& Y1, const Field& Yl,
                                      const Vec3Field& w, const Frame& frame);

// One oscillatory divergence source cos/sin(K.x - omega t) * (h_re + i h_im).
// The conjugate partner is folded in (amplitudes carry the pair factor 2), and
// lambda = |K| with a unit phase gradient, so downstream solvers see an
// admissible phase exactly.
struct OscSource {
  bool pair = false;      // two-wave interaction source
  CubeIndex cube, cube2;  // cube2 == cube for single-wave sources
  std::array<double, 2> K{0, 0};
  double omega = 0;
  double lambda = 1;                  // |K|
  std::array<double, 2> grad_xi{0, 0};  // K / |K|
  Field cosphi, sinphi;
  Vec2Field h_re, h_im;
};

// All oscillatory sources of the divergence bookkeeping: per conjugate pair
// the transport-diffusion and high-low amplitudes (single phase), and per
// adjacent ordered cube pair the high-high interaction amplitudes (combined
// phase). Their phased sum equals
//   dt U + div_x(ul (x) U + U (x) ul) + dy(vl U + V ul - dy U)
//   + div_x(U (x) U) + dy(V U) - div(pair_interaction full part)
// identically. Throws phase_bound_error if a combined phase gradient leaves
// [1, 100] * lambda (impossible for valid parity codes).
std::vector<OscSource> oscillatory_sources(const WaveAtlas& atlas);

// The per-wave builders behind oscillatory_sources, exposed so a lazily built
// atlas can construct only the sources active near sampled points.
OscSource single_wave_source(const WaveAtlas& atlas, const WaveProfile& wp);
OscSource pair_wave_source(const WaveAtlas& atlas, const WaveProfile& wi,
                           const WaveProfile& wj, int sJ);
// Cutoff supports span 3/4 of a cell per side: only index distance <= 1 per
// axis (x-axes circularly) can overlap.
bool cubes_adjacent(const CubeIndex& a, const CubeIndex& b, long cells_x);

// New stress: minus the non-target frame components plus all error pieces
// (corrector cross terms, mollification gap, solved oscillatory tensors).
// The (t,y) support of (w, tensor) is verified by shell sampling to stay in
// the supp_e neighbourhood of width (l^2, l); construction_error otherwise.
struct NewStress {
  StressPair tensor;
  StressFrame frame;  // re-decomposition of `tensor`
};
NewStress assemble_new_stress(const StressFrame& rest, const StressPair& RS,
                              const StressPair& RM,
                              const std::vector<SymTensor23>& solved,
                              const Vec3Field& w, const SupportBox& supp_e,
                              const LengthScales& sc);

}  // namespace prandtl
