#include "prandtl/stress.hpp"

#include <algorithm>
#include <cmath>

namespace prandtl {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Field zero_field() { return fconst(0.0); }

}  // namespace

// ---- frame coordinates ------------------------------------------------------

StressFrame decompose_stress(const Sym2Field& S, const Vec2Field& Y) {
  StressFrame fr;
  fr.S3 = fscale(-2.0, S.a12);
  fr.S1 = S.a12 - S.a11;
  fr.S2 = S.a12 - S.a22;
  fr.Y1 = fscale(-1.0, Y.c1);
  fr.Y2 = fscale(-1.0, Y.c2);
  return fr;
}

StressPair reconstruct_stress(const StressFrame& fr) {
  // S = -(S1 f1(x)f1 + S2 f2(x)f2 + S3 f3(x)f3), f3(x)f3 = [[1,1],[1,1]]/2
  StressPair out;
  out.S.a11 = fscale(-1.0, fr.S1) - fscale(0.5, fr.S3);
  out.S.a12 = fscale(-0.5, fr.S3);
  out.S.a22 = fscale(-1.0, fr.S2) - fscale(0.5, fr.S3);
  out.Y.c1 = fscale(-1.0, fr.Y1);
  out.Y.c2 = fscale(-1.0, fr.Y2);
  return out;
}

TargetComponent select_target_component(const StressFrame& fr,
                                        const std::vector<Point>& samples) {
  const Field* S[3] = {&fr.S1, &fr.S2, &fr.S3};
  const Field* Y[2] = {&fr.Y1, &fr.Y2};
  TargetComponent out;
  for (int i = 0; i < 3; ++i) {
    double m = 0.0;
    for (const Point& p : samples) {
      m = std::max(m, std::abs(eval_value(*S[i], p)));
      if (i < 2) m = std::max(m, std::abs(eval_value(*Y[i], p)));
    }
    out.norms[i] = m;
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (out.norms[i] > out.norms[best]) best = i;
  out.index = best + 1;
  out.frame = Frame::axis(best);
  out.S = *S[best];
  out.Y = best < 2 ? *Y[best] : zero_field();
  out.rest = fr;
  // the zeroed slot keeps the support box of the component it replaces, so
  // sums over the remaining frame stay tightly boxed in (t, y)
  auto zlike = [](const Field& f) {
    Field z = zero_field();
    if (auto b = f->supportTY()) z = with_support(std::move(z), *b);
    return z;
  };
  if (best == 0) {
    out.rest.S1 = zlike(fr.S1);
    out.rest.Y1 = zlike(fr.Y1);
  } else if (best == 1) {
    out.rest.S2 = zlike(fr.S2);
    out.rest.Y2 = zlike(fr.Y2);
  } else {
    out.rest.S3 = zlike(fr.S3);
  }
  return out;
}

// ---- pruned sums over wave profiles ----------------------------------------

namespace {

// components of the complex amplitude of the s=+1 representative
const Field& main_comp(const WaveProfile& wp, int c) {
  return c == 0 ? wp.main.c1 : c == 1 ? wp.main.c2 : wp.main.cy;
}
const Field& dre_comp(const WaveProfile& wp, int c) {
  return c == 0 ? wp.delta_re.c1 : c == 1 ? wp.delta_re.c2 : wp.delta_re.cy;
}
const Field& dim_comp(const WaveProfile& wp, int c) {
  return c == 0 ? wp.delta_im.c1 : c == 1 ? wp.delta_im.c2 : wp.delta_im.cy;
}
Field amp_re(const WaveProfile& wp, int c) {
  return main_comp(wp, c) + dre_comp(wp, c);
}
Field amp_im(const WaveProfile& wp, int c) { return dim_comp(wp, c); }

// Sum over the cubes active at the evaluation point of one conjugate-pair
// interaction slot, evaluated directly from the profile fields (so a lazily
// built atlas works too). The profile fields vanish outside their cube,
// making the pruning exact.
struct InteractionNode final : FieldNode {
  WaveAtlas atlas;
  PairPart part;
  int j, l;  // component slot (j in {0,1,2 = vertical}, l in {0,1})
  std::optional<SupportBox> box;

  InteractionNode(WaveAtlas a, PairPart pt, int jj, int ll)
      : atlas(std::move(a)), part(pt), j(jj), l(ll), box(atlas.support_box()) {}

  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet r(s);
    for (const WaveProfile* wp : atlas.active(p)) {
      Jet Wj = eval_jet(main_comp(*wp, j), p, s);
      Jet Wl = eval_jet(main_comp(*wp, l), p, s);
      switch (part) {
        case PairPart::full: {
          Jet Pj = Wj + eval_jet(dre_comp(*wp, j), p, s);
          Jet Pl = Wl + eval_jet(dre_comp(*wp, l), p, s);
          Jet Qj = eval_jet(dim_comp(*wp, j), p, s);
          Jet Ql = eval_jet(dim_comp(*wp, l), p, s);
          r.axpy(2.0, Pj * Pl + Qj * Ql);
          break;
        }
        case PairPart::main:
          r.axpy(2.0, Wj * Wl);
          break;
        case PairPart::cross: {
          Jet dj = eval_jet(dre_comp(*wp, j), p, s);
          Jet dl = eval_jet(dre_comp(*wp, l), p, s);
          Jet Qj = eval_jet(dim_comp(*wp, j), p, s);
          Jet Ql = eval_jet(dim_comp(*wp, l), p, s);
          r.axpy(2.0, Wj * dl + dj * Wl + dj * dl + Qj * Ql);
          break;
        }
      }
    }
    return r;
  }
  std::optional<SupportBox> supportTY() const override { return box; }
};

}  // namespace

StressPair pair_interaction(const WaveAtlas& atlas, PairPart part) {
  // component slots: (j,l) of the S part as 11,12,22 then Y_1, Y_2
  auto slot = [&](int j, int l) -> Field {
    return std::make_shared<InteractionNode>(atlas, part, j, l);
  };
  StressPair out;
  out.S.a11 = slot(0, 0);
  out.S.a12 = slot(0, 1);
  out.S.a22 = slot(1, 1);
  out.Y.c1 = slot(2, 0);
  out.Y.c2 = slot(2, 1);
  return out;
}

StressPair wave_stress_corrector(const WaveAtlas& atlas, const Field& el,
                                 const Field& Sl, const Field& Yl, double E1,
                                 const std::vector<Point>& check_pts) {
  StressPair main = pair_interaction(atlas, PairPart::main);
  const auto& f = atlas.inputs().frame.f;
  double ff[3] = {f[0] * f[0], f[0] * f[1], f[1] * f[1]};
  double tol = 1e-10 * E1;
  for (const Point& p : check_pts) {
    double es = eval_value(el, p) + eval_value(Sl, p);
    double y = eval_value(Yl, p);
    double r = std::abs(-es * ff[0] + eval_value(main.S.a11, p));
    r = std::max(r, std::abs(-es * ff[1] + eval_value(main.S.a12, p)));
    r = std::max(r, std::abs(-es * ff[2] + eval_value(main.S.a22, p)));
    r = std::max(r, std::abs(-y * f[0] + eval_value(main.Y.c1, p)));
    r = std::max(r, std::abs(-y * f[1] + eval_value(main.Y.c2, p)));
    if (r > tol)
      throw construction_error(
          "anchored stress cancellation failed: residual " + std::to_string(r));
  }
  return pair_interaction(atlas, PairPart::cross);
}

// ---- mollification error ----------------------------------------------------

StressPair mollification_error_stress(const Vec2Field& u, const Field& v,
                                      const Vec2Field& ul, const Field& vl,
                                      const Field& e, const Field& el,
                                      const Field& S1, const Field& Sl,
                                      const Field& Y1, const Field& Yl,
                                      const Vec3Field& w, const Frame& frame) {
  Field gapS = el - e + (Sl - S1);
  Field gapY = Yl - Y1;
  const auto& f = frame.f;
  Vec2Field du{u.c1 - ul.c1, u.c2 - ul.c2};
  Field dv = v - vl;
  StressPair out;
  out.S.a11 = fscale(f[0] * f[0], gapS) + fscale(2.0, du.c1 * w.c1);
  out.S.a12 = fscale(f[0] * f[1], gapS) + du.c1 * w.c2 + du.c2 * w.c1;
  out.S.a22 = fscale(f[1] * f[1], gapS) + fscale(2.0, du.c2 * w.c2);
  out.Y.c1 = fscale(f[0], gapY) + w.cy * du.c1 + dv * w.c1;
  out.Y.c2 = fscale(f[1], gapY) + w.cy * du.c2 + dv * w.c2;
  return out;
}

// ---- oscillatory sources ----------------------------------------------------

namespace {

// cos/sin(K.x - omega t) as fields
std::pair<Field, Field> phase_fields(const std::array<double, 2>& K,
                                     double omega) {
  Field arg = faffine(0.0, -omega, K[0], K[1], 0.0);
  return {fprofile(profile_cos(1.0), arg), fprofile(profile_sin(1.0), arg)};
}

// circular index distance on the periodised x-axes
long circ_dist(long a, long b, long period) {
  long d = std::abs(a - b) % period;
  return std::min(d, period - d);
}

}  // namespace

bool cubes_adjacent(const CubeIndex& a, const CubeIndex& b, long cells_x) {
  if (std::abs(a.k0 - b.k0) > 1) return false;
  if (std::abs(a.k3 - b.k3) > 1) return false;
  if (circ_dist(a.k1, b.k1, cells_x) > 1) return false;
  if (circ_dist(a.k2, b.k2, cells_x) > 1) return false;
  return true;
}

OscSource single_wave_source(const WaveAtlas& atlas, const WaveProfile& wp) {
  const WaveInputs& in = atlas.inputs();
  const Vec2Field& ul = in.ul;
  const Field& vl = in.vl;
  // transport-diffusion and high-low amplitude of one conjugate pair:
  //   h = i(K.ul - omega) Ut + i(K.Ut) ul + dt Ut
  //       + sum_j dj(ul_j Ut + Ut_j ul) + dy(vl Ut + Vt ul) - dyy Ut
  Field P1 = amp_re(wp, 0), P2 = amp_re(wp, 1), Pv = amp_re(wp, 2);
  Field Q1 = amp_im(wp, 0), Q2 = amp_im(wp, 1), Qv = amp_im(wp, 2);
  Field ku = fscale(wp.ph.K[0], ul.c1) + fscale(wp.ph.K[1], ul.c2) +
             fconst(-wp.ph.omega);
  Field KP = fscale(wp.ph.K[0], P1) + fscale(wp.ph.K[1], P2);
  Field KQ = fscale(wp.ph.K[0], Q1) + fscale(wp.ph.K[1], Q2);
  auto drift = [&](const Field& A1, const Field& A2, const Field& Av, int l) {
    const Field& Al = l == 0 ? A1 : A2;
    const Field& ull = l == 0 ? ul.c1 : ul.c2;
    Field r = fderiv(Al, {.g = 1});
    r = r + fderiv(ul.c1 * Al + A1 * ull, {.a1 = 1});
    r = r + fderiv(ul.c2 * Al + A2 * ull, {.a2 = 1});
    r = r + fderiv(vl * Al + Av * ull, {.b = 1});
    r = r - fderiv(Al, {.b = 2});
    return r;
  };
  OscSource s;
  s.cube = s.cube2 = wp.k;
  s.K = wp.ph.K;
  s.omega = wp.ph.omega;
  s.lambda = std::hypot(s.K[0], s.K[1]);
  s.grad_xi = {s.K[0] / s.lambda, s.K[1] / s.lambda};
  s.cosphi = wp.ph.cosphi;
  s.sinphi = wp.ph.sinphi;
  for (int l = 0; l < 2; ++l) {
    const Field& ull = l == 0 ? ul.c1 : ul.c2;
    const Field& Pl = l == 0 ? P1 : P2;
    const Field& Ql = l == 0 ? Q1 : Q2;
    Field re = fscale(-1.0, ku * Ql) - KQ * ull + drift(P1, P2, Pv, l);
    Field im = ku * Pl + KP * ull + drift(Q1, Q2, Qv, l);
    (l == 0 ? s.h_re.c1 : s.h_re.c2) = fscale(2.0, re);
    (l == 0 ? s.h_im.c1 : s.h_im.c2) = fscale(2.0, im);
  }
  return s;
}

OscSource pair_wave_source(const WaveAtlas& atlas, const WaveProfile& wi,
                           const WaveProfile& wj, int sJ) {
  const WaveInputs& in = atlas.inputs();
  // high-high interaction of the representatives I = (cube, +1),
  // J = (cube2, sJ); the conjugate of the ordered pair is folded into the
  // factor 2.
  Field Pi1 = amp_re(wi, 0), Pi2 = amp_re(wi, 1), Piv = amp_re(wi, 2);
  Field Qi1 = amp_im(wi, 0), Qi2 = amp_im(wi, 1), Qiv = amp_im(wi, 2);
  std::array<double, 2> K{wi.ph.K[0] + sJ * wj.ph.K[0],
                          wi.ph.K[1] + sJ * wj.ph.K[1]};
  double omega = wi.ph.omega + sJ * wj.ph.omega;
  OscSource s;
  s.pair = true;
  s.cube = wi.k;
  s.cube2 = wj.k;
  s.K = K;
  s.omega = omega;
  s.lambda = std::hypot(K[0], K[1]);
  // distinct overlapping cubes always differ in parity, so the nominal
  // frequency sum is a nonzero multiple of the base frequency; lattice
  // snapping moves it by at most 2 pi, hence the half-way threshold
  if (s.lambda < 0.5 * in.sc.lambda || s.lambda > 100.0 * in.sc.lambda)
    throw phase_bound_error("combined phase gradient outside [1, 100]");
  s.grad_xi = {K[0] / s.lambda, K[1] / s.lambda};
  std::tie(s.cosphi, s.sinphi) = phase_fields(K, omega);
  // h = i(K.A) B + sum_j dj(A_j B) + dy(Av B), A = Ut_I, B = Ut_J
  Field KAre = fscale(K[0], Pi1) + fscale(K[1], Pi2);
  Field KAim = fscale(K[0], Qi1) + fscale(K[1], Qi2);
  for (int l = 0; l < 2; ++l) {
    Field Bre = l == 0 ? amp_re(wj, 0) : amp_re(wj, 1);
    Field Bim = fscale((double)sJ, l == 0 ? amp_im(wj, 0) : amp_im(wj, 1));
    Field re = fscale(-1.0, KAim * Bre) - KAre * Bim;
    re = re + fderiv(Pi1 * Bre - Qi1 * Bim, {.a1 = 1});
    re = re + fderiv(Pi2 * Bre - Qi2 * Bim, {.a2 = 1});
    re = re + fderiv(Piv * Bre - Qiv * Bim, {.b = 1});
    Field im = KAre * Bre - KAim * Bim;
    im = im + fderiv(Pi1 * Bim + Qi1 * Bre, {.a1 = 1});
    im = im + fderiv(Pi2 * Bim + Qi2 * Bre, {.a2 = 1});
    im = im + fderiv(Piv * Bim + Qiv * Bre, {.b = 1});
    (l == 0 ? s.h_re.c1 : s.h_re.c2) = fscale(2.0, re);
    (l == 0 ? s.h_im.c1 : s.h_im.c2) = fscale(2.0, im);
  }
  return s;
}

std::vector<OscSource> oscillatory_sources(const WaveAtlas& atlas) {
  const auto& ps = atlas.profiles();
  long P = atlas.inputs().fam->spatial().cells_x();
  std::vector<OscSource> out;
  for (const WaveProfile& wp : ps) out.push_back(single_wave_source(atlas, wp));
  for (size_t i = 0; i < ps.size(); ++i)
    for (size_t j = 0; j < ps.size(); ++j) {
      if (!cubes_adjacent(ps[i].k, ps[j].k, P)) continue;
      for (int sJ = +1; sJ >= -1; sJ -= 2) {
        if (i == j && sJ == -1) continue;  // J = conj(I) cancels identically
        out.push_back(pair_wave_source(atlas, ps[i], ps[j], sJ));
      }
    }
  return out;
}

// ---- assembly ---------------------------------------------------------------

namespace {

// Throw if f takes a nonzero value outside `allowed`: scan the part of its
// declared (t,y) support box that sticks out, over a small x sample set.
void police_support(const Field& f, const SupportBox& allowed,
                    const char* what) {
  auto boxOpt = f->supportTY();
  SupportBox box = boxOpt ? *boxOpt
                          : allowed.inflate(std::abs(allowed.tmax - allowed.tmin) + 1.0,
                                            std::abs(allowed.ymax - allowed.ymin) + 1.0);
  if (boxOpt && box.tmin >= allowed.tmin && box.tmax <= allowed.tmax &&
      box.ymin >= allowed.ymin && box.ymax <= allowed.ymax)
    return;  // declared support already inside
  const int nt = 17, ny = 17;
  const double xs[3] = {0.11, 0.47, 0.83};
  for (int it = 0; it < nt; ++it)
    for (int iy = 0; iy < ny; ++iy) {
      double t = box.tmin + (box.tmax - box.tmin) * it / (nt - 1.0);
      double y = box.ymin + (box.ymax - box.ymin) * iy / (ny - 1.0);
      if (allowed.contains(t, y)) continue;
      for (double x1 : xs)
        for (double x2 : xs)
          if (double v = eval_value(f, {t, x1, x2, y}); v != 0.0)
            throw construction_error(
                std::string(what) + " support leaves the admissible shell: " +
                std::to_string(v) + " at t=" + std::to_string(t) +
                " x=(" + std::to_string(x1) + "," + std::to_string(x2) +
                ") y=" + std::to_string(y));
    }
}

}  // namespace

NewStress assemble_new_stress(const StressFrame& rest, const StressPair& RS,
                              const StressPair& RM,
                              const std::vector<SymTensor23>& solved,
                              const Vec3Field& w, const SupportBox& supp_e,
                              const LengthScales& sc) {
  StressPair base = reconstruct_stress(rest);
  Field S11 = base.S.a11 + RS.S.a11 + RM.S.a11;
  Field S12 = base.S.a12 + RS.S.a12 + RM.S.a12;
  Field S22 = base.S.a22 + RS.S.a22 + RM.S.a22;
  Field Y1 = base.Y.c1 + RS.Y.c1 + RM.Y.c1;
  Field Y2 = base.Y.c2 + RS.Y.c2 + RM.Y.c2;
  for (const SymTensor23& T : solved) {
    S11 = S11 + T.t11;
    S12 = S12 + T.t12;
    S22 = S22 + T.t22;
    Y1 = Y1 + T.t31;
    Y2 = Y2 + T.t32;
  }
  SupportBox shell = supp_e.inflate(sc.l * sc.l, sc.l);
  const Field* checks[8] = {&S11, &S12, &S22, &Y1, &Y2, &w.c1, &w.c2, &w.cy};
  const char* names[8] = {"S11", "S12", "S22", "Y1", "Y2", "w1", "w2", "wy"};
  for (int i = 0; i < 8; ++i) police_support(*checks[i], shell, names[i]);

  NewStress out;
  out.tensor = {{S11, S12, S22}, {Y1, Y2}};
  out.frame = decompose_stress(out.tensor.S, out.tensor.Y);
  return out;
}

}  // namespace prandtl
