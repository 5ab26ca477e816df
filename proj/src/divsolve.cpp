#include "prandtl/divsolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>

#include "prandtl/partition.hpp"
#include "prandtl/quadrature.hpp"

namespace prandtl {

namespace {

uint64_t bits(double d) {
  uint64_t u;
  std::memcpy(&u, &d, 8);
  return u;
}

// nearest-representative reduction of a torus displacement
double wrap_diff(double d) { return d - std::nearbyint(d); }

// copy a pure-t jet (spec axes(nt,0,0,0)) into the t-axis of spec s
Jet embed_t(const Jet& jt, const JetSpec& s) {
  Jet r(s);
  int nt = std::min<int>(jt.spec.nt, s.nt);
  for (int it = 0; it <= nt; ++it) r.at(it, 0, 0, 0) = jt.at(it, 0, 0, 0);
  return r;
}

// ---------------------------------------------------------------------------
// Torus spectral operators
// ---------------------------------------------------------------------------

std::mutex fft_mu;

void fft2_forward(std::vector<std::complex<double>>& a, int n) {
  std::lock_guard<std::mutex> lk(fft_mu);
  static std::map<int, std::pair<fftw_plan, fftw_complex*>> plans;
  auto it = plans.find(n);
  if (it == plans.end()) {
    fftw_complex* buf = fftw_alloc_complex((size_t)n * n);
    fftw_plan p = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    it = plans.emplace(n, std::make_pair(p, buf)).first;
  }
  auto [plan, buf] = it->second;
  std::memcpy(buf, a.data(), sizeof(fftw_complex) * a.size());
  fftw_execute_dft(plan, buf, buf);
  std::memcpy(a.data(), buf, sizeof(fftw_complex) * a.size());
}

struct SliceKey {
  uint64_t t, y;
  int nt, ny;
  auto operator<=>(const SliceKey&) const = default;
};

struct TorusSlice {
  // spec[c * ncoef + (it*(ny+1)+iy)] -> n*n spectrum of that (t,y)-Taylor
  // coefficient of component c
  std::vector<std::vector<std::complex<double>>> spec;
  int nt, ny;
};

struct TorusData {
  Vec2Field H;
  int m, n;
  mutable std::map<SliceKey, TorusSlice> cache;
  mutable std::mutex mu;

  const TorusSlice& slice(double t, double y, int nt, int ny) const {
    SliceKey key{bits(t), bits(y), nt, ny};
    {
      std::lock_guard<std::mutex> lk(mu);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    TorusSlice s;
    s.nt = nt;
    s.ny = ny;
    int ncoef = (nt + 1) * (ny + 1);
    JetSpec js = JetSpec::axes(nt, 0, 0, ny);
    s.spec.assign(2 * ncoef, std::vector<std::complex<double>>((size_t)n * n));
    double hmax = 0.0;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        Point p{t, (double)i1 / n, (double)i2 / n, y};
        for (int c = 0; c < 2; ++c) {
          Jet j = eval_jet(c == 0 ? H.c1 : H.c2, p, js);
          hmax = std::max(hmax, std::abs(j.value()));
          for (int it = 0; it <= nt; ++it)
            for (int iy = 0; iy <= ny; ++iy)
              s.spec[c * ncoef + it * (ny + 1) + iy][(size_t)i1 * n + i2] =
                  j.at(it, 0, 0, iy);
        }
      }
    double inv = 1.0 / ((double)n * n);
    for (auto& sp : s.spec) {
      fft2_forward(sp, n);
      for (auto& z : sp) z *= inv;
    }
    // zero x-mean requirement on the field itself
    double m1 = std::abs(s.spec[0][0]), m2 = std::abs(s.spec[ncoef][0]);
    if (std::max(m1, m2) > 1e-8 * std::max(hmax, 1e-12))
      throw compatibility_error("nonzero x-mean in torus inversion",
                                {m1, m2, 0.0});
    std::lock_guard<std::mutex> lk(mu);
    if (cache.size() > 64) cache.clear();
    return cache.emplace(key, std::move(s)).first->second;
  }
};

// kind 0,1: components of Dx^-1 H; kind 2,3,4: calR components 11,12,22
struct TorusNode final : FieldNode {
  std::shared_ptr<TorusData> d;
  int kind;
  TorusNode(std::shared_ptr<TorusData> dd, int k) : d(std::move(dd)), kind(k) {}

  Jet eval(const Point& p, const JetSpec& s) const override {
    const TorusSlice& sl = d->slice(p.t, p.y, s.nt, s.ny);
    int ncoef = (sl.nt + 1) * (sl.ny + 1);
    int n = d->n;
    Jet out(s);
    const std::complex<double> I(0.0, 1.0);
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) {
        int k1 = j1 <= n / 2 ? j1 : j1 - n;
        int k2 = j2 <= n / 2 ? j2 : j2 - n;
        if (k1 == 0 && k2 == 0) continue;
        double K1 = 2 * M_PI * k1, K2 = 2 * M_PI * k2;
        double K2n = K1 * K1 + K2 * K2;
        std::complex<double> ph =
            std::exp(I * (K1 * p.x1 + K2 * p.x2));
        for (int it = 0; it <= sl.nt; ++it)
          for (int iy = 0; iy <= sl.ny; ++iy) {
            size_t idx = (size_t)j1 * n + j2;
            std::complex<double> c1 = sl.spec[it * (sl.ny + 1) + iy][idx];
            std::complex<double> c2 =
                sl.spec[ncoef + it * (sl.ny + 1) + iy][idx];
            std::complex<double> A;
            if (kind < 2) {
              A = -(kind == 0 ? c1 : c2) / K2n;
            } else {
              // G = -c/|K|^2; PG = G - K (K.G)/|K|^2
              std::complex<double> G1 = -c1 / K2n, G2 = -c2 / K2n;
              std::complex<double> KG = (K1 * G1 + K2 * G2) / K2n;
              std::complex<double> P1 = G1 - K1 * KG, P2 = G2 - K2 * KG;
              std::complex<double> divG = I * (K1 * G1 + K2 * G2);
              if (kind == 2) A = divG + 2.0 * I * K1 * P1;
              else if (kind == 3) A = I * (K1 * P2 + K2 * P1);
              else A = divG + 2.0 * I * K2 * P2;
            }
            A *= ph;
            std::complex<double> p1(1.0, 0.0);  // (i K1)^{i1} / i1!
            for (int i1 = 0; i1 <= s.nx1; ++i1) {
              std::complex<double> p2(1.0, 0.0);  // (i K2)^{i2} / i2!
              for (int i2 = 0; i2 <= s.nx2; ++i2) {
                if (it + i1 + i2 + iy <= s.total)
                  out.at(it, i1, i2, iy) += (A * p1 * p2).real();
                p2 *= I * K2 / (double)(i2 + 1);
              }
              p1 *= I * K1 / (double)(i1 + 1);
            }
          }
      }
    return out;
  }
  bool dependsOn(int) const override { return true; }
  std::optional<SupportBox> supportTY() const override {
    auto a = d->H.c1->supportTY(), b = d->H.c2->supportTY();
    if (!a || !b) return std::nullopt;
    return SupportBox{std::min(a->tmin, b->tmin), std::max(a->tmax, b->tmax),
                      std::min(a->ymin, b->ymin), std::max(a->ymax, b->ymax)};
  }
};

}  // namespace

Vec2Field poisson_torus(const Vec2Field& H, int m) {
  auto d = std::make_shared<TorusData>();
  d->H = H;
  d->m = m;
  d->n = 1 << m;
  return {std::make_shared<TorusNode>(d, 0), std::make_shared<TorusNode>(d, 1)};
}

Sym2Field calR(const Vec2Field& H, int m) {
  auto d = std::make_shared<TorusData>();
  d->H = H;
  d->m = m;
  d->n = 1 << m;
  return {std::make_shared<TorusNode>(d, 2), std::make_shared<TorusNode>(d, 3),
          std::make_shared<TorusNode>(d, 4)};
}

// ---------------------------------------------------------------------------
// Convected cylinders
// ---------------------------------------------------------------------------

ConvectedCylinder::ConvectedCylinder(Point q0, double tbar, double l1,
                                     double l2, double l3, Vec2Field u, Field v,
                                     double Ymax)
    : q0_(q0), tbar_(tbar), l1_(l1), l2_(l2), l3_(l3), Ymax_(Ymax),
      u_(std::move(u)), v_(std::move(v)) {}

Point ConvectedCylinder::path_value(double t) const {
  auto Z = path(t, 0);
  return Point{t, Z[0].value(), Z[1].value(), Z[2].value()};
}

std::array<Jet, 3> ConvectedCylinder::path(double t, int nt) const {
  std::pair<uint64_t, int> key{bits(t), nt};
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  // RK4 for the center value
  double z[3] = {q0_.x1, q0_.x2, q0_.y};
  double dt = t - q0_.t;
  int steps = std::max(1, (int)std::ceil(std::abs(dt) / (tbar_ / 64)));
  double h = dt / steps;
  auto rhs = [&](double tt, const double zz[3], double out[3]) {
    Point p{tt, zz[0], zz[1], zz[2]};
    out[0] = eval_value(u_.c1, p);
    out[1] = eval_value(u_.c2, p);
    out[2] = eval_value(v_, p);
  };
  double tt = q0_.t;
  for (int s = 0; s < steps; ++s) {
    double k1[3], k2[3], k3[3], k4[3], zm[3];
    rhs(tt, z, k1);
    for (int i = 0; i < 3; ++i) zm[i] = z[i] + 0.5 * h * k1[i];
    rhs(tt + 0.5 * h, zm, k2);
    for (int i = 0; i < 3; ++i) zm[i] = z[i] + 0.5 * h * k2[i];
    rhs(tt + 0.5 * h, zm, k3);
    for (int i = 0; i < 3; ++i) zm[i] = z[i] + h * k3[i];
    rhs(tt + h, zm, k4);
    for (int i = 0; i < 3; ++i)
      z[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    tt += h;
    if (z[2] <= 0.0 || z[2] >= Ymax_)
      throw domain_exit_error("cylinder center left the domain");
  }
  JetSpec ts = JetSpec::axes(nt, 0, 0, 0);
  std::array<Jet, 3> Z{Jet::constant(ts, z[0]), Jet::constant(ts, z[1]),
                       Jet::constant(ts, z[2])};
  Jet T = Jet::variable(ts, 0, t);
  // Taylor recursion: coefficient m of dZ/dt gives coefficient m+1 of Z
  for (int m = 0; m < nt; ++m) {
    Jet du = field_at_jet(u_.c1, T, Z[0], Z[1], Z[2]);
    Jet dv = field_at_jet(u_.c2, T, Z[0], Z[1], Z[2]);
    Jet dw = field_at_jet(v_, T, Z[0], Z[1], Z[2]);
    Z[0].at(m + 1, 0, 0, 0) = du.at(m, 0, 0, 0) / (m + 1);
    Z[1].at(m + 1, 0, 0, 0) = dv.at(m, 0, 0, 0) / (m + 1);
    Z[2].at(m + 1, 0, 0, 0) = dw.at(m, 0, 0, 0) / (m + 1);
  }
  std::lock_guard<std::mutex> lk(mu_);
  return memo_.emplace(key, Z).first->second;
}

bool ConvectedCylinder::contains(const Point& p) const {
  if (std::abs(p.t - q0_.t) > tbar_) return false;
  Point Z = path_value(p.t);
  return std::abs(wrap_diff(p.x1 - Z.x1)) <= l1_ &&
         std::abs(wrap_diff(p.x2 - Z.x2)) <= l2_ && std::abs(p.y - Z.y) <= l3_;
}

Field ConvectedCylinder::frozen_velocity(int i) const {
  auto self = this;
  return make_func([self, i](const Point& p, const JetSpec& s) {
    auto Z = self->path(p.t, s.nt);
    JetSpec ts = JetSpec::axes(s.nt, 0, 0, 0);
    Jet T = Jet::variable(ts, 0, p.t);
    const Field& f = i == 0 ? self->u_.c1 : i == 1 ? self->u_.c2 : self->v_;
    return embed_t(field_at_jet(f, T, Z[0], Z[1], Z[2]), s);
  });
}

SupportBox ConvectedCylinder::bounding_box() const {
  double ymin = 1e300, ymax = -1e300;
  for (int i = 0; i <= 64; ++i) {
    double t = q0_.t - tbar_ + 2 * tbar_ * i / 64.0;
    Point Z = path_value(t);
    ymin = std::min(ymin, Z.y - l3_);
    ymax = std::max(ymax, Z.y + l3_);
  }
  return SupportBox{q0_.t - tbar_, q0_.t + tbar_, ymin, ymax};
}

// ---------------------------------------------------------------------------
// Kernel solver
// ---------------------------------------------------------------------------

const Field& SymTensor23::comp(int j, int l) const {
  if (j == 0) return l == 0 ? t11 : t12;
  if (j == 1) return l == 0 ? t12 : t22;
  return l == 0 ? t31 : t32;
}

Field divergence_row(const SymTensor23& T, int l) {
  return fadd({fderiv(T.comp(0, l), {.a1 = 1}), fderiv(T.comp(1, l), {.a2 = 1}),
               fderiv(T.comp(2, l), {.b = 1})});
}

CompatibilityReport check_compatibility(const Vec2Field& H,
                                        const ConvectedCylinder& cyl,
                                        int nodes) {
  // Uniform midpoint rule: the sources vanish at the cylinder boundary, so
  // equispaced nodes converge much faster than Gauss nodes here.
  auto r = cyl.radii();
  auto mid = [nodes](int i) { return 2.0 * (i + 0.5) / nodes - 1.0; };
  double mw = 2.0 / nodes;
  std::array<double, 3> worst{0, 0, 0};
  double hmax = 0.0;
  for (double toff : {-0.5, 0.0, 0.5}) {
    double t = cyl.center().t + toff * cyl.tbar();
    Point Z = cyl.path_value(t);
    std::array<double, 3> acc{0, 0, 0};
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j)
        for (int k = 0; k < nodes; ++k) {
          double w1 = r[0] * mid(i), w2 = r[1] * mid(j), w3 = r[2] * mid(k);
          double wt = r[0] * r[1] * r[2] * mw * mw * mw;
          Point p{t, Z.x1 + w1, Z.x2 + w2, Z.y + w3};
          double h1 = eval_value(H.c1, p), h2 = eval_value(H.c2, p);
          hmax = std::max({hmax, std::abs(h1), std::abs(h2)});
          acc[0] += wt * h1;
          acc[1] += wt * h2;
          acc[2] += wt * (w1 * h2 - w2 * h1);
        }
    for (int i = 0; i < 3; ++i)
      worst[i] = std::max(worst[i], std::abs(acc[i]));
  }
  CompatibilityReport rep;
  rep.residuals = worst;
  rep.scale = hmax * 8 * r[0] * r[1] * r[2];
  double tol = 1e-8 * std::max(rep.scale, 1e-12);
  rep.ok = worst[0] <= tol && worst[1] <= tol && worst[2] <= tol;
  return rep;
}

namespace {

struct KernelKey {
  uint64_t t, x1, x2, y, sk;
  auto operator<=>(const KernelKey&) const = default;
};

// jets of a 1D profile and its derivative at a jet-valued argument
struct ProfilePair {
  Jet val, der;
};
ProfilePair profile_jets(const ProfilePtr& pr, const Jet& arg) {
  int n = arg.spec.total;
  std::vector<double> tab(n + 2);
  pr->taylor(arg.value(), n + 1, tab.data());
  std::vector<double> dtab(n + 1);
  for (int k = 0; k <= n; ++k) dtab[k] = (k + 1) * tab[k + 1];
  tab.resize(n + 1);
  return {jet_compose1(tab, arg), jet_compose1(dtab, arg)};
}

struct KernelData {
  Vec2Field H;
  std::shared_ptr<const ConvectedCylinder> cyl;
  KernelOptions opt;
  ProfilePtr b1, b2, b3;  // zeta-bump factors per axis
  struct Node {
    double w[3];
    double weight;
    double zeta, dz1, dz2;  // zeta and its two x-derivatives at the node
  };
  std::vector<Node> nodes;
  SupportBox box;
  mutable std::map<KernelKey, std::array<Jet, 5>> cache;
  mutable std::mutex mu;

  std::array<Jet, 5> all(const Point& p, const JetSpec& s) const;
};

// flatten/unflatten a 5-vector of jets for the adaptive integrator
std::vector<double> flatten(const std::array<Jet, 5>& a) {
  std::vector<double> v;
  for (const auto& j : a) v.insert(v.end(), j.c.begin(), j.c.end());
  return v;
}

std::array<Jet, 5> KernelData::all(const Point& p, const JetSpec& s) const {
  KernelKey key{bits(p.t), bits(p.x1), bits(p.x2), bits(p.y), s.key()};
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto radii = cyl->radii();
  auto Zt = cyl->path(p.t, s.nt);
  Jet Z[3] = {embed_t(Zt[0], s), embed_t(Zt[1], s), embed_t(Zt[2], s)};
  // displacement jets w_i = z_i - Z_i with torus-reduced base values
  double base[3] = {wrap_diff(p.x1 - Z[0].value()),
                    wrap_diff(p.x2 - Z[1].value()), p.y - Z[2].value()};
  Jet w[3];
  for (int i = 0; i < 3; ++i) {
    w[i] = Jet(s);
    w[i].axpy(-1.0, Z[i]);
    w[i].c[0] = base[i];
  }
  if (s.nx1 >= 1 && s.total >= 1) w[0].at(0, 1, 0, 0) += 1.0;
  if (s.nx2 >= 1 && s.total >= 1) w[1].at(0, 0, 1, 0) += 1.0;
  if (s.ny >= 1 && s.total >= 1) w[2].at(0, 0, 0, 1) += 1.0;
  Jet T = Jet::variable(s, 0, p.t);
  JetSpec table = JetSpec::axes(
      s.nt, std::min<int>(s.nx1 + s.nt, s.total),
      std::min<int>(s.nx2 + s.nt, s.total), std::min<int>(s.ny + s.nt, s.total),
      s.total);

  auto accumulate = [&](std::array<Jet, 5>& R, double wt, double zeta,
                        double dz1, double dz2, const Jet pref[3],
                        const Jet& H1, const Jet& H2) {
    // plain dilation part (divergence telescopes to H up to symmetrization)
    Jet p1H1 = pref[0] * H1, p1H2 = pref[0] * H2;
    Jet p2H1 = pref[1] * H1, p2H2 = pref[1] * H2;
    R[0].axpy(-2.0 * wt * zeta, p1H1);
    R[1].axpy(-wt * zeta, p1H2);
    R[1].axpy(-wt * zeta, p2H1);
    R[2].axpy(-2.0 * wt * zeta, p2H2);
    R[3].axpy(-1.5 * wt * zeta, pref[2] * H1);
    R[4].axpy(-1.5 * wt * zeta, pref[2] * H2);
    if (dz1 != 0.0 || dz2 != 0.0) {
      // symmetrization correction, simplified in closed form:
      //   C11 = z2 (P12 H1 - P11 H2),  C22 = z1 (P12 H2 - P22 H1),
      //   C12 = -1/2 [ z1 (P12 H1 - P11 H2) + z2 (P12 H2 - P22 H1) ],
      //   C31 =  1/2 z2 r3 (r2 H1 - r1 H2),  C32 = -1/2 z1 r3 (r2 H1 - r1 H2)
      // with P_{ab} = pref_a pref_b and z_k the zeta x-derivatives
      Jet A = pref[1] * p1H1;   // P12 H1
      A -= pref[0] * p1H2;      // - P11 H2
      Jet B = pref[0] * p2H2;   // P12 H2
      B -= pref[1] * p2H1;      // - P22 H1
      Jet Cy = p2H1;            // r3 (r2 H1 - r1 H2)
      Cy -= p1H2;
      Cy = pref[2] * Cy;
      R[0].axpy(wt * dz2, A);
      R[1].axpy(-0.5 * wt * dz1, A);
      R[1].axpy(-0.5 * wt * dz2, B);
      R[2].axpy(wt * dz1, B);
      R[3].axpy(0.5 * wt * dz2, Cy);
      R[4].axpy(-0.5 * wt * dz1, Cy);
    }
  };

  // half A: sigma in [1/2, 1], zbar-form, zeta factors constant per node
  auto halfA = [&](double sigma) {
    std::array<Jet, 5> R{Jet(s), Jet(s), Jet(s), Jet(s), Jet(s)};
    double inv3 = 1.0 / (sigma * sigma * sigma);
    for (const Node& nd : nodes) {
      Jet arg[3], pref[3];
      bool inside = true;
      for (int i = 0; i < 3; ++i) {
        pref[i] = (1.0 / sigma) * w[i];
        pref[i].c[0] = (base[i] - nd.w[i]) / sigma;
        arg[i] = Z[i] + pref[i];
        arg[i].c[0] = Z[i].value() + nd.w[i] + (base[i] - nd.w[i]) / sigma;
        if (std::abs(arg[i].value() - Z[i].value()) > radii[i]) inside = false;
      }
      if (!inside) continue;
      Jet H1 = field_at_jet(H.c1, T, arg[0], arg[1], arg[2], table);
      Jet H2 = field_at_jet(H.c2, T, arg[0], arg[1], arg[2], table);
      accumulate(R, nd.weight * inv3, nd.zeta, nd.dz1, nd.dz2, pref, H1, H2);
    }
    return flatten(R);
  };

  // half B: sigma in [0, 1/2], v-form; H factors independent of sigma
  std::vector<std::array<Jet, 2>> Hnode;
  auto ensure_Hnode = [&]() {
    if (!Hnode.empty()) return;
    Hnode.resize(nodes.size());
    JetSpec ttab = JetSpec::axes(s.nt, s.nt, s.nt, s.nt, s.nt);
    JetSpec ts = JetSpec::axes(s.nt, 0, 0, 0);
    Jet Tt = Jet::variable(ts, 0, p.t);
    for (size_t i = 0; i < nodes.size(); ++i) {
      Jet a1 = Zt[0], a2 = Zt[1], a3 = Zt[2];
      a1.c[0] += nodes[i].w[0];
      a2.c[0] += nodes[i].w[1];
      a3.c[0] += nodes[i].w[2];
      Hnode[i] = {embed_t(field_at_jet(H.c1, Tt, a1, a2, a3, ttab), s),
                  embed_t(field_at_jet(H.c2, Tt, a1, a2, a3, ttab), s)};
    }
  };
  auto halfB = [&](double sigma) {
    ensure_Hnode();
    std::array<Jet, 5> R{Jet(s), Jet(s), Jet(s), Jet(s), Jet(s)};
    double om = 1.0 - sigma;
    double inv3 = 1.0 / (om * om * om);
    for (size_t i = 0; i < nodes.size(); ++i) {
      const Node& nd = nodes[i];
      Jet zarg[3], pref[3];
      bool inside = true;
      for (int k = 0; k < 3; ++k) {
        zarg[k] = (1.0 / om) * w[k];
        zarg[k].c[0] = (base[k] - sigma * nd.w[k]) / om;
        if (std::abs(zarg[k].value()) > radii[k]) inside = false;
        pref[k] = (-1.0 / om) * w[k];
        pref[k].c[0] = (nd.w[k] - base[k]) / om;
      }
      if (!inside) continue;
      ProfilePair f1 = profile_jets(b1, zarg[0]);
      ProfilePair f2 = profile_jets(b2, zarg[1]);
      ProfilePair f3 = profile_jets(b3, zarg[2]);
      Jet f23 = f2.val * f3.val;
      Jet zv = f1.val * f23;
      Jet dz1 = f1.der * f23;
      Jet dz2 = f1.val * (f2.der * f3.val);
      // zeta enters as jets here; reuse `accumulate` by folding the zeta jets
      // into the H factors (they multiply every term linearly)
      Jet H1z = Hnode[i][0], H2z = Hnode[i][1];
      std::array<Jet, 5> tmp{Jet(s), Jet(s), Jet(s), Jet(s), Jet(s)};
      accumulate(tmp, nd.weight * inv3, 1.0, 0.0, 0.0, pref, zv * H1z,
                 zv * H2z);
      std::array<Jet, 5> tmp1{Jet(s), Jet(s), Jet(s), Jet(s), Jet(s)};
      accumulate(tmp1, nd.weight * inv3, 0.0, 1.0, 0.0, pref, dz1 * H1z,
                 dz1 * H2z);
      std::array<Jet, 5> tmp2{Jet(s), Jet(s), Jet(s), Jet(s), Jet(s)};
      accumulate(tmp2, nd.weight * inv3, 0.0, 0.0, 1.0, pref, dz2 * H1z,
                 dz2 * H2z);
      for (int c = 0; c < 5; ++c) {
        R[c] += tmp[c];
        R[c] += tmp1[c];
        R[c] += tmp2[c];
      }
    }
    return flatten(R);
  };

  std::vector<double> acc =
      adaptive_gk_vec(halfB, 0.0, 0.5, opt.sigma_tol, 10);
  std::vector<double> accA =
      adaptive_gk_vec(halfA, 0.5, 1.0, opt.sigma_tol, 10);
  std::array<Jet, 5> out{Jet(s), Jet(s), Jet(s), Jet(s), Jet(s)};
  size_t sz = out[0].c.size();
  for (int c = 0; c < 5; ++c)
    for (size_t i = 0; i < sz; ++i) {
      double v = 0.0;
      if (c * sz + i < acc.size()) v += acc[c * sz + i];
      if (c * sz + i < accA.size()) v += accA[c * sz + i];
      out[c].c[i] = v;
    }
  std::lock_guard<std::mutex> lk(mu);
  if (cache.size() > 4096) cache.clear();
  return cache.emplace(key, out).first->second;
}

struct KernelNode final : FieldNode {
  std::shared_ptr<const KernelData> d;
  int comp;
  KernelNode(std::shared_ptr<const KernelData> dd, int c)
      : d(std::move(dd)), comp(c) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    return d->all(p, s)[comp];
  }
  std::optional<SupportBox> supportTY() const override { return d->box; }
};

}  // namespace

SymTensor23 kernel_solve(const Vec2Field& H,
                         std::shared_ptr<const ConvectedCylinder> cyl,
                         const KernelOptions& opt) {
  if (opt.check) {
    CompatibilityReport rep = check_compatibility(H, *cyl);
    if (!rep.ok)
      throw compatibility_error("source violates the moment conditions",
                                rep.residuals);
  }
  auto d = std::make_shared<KernelData>();
  d->H = H;
  d->cyl = cyl;
  d->opt = opt;
  auto r = cyl->radii();
  d->b1 = bump_cosine_power(r[0], opt.zeta_power);
  d->b2 = bump_cosine_power(r[1], opt.zeta_power);
  d->b3 = bump_cosine_power(r[2], opt.zeta_power);
  // Uniform midpoint rule: every integrand term carries a bump factor that
  // vanishes with all derivatives at the box boundary, so the midpoint rule
  // converges super-algebraically here while Gauss nodes stall on the
  // non-analytic bump endpoints.
  int n = opt.gl_nodes;
  auto mid = [n](int i) { return 2.0 * (i + 0.5) / n - 1.0; };
  double mw = 2.0 / n;
  auto deriv1 = [](const ProfilePtr& pr, double x) {
    double t[2];
    pr->taylor(x, 1, t);
    return std::pair<double, double>{t[0], t[1]};
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        KernelData::Node nd;
        nd.w[0] = r[0] * mid(i);
        nd.w[1] = r[1] * mid(j);
        nd.w[2] = r[2] * mid(k);
        nd.weight = r[0] * r[1] * r[2] * mw * mw * mw;
        auto [v1, d1] = deriv1(d->b1, nd.w[0]);
        auto [v2, d2] = deriv1(d->b2, nd.w[1]);
        auto [v3, d3] = deriv1(d->b3, nd.w[2]);
        nd.zeta = v1 * v2 * v3;
        nd.dz1 = d1 * v2 * v3;
        nd.dz2 = v1 * d2 * v3;
        if (nd.zeta == 0.0 && nd.dz1 == 0.0 && nd.dz2 == 0.0) continue;
        d->nodes.push_back(nd);
      }
  d->box = cyl->bounding_box();
  std::shared_ptr<const KernelData> cd = d;
  return {std::make_shared<KernelNode>(cd, 0),
          std::make_shared<KernelNode>(cd, 1),
          std::make_shared<KernelNode>(cd, 2),
          std::make_shared<KernelNode>(cd, 3),
          std::make_shared<KernelNode>(cd, 4)};
}

// ---------------------------------------------------------------------------
// Oscillatory solver
// ---------------------------------------------------------------------------

int structural_D(double theta) {
  if (theta <= 0) throw scale_error("theta must be positive");
  return (int)std::ceil((3.0 / theta + 3.0) / 2.0);
}

OscillatorySolution oscillatory_solve(const OscillatoryInput& in) {
  double g1 = in.grad_xi[0], g2 = in.grad_xi[1];
  double gn = std::hypot(g1, g2);
  // tolerance: a mathematically unit gradient may round a few ulp below 1
  if (!(gn > 1.0 - 1e-9 && gn < 100.0 * (1.0 + 1e-9)))
    throw phase_bound_error("|grad xi| outside [1, 100]");
  double ep[2] = {g1 / gn, g2 / gn};
  double eo[2] = {-ep[1], ep[0]};
  double M11 = 2 * ep[0] * eo[0], M12 = ep[0] * eo[1] + ep[1] * eo[0],
         M22 = 2 * ep[1] * eo[1];

  Vec2Field hre = in.h_re, him = in.h_im;
  Field zero = fconst(0.0);
  Field sum_re[3], sum_im[3];  // components 11, 12, 22
  for (int c = 0; c < 3; ++c) sum_re[c] = sum_im[c] = zero;

  auto qmat = [&](const Vec2Field& h, double sgn) {
    // sgn/|g| ( (h.epar) I + (h.eperp) M )
    Field hp = fscale(ep[0], h.c1) + fscale(ep[1], h.c2);
    Field hx = fscale(eo[0], h.c1) + fscale(eo[1], h.c2);
    std::array<Field, 3> q;
    q[0] = fscale(sgn / gn, hp + fscale(M11, hx));
    q[1] = fscale(sgn * M12 / gn, hx);
    q[2] = fscale(sgn / gn, hp + fscale(M22, hx));
    return q;
  };

  for (int k = 1; k <= in.D; ++k) {
    // q = (-i/|g|)((h.epar) I + (h.eperp) M) with h = hre + i him:
    //   q_re = (1/|g|)(...im parts...),  q_im = -(1/|g|)(...re parts...)
    auto qre = qmat(him, +1.0);
    auto qim = qmat(hre, -1.0);
    for (int c = 0; c < 3; ++c) {
      sum_re[c] = sum_re[c] + qre[c];
      sum_im[c] = sum_im[c] + qim[c];
    }
    auto next = [&](const std::array<Field, 3>& q) {
      return Vec2Field{
          fscale(-1.0 / in.lambda,
                 fderiv(q[0], {.a1 = 1}) + fderiv(q[1], {.a2 = 1})),
          fscale(-1.0 / in.lambda,
                 fderiv(q[1], {.a1 = 1}) + fderiv(q[2], {.a2 = 1}))};
    };
    Vec2Field nre = next(qre), nim = next(qim);
    hre = nre;
    him = nim;
  }

  OscillatorySolution out;
  out.D = in.D;
  auto mix = [&](const Field& a, const Field& b, double sb) {
    // (cos a + sb * sin b) / lambda
    return fscale(1.0 / in.lambda, in.cosphi * a + fscale(sb, in.sinphi * b));
  };
  out.main_re = {mix(sum_re[0], sum_im[0], -1.0), mix(sum_re[1], sum_im[1], -1.0),
                 mix(sum_re[2], sum_im[2], -1.0), zero, zero};
  out.main_im = {mix(sum_im[0], sum_re[0], +1.0), mix(sum_im[1], sum_re[1], +1.0),
                 mix(sum_im[2], sum_re[2], +1.0), zero, zero};
  out.rem_re = {in.cosphi * hre.c1 - in.sinphi * him.c1,
                in.cosphi * hre.c2 - in.sinphi * him.c2};
  out.rem_im = {in.sinphi * hre.c1 + in.cosphi * him.c1,
                in.sinphi * hre.c2 + in.cosphi * him.c2};
  if (in.main_only) {
    out.T_re = out.main_re;
    out.T_im = out.main_im;
    return out;
  }
  SymTensor23 Rre = kernel_solve(out.rem_re, in.cyl, in.kernel);
  SymTensor23 Rim = kernel_solve(out.rem_im, in.cyl, in.kernel);
  auto add = [](const SymTensor23& a, const SymTensor23& b) {
    return SymTensor23{a.t11 + b.t11, a.t12 + b.t12, a.t22 + b.t22,
                       a.t31 + b.t31, a.t32 + b.t32};
  };
  out.T_re = add(out.main_re, Rre);
  out.T_im = add(out.main_im, Rim);
  return out;
}

}  // namespace prandtl
