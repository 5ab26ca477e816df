#include "prandtl/waves.hpp"

#include <cmath>
#include <set>

namespace prandtl {

Frame Frame::axis(int i) {
  const double r = 1.0 / std::sqrt(2.0);
  Frame fr;
  if (i == 0) fr.f = {1.0, 0.0};
  else if (i == 1) fr.f = {0.0, 1.0};
  else fr.f = {r, r};
  fr.fperp = {-fr.f[1], fr.f[0]};
  return fr;
}

int parity_code(const CubeIndex& k) {
  auto odd = [](long v) { return (int)(v & 1); };
  return odd(k.k0) + 2 * odd(k.k1) + 4 * odd(k.k2) + 8 * odd(k.k3) + 1;
}

std::pair<double, double> amplitudes(const Field& e, const Field& S1,
                                     const Field& Y1, const Point& qk) {
  double rad = eval_value(e, qk) + eval_value(S1, qk);
  double y1 = eval_value(Y1, qk);
  if (rad < 0)
    throw construction_error("negative radicand: energy profile too small");
  double a = std::sqrt(rad / 2.0);
  if (y1 == 0.0) return {a, 0.0};
  if (a == 0.0)
    throw construction_error("stress present where the energy vanishes");
  return {a, y1 / (2.0 * a)};
}

PhaseForm phase(int parity, int s, const std::array<double, 2>& uk,
                const Frame& fr, double lambda) {
  const double twopi = 2.0 * M_PI;
  double m = lambda * parity;
  PhaseForm ph;
  auto snap = [&](double target) {
    double n = std::round(std::abs(target) / twopi);
    if (n < 1) n = 1;
    return (target < 0 ? -1.0 : 1.0) * twopi * n;
  };
  if (fr.fperp[0] == 0.0) {
    ph.K = {0.0, snap(m * fr.fperp[1])};
  } else if (fr.fperp[1] == 0.0) {
    ph.K = {snap(m * fr.fperp[0]), 0.0};
  } else {
    // diagonal: common integer multiplier keeps K on the line R fperp
    double q = std::round(m * std::abs(fr.fperp[0]) / twopi);
    if (q < 1) q = 1;
    ph.K = {(fr.fperp[0] < 0 ? -1.0 : 1.0) * twopi * q,
            (fr.fperp[1] < 0 ? -1.0 : 1.0) * twopi * q};
  }
  ph.K[0] *= s;
  ph.K[1] *= s;
  ph.omega = ph.K[0] * uk[0] + ph.K[1] * uk[1];
  Field arg = faffine(0.0, -ph.omega, ph.K[0], ph.K[1], 0.0);
  ph.cosphi = fprofile(profile_cos(1.0), arg);
  ph.sinphi = fprofile(profile_sin(1.0), arg);
  return ph;
}

std::pair<Vec3Field, Vec3Field> delta_correction(
    const Field& eta, const Field& psi, double a, double b, const Frame& fr,
    const std::array<double, 2>& K) {
  double K2 = K[0] * K[0] + K[1] * K[1];
  double s = 1.0 / K2;
  Field p1 = fderiv(psi, {.a1 = 1});
  Field p2 = fderiv(psi, {.a2 = 1});
  Field py = fderiv(psi, {.b = 1});
  Field lap = fderiv(psi, {.a1 = 2}) + fderiv(psi, {.a2 = 2}) +
              fderiv(psi, {.b = 2});
  Field Kgrad = fscale(K[0], p1) + fscale(K[1], p2);
  Field Agrad = fscale(a * fr.f[0], p1) + fscale(a * fr.f[1], p2) +
                fscale(b, py);
  // A-components of the 3-vector amplitude
  const double A[3] = {a * fr.f[0], a * fr.f[1], b};
  auto re_comp = [&](int i) {
    DerivOrder d = i == 0 ? DerivOrder{.a1 = 1}
                 : i == 1 ? DerivOrder{.a2 = 1}
                          : DerivOrder{.b = 1};
    return fscale(s, fscale(-A[i], lap) + fderiv(Agrad, d)) * eta;
  };
  auto im_comp = [&](int i) {
    double Ki = i < 2 ? K[i] : 0.0;
    return fscale(s, fscale(-2.0 * A[i], Kgrad) + fscale(Ki, Agrad)) * eta;
  };
  Vec3Field re{re_comp(0), re_comp(1), re_comp(2)};
  Vec3Field im{im_comp(0), im_comp(1), im_comp(2)};
  return {re, im};
}

void validate_conjugate_closure(const std::vector<WaveIndex>& idx) {
  std::set<std::pair<CubeIndex, int>> seen;
  for (auto& i : idx) seen.insert({i.k, i.s});
  for (auto& i : idx)
    if (!seen.count({i.k, -i.s}))
      throw construction_error("wave index set is not conjugate-closed");
}

struct WaveAtlas::Data {
  WaveInputs in;
  std::vector<WaveProfile> profiles;    // eager mode only
  std::map<CubeIndex, size_t> by_cube;  // eager mode only
  std::optional<SupportBox> wbox;
  // lazy mode: cubes built on first access (nullptr marks an inactive cube)
  mutable std::map<CubeIndex, std::unique_ptr<const WaveProfile>> cache;
  mutable std::mutex mu;

  // nullopt when the cube carries no wave (zero amplitudes)
  std::optional<WaveProfile> build(const CubeIndex& ck) const {
    const WaveInputs& I = in;
    long P = I.fam->spatial().cells_x();
    Point q = Point::make(ck.k0 * I.sc.tau, (double)ck.k1 / P,
                          (double)ck.k2 / P, ck.k3 * I.sc.ly);
    auto [a, b] = amplitudes(I.e, I.S1, I.Y1, q);
    if (a == 0.0 && b == 0.0) return std::nullopt;
    const TransportedPartition& cube = I.fam->cube(ck);
    WaveProfile wp;
    wp.k = ck;
    wp.parity = parity_code(ck);
    wp.anchor = cube.anchor;
    wp.a = a;
    wp.b = b;
    wp.uk = {eval_value(I.ul.c1, cube.anchor),
             eval_value(I.ul.c2, cube.anchor)};
    wp.vk = eval_value(I.vl, cube.anchor);
    wp.ph = phase(wp.parity, +1, wp.uk, I.frame, I.sc.lambda);
    wp.eta = I.fam->temporal().field(ck.k0);
    wp.psi = cube.psi;
    Field ep = wp.eta * wp.psi;
    wp.main = {fscale(a * I.frame.f[0], ep), fscale(a * I.frame.f[1], ep),
               fscale(b, ep)};
    auto [re, im] = delta_correction(wp.eta, wp.psi, a, b, I.frame, wp.ph.K);
    wp.delta_re = re;
    wp.delta_im = im;
    return wp;
  }

  const WaveProfile* get(const CubeIndex& ck) const {
    if (!in.lazy) {
      auto it = by_cube.find(ck);
      return it == by_cube.end() ? nullptr : &profiles[it->second];
    }
    {
      std::lock_guard<std::mutex> lk(mu);
      auto it = cache.find(ck);
      if (it != cache.end()) return it->second.get();
    }
    auto wp = build(ck);
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = cache[ck];
    if (!slot && wp) slot = std::make_unique<const WaveProfile>(std::move(*wp));
    return slot.get();
  }
};

WaveAtlas::WaveAtlas(WaveInputs in) {
  auto d = std::make_shared<Data>();
  d->in = std::move(in);
  const WaveInputs& I = d->in;
  auto ebox = I.e->supportTY();
  if (!ebox)
    throw construction_error("energy field needs a bounded (t,y) support box");
  d->wbox = ebox->inflate(0.5 * I.sc.l * I.sc.l, 0.5 * I.sc.l);
  if (!I.lazy) {
    const auto& sp = I.fam->spatial();
    double tau = I.sc.tau, ly = I.sc.ly;
    long k0min = (long)std::floor((ebox->tmin - tau) / tau);
    long k0max = (long)std::ceil((ebox->tmax + tau) / tau);
    long k3min = std::max(0L, (long)std::floor((ebox->ymin - 4 * ly) / ly));
    long k3max = std::min(sp.kmax_y(), (long)std::ceil((ebox->ymax + 4 * ly) / ly));
    long P = sp.cells_x();
    for (long k0 = k0min; k0 <= k0max; ++k0)
      for (long k3 = k3min; k3 <= k3max; ++k3)
        for (long k1 = 0; k1 < P; ++k1)
          for (long k2 = 0; k2 < P; ++k2) {
            CubeIndex ck{k0, k1, k2, k3};
            auto wp = d->build(ck);
            if (!wp) continue;
            d->by_cube[ck] = d->profiles.size();
            d->profiles.push_back(std::move(*wp));
          }
  }
  d_ = std::move(d);
}

const std::vector<WaveProfile>& WaveAtlas::profiles() const {
  if (d_->in.lazy)
    throw construction_error(
        "profile enumeration is unavailable for a lazily built atlas");
  return d_->profiles;
}
const WaveProfile* WaveAtlas::profile_at(const CubeIndex& idx) const {
  return d_->get(idx);
}
std::optional<SupportBox> WaveAtlas::support_box() const { return d_->wbox; }
const WaveInputs& WaveAtlas::inputs() const { return d_->in; }

std::vector<const WaveProfile*> WaveAtlas::active(const Point& p) const {
  std::vector<const WaveProfile*> out;
  // every amplitude vanishes outside the declared box, so never flow
  // characteristics from query points beyond it (they may leave the domain)
  if (d_->wbox && !d_->wbox->contains(p.t, p.y)) return out;
  for (auto& idx : d_->in.fam->active(p)) {
    const WaveProfile* wp = d_->get(idx);
    if (wp) out.push_back(wp);
  }
  return out;
}

namespace {

struct WaveSumNode final : FieldNode {
  std::shared_ptr<const WaveAtlas::Data> d;
  int comp;
  bool wmain, wdelta;
  WaveSumNode(std::shared_ptr<const WaveAtlas::Data> dd, int c, bool m, bool de)
      : d(std::move(dd)), comp(c), wmain(m), wdelta(de) {}

  static const Field& pick(const Vec3Field& v, int i) {
    return i == 0 ? v.c1 : i == 1 ? v.c2 : v.cy;
  }
  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet r(s);
    if (d->wbox && !d->wbox->contains(p.t, p.y)) return r;
    for (auto& idx : d->in.fam->active(p)) {
      const WaveProfile* wpp = d->get(idx);
      if (!wpp) continue;
      const WaveProfile& wp = *wpp;
      Jet cosj = eval_jet(wp.ph.cosphi, p, s);
      Jet sinj = eval_jet(wp.ph.sinphi, p, s);
      // pair sum: 2 (cos * Re - sin * Im)
      Jet re(s);
      if (wmain) re += eval_jet(pick(wp.main, comp), p, s);
      if (wdelta) {
        re += eval_jet(pick(wp.delta_re, comp), p, s);
        Jet im = eval_jet(pick(wp.delta_im, comp), p, s);
        r.axpy(-2.0, sinj * im);
      }
      r.axpy(2.0, cosj * re);
    }
    return r;
  }
  std::optional<SupportBox> supportTY() const override { return d->wbox; }
};

}  // namespace

Vec3Field WaveAtlas::assemble(bool with_main, bool with_delta) const {
  return {std::make_shared<WaveSumNode>(d_, 0, with_main, with_delta),
          std::make_shared<WaveSumNode>(d_, 1, with_main, with_delta),
          std::make_shared<WaveSumNode>(d_, 2, with_main, with_delta)};
}

}  // namespace prandtl
