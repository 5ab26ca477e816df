#include "prandtl/profiles.hpp"

#include <cmath>
#include <cstring>

#include "prandtl/quadrature.hpp"

namespace prandtl {

namespace {

// Tiny truncated 1D power-series helpers used to build the bump profiles.
using Ser = std::vector<double>;

Ser mul(const Ser& a, const Ser& b) {
  int n = (int)a.size() - 1;
  Ser r(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; i + j <= n; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Ser add(Ser a, const Ser& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

// a^p via the standard recurrence; requires a[0] != 0 (and > 0 for real p).
Ser powser(const Ser& a, double p) {
  int n = (int)a.size() - 1;
  Ser b(n + 1, 0.0);
  b[0] = std::pow(a[0], p);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += ((p + 1) * j - k) * a[j] * b[k - j];
    b[k] = s / (k * a[0]);
  }
  return b;
}

Ser expser(const Ser& a) {
  int n = (int)a.size() - 1;
  Ser b(n + 1, 0.0);
  b[0] = std::exp(a[0]);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * b[k - j];
    b[k] = s / k;
  }
  return b;
}

Ser recipser(const Ser& a) { return powser(a, -1.0); }

// g(z) = exp(-1/z) for z > 0 (flat zero for z <= 0), as a series in dz at z0.
Ser flatexp(double z0, int n) {
  if (z0 < 1e-12) return Ser(n + 1, 0.0);
  Ser z(n + 1, 0.0);
  z[0] = z0;
  if (n >= 1) z[1] = 1.0;
  Ser v = recipser(z);
  for (double& c : v) c = -c;
  return expser(v);
}

// Smoothstep: 0 for z<=0, 1 for z>=1, g(z)/(g(z)+g(1-z)) between.
Ser smoothstep(double z0, int n) {
  if (z0 <= 1e-12) return Ser(n + 1, 0.0);
  if (z0 >= 1.0 - 1e-12) {
    Ser r(n + 1, 0.0);
    r[0] = 1.0;
    return r;
  }
  Ser g = flatexp(z0, n);
  Ser h = flatexp(1.0 - z0, n);
  for (int k = 1; k <= n; k += 2) h[k] = -h[k];  // g(1-z): odd coefficients flip
  return mul(g, recipser(add(g, h)));
}

// Plateau bump on scale 1: q(s) = step(6-8s)*step(6+8s); 1 on |s|<=5/8,
// supported in (-3/4,3/4).
Ser plateau1(double s0, int n) {
  Ser a = smoothstep(6.0 - 8.0 * s0, n);
  for (int k = 1; k <= n; ++k) {
    double f = 1.0;
    for (int j = 0; j < k; ++j) f *= -8.0;
    a[k] *= f;  // chain rule for z = 6-8s
  }
  Ser b = smoothstep(6.0 + 8.0 * s0, n);
  for (int k = 1; k <= n; ++k) {
    double f = 1.0;
    for (int j = 0; j < k; ++j) f *= 8.0;
    b[k] *= f;
  }
  return mul(a, b);
}

// exp(-1/(1-s^2)) on (-1,1).
Ser bump1(double s0, int n) {
  if (1.0 - s0 * s0 < 1e-12) return Ser(n + 1, 0.0);
  Ser u(n + 1, 0.0);
  u[0] = 1.0 - s0 * s0;
  if (n >= 1) u[1] = -2.0 * s0;
  if (n >= 2) u[2] = -1.0;
  Ser v = recipser(u);
  for (double& c : v) c = -c;
  return expser(v);
}

double bump1_mass() {
  static double m = adaptive_gk([](double s) { return s * s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; },
                                -1.0, 1.0, 1e-15);
  return m;
}

struct PolyProfile final : Profile1D {
  std::vector<double> cs;
  explicit PolyProfile(std::vector<double> c) : cs(std::move(c)) {}
  void taylor(double s0, int n, double* a) const override {
    // Shift the polynomial to s0 by repeated synthetic division.
    std::vector<double> t = cs;
    if ((int)t.size() < n + 1) t.resize(n + 1, 0.0);
    int d = (int)t.size() - 1;
    for (int k = 0; k <= n; ++k) {
      for (int j = d - 1; j >= k; --j) t[j] += s0 * t[j + 1];
      a[k] = t[k];
    }
  }
};

struct ExpProfile final : Profile1D {
  void taylor(double s0, int n, double* a) const override {
    double v = std::exp(s0);
    double f = 1.0;
    for (int k = 0; k <= n; ++k) {
      a[k] = v / f;
      f *= (k + 1);
    }
  }
};

struct TrigProfile final : Profile1D {
  double om, ph;
  bool sine;
  TrigProfile(double o, double p, bool s) : om(o), ph(p), sine(s) {}
  void taylor(double s0, int n, double* a) const override {
    double arg = om * s0 + ph;
    double f = 1.0, po = 1.0;
    for (int k = 0; k <= n; ++k) {
      double v = sine ? std::sin(arg + k * M_PI_2) : std::cos(arg + k * M_PI_2);
      a[k] = v * po / f;
      f *= (k + 1);
      po *= om;
    }
  }
};

struct ErfProfile final : Profile1D {
  void taylor(double s0, int n, double* a) const override {
    a[0] = std::erf(s0);
    if (n == 0) return;
    std::vector<double> g(n + 1, 0.0);  // g[k] = erf^{(k)}(s0)
    g[1] = 2.0 / std::sqrt(M_PI) * std::exp(-s0 * s0);
    for (int k = 1; k < n; ++k)
      g[k + 1] = -2.0 * s0 * g[k] - 2.0 * (k - 1) * (k >= 2 ? g[k - 1] : 0.0);
    double f = 1.0;
    for (int k = 1; k <= n; ++k) {
      f *= k;
      a[k] = g[k] / f;
    }
  }
};

struct PowerProfile final : Profile1D {
  double p;
  explicit PowerProfile(double pp) : p(pp) {}
  void taylor(double s0, int n, double* a) const override {
    a[0] = std::pow(s0, p);
    double binom = 1.0;
    for (int k = 1; k <= n; ++k) {
      binom *= (p - k + 1) / k;
      a[k] = binom * std::pow(s0, p - k);
    }
  }
};

struct MollifierBump final : Profile1D {
  double h, c;  // half-width h = 3/4*scale, normalization c
  explicit MollifierBump(double scale)
      : h(0.75 * scale), c(1.0 / (0.75 * scale * bump1_mass())) {}
  void taylor(double s0, int n, double* a) const override {
    Ser b = bump1(s0 / h, n);
    double f = c;
    for (int k = 0; k <= n; ++k) {
      a[k] = b[k] * f;
      f /= h;
    }
  }
  bool support(double& lo, double& hi) const override {
    lo = -h;
    hi = h;
    return true;
  }
};

struct PlateauBump final : Profile1D {
  double sc;
  explicit PlateauBump(double scale) : sc(scale) {}
  void taylor(double s0, int n, double* a) const override {
    Ser b = plateau1(s0 / sc, n);
    double f = 1.0;
    for (int k = 0; k <= n; ++k) {
      a[k] = b[k] * f;
      f /= sc;
    }
  }
  bool support(double& lo, double& hi) const override {
    lo = -0.75 * sc;
    hi = 0.75 * sc;
    return true;
  }
};

struct MollifierCdf final : Profile1D {
  double h, c;
  explicit MollifierCdf(double scale)
      : h(0.75 * scale), c(1.0 / (0.75 * scale * bump1_mass())) {}
  double density(double s) const {
    double r = s / h;
    return r * r < 1.0 ? c * std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  }
  void taylor(double s0, int n, double* a) const override {
    if (s0 <= -h)
      a[0] = 0.0;
    else if (s0 >= h)
      a[0] = 1.0;
    else
      a[0] = adaptive_gk([this](double s) { return density(s); }, -h, s0, 1e-14);
    if (n == 0) return;
    std::vector<double> m(n);  // C' = mollifier density
    MollifierBump mb(h / 0.75);
    mb.taylor(s0, n - 1, m.data());
    for (int k = 1; k <= n; ++k) a[k] = m[k - 1] / k;
  }
};

struct EtaProfile final : Profile1D {
  // plateau(scale 1) / sqrt(sum_k plateau^2(. - k)); sum of squares over the
  // integer lattice is identically 1.
  void taylor(double s0, int n, double* a) const override {
    Ser q = plateau1(s0, n);
    bool allz = true;
    for (double v : q) allz = allz && v == 0.0;
    if (allz) {
      std::memset(a, 0, sizeof(double) * (n + 1));
      return;
    }
    Ser D(n + 1, 0.0);
    for (int k = (int)std::ceil(s0 - 0.8); k <= (int)std::floor(s0 + 0.8); ++k) {
      Ser qk = plateau1(s0 - k, n);
      D = add(D, mul(qk, qk));
    }
    Ser r = mul(q, powser(D, -0.5));
    for (int k = 0; k <= n; ++k) a[k] = r[k];
  }
  bool support(double& lo, double& hi) const override {
    lo = -0.75;
    hi = 0.75;
    return true;
  }
};

}  // namespace

ProfilePtr profile_poly(std::vector<double> coeffs) {
  return std::make_shared<PolyProfile>(std::move(coeffs));
}
ProfilePtr profile_exp() { return std::make_shared<ExpProfile>(); }
ProfilePtr profile_sin(double omega, double phase) {
  return std::make_shared<TrigProfile>(omega, phase, true);
}
ProfilePtr profile_cos(double omega, double phase) {
  return std::make_shared<TrigProfile>(omega, phase, false);
}
ProfilePtr profile_erf() { return std::make_shared<ErfProfile>(); }
ProfilePtr profile_power(double p) { return std::make_shared<PowerProfile>(p); }
namespace {
// c (1 + cos(pi s / r))^p on (-r, r), unit integral, C^{2p-1} at the edges.
// Expanded as a finite cosine series, so Taylor tables are exact and cheap
// and equispaced quadrature of products with it converges at order ~2p.
class CosinePowerBump final : public Profile1D {
 public:
  CosinePowerBump(double radius, int p) : r_(radius) {
    // (1+cos t)^p = 2^-p [ C(2p,p) + 2 sum_k C(2p,p-k) cos kt ]
    std::vector<double> binom(2 * p + 1);
    binom[0] = 1.0;
    for (int m = 1; m <= 2 * p; ++m) {
      binom[m] = binom[m - 1] * (2 * p - m + 1) / m;
    }
    double scale = std::ldexp(1.0, -p);
    b_.resize(p + 1);
    b_[0] = scale * binom[p];
    for (int k = 1; k <= p; ++k) b_[k] = 2.0 * scale * binom[p - k];
    double norm = 2.0 * r_ * b_[0];  // only the constant term has mass
    for (double& c : b_) c /= norm;
  }
  void taylor(double s0, int n, double* a) const override {
    for (int m = 0; m <= n; ++m) a[m] = 0.0;
    if (std::abs(s0) >= r_) return;
    for (size_t k = 0; k < b_.size(); ++k) {
      double w = k * M_PI / r_, phase = w * s0, fac = 1.0;
      for (int m = 0; m <= n; ++m) {
        a[m] += b_[k] * fac * std::cos(phase + 0.5 * M_PI * m);
        fac *= w / (m + 1);
      }
    }
  }
  bool support(double& lo, double& hi) const override {
    lo = -r_;
    hi = r_;
    return true;
  }

 private:
  double r_;
  std::vector<double> b_;
};
}  // namespace

ProfilePtr bump_cosine_power(double radius, int p) {
  return std::make_shared<CosinePowerBump>(radius, p);
}

ProfilePtr bump_mollifier(double scale) {
  return std::make_shared<MollifierBump>(scale);
}
ProfilePtr bump_plateau(double scale) {
  return std::make_shared<PlateauBump>(scale);
}
ProfilePtr bump_mollifier_cdf(double scale) {
  return std::make_shared<MollifierCdf>(scale);
}
ProfilePtr partition_eta() { return std::make_shared<EtaProfile>(); }

}  // namespace prandtl
