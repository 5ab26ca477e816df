#pragma once

#include <cstdint>
#include <vector>

namespace prandtl {

// One derivative query: a1,a2 tangential (x), b vertical (y), g time.
struct DerivOrder {
  int a1 = 0, a2 = 0, b = 0, g = 0;
  int total() const { return a1 + a2 + b + g; }
};

// Truncation spec for a Taylor box: per-axis degree caps in (t,x1,x2,y) plus a
// total-degree cap. Coefficients outside either cap are treated as zero.
struct JetSpec {
  uint8_t nt = 0, nx1 = 0, nx2 = 0, ny = 0, total = 0;

  static JetSpec axes(int t, int x1, int x2, int y, int tot = -1) {
    JetSpec s;
    s.nt = (uint8_t)t; s.nx1 = (uint8_t)x1; s.nx2 = (uint8_t)x2; s.ny = (uint8_t)y;
    int full = t + x1 + x2 + y;
    s.total = (uint8_t)((tot < 0 || tot > full) ? full : tot);
    return s;
  }
  static JetSpec forOrder(const DerivOrder& d) {
    return axes(d.g, d.a1, d.a2, d.b);
  }
  // Space jets of total order q with t-degree up to gt (the workhorse shape).
  static JetSpec spaceTime(int gt, int q) { return axes(gt, q, q, q, q + gt); }

  int size() const { return (nt + 1) * (nx1 + 1) * (nx2 + 1) * (ny + 1); }
  bool contains(const DerivOrder& d) const {
    return d.g <= nt && d.a1 <= nx1 && d.a2 <= nx2 && d.b <= ny && d.total() <= total;
  }
  bool operator==(const JetSpec&) const = default;
  uint64_t key() const {
    return (uint64_t)nt | ((uint64_t)nx1 << 8) | ((uint64_t)nx2 << 16) |
           ((uint64_t)ny << 24) | ((uint64_t)total << 32);
  }
};

// Dense truncated Taylor expansion around a base point. c holds Taylor
// *coefficients* (derivative value / m!), indexed (t, x1, x2, y).
struct Jet {
  JetSpec spec;
  std::vector<double> c;

  Jet() = default;
  explicit Jet(const JetSpec& s) : spec(s), c(s.size(), 0.0) {}

  int idx(int it, int i1, int i2, int iy) const {
    return ((it * (spec.nx1 + 1) + i1) * (spec.nx2 + 1) + i2) * (spec.ny + 1) + iy;
  }
  double& at(int it, int i1, int i2, int iy) { return c[idx(it, i1, i2, iy)]; }
  double at(int it, int i1, int i2, int iy) const { return c[idx(it, i1, i2, iy)]; }

  double value() const { return c.empty() ? 0.0 : c[0]; }
  // Derivative value (coefficient times m!); zero if outside the spec.
  double deriv(const DerivOrder& d) const;

  static Jet constant(const JetSpec& s, double v) {
    Jet j(s);
    if (!j.c.empty()) j.c[0] = v;
    return j;
  }
  // Jet of the coordinate on `axis` (0=t,1=x1,2=x2,3=y) with base value v.
  static Jet variable(const JetSpec& s, int axis, double v);

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double a);
  void axpy(double a, const Jet& o);  // this += a*o
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(double a, const Jet& b);

// Truncated product into `out` (must carry the common spec).
void jet_mul(const Jet& a, const Jet& b, Jet& out);

// p(g) for a 1D Taylor polynomial p (coefficients p[0..n] around g.value()),
// substituting the nilpotent part of g. Horner in (g - g0).
Jet jet_compose1(const std::vector<double>& p, const Jet& g);

// Multivariate composition: `table` is a Taylor box of some function F around
// base values matching the constant terms of args; args are jets (in the
// outer variables) whose constant terms equal that base. Returns F(args).
Jet jet_compose(const Jet& table, const Jet& dt, const Jet& dx1, const Jet& dx2,
                const Jet& dy);

double factorial_ratio(const DerivOrder& m);  // m! as a double

}  // namespace prandtl
