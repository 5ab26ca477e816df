#include "prandtl/jet.hpp"

#include <cassert>
#include <cmath>

namespace prandtl {

double factorial_ratio(const DerivOrder& m) {
  static const double fact[9] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
  auto f = [](int n) {
    if (n < 9) return fact[n];
    double r = fact[8];
    for (int k = 9; k <= n; ++k) r *= k;
    return r;
  };
  return f(m.g) * f(m.a1) * f(m.a2) * f(m.b);
}

double Jet::deriv(const DerivOrder& d) const {
  if (!spec.contains(d)) return 0.0;
  return at(d.g, d.a1, d.a2, d.b) * factorial_ratio(d);
}

Jet Jet::variable(const JetSpec& s, int axis, double v) {
  Jet j(s);
  j.c[0] = v;
  int caps[4] = {s.nt, s.nx1, s.nx2, s.ny};
  if (s.total >= 1 && caps[axis] >= 1) {
    int it = axis == 0, i1 = axis == 1, i2 = axis == 2, iy = axis == 3;
    j.at(it, i1, i2, iy) = 1.0;
  }
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  assert(spec == o.spec);
  for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
  return *this;
}
Jet& Jet::operator-=(const Jet& o) {
  assert(spec == o.spec);
  for (size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
  return *this;
}
Jet& Jet::operator*=(double a) {
  for (double& v : c) v *= a;
  return *this;
}
void Jet::axpy(double a, const Jet& o) {
  assert(spec == o.spec);
  for (size_t i = 0; i < c.size(); ++i) c[i] += a * o.c[i];
}

Jet operator+(const Jet& a, const Jet& b) { Jet r = a; r += b; return r; }
Jet operator-(const Jet& a, const Jet& b) { Jet r = a; r -= b; return r; }
Jet operator*(double a, const Jet& b) { Jet r = b; r *= a; return r; }

void jet_mul(const Jet& a, const Jet& b, Jet& out) {
  const JetSpec& s = out.spec;
  assert(a.spec == s && b.spec == s);
  for (double& v : out.c) v = 0.0;
  const int T = s.total;
  for (int at = 0; at <= s.nt; ++at)
    for (int a1 = 0; a1 + at <= T && a1 <= s.nx1; ++a1)
      for (int a2 = 0; at + a1 + a2 <= T && a2 <= s.nx2; ++a2)
        for (int ay = 0; at + a1 + a2 + ay <= T && ay <= s.ny; ++ay) {
          double av = a.at(at, a1, a2, ay);
          if (av == 0.0) continue;
          int ra = T - (at + a1 + a2 + ay);
          for (int bt = 0; bt <= s.nt - at; ++bt)
            for (int b1 = 0; b1 + bt <= ra && b1 <= s.nx1 - a1; ++b1)
              for (int b2 = 0; bt + b1 + b2 <= ra && b2 <= s.nx2 - a2; ++b2) {
                const double* bp = &b.c[b.idx(bt, b1, b2, 0)];
                double* op = &out.c[out.idx(at + bt, a1 + b1, a2 + b2, ay)];
                int ymax = s.ny - ay;
                int rb = ra - (bt + b1 + b2);
                if (ymax > rb) ymax = rb;
                for (int by = 0; by <= ymax; ++by) op[by] += av * bp[by];
              }
        }
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.spec);
  jet_mul(a, b, r);
  return r;
}

Jet jet_compose1(const std::vector<double>& p, const Jet& g) {
  Jet d = g;
  if (!d.c.empty()) d.c[0] = 0.0;  // nilpotent part
  Jet r = Jet::constant(g.spec, p.empty() ? 0.0 : p.back());
  Jet tmp(g.spec);
  for (int k = (int)p.size() - 2; k >= 0; --k) {
    jet_mul(r, d, tmp);
    r = tmp;
    r.c[0] += p[k];
  }
  return r;
}

Jet jet_compose(const Jet& table, const Jet& dt, const Jet& dx1, const Jet& dx2,
                const Jet& dy) {
  const JetSpec& os = dt.spec;
  const JetSpec& ts = table.spec;
  Jet tmp(os);
  // Nested Horner over (t, x1, x2, y); inner blocks that are identically zero
  // are skipped, which matters for the sparse tables the flows produce.
  auto hornerY = [&](int it, int i1, int i2) -> Jet {
    Jet r = Jet::constant(os, table.at(it, i1, i2, ts.ny));
    for (int iy = ts.ny - 1; iy >= 0; --iy) {
      jet_mul(r, dy, tmp);
      r = tmp;
      r.c[0] += table.at(it, i1, i2, iy);
    }
    return r;
  };
  auto zeroY = [&](int it, int i1, int i2) {
    for (int iy = 0; iy <= ts.ny; ++iy)
      if (table.at(it, i1, i2, iy) != 0.0) return false;
    return true;
  };
  auto hornerX2 = [&](int it, int i1) -> Jet {
    Jet r = hornerY(it, i1, ts.nx2);
    for (int i2 = ts.nx2 - 1; i2 >= 0; --i2) {
      jet_mul(r, dx2, tmp);
      r = tmp;
      if (!zeroY(it, i1, i2)) r += hornerY(it, i1, i2);
    }
    return r;
  };
  auto hornerX1 = [&](int it) -> Jet {
    Jet r = hornerX2(it, ts.nx1);
    for (int i1 = ts.nx1 - 1; i1 >= 0; --i1) {
      jet_mul(r, dx1, tmp);
      r = tmp;
      r += hornerX2(it, i1);
    }
    return r;
  };
  Jet r = hornerX1(ts.nt);
  for (int it = ts.nt - 1; it >= 0; --it) {
    jet_mul(r, dt, tmp);
    r = tmp;
    r += hornerX1(it);
  }
  return r;
}

}  // namespace prandtl
