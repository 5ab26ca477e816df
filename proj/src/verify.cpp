#include "prandtl/verify.hpp"

#include <algorithm>
#include <cmath>

#include "prandtl/parallel.hpp"

namespace prandtl {

namespace {

double halton_1d(uint64_t i, uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= (double)base;
    r += f * (double)(i % base);
    i /= base;
  }
  return r;
}

double lerp(double a, double b, double s) { return a + (b - a) * s; }

}  // namespace

SampleSet SampleSet::halton(size_t n, uint64_t skip, const SampleWindow& w) {
  SampleSet out;
  out.points.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    uint64_t k = skip + 1 + i;
    out.points.push_back(Point::make(
        lerp(w.tmin, w.tmax, halton_1d(k, 2)),
        lerp(w.x1min, w.x1max, halton_1d(k, 3)),
        lerp(w.x2min, w.x2max, halton_1d(k, 5)),
        lerp(w.ymin, w.ymax, halton_1d(k, 7))));
  }
  return out;
}

SampleSet SampleSet::grid(int nt, int n1, int n2, int ny,
                          const SampleWindow& w) {
  auto coord = [](double lo, double hi, int i, int n) {
    return n <= 1 ? 0.5 * (lo + hi) : lerp(lo, hi, (double)i / (n - 1));
  };
  SampleSet out;
  out.points.reserve((size_t)nt * n1 * n2 * ny);
  for (int it = 0; it < nt; ++it)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2)
        for (int iy = 0; iy < ny; ++iy)
          out.points.push_back(Point::make(coord(w.tmin, w.tmax, it, nt),
                                           coord(w.x1min, w.x1max, i1, n1),
                                           coord(w.x2min, w.x2max, i2, n2),
                                           coord(w.ymin, w.ymax, iy, ny)));
  return out;
}

double sup_norm(const Field& f, const std::vector<Point>& pts,
                const DerivOrder& d) {
  std::vector<double> vals(pts.size(), 0.0);
  parallel_for(pts.size(), [&](size_t i) {
    vals[i] = std::abs(eval_deriv(f, pts[i], d));
  });
  double m = 0.0;
  for (double v : vals) m = std::max(m, v);
  return m;
}

double holder_seminorm(const Field& f, const std::vector<Point>& base,
                       double alpha, double beta, int jmax) {
  std::vector<double> vals(base.size(), 0.0);
  parallel_for(base.size(), [&](size_t i) {
    const Point& p = base[i];
    double f0 = eval_value(f, p);
    double m = 0.0;
    for (int j = 1; j <= jmax; ++j) {
      double h = std::ldexp(1.0, -j);
      double da = std::pow(h, alpha), db = std::pow(h, beta);
      Point q;
      q = Point::make(p.t + h, p.x1, p.x2, p.y);
      m = std::max(m, std::abs(eval_value(f, q) - f0) / da);
      q = Point::make(p.t, p.x1 + h, p.x2, p.y);
      m = std::max(m, std::abs(eval_value(f, q) - f0) / da);
      q = Point::make(p.t, p.x1, p.x2 + h, p.y);
      m = std::max(m, std::abs(eval_value(f, q) - f0) / da);
      q = Point::make(p.t, p.x1, p.x2, p.y + h);
      m = std::max(m, std::abs(eval_value(f, q) - f0) / db);
    }
    vals[i] = m;
  });
  double m = 0.0;
  for (double v : vals) m = std::max(m, v);
  return m;
}

Vec2Field residual_field(const Vec2Field& u, const Field& v, const Sym2Field& S,
                         const Vec2Field& Y, const Field& P) {
  auto comp = [&](int l) {
    const Field& ul = l == 0 ? u.c1 : u.c2;
    const Field& Yl = l == 0 ? Y.c1 : Y.c2;
    const Field& S1l = l == 0 ? S.a11 : S.a12;
    const Field& S2l = l == 0 ? S.a12 : S.a22;
    Field r = fderiv(ul, {.g = 1});
    r = r + fderiv(u.c1 * ul, {.a1 = 1}) + fderiv(u.c2 * ul, {.a2 = 1});
    r = r + fderiv(v * ul, {.b = 1}) - fderiv(ul, {.b = 2});
    r = r + fderiv(P, l == 0 ? DerivOrder{.a1 = 1} : DerivOrder{.a2 = 1});
    r = r - fderiv(S1l, {.a1 = 1}) - fderiv(S2l, {.a2 = 1});
    r = r - fderiv(Yl, {.b = 1});
    return r;
  };
  return {comp(0), comp(1)};
}

ResidualReport residual_system(const Vec2Field& u, const Field& v,
                               const Sym2Field& S, const Vec2Field& Y,
                               const Field& P, const std::vector<Point>& pts) {
  Vec2Field r = residual_field(u, v, S, Y, P);
  // the individual terms, for the relative scale
  std::vector<Field> terms;
  for (int l = 0; l < 2; ++l) {
    const Field& ul = l == 0 ? u.c1 : u.c2;
    terms.push_back(fderiv(ul, {.g = 1}));
    terms.push_back(fderiv(u.c1 * ul, {.a1 = 1}));
    terms.push_back(fderiv(u.c2 * ul, {.a2 = 1}));
    terms.push_back(fderiv(v * ul, {.b = 1}));
    terms.push_back(fderiv(ul, {.b = 2}));
    terms.push_back(fderiv(P, l == 0 ? DerivOrder{.a1 = 1}
                                     : DerivOrder{.a2 = 1}));
    terms.push_back(fderiv(l == 0 ? S.a11 : S.a12, {.a1 = 1}));
    terms.push_back(fderiv(l == 0 ? S.a12 : S.a22, {.a2 = 1}));
    terms.push_back(fderiv(l == 0 ? Y.c1 : Y.c2, {.b = 1}));
  }
  struct Acc {
    double sup = 0, scale = 0;
  };
  std::vector<Acc> acc(pts.size());
  parallel_for(pts.size(), [&](size_t i) {
    const Point& p = pts[i];
    acc[i].sup = std::max(std::abs(eval_value(r.c1, p)),
                          std::abs(eval_value(r.c2, p)));
    for (const Field& t : terms)
      acc[i].scale = std::max(acc[i].scale, std::abs(eval_value(t, p)));
  });
  ResidualReport rep;
  for (const Acc& a : acc) {
    rep.sup = std::max(rep.sup, a.sup);
    rep.scale = std::max(rep.scale, a.scale);
  }
  return rep;
}

nlohmann::json diagnostics_json(const std::vector<Diagnostic>& ds) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Diagnostic& d : ds) {
    nlohmann::json j{{"name", d.name}, {"value", d.value}, {"pass", d.pass}};
    if (d.has_tolerance) j["tolerance"] = d.tolerance;
    if (!d.anchor.empty()) j["anchor"] = d.anchor;
    arr.push_back(std::move(j));
  }
  return arr;
}

Diagnostic support_shell_test(const Field& f, const SupportBox& region,
                              double dt, double dy, int nt, int ny) {
  Diagnostic d;
  d.name = "support_shell";
  d.anchor = "collar samples outside the declared support region";
  SupportBox outer = region.inflate(dt, dy);
  const double xs[3] = {0.11, 0.47, 0.83};
  for (int it = 0; it < nt; ++it)
    for (int iy = 0; iy < ny; ++iy) {
      double t = outer.tmin + (outer.tmax - outer.tmin) * it / (nt - 1.0);
      double y = outer.ymin + (outer.ymax - outer.ymin) * iy / (ny - 1.0);
      if (region.contains(t, y)) continue;
      for (double x1 : xs)
        for (double x2 : xs)
          d.value = std::max(d.value, std::abs(eval_value(f, {t, x1, x2, y})));
    }
  d.pass = d.value == 0.0;
  return d;
}

SweepFit scaling_sweep(const std::vector<double>& params,
                       const std::vector<double>& observables) {
  size_t n = params.size();
  if (n < 2 || observables.size() != n)
    throw std::invalid_argument("scaling_sweep needs >= 2 matched samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    lx[i] = std::log(params[i]);
    ly[i] = std::log(observables[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  SweepFit fit;
  double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (size_t i = 0; i < n; ++i)
    fit.residual = std::max(
        fit.residual, std::abs(ly[i] - fit.slope * lx[i] - fit.intercept));
  return fit;
}

}  // namespace prandtl
