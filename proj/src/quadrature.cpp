#include "prandtl/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace prandtl {

static QuadRule make_gl(int n) {
  // Newton iteration on Legendre roots, standard Golub-free construction.
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const QuadRule& gauss_legendre(int n) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gl(n)).first;
  return it->second;
}

namespace {
// Kronrod-15 / Gauss-7 nodes and weights (symmetric half listed).
const double xk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                      0.741531185599394, 0.586087235467691, 0.405845151377397,
                      0.207784955007898, 0.0};
const double wk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                      0.140653259715525, 0.169004726639267, 0.190350578064785,
                      0.204432940075298, 0.209482141084728};
const double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                      0.417959183673469};

void gk15(const std::function<double(double)>& f, double a, double b,
          double& resk, double& err) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double rg = fc * wg[3], rk = fc * wk[7];
  for (int j = 0; j < 7; ++j) {
    double fv = f(c - h * xk[j]) + f(c + h * xk[j]);
    rk += fv * wk[j];
    if (j % 2 == 1) rg += fv * wg[j / 2];
  }
  resk = rk * h;
  err = std::abs((rk - rg) * h);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth) {
  double r, e;
  gk15(f, a, b, r, e);
  if (e <= tol || depth <= 0) return r;
  double m = 0.5 * (a + b);
  return adapt(f, a, m, tol * 0.6, depth - 1) +
         adapt(f, m, b, tol * 0.6, depth - 1);
}
}  // namespace

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, tol, max_depth);
}

namespace {

void axpy_vec(std::vector<double>& r, double a, const std::vector<double>& v) {
  if (r.size() < v.size()) r.resize(v.size(), 0.0);
  for (size_t i = 0; i < v.size(); ++i) r[i] += a * v[i];
}

void gk15_vec(const std::function<std::vector<double>(double)>& f, double a,
              double b, std::vector<double>& resk, double& err) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::vector<double> rk, rg;
  std::vector<double> fc = f(c);
  axpy_vec(rk, wk[7], fc);
  axpy_vec(rg, wg[3], fc);
  for (int j = 0; j < 7; ++j) {
    std::vector<double> fv = f(c - h * xk[j]);
    axpy_vec(fv, 1.0, f(c + h * xk[j]));
    axpy_vec(rk, wk[j], fv);
    if (j % 2 == 1) axpy_vec(rg, wg[j / 2], fv);
  }
  double scale = 1.0;
  err = 0.0;
  for (size_t i = 0; i < rk.size(); ++i) {
    rk[i] *= h;
    double g = i < rg.size() ? rg[i] * h : 0.0;
    err = std::max(err, std::abs(rk[i] - g));
    scale = std::max(scale, std::abs(rk[i]));
  }
  err /= scale;
  resk = std::move(rk);
}

void adapt_vec(const std::function<std::vector<double>(double)>& f, double a,
               double b, double tol, int depth, std::vector<double>& out) {
  std::vector<double> r;
  double e;
  gk15_vec(f, a, b, r, e);
  if (e <= tol || depth <= 0) {
    axpy_vec(out, 1.0, r);
    return;
  }
  double m = 0.5 * (a + b);
  adapt_vec(f, a, m, tol, depth - 1, out);
  adapt_vec(f, m, b, tol, depth - 1, out);
}

}  // namespace

std::vector<double> adaptive_gk_vec(
    const std::function<std::vector<double>(double)>& f, double a, double b,
    double tol, int max_depth) {
  std::vector<double> out;
  if (a != b) adapt_vec(f, a, b, tol, max_depth, out);
  return out;
}

}  // namespace prandtl
