// Compares the OpenMP sampling path against the serial reference (1 thread)
// on a representative field stack: heat shear plus a localized perturbation
// and its time-derivative stress, evaluated at low-discrepancy points.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "prandtl/iteration.hpp"
#include "prandtl/parallel.hpp"

using namespace prandtl;

namespace {

double run_once(const Field& f, const std::vector<Point>& pts, int nthreads,
                double* seconds) {
  set_threads(nthreads);
  auto t0 = std::chrono::steady_clock::now();
  double m = sup_norm(f, pts);
  auto t1 = std::chrono::steady_clock::now();
  *seconds = std::chrono::duration<double>(t1 - t0).count();
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  size_t n = argc > 1 ? (size_t)std::atol(argv[1]) : 20000;

  Vec2Field uC = shear_flow({0.0, 1.0}, 0.5);
  Perturbation p =
      corollary_perturbation(0.15, Point::make(0.5, 0.4, 0.35, 2.4), 4.0, 0.02);
  Field f = uC.c2 + p.du.c1 +
            fderiv(p.phi, {.g = 1}) * fderiv(p.phi, {.b = 2});

  SampleWindow w{0.3, 0.7, 2.2, 2.6};
  auto pts = SampleSet::halton(n, 5, w).points;

  double ts = 0.0, tp = 0.0;
  double ms = run_once(f, pts, 1, &ts);  // serial reference
  double mp = run_once(f, pts, 0, &tp);  // OpenMP, all hardware threads
  set_threads(0);

  std::printf("points              : %zu\n", n);
  std::printf("serial reference    : %.3f s  (sup %.17g)\n", ts, ms);
  std::printf("OpenMP (%2d threads) : %.3f s  (sup %.17g)\n", threads(), tp,
              mp);
  std::printf("speedup             : %.2fx\n", ts / tp);
  std::printf("results identical   : %s\n", ms == mp ? "yes" : "NO");
  return ms == mp ? 0 : 1;
}
