#include "prandtl/scales.hpp"

#include <cmath>

namespace prandtl {

LengthScales scales(double Xi, double Eu, double N, double B) {
  if (!(Xi >= 1.0)) throw scale_error("scales: Xi must be >= 1");
  if (!(Eu > 0.0 && Eu <= Xi * Xi))
    throw scale_error("scales: need 0 < Eu <= Xi^2");
  if (!(N >= 1.0)) throw scale_error("scales: N must be >= 1");
  if (!(B >= 3.0)) throw scale_error("scales: B must be >= 3");
  LengthScales s;
  s.Xi = Xi;
  s.Eu = Eu;
  s.N = N;
  s.B = B;
  double N13 = std::cbrt(N), Eu14 = std::pow(Eu, 0.25);
  s.lambda = B * B * B * N * Xi;
  s.lx = 1.0 / (B * Xi * N13);
  s.ly = 1.0 / (B * std::sqrt(Xi) * N13 * Eu14);
  s.l = 1.0 / (std::sqrt(Xi) * Eu14);
  s.tau = s.l * s.ly;
  // tau = l*ly <= ly <= l <= 1 given the preconditions; verify anyway.
  if (!(s.tau <= s.ly * (1 + 1e-12) && s.ly <= s.l * (1 + 1e-12) && s.l <= 1.0 + 1e-12))
    throw scale_error("scales: inconsistent parameters (tau <= ly <= l <= 1 fails)");
  return s;
}

}  // namespace prandtl
