#pragma once

#include <stdexcept>

namespace prandtl {

// Length-scale calculus tied to one set of frequency-energy levels.
struct LengthScales {
  double Xi, Eu, N, B;
  double lambda, tau, lx, ly, l;
};

struct scale_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lambda = B^3 N Xi; tau = 1/(B Xi N^{1/3} Eu^{1/2}); lx = 1/(B Xi N^{1/3});
// ly = 1/(B Xi^{1/2} N^{1/3} Eu^{1/4}); l = 1/(Xi^{1/2} Eu^{1/4}).
// Requires Xi >= 1, Eu <= Xi^2, N >= 1, B >= 3 and tau = l*ly <= ly <= l <= 1.
LengthScales scales(double Xi, double Eu, double N, double B);

}  // namespace prandtl
