#pragma once

#include <memory>
#include <vector>

namespace prandtl {

// Analytic 1D profile answering truncated Taylor expansions at any base point.
// a[k] is the Taylor *coefficient* (f^(k)(s0)/k!).
class Profile1D {
 public:
  virtual ~Profile1D() = default;
  virtual void taylor(double s0, int n, double* a) const = 0;
  double operator()(double s) const {
    double v;
    taylor(s, 0, &v);
    return v;
  }
  // Closed support interval, if compact (zero outside).
  virtual bool support(double& lo, double& hi) const { return false; }
};

using ProfilePtr = std::shared_ptr<const Profile1D>;

ProfilePtr profile_poly(std::vector<double> coeffs);  // sum c_k s^k
ProfilePtr profile_exp();
ProfilePtr profile_sin(double omega, double phase = 0.0);
ProfilePtr profile_cos(double omega, double phase = 0.0);
ProfilePtr profile_erf();
ProfilePtr profile_power(double p);  // s^p on s > 0

// Smooth bumps (see module partition): the mollifier kind is nonnegative,
// supported in (-3/4,3/4)*scale with unit integral; the plateau kind equals 1
// on |s| <= 5/8*scale and is supported in (-3/4,3/4)*scale.
ProfilePtr bump_mollifier(double scale);
// c (1 + cos(pi s / radius))^p on (-radius, radius), unit integral; a finite
// cosine series, C^{2p-1} at the support edge (good equispaced quadrature).
ProfilePtr bump_cosine_power(double radius, int p);
ProfilePtr bump_plateau(double scale);
// CDF of the mollifier bump (for indicator * mollifier convolutions).
ProfilePtr bump_mollifier_cdf(double scale);

// Square partition profile eta = plateau / sqrt(sum_k plateau^2(s-k)):
// sum_{k in Z} eta^2(s-k) = 1, supp eta in (-3/4,3/4).
ProfilePtr partition_eta();

}  // namespace prandtl
