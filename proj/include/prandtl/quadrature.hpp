#pragma once

#include <functional>
#include <vector>

namespace prandtl {

struct QuadRule {
  std::vector<double> x, w;  // nodes/weights on [-1,1]
};

// Gauss-Legendre rule with n nodes (cached per n).
const QuadRule& gauss_legendre(int n);

// Adaptive Gauss7/Kronrod15 on [a,b] to absolute tolerance tol.
double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_depth = 14);

// Vector-valued variant: one subdivision tree for all components; a panel is
// accepted when the max component error is <= tol * (1 + max |component|).
std::vector<double> adaptive_gk_vec(
    const std::function<std::vector<double>(double)>& f, double a, double b,
    double tol, int max_depth = 10);

}  // namespace prandtl
