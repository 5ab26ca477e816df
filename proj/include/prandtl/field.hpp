#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "prandtl/jet.hpp"
#include "prandtl/profiles.hpp"

namespace prandtl {

// Point on time x T^2 x R+. x-components live in [0,1).
struct Point {
  double t = 0, x1 = 0, x2 = 0, y = 0;
  static double wrap(double x) {
    x -= std::floor(x);
    return x < 1.0 ? x : 0.0;
  }
  static Point make(double t, double x1, double x2, double y) {
    return Point{t, wrap(x1), wrap(x2), y};
  }
};

// (t,y) support rectangle; fields vanish identically outside.
struct SupportBox {
  double tmin, tmax, ymin, ymax;
  bool contains(double t, double y) const {
    return t >= tmin && t <= tmax && y >= ymin && y <= ymax;
  }
  SupportBox inflate(double dt, double dy) const {
    return {tmin - dt, tmax + dt, ymin - dy, ymax + dy};
  }
};

class FieldNode {
 public:
  virtual ~FieldNode() = default;
  virtual Jet eval(const Point& p, const JetSpec& s) const = 0;
  virtual bool dependsOn(int axis) const { return true; }
  virtual std::optional<SupportBox> supportTY() const { return std::nullopt; }
};

using Field = std::shared_ptr<const FieldNode>;

// Evaluation entry point: wraps x into the torus and honours support boxes.
Jet eval_jet(const Field& f, const Point& p, const JetSpec& s);
double eval_value(const Field& f, const Point& p);
double eval_deriv(const Field& f, const Point& p, const DerivOrder& d);

// ---- constructors -----------------------------------------------------------
Field fconst(double c);
Field fcoord(int axis);  // 0=t, 1=x1, 2=x2, 3=y
Field fadd(std::vector<Field> terms);
Field fscale(double a, Field f);
Field fmul(Field a, Field b);
Field fprofile(ProfilePtr p, Field inner);
Field fderiv(Field f, DerivOrder d);
// c0 + ct*t + c1*x1 + c2*x2 + cy*y
Field faffine(double c0, double ct, double c1, double c2, double cy);
// Wrap with an explicit (t,y) support box (values outside become exactly 0).
Field with_support(Field f, SupportBox box);
// Custom evaluator node.
Field make_func(std::function<Jet(const Point&, const JetSpec&)> fn,
                std::optional<SupportBox> supp = std::nullopt);
// Memoizing wrapper keyed by (point bits, spec).
Field make_memo(Field f);
// Top-level summands of f (flattens nested sums); {f} when not a sum.
std::vector<Field> addends(const Field& f);

inline Field operator+(Field a, Field b) { return fadd({a, b}); }
inline Field operator-(Field a, Field b) { return fadd({a, fscale(-1.0, b)}); }
inline Field operator*(Field a, Field b) { return fmul(a, b); }
inline Field operator*(double a, Field b) { return fscale(a, b); }

// ---- small aggregates -------------------------------------------------------
struct Vec2Field {
  Field c1, c2;
};
struct Vec3Field {
  Field c1, c2, cy;  // two tangential components and the vertical one
};
struct Sym2Field {
  Field a11, a12, a22;
};

// d/dt + u.grad_x + v d/dy applied to f.
Field material_derivative(Field f, const Vec2Field& u, Field v);

// Evaluate f at jet-valued arguments (constant terms form the base point,
// which is wrapped into the torus). tableSpec controls the inner Taylor table;
// pass a tight spec when the caller knows the structure of the arguments.
Jet field_at_jet(const Field& f, const Jet& t, const Jet& x1, const Jet& x2,
                 const Jet& y, const JetSpec& tableSpec);
Jet field_at_jet(const Field& f, const Jet& t, const Jet& x1, const Jet& x2,
                 const Jet& y);

}  // namespace prandtl
