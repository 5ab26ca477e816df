#include "prandtl/field.hpp"

#include <cstring>
#include <mutex>
#include <unordered_map>

namespace prandtl {

namespace {

Jet zero_jet(const JetSpec& s) { return Jet(s); }

struct ConstNode final : FieldNode {
  double v;
  explicit ConstNode(double c) : v(c) {}
  Jet eval(const Point&, const JetSpec& s) const override {
    return Jet::constant(s, v);
  }
  bool dependsOn(int) const override { return false; }
};

struct CoordNode final : FieldNode {
  int axis;
  explicit CoordNode(int a) : axis(a) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    double v = axis == 0 ? p.t : axis == 1 ? p.x1 : axis == 2 ? p.x2 : p.y;
    return Jet::variable(s, axis, v);
  }
  bool dependsOn(int a) const override { return a == axis; }
};

struct AddNode final : FieldNode {
  std::vector<Field> ts;
  explicit AddNode(std::vector<Field> t) : ts(std::move(t)) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet r(s);
    for (const auto& f : ts) r += eval_jet(f, p, s);
    return r;
  }
  bool dependsOn(int a) const override {
    for (const auto& f : ts)
      if (f->dependsOn(a)) return true;
    return false;
  }
  std::optional<SupportBox> supportTY() const override {
    SupportBox b{1e300, -1e300, 1e300, -1e300};
    for (const auto& f : ts) {
      auto sb = f->supportTY();
      if (!sb) return std::nullopt;
      b.tmin = std::min(b.tmin, sb->tmin);
      b.tmax = std::max(b.tmax, sb->tmax);
      b.ymin = std::min(b.ymin, sb->ymin);
      b.ymax = std::max(b.ymax, sb->ymax);
    }
    return b;
  }
};

struct ScaleNode final : FieldNode {
  double a;
  Field f;
  ScaleNode(double aa, Field ff) : a(aa), f(std::move(ff)) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet r = eval_jet(f, p, s);
    r *= a;
    return r;
  }
  bool dependsOn(int ax) const override { return f->dependsOn(ax); }
  std::optional<SupportBox> supportTY() const override { return f->supportTY(); }
};

struct MulNode final : FieldNode {
  Field a, b;
  MulNode(Field aa, Field bb) : a(std::move(aa)), b(std::move(bb)) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet ja = eval_jet(a, p, s);
    bool z = true;
    for (double v : ja.c) z = z && v == 0.0;
    if (z) return ja;
    return ja * eval_jet(b, p, s);
  }
  bool dependsOn(int ax) const override {
    return a->dependsOn(ax) || b->dependsOn(ax);
  }
  std::optional<SupportBox> supportTY() const override {
    auto sa = a->supportTY(), sb = b->supportTY();
    if (!sa) return sb;
    if (!sb) return sa;
    return SupportBox{std::max(sa->tmin, sb->tmin), std::min(sa->tmax, sb->tmax),
                      std::max(sa->ymin, sb->ymin), std::min(sa->ymax, sb->ymax)};
  }
};

struct ProfileNode final : FieldNode {
  ProfilePtr pr;
  Field inner;
  ProfileNode(ProfilePtr p, Field f) : pr(std::move(p)), inner(std::move(f)) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet g = eval_jet(inner, p, s);
    std::vector<double> tab(s.total + 1);
    pr->taylor(g.value(), s.total, tab.data());
    return jet_compose1(tab, g);
  }
  bool dependsOn(int ax) const override { return inner->dependsOn(ax); }
};

struct DerivNode final : FieldNode {
  Field f;
  DerivOrder d;
  DerivNode(Field ff, DerivOrder dd) : f(std::move(ff)), d(dd) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    JetSpec is = JetSpec::axes(s.nt + d.g, s.nx1 + d.a1, s.nx2 + d.a2,
                               s.ny + d.b, s.total + d.total());
    Jet in = eval_jet(f, p, is);
    Jet out(s);
    for (int it = 0; it <= s.nt; ++it)
      for (int i1 = 0; i1 <= s.nx1; ++i1)
        for (int i2 = 0; i2 <= s.nx2; ++i2)
          for (int iy = 0; iy <= s.ny; ++iy) {
            if (it + i1 + i2 + iy > s.total) continue;
            double fac = 1.0;
            auto rise = [&fac](int m, int k) {
              for (int j = 1; j <= k; ++j) fac *= (m + j);
            };
            rise(it, d.g);
            rise(i1, d.a1);
            rise(i2, d.a2);
            rise(iy, d.b);
            out.at(it, i1, i2, iy) =
                in.at(it + d.g, i1 + d.a1, i2 + d.a2, iy + d.b) * fac;
          }
    return out;
  }
  bool dependsOn(int ax) const override { return f->dependsOn(ax); }
  std::optional<SupportBox> supportTY() const override { return f->supportTY(); }
};

struct SupportNode final : FieldNode {
  Field f;
  SupportBox box;
  SupportNode(Field ff, SupportBox b) : f(std::move(ff)), box(b) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    return eval_jet(f, p, s);
  }
  bool dependsOn(int ax) const override {
    // the cutoff itself varies in t and y
    return ax == 0 || ax == 3 || f->dependsOn(ax);
  }
  std::optional<SupportBox> supportTY() const override { return box; }
};

struct FuncNode final : FieldNode {
  std::function<Jet(const Point&, const JetSpec&)> fn;
  std::optional<SupportBox> supp;
  FuncNode(std::function<Jet(const Point&, const JetSpec&)> f,
           std::optional<SupportBox> s)
      : fn(std::move(f)), supp(s) {}
  Jet eval(const Point& p, const JetSpec& s) const override { return fn(p, s); }
  std::optional<SupportBox> supportTY() const override { return supp; }
};

struct MemoKey {
  double t, x1, x2, y;
  uint64_t sk;
  bool operator==(const MemoKey&) const = default;
};
struct MemoHash {
  size_t operator()(const MemoKey& k) const {
    auto h = [](double d) {
      uint64_t u;
      std::memcpy(&u, &d, 8);
      return u;
    };
    uint64_t r = k.sk;
    for (uint64_t v : {h(k.t), h(k.x1), h(k.x2), h(k.y)})
      r = r * 0x9E3779B97F4A7C15ull + v;
    return (size_t)r;
  }
};

struct MemoNode final : FieldNode {
  Field f;
  mutable std::unordered_map<MemoKey, Jet, MemoHash> cache;
  mutable std::mutex mu;
  explicit MemoNode(Field ff) : f(std::move(ff)) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    MemoKey k{p.t, p.x1, p.x2, p.y, s.key()};
    {
      std::lock_guard<std::mutex> lk(mu);
      auto it = cache.find(k);
      if (it != cache.end()) return it->second;
    }
    Jet r = eval_jet(f, p, s);
    std::lock_guard<std::mutex> lk(mu);
    cache.emplace(k, r);
    return r;
  }
  bool dependsOn(int ax) const override { return f->dependsOn(ax); }
  std::optional<SupportBox> supportTY() const override { return f->supportTY(); }
};

}  // namespace

Jet eval_jet(const Field& f, const Point& praw, const JetSpec& s) {
  Point p = Point::make(praw.t, praw.x1, praw.x2, praw.y);
  auto box = f->supportTY();
  if (box && !box->contains(p.t, p.y)) return zero_jet(s);
  return f->eval(p, s);
}

double eval_value(const Field& f, const Point& p) {
  return eval_jet(f, p, JetSpec::axes(0, 0, 0, 0)).value();
}

double eval_deriv(const Field& f, const Point& p, const DerivOrder& d) {
  return eval_jet(f, p, JetSpec::forOrder(d)).deriv(d);
}

Field fconst(double c) { return std::make_shared<ConstNode>(c); }
Field fcoord(int axis) { return std::make_shared<CoordNode>(axis); }
Field fadd(std::vector<Field> terms) {
  return std::make_shared<AddNode>(std::move(terms));
}
Field fscale(double a, Field f) {
  return std::make_shared<ScaleNode>(a, std::move(f));
}
Field fmul(Field a, Field b) {
  return std::make_shared<MulNode>(std::move(a), std::move(b));
}
Field fprofile(ProfilePtr p, Field inner) {
  return std::make_shared<ProfileNode>(std::move(p), std::move(inner));
}
Field fderiv(Field f, DerivOrder d) {
  return std::make_shared<DerivNode>(std::move(f), d);
}
Field faffine(double c0, double ct, double c1, double c2, double cy) {
  std::vector<Field> ts{fconst(c0)};
  if (ct != 0) ts.push_back(fscale(ct, fcoord(0)));
  if (c1 != 0) ts.push_back(fscale(c1, fcoord(1)));
  if (c2 != 0) ts.push_back(fscale(c2, fcoord(2)));
  if (cy != 0) ts.push_back(fscale(cy, fcoord(3)));
  return fadd(std::move(ts));
}
Field with_support(Field f, SupportBox box) {
  return std::make_shared<SupportNode>(std::move(f), box);
}
Field make_func(std::function<Jet(const Point&, const JetSpec&)> fn,
                std::optional<SupportBox> supp) {
  return std::make_shared<FuncNode>(std::move(fn), supp);
}
Field make_memo(Field f) { return std::make_shared<MemoNode>(std::move(f)); }

Field material_derivative(Field f, const Vec2Field& u, Field v) {
  return fadd({fderiv(f, {.g = 1}), fmul(u.c1, fderiv(f, {.a1 = 1})),
               fmul(u.c2, fderiv(f, {.a2 = 1})), fmul(v, fderiv(f, {.b = 1}))});
}

std::vector<Field> addends(const Field& f) {
  if (auto* add = dynamic_cast<const AddNode*>(f.get())) {
    std::vector<Field> out;
    for (const auto& c : add->ts)
      for (auto& g : addends(c)) out.push_back(std::move(g));
    return out;
  }
  return {f};
}

Jet field_at_jet(const Field& f, const Jet& t, const Jet& x1, const Jet& x2,
                 const Jet& y, const JetSpec& tableSpec) {
  Point base = Point::make(t.value(), x1.value(), x2.value(), y.value());
  Jet table = eval_jet(f, base, tableSpec);
  Jet dt = t, d1 = x1, d2 = x2, dy = y;
  dt.c[0] = 0;
  d1.c[0] = 0;
  d2.c[0] = 0;
  dy.c[0] = 0;
  return jet_compose(table, dt, d1, d2, dy);
}

Jet field_at_jet(const Field& f, const Jet& t, const Jet& x1, const Jet& x2,
                 const Jet& y) {
  int T = t.spec.total;
  return field_at_jet(f, t, x1, x2, y, JetSpec::axes(T, T, T, T, T));
}

}  // namespace prandtl
