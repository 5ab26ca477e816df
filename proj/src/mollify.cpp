#include "prandtl/mollify.hpp"

#include <cmath>

#include "prandtl/quadrature.hpp"

namespace prandtl {

namespace {

// One quadrature axis of the product kernel: offsets and kernel-weighted
// quadrature weights, normalized to unit discrete mass (so constants are
// reproduced exactly and odd moments vanish by symmetry).
struct KernelAxis {
  int axis;  // 1, 2 (x) or 3 (y)
  std::vector<double> z, w;
};

KernelAxis make_axis(int axis, double scale, int nodes) {
  KernelAxis a;
  a.axis = axis;
  auto kern = bump_mollifier(scale);
  const QuadRule& gl = gauss_legendre(nodes);
  double half = 0.75 * scale;
  double mass = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double z = half * gl.x[i];
    double w = half * gl.w[i] * (*kern)(z);
    a.z.push_back(z);
    a.w.push_back(w);
    mass += w;
  }
  for (auto& w : a.w) w /= mass;
  return a;
}

struct MollifiedNode final : FieldNode {
  Field f;
  double ly;
  std::vector<KernelAxis> axes;  // only the axes f depends on

  MollifiedNode(Field ff, double lx, double ly_, int nodes)
      : f(std::move(ff)), ly(ly_) {
    if (f->dependsOn(1)) axes.push_back(make_axis(1, lx, nodes));
    if (f->dependsOn(2)) axes.push_back(make_axis(2, lx, nodes));
    if (f->dependsOn(3)) axes.push_back(make_axis(3, ly, nodes));
  }

  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet r(s);
    std::vector<size_t> ix(axes.size(), 0);
    for (;;) {
      Point q = p;
      double w = 1.0;
      for (size_t k = 0; k < axes.size(); ++k) {
        const KernelAxis& a = axes[k];
        double z = a.z[ix[k]];
        w *= a.w[ix[k]];
        if (a.axis == 1) q.x1 -= z;
        else if (a.axis == 2) q.x2 -= z;
        else q.y -= z;
      }
      r.axpy(w, eval_jet(f, q, s));
      size_t k = 0;
      while (k < axes.size() && ++ix[k] == axes[k].z.size()) ix[k++] = 0;
      if (k == axes.size()) break;
    }
    return r;
  }
  bool dependsOn(int ax) const override { return f->dependsOn(ax); }
  std::optional<SupportBox> supportTY() const override {
    auto b = f->supportTY();
    if (!b) return b;
    return f->dependsOn(3) ? b->inflate(0.0, 0.75 * ly) : b;
  }
};

}  // namespace

Field mollify_field(Field f, double lx, double ly, int nodes) {
  std::vector<Field> parts;
  for (auto& term : addends(f)) {
    bool spatial = term->dependsOn(1) || term->dependsOn(2) || term->dependsOn(3);
    parts.push_back(spatial
                        ? std::make_shared<MollifiedNode>(term, lx, ly, nodes)
                        : term);
  }
  return parts.size() == 1 ? parts[0] : fadd(parts);
}

std::pair<Vec2Field, Field> mollify_velocity(const Vec2Field& u, const Field& v,
                                             const LengthScales& sc) {
  Vec2Field ul{mollify_field(u.c1, sc.lx, sc.ly),
               mollify_field(u.c2, sc.lx, sc.ly)};
  return {ul, mollify_field(v, sc.lx, sc.ly)};
}

namespace {

struct PartAvgNode final : FieldNode {
  Field f;
  std::shared_ptr<const PartitionFamily> fam;
  std::optional<SupportBox> box;

  PartAvgNode(Field ff, std::shared_ptr<const PartitionFamily> fm)
      : f(std::move(ff)), fam(std::move(fm)) {
    if (auto b = f->supportTY())
      box = b->inflate(fam->scales().tau, 4 * fam->scales().ly);
  }
  Jet eval(const Point& p, const JetSpec& s) const override {
    Jet r(s);
    if (box && !box->contains(p.t, p.y)) return r;
    // every cutoff lives inside the physical strip, so the average extends
    // by zero beyond it (and no characteristic is flown from outside)
    if (p.y <= 0.0 || p.y >= fam->spatial().Ymax) return r;
    for (auto& idx : fam->active(p)) {
      const TransportedPartition& cb = fam->cube(idx);
      double val = eval_value(f, cb.anchor);
      if (val == 0.0) continue;
      Jet eta = eval_jet(fam->temporal().field(idx.k0), p, s);
      Jet psi = eval_jet(cb.psi, p, s);
      r.axpy(val, (eta * eta) * (psi * psi));
    }
    return r;
  }
  std::optional<SupportBox> supportTY() const override { return box; }
};

}  // namespace

Field partition_average(Field f, std::shared_ptr<const PartitionFamily> fam) {
  return std::make_shared<PartAvgNode>(std::move(f), std::move(fam));
}

MollifiedStressEnergy mollify_stress_energy(
    Field S1, Field Y1, Field e, std::shared_ptr<const PartitionFamily> fam) {
  return {partition_average(std::move(S1), fam),
          partition_average(std::move(Y1), fam),
          partition_average(std::move(e), fam)};
}

}  // namespace prandtl
