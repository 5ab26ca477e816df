#include "prandtl/partition.hpp"

#include <bit>
#include <cmath>

namespace prandtl {

// ---- temporal ---------------------------------------------------------------

TemporalPartition::TemporalPartition(double tau_)
    : tau(tau_), eta(partition_eta()) {}

double TemporalPartition::value(long k0, double t) const {
  return (*eta)(t / tau - (double)k0);
}

Field TemporalPartition::field(long k0) const {
  return fprofile(eta, faffine(-(double)k0, 1.0 / tau, 0, 0, 0));
}

std::vector<long> TemporalPartition::active(double t) const {
  double s = t / tau;
  std::vector<long> out;
  for (long k = (long)std::floor(s - 0.75); k <= (long)std::ceil(s + 0.75); ++k)
    if (std::abs(s - (double)k) < 0.75) out.push_back(k);
  return out;
}

// ---- spatial ----------------------------------------------------------------

SpatialPartition::SpatialPartition(double lx_, double ly_, double Ymax_)
    : lx(lx_), ly(ly_), Ymax(Ymax_), eta(partition_eta()) {
  if (!(lx > 0) || lx > 0.5)
    throw scale_error("spatial partition requires 0 < lx <= 1/2");
  H = (int)std::ceil(-std::log2(lx) - 1e-12);
  if (H < 1) H = 1;
}

long SpatialPartition::kmax_y() const { return (long)std::floor(Ymax / ly); }

static double reduce_mod(double s, double P) {
  return s - P * std::nearbyint(s / P);
}

double SpatialPartition::value(long k1, long k2, long k3, double x1, double x2,
                               double y) const {
  double P = (double)(1L << H);
  double f1 = (*eta)(reduce_mod(P * x1 - (double)k1, P));
  double f2 = (*eta)(reduce_mod(P * x2 - (double)k2, P));
  double f3 = (*eta)(y / ly - (double)k3);
  return f1 * f2 * f3;
}

// compose the 1D profile with an affine-in-jet argument
static Jet profile_at(const Profile1D& pr, const Jet& arg) {
  std::vector<double> a(arg.spec.total + 1);
  pr.taylor(arg.value(), arg.spec.total, a.data());
  return jet_compose1(a, arg);
}

Jet SpatialPartition::jet(long k1, long k2, long k3, const Jet& x1,
                          const Jet& x2, const Jet& y) const {
  double P = (double)(1L << H);
  Jet a1 = P * x1;
  a1.c[0] = reduce_mod(P * x1.value() - (double)k1, P);
  Jet a2 = P * x2;
  a2.c[0] = reduce_mod(P * x2.value() - (double)k2, P);
  Jet a3 = (1.0 / ly) * y;
  a3.c[0] = y.value() / ly - (double)k3;
  return profile_at(*eta, a1) * profile_at(*eta, a2) * profile_at(*eta, a3);
}

std::vector<std::array<long, 3>> SpatialPartition::active(double x1, double x2,
                                                          double y) const {
  long P = 1L << H;
  auto cand = [&](double s, bool periodic, long kmax,
                  std::vector<long>& out) {
    for (long k = (long)std::floor(s - 0.75); k <= (long)std::ceil(s + 0.75);
         ++k) {
      if (std::abs(s - (double)k) >= 0.75) continue;
      long kk = k;
      if (periodic) {
        kk = k % P;
        if (kk < 0) kk += P;
      } else if (k < 0 || k > kmax) {
        continue;
      }
      out.push_back(kk);
    }
  };
  std::vector<long> c1, c2, c3;
  cand(x1 * (double)P, true, 0, c1);
  cand(x2 * (double)P, true, 0, c2);
  cand(y / ly, false, kmax_y(), c3);
  std::vector<std::array<long, 3>> out;
  for (long a : c1)
    for (long b : c2)
      for (long c : c3) out.push_back({a, b, c});
  return out;
}

// ---- flow -------------------------------------------------------------------

namespace {

using State = std::array<Jet, 3>;

State add_scaled(const State& z, double h, const State& k) {
  State r = z;
  for (int i = 0; i < 3; ++i) r[i].axpy(h, k[i]);
  return r;
}

std::array<uint64_t, 4> pt_key(const Point& p) {
  return {std::bit_cast<uint64_t>(p.t), std::bit_cast<uint64_t>(p.x1),
          std::bit_cast<uint64_t>(p.x2), std::bit_cast<uint64_t>(p.y)};
}

}  // namespace

FlowChart::FlowChart(Vec2Field u, Field v, double tau, long k0, double Ymax,
                     int substeps)
    : u_(std::move(u)),
      v_(std::move(v)),
      tau_(tau),
      t0_((double)k0 * tau),
      Ymax_(Ymax),
      substeps_(substeps) {}

Point FlowChart::endpoint_value(const Point& p) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = vmemo_.find(pt_key(p));
    if (it != vmemo_.end()) return it->second;
  }
  double S = t0_ - p.t;
  int n = std::max(1, (int)std::ceil(std::abs(S) / (tau_ / substeps_)));
  double h = S / n;
  double z1 = p.x1, z2 = p.x2, z3 = p.y, t = p.t;
  auto f = [&](double tt, double a, double b, double c, double out[3]) {
    Point q{tt, a, b, c};
    out[0] = eval_value(u_.c1, q);
    out[1] = eval_value(u_.c2, q);
    out[2] = eval_value(v_, q);
  };
  for (int i = 0; i < n; ++i) {
    double A[3], B[3], C[3], D[3];
    f(t, z1, z2, z3, A);
    f(t + h / 2, z1 + h / 2 * A[0], z2 + h / 2 * A[1], z3 + h / 2 * A[2], B);
    f(t + h / 2, z1 + h / 2 * B[0], z2 + h / 2 * B[1], z3 + h / 2 * B[2], C);
    f(t + h, z1 + h * C[0], z2 + h * C[1], z3 + h * C[2], D);
    z1 += h / 6 * (A[0] + 2 * B[0] + 2 * C[0] + D[0]);
    z2 += h / 6 * (A[1] + 2 * B[1] + 2 * C[1] + D[1]);
    z3 += h / 6 * (A[2] + 2 * B[2] + 2 * C[2] + D[2]);
    t += h;
    if (!(z3 > 0.0 && z3 < Ymax_))
      throw domain_exit_error("flow trajectory left y in (0, Ymax)");
  }
  Point r{t0_, z1, z2, z3};
  std::lock_guard<std::mutex> lk(mu_);
  vmemo_.emplace(pt_key(p), r);
  return r;
}

std::array<Jet, 3> FlowChart::endpoint(const Point& p, const JetSpec& s) const {
  std::array<uint64_t, 5> key = {std::bit_cast<uint64_t>(p.t),
                                 std::bit_cast<uint64_t>(p.x1),
                                 std::bit_cast<uint64_t>(p.x2),
                                 std::bit_cast<uint64_t>(p.y), s.key()};
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  Jet T = Jet::variable(s, 0, p.t);
  Jet Sj = Jet::constant(s, t0_) - T;  // integration span as a jet
  State Z{Jet::variable(s, 1, p.x1), Jet::variable(s, 2, p.x2),
          Jet::variable(s, 3, p.y)};
  double span = t0_ - p.t;
  int n = std::max(1, (int)std::ceil(std::abs(span) / (tau_ / substeps_)));
  double h = 1.0 / n;  // sigma in [0,1]: dZ/dsigma = S * V(t + sigma S, Z)
  auto F = [&](double sigma, const State& z) {
    Jet tj = T;
    tj.axpy(sigma, Sj);
    State k;
    k[0] = Sj * field_at_jet(u_.c1, tj, z[0], z[1], z[2]);
    k[1] = Sj * field_at_jet(u_.c2, tj, z[0], z[1], z[2]);
    k[2] = Sj * field_at_jet(v_, tj, z[0], z[1], z[2]);
    return k;
  };
  for (int i = 0; i < n; ++i) {
    double s0 = i * h;
    State A = F(s0, Z);
    State B = F(s0 + h / 2, add_scaled(Z, h / 2, A));
    State C = F(s0 + h / 2, add_scaled(Z, h / 2, B));
    State D = F(s0 + h, add_scaled(Z, h, C));
    for (int j = 0; j < 3; ++j) {
      Z[j].axpy(h / 6, A[j]);
      Z[j].axpy(h / 3, B[j]);
      Z[j].axpy(h / 3, C[j]);
      Z[j].axpy(h / 6, D[j]);
    }
    if (!(Z[2].value() > 0.0 && Z[2].value() < Ymax_))
      throw domain_exit_error("flow trajectory left y in (0, Ymax)");
  }
  std::lock_guard<std::mutex> lk(mu_);
  memo_.emplace(key, Z);
  return Z;
}

Point flow_map(const Vec2Field& u, const Field& v, const Point& from, double s,
               double tau, double Ymax, int substeps) {
  int n = std::max(1, (int)std::ceil(std::abs(s) / (tau / substeps)));
  double h = s / n;
  double z1 = from.x1, z2 = from.x2, z3 = from.y, t = from.t;
  auto f = [&](double tt, double a, double b, double c, double out[3]) {
    Point q{tt, a, b, c};
    out[0] = eval_value(u.c1, q);
    out[1] = eval_value(u.c2, q);
    out[2] = eval_value(v, q);
  };
  for (int i = 0; i < n; ++i) {
    double A[3], B[3], C[3], D[3];
    f(t, z1, z2, z3, A);
    f(t + h / 2, z1 + h / 2 * A[0], z2 + h / 2 * A[1], z3 + h / 2 * A[2], B);
    f(t + h / 2, z1 + h / 2 * B[0], z2 + h / 2 * B[1], z3 + h / 2 * B[2], C);
    f(t + h, z1 + h * C[0], z2 + h * C[1], z3 + h * C[2], D);
    z1 += h / 6 * (A[0] + 2 * B[0] + 2 * C[0] + D[0]);
    z2 += h / 6 * (A[1] + 2 * B[1] + 2 * C[1] + D[1]);
    z3 += h / 6 * (A[2] + 2 * B[2] + 2 * C[2] + D[2]);
    t += h;
    if (!(z3 > 0.0 && z3 < Ymax))
      throw domain_exit_error("flow trajectory left y in (0, Ymax)");
  }
  return Point{from.t + s, z1, z2, z3};
}

// ---- family -----------------------------------------------------------------

namespace {

struct PsiNode final : FieldNode {
  std::shared_ptr<const FlowChart> chart;
  SpatialPartition sp;
  CubeIndex idx;
  PsiNode(std::shared_ptr<const FlowChart> c, SpatialPartition s, CubeIndex i)
      : chart(std::move(c)), sp(std::move(s)), idx(i) {}
  Jet eval(const Point& p, const JetSpec& s) const override {
    auto z = chart->endpoint(p, s);
    return sp.jet(idx.k1, idx.k2, idx.k3, z[0], z[1], z[2]);
  }
};

}  // namespace

PartitionFamily::PartitionFamily(Vec2Field u, Field v, const LengthScales& sc,
                                 double Ymax, int flow_substeps)
    : u_(std::move(u)),
      v_(std::move(v)),
      sc_(sc),
      Ymax_(Ymax),
      flow_substeps_(flow_substeps),
      temporal_(sc.tau),
      spatial_(sc.lx, sc.ly, Ymax) {}

std::shared_ptr<const FlowChart> PartitionFamily::chart(long k0) const {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = charts_.find(k0);
  if (it == charts_.end())
    it = charts_
             .emplace(k0, std::make_shared<const FlowChart>(
                          u_, v_, sc_.tau, k0, Ymax_, flow_substeps_))
             .first;
  return it->second;
}

const TransportedPartition& PartitionFamily::cube(const CubeIndex& idx) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cubes_.find(idx);
    if (it != cubes_.end()) return *it->second;
  }
  auto tp = std::make_unique<TransportedPartition>();
  tp->idx = idx;
  double cell = std::pow(2.0, -spatial_.H);
  tp->anchor = Point{(double)idx.k0 * sc_.tau, (double)idx.k1 * cell,
                     (double)idx.k2 * cell, (double)idx.k3 * spatial_.ly};
  tp->psi_raw = std::make_shared<PsiNode>(chart(idx.k0), spatial_, idx);
  // supp-Q_kappa rule: (t,y)-projection within (tau, 4 ly) of the anchor
  SupportBox box{tp->anchor.t - sc_.tau, tp->anchor.t + sc_.tau,
                 tp->anchor.y - 4 * spatial_.ly, tp->anchor.y + 4 * spatial_.ly};
  tp->psi = with_support(tp->psi_raw, box);
  std::lock_guard<std::mutex> lk(mu_);
  auto it = cubes_.find(idx);
  if (it == cubes_.end()) it = cubes_.emplace(idx, std::move(tp)).first;
  return *it->second;
}

std::vector<CubeIndex> PartitionFamily::active(const Point& p) const {
  std::vector<CubeIndex> out;
  for (long k0 : temporal_.active(p.t)) {
    Point z = chart(k0)->endpoint_value(p);
    for (auto& c : spatial_.active(z.x1, z.x2, z.y))
      out.push_back(CubeIndex{k0, c[0], c[1], c[2]});
  }
  return out;
}

}  // namespace prandtl
