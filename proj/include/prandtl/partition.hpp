#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "prandtl/field.hpp"
#include "prandtl/scales.hpp"

namespace prandtl {

struct domain_exit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cube index: time slab k0, x-cells k1,k2 (mod 2^H), y-cell k3.
struct CubeIndex {
  long k0 = 0, k1 = 0, k2 = 0, k3 = 0;
  auto operator<=>(const CubeIndex&) const = default;
};

// eta_{k0}(t) = eta(t/tau - k0); sum over k0 of eta^2 is 1.
struct TemporalPartition {
  double tau;
  ProfilePtr eta;
  explicit TemporalPartition(double tau_);
  double value(long k0, double t) const;
  Field field(long k0) const;  // as a field of t
  std::vector<long> active(double t) const;
};

// psi~_{k~}(x,y) = eta_H(2^H x1 - k1) eta_H(2^H x2 - k2) eta(y/ly - k3)
// with 2^-H <= lx < 2^-(H-1); the x-factors are 2^H-periodised (no overlap
// since the cell spacing is >= 2 profile supports).
struct SpatialPartition {
  double lx, ly, Ymax;
  int H;
  ProfilePtr eta;
  SpatialPartition(double lx_, double ly_, double Ymax_);
  double value(long k1, long k2, long k3, double x1, double x2, double y) const;
  Jet jet(long k1, long k2, long k3, const Jet& x1, const Jet& x2,
          const Jet& y) const;
  // cells whose support reaches (x1,x2,y); k1,k2 reduced mod 2^H
  std::vector<std::array<long, 3>> active(double x1, double x2, double y) const;
  long cells_x() const { return 1L << H; }
  long kmax_y() const;
};

// Backward characteristics of (1,u,v) from the query time to the slab anchor
// time k0*tau, integrated by RK4 in jet arithmetic so query-point derivatives
// pass exactly through the integrator. Shared by every cube in the slab.
class FlowChart {
 public:
  FlowChart(Vec2Field u, Field v, double tau, long k0, double Ymax,
            int substeps = 64);
  // spatial endpoint (X1, X2, Y) as jets in the query variables; memoized
  std::array<Jet, 3> endpoint(const Point& p, const JetSpec& s) const;
  Point endpoint_value(const Point& p) const;  // fast scalar path, memoized
  double anchor_time() const { return t0_; }

 private:
  Vec2Field u_;
  Field v_;
  double tau_, t0_, Ymax_;
  int substeps_;
  mutable std::map<std::array<uint64_t, 5>, std::array<Jet, 3>> memo_;
  mutable std::map<std::array<uint64_t, 4>, Point> vmemo_;
  mutable std::mutex mu_;
};

// Point-flow of (1,u,v) over parameter s (RK4, fixed step tau/substeps).
Point flow_map(const Vec2Field& u, const Field& v, const Point& from, double s,
               double tau, double Ymax, int substeps = 64);

struct TransportedPartition {
  CubeIndex idx;
  Point anchor;  // q_k = (k0 tau, k1 2^-H, k2 2^-H, k3 ly)
  Field psi;     // clipped to the transported-cube support rule
  Field psi_raw; // same values, no support clipping (for shell tests)
};

// All transported cutoffs for one mollified velocity and scale set.
class PartitionFamily {
 public:
  PartitionFamily(Vec2Field u, Field v, const LengthScales& sc, double Ymax,
                  int flow_substeps = 64);
  const TemporalPartition& temporal() const { return temporal_; }
  const SpatialPartition& spatial() const { return spatial_; }
  const LengthScales& scales() const { return sc_; }
  std::shared_ptr<const FlowChart> chart(long k0) const;
  const TransportedPartition& cube(const CubeIndex& idx) const;
  // cubes with eta_{k0} psi_k nonzero at p (at most 16)
  std::vector<CubeIndex> active(const Point& p) const;

 private:
  Vec2Field u_;
  Field v_;
  LengthScales sc_;
  double Ymax_;
  int flow_substeps_;
  TemporalPartition temporal_;
  SpatialPartition spatial_;
  mutable std::map<long, std::shared_ptr<const FlowChart>> charts_;
  mutable std::map<CubeIndex, std::unique_ptr<TransportedPartition>> cubes_;
  mutable std::mutex mu_;
};

}  // namespace prandtl
