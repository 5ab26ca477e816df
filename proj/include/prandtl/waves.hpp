#pragma once

#include <array>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "prandtl/mollify.hpp"
#include "prandtl/partition.hpp"
#include "prandtl/scales.hpp"

namespace prandtl {

struct construction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WaveIndex {
  CubeIndex k;
  int s = +1;  // oscillation sign; waves come in conjugate pairs
  auto operator<=>(const WaveIndex&) const = default;
};

// Unit frame direction f (the component being eliminated) and its rotation.
struct Frame {
  std::array<double, 2> f, fperp;
  static Frame axis(int i);  // 0:(1,0)  1:(0,1)  2:(1,1)/sqrt2
};

// parity [k] = sum 2^j [k_j] + 1 in [1,16]
int parity_code(const CubeIndex& k);

// a = sqrt((e+S1)(q)/2), b = Y1(q)/(2a); (0,0) for an inactive cube.
std::pair<double, double> amplitudes(const Field& e, const Field& S1,
                                     const Field& Y1, const Point& qk);

// Linear phase in exponential form: lambda xi = K.x - omega t with the wave
// vector snapped to the nearest point of 2 pi Z^2 on the line R fperp, so the
// wave is exactly periodic and K.f = 0 exactly. omega = K.u_k.
struct PhaseForm {
  std::array<double, 2> K{0, 0};
  double omega = 0;
  Field cosphi, sinphi;  // cos/sin(K.x - omega t)
};
PhaseForm phase(int parity, int s, const std::array<double, 2>& uk,
                const Frame& fr, double lambda);

// deltaW for amplitude A=(a f, b), cutoff eta(t) psi(t,x,y), wave vector K:
//   eta/|K|^2 { -2i (K.grad_x psi) A - (Lap psi) A + i (A.grad psi)(K,0)
//               + grad(A.grad psi) }
// which makes e^{i(K.x-omega t)} (W + deltaW) exactly divergence-free.
// Returned as (real, imag) 3-vectors.
std::pair<Vec3Field, Vec3Field> delta_correction(
    const Field& eta, const Field& psi, double a, double b, const Frame& fr,
    const std::array<double, 2>& K);

// throws construction_error unless every index has its conjugate
void validate_conjugate_closure(const std::vector<WaveIndex>& idx);

// One conjugate pair of waves (s = +1 representative).
struct WaveProfile {
  CubeIndex k;
  int parity = 1;
  Point anchor;
  double a = 0, b = 0;  // amplitudes at the anchor
  std::array<double, 2> uk{0, 0};
  double vk = 0;
  PhaseForm ph;
  Field eta, psi;
  Vec3Field main;               // W (real)
  Vec3Field delta_re, delta_im; // deltaW split into real/imag parts
};

struct WaveInputs {
  Field e, S1, Y1;  // scalar fields in the target frame
  std::shared_ptr<const PartitionFamily> fam;
  Vec2Field ul;     // mollified velocity (anchored into the phases)
  Field vl;
  LengthScales sc;
  Frame frame;
  // Build profiles on demand instead of enumerating every cube up front.
  // Needed when the cube count over the energy support is astronomically
  // large and only sampled neighbourhoods are ever touched.
  bool lazy = false;
};

class WaveAtlas {
 public:
  explicit WaveAtlas(WaveInputs in);
  // Eager enumeration; throws construction_error on a lazily built atlas.
  const std::vector<WaveProfile>& profiles() const;
  // Profile of one cube, built on demand; nullptr when the cube is inactive.
  const WaveProfile* profile_at(const CubeIndex& idx) const;
  std::optional<SupportBox> support_box() const;
  const WaveInputs& inputs() const;
  // assembled real corrections: full (W+deltaW), main part, delta part
  Vec3Field correction() const { return assemble(true, true); }
  Vec3Field correction_main() const { return assemble(true, false); }
  Vec3Field correction_delta() const { return assemble(false, true); }
  // profiles of cubes active at p (via the partition's cube enumeration)
  std::vector<const WaveProfile*> active(const Point& p) const;

  struct Data;

 private:
  Vec3Field assemble(bool with_main, bool with_delta) const;
  std::shared_ptr<const Data> d_;
};

}  // namespace prandtl
