#pragma once

#include <memory>
#include <utility>

#include "prandtl/field.hpp"
#include "prandtl/partition.hpp"
#include "prandtl/scales.hpp"

namespace prandtl {

// Anisotropic spatial mollification against the product kernel
// bump_{lx}(x1') bump_{lx}(x2') bump_{ly}(y') by tensor Gauss-Legendre
// quadrature (weights normalized so the discrete kernel has unit mass).
// Axes the input does not depend on are skipped; sums are mollified
// term by term so support boxes stay tight.
Field mollify_field(Field f, double lx, double ly, int nodes = 16);

std::pair<Vec2Field, Field> mollify_velocity(const Vec2Field& u, const Field& v,
                                             const LengthScales& sc);

// Partition-anchored mollification: F_l = sum_k eta_k^2 psi_k^2 F(q_k).
Field partition_average(Field f, std::shared_ptr<const PartitionFamily> fam);

struct MollifiedStressEnergy {
  Field S, Y, e;
};
MollifiedStressEnergy mollify_stress_energy(
    Field S1, Field Y1, Field e, std::shared_ptr<const PartitionFamily> fam);

}  // namespace prandtl
