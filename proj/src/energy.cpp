#include "torusflow/energy.hpp"

#include "torusflow/geometry.hpp"
#include "torusflow/layer.hpp"

namespace torusflow {

EnergyParts energy(const PeriodicCurve& curve, double gamma) {
    EnergyParts e;
    e.perimeter = perimeter(curve);
    if (gamma != 0.0) e.nonlocal = nonlocal_energy(curve);
    e.J = e.perimeter + gamma * e.nonlocal;
    return e;
}

}  // namespace torusflow
