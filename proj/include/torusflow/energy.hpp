#pragma once

#include "torusflow/curve.hpp"

namespace torusflow {

struct EnergyParts {
    double J = 0.0;
    double perimeter = 0.0;
    double nonlocal = 0.0;  // int |D v_E|^2, not multiplied by gamma
};

/// J = perimeter + gamma int |D v_E|^2. The nonlocal term is skipped (reported 0) when gamma == 0.
EnergyParts energy(const PeriodicCurve& curve, double gamma);

}  // namespace torusflow
