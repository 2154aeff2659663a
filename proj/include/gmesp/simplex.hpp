#pragma once

#include <vector>

#include "gmesp/matrix.hpp"

namespace gmesp {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> z;  // primal point, meaningful when optimal
    double value = 0.0;     // cost . z
};

// min cost . z  subject to  E z = f, z >= 0, solved by a dense two-phase
// tableau simplex with Bland's smallest-index rule, so it cannot cycle.
// Redundant equalities surviving phase one are dropped. Status reports
// infeasibility (phase-one residual above 1e-7) and unboundedness.
LpResult simplex_solve(const Matrix& e, std::vector<double> f, const std::vector<double>& cost);

}  // namespace gmesp
