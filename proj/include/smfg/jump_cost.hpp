#pragma once

#include "smfg/dynamics.hpp"

namespace smfg {

using JumpCostFn = std::function<RowVec(double t, const Vec& x, const Vec& xi)>;  // 1 x l

// One control jump (t, x, xi -> xi_next) whose execution cost is to be
// minimised over monotone interpolation paths.
struct JumpCostProblem {
    double t = 0.0;
    Vec x;        // pre-jump state
    Vec xi;       // pre-jump control
    Vec xi_next;  // post-jump control, componentwise >= xi
    const CoefficientSpec* coeffs = nullptr;  // supplies gamma and dimensions
    JumpCostFn c;
    int lattice_steps = 64;

    void validate() const;
};

// Discrete monotone (y, zeta) trajectory realising a jump cost.
struct JumpPath {
    std::vector<Vec> y;
    std::vector<Vec> zeta;
    bool empty() const { return zeta.size() < 2; }
};

struct JumpCostResult {
    double cost = 0.0;
    JumpPath path;
};

// Cost along the linear interpolation zeta_u = (1-u) xi + u xi' with y from
// the jump ODE; always an upper bound for the minimal cost.
double linear_interp_cost(const JumpCostProblem& p, int steps = 256);

// Minimal jump cost over monotone staircase paths on a per-component lattice
// of `lattice_steps` increments (dynamic programming, l <= 3), the single
// interpolation class for l == 1, and a projected-gradient speed-allocation
// fallback for l > 3.  Returns the cost and the argmin trajectory.
JumpCostResult min_jump_cost(const JumpCostProblem& p, bool allow_fallback = true);

// Cost of a given piecewise-linear monotone (zeta) path with y advanced by
// the jump ODE; quadrature helper shared by the optimisers and audits.
double path_cost(const JumpCostProblem& p, const std::vector<Vec>& zeta_knots,
                 int steps_per_leg, std::vector<Vec>* y_out = nullptr);

}  // namespace smfg
