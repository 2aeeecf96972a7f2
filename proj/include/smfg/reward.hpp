#pragma once

#include "smfg/jump_cost.hpp"

namespace smfg {

using RunningRewardFn = std::function<double(double t, const Marginal&, const Vec& x, const Vec& xi)>;
using TerminalRewardFn = std::function<double(const Marginal&, const Vec& x, const Vec& xi)>;

// Reward data (f, g, c) with the growth exponent p > 2.  The growth guard
// reports the distinguished minus-infinity sentinel when the empirical p-th
// moment of the terminal control exceeds moment_cap.
struct RewardSpec {
    RunningRewardFn f;
    TerminalRewardFn g;
    JumpCostFn c;
    double p = 3.0;
    double moment_cap = std::numeric_limits<double>::infinity();

    void validate(int l) const;
};

struct RewardBreakdown {
    double g_term = 0.0;
    double f_term = 0.0;
    double continuous_cost = 0.0;            // integral c . dxi^c (positive charge)
    double jump_cost = 0.0;                  // sum of minimal jump costs
    std::vector<double> per_jump;            // ordered by jump time, averaged over paths
};

// Reward evaluation result.  The minus-infinity sentinel is a distinguished
// flag, not a float; it compares below every finite value.
struct RewardValue {
    bool neg_infinity = false;
    double value = 0.0;
    RewardBreakdown breakdown;

    bool operator<(const RewardValue& other) const {
        if (neg_infinity != other.neg_infinity) return neg_infinity;
        return value < other.value;
    }
};

// Expected reward of an ensemble of continuous controls: Monte Carlo average
// of terminal g, trapezoid quadrature of f in time, left-point Stieltjes sum
// of c . dxi.  A recorded jump is a contract error (use reward_singular).
RewardValue reward_continuous(const EmpiricalMeasureFlow& flow,
                              const std::vector<CadlagPath>& ensemble, const RewardSpec& spec);

// Reward of an ensemble of parametrised paths: f against d rbar (trapezoid),
// c against d xibar (left point).  On rbar plateaus f contributes nothing
// while c accrues along the interpolation.  Members must lie in D(S).
RewardValue reward_parametrised(const EmpiricalMeasureFlow& flow,
                                const std::vector<ParametrisedPath>& ensemble,
                                const RewardSpec& spec);

// Reward of càdlàg (X, xi) ensembles in the minimal-jump-cost representation:
// the continuous part is charged c . dxi^c, every jump is charged the minimal
// jump cost at (t, X_{t-}, xi_{t-}, xi_t); a jump from the pre-initial slot
// is charged at time 0.
RewardValue reward_singular(const EmpiricalMeasureFlow& flow,
                            const std::vector<CadlagPath>& ensemble, const RewardSpec& spec,
                            const CoefficientSpec& coeffs, int jump_lattice_steps = 64);

}  // namespace smfg
