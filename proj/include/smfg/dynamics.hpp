#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "smfg/flow.hpp"
#include "smfg/path.hpp"

namespace smfg {

using DriftFn = std::function<Vec(double t, const Marginal&, const Vec& x, const Vec& xi)>;
using DiffusionFn = std::function<Mat(double t, const Marginal&, const Vec& x, const Vec& xi)>;
using JumpImpactFn = std::function<Mat(double t, const Vec& x, const Vec& xi)>;

// Dynamics coefficients b, sigma, gamma plus dimension metadata.  gamma is
// globally bounded; the bound is enforced on every evaluation.  Callables
// must be stateless (they are invoked concurrently).
struct CoefficientSpec {
    int d = 1;  // state dimension
    int l = 1;  // control dimension
    int m = 1;  // Brownian dimension
    DriftFn b;
    DiffusionFn sigma;
    JumpImpactFn gamma;
    double gamma_bound = std::numeric_limits<double>::infinity();
    std::map<std::string, double> lipschitz;  // diagnostics only

    Vec eval_b(double t, const Marginal& mu, const Vec& x, const Vec& xi) const;
    Mat eval_sigma(double t, const Marginal& mu, const Vec& x, const Vec& xi) const;
    Mat eval_gamma(double t, const Vec& x, const Vec& xi) const;

    static CoefficientSpec zero(int d, int l, int m);
};

// Grid-aligned standard-normal draws; Brownian increments over a step are
// sqrt(dt) * z so one noise path can drive both the unparametrised and the
// time-changed simulation on matched grids.
struct NoisePath {
    std::vector<double> times;
    Mat z;  // (times.size()-1) x m standard normals
    std::uint64_t seed = 0;

    Vec increment(std::size_t step) const;  // sqrt(dt_step) * z_step
    std::size_t steps() const { return times.size() - 1; }
};

NoisePath make_noise(const std::vector<double>& grid, int m, std::uint64_t master_seed,
                     std::uint64_t particle = 0);

// Post-jump state: terminal value of dy = gamma(t, y, zeta) dzeta along the
// linear interpolation zeta_u = (1-u) xi + u xi', integrated with the
// classical 4th-order scheme in `ode_steps` fixed steps.
Vec jump_map_psi(double t, const Vec& x, const Vec& xi, const Vec& xi_next,
                 const CoefficientSpec& coeffs, int ode_steps = 256);

// As above along an arbitrary piecewise-linear monotone control path
// zeta(knots) from xi to xi'; exposed for path-independence auditing and
// jump-cost evaluation.
Vec jump_map_along(double t, const Vec& x, const std::vector<Vec>& zeta_knots,
                   const CoefficientSpec& coeffs, int steps_per_leg);

// Union of a base grid with the stamps (and hence jump times) of a control.
std::vector<double> make_simulation_grid(const std::vector<double>& base,
                                         const CadlagPath& control);

// Euler-Maruyama integration of the Marcus-type dynamics
//   dX = b dt + sigma dW + gamma dxi^c, jumps applied through jump_map_psi.
// Control jumps must sit on the grid (use make_simulation_grid); a jump at
// 0- -> 0 is applied before any diffusion.  Returns the combined (X, xi)
// path with jump marks at the control-jump stamps.
CadlagPath marcus_integrate(const CoefficientSpec& coeffs, const CadlagPath& control,
                            const NoisePath& noise, const EmpiricalMeasureFlow& flow,
                            const std::vector<double>& grid, const Vec& x0,
                            int psi_ode_steps = 256);

// Euler scheme for the time-changed SDE on the parameter grid: drift and
// noise scale with d rbar (noise as sqrt(d rbar) * z, exactly zero on
// plateaus) while gamma d xibar advances everywhere.
ParametrisedPath simulate_parametrised(const CoefficientSpec& coeffs,
                                       const ParametrisedPath& control_part,
                                       const NoisePath& noise, const EmpiricalMeasureFlow& flow,
                                       int u_steps, const Vec& x0);

// Refined parameter grid for simulate_parametrised (control knots plus a
// uniform fill of at least u_steps points).
std::vector<double> make_parameter_grid(const ParametrisedPath& control_part, int u_steps);

// ---- assumption checkers ---------------------------------------------------

struct SampleBox {
    double t_lo = 0.0, t_hi = 1.0;
    Vec x_lo, x_hi;        // state box
    Vec xi_lo, xi_hi;      // control box (jump start)
    Vec jump_max;          // componentwise max jump size
};

struct CheckWitness {
    double t;
    Vec x, xi, xi_next;
    double discrepancy;
};

struct CheckReport {
    bool pass = true;
    double max_discrepancy = 0.0;
    double mixed_partial_asymmetry = 0.0;  // conservativity probe, x-independent gamma only
    bool x_independent = false;
    double local_lipschitz_estimate = 0.0;
    std::vector<CheckWitness> witnesses;
};

// Compares the jump map along the linear interpolation against random
// monotone staircase interpolations; for x-independent gamma additionally
// probes symmetry of the mixed differences of the field (conservativity).
CheckReport check_path_independence(const JumpImpactFn& gamma, int d, int l,
                                    const SampleBox& box, int n_samples, double tol,
                                    std::uint64_t seed = 7, int staircases_per_sample = 8);

// Integrates the jump ODE along random monotone paths and verifies that each
// state component is monotone (either direction) up to tol.
CheckReport check_jump_monotonicity(const JumpImpactFn& gamma, int d, int l,
                                    const SampleBox& box, int samples, double tol,
                                    std::uint64_t seed = 11);

}  // namespace smfg
