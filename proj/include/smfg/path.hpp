#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smfg/common.hpp"

namespace smfg {

// Piecewise-recorded càdlàg path on [0-, T].  Values are right limits at the
// recorded stamps; between stamps of the same continuity segment the path is
// the linear interpolant.  Jumps are explicit: a stamp with a stored left
// value that differs from the right value.  A distinguished pre-initial slot
// represents time 0-, so a jump at time zero needs no auxiliary interval.
//
// The first state_dim components are the state X, the remaining control_dim
// components the control xi.  Control components must be non-decreasing
// across stamps and across stored jumps, and the pre-initial control is zero.
class CadlagPath {
public:
    CadlagPath(int state_dim, int control_dim, std::vector<double> times,
               std::vector<Vec> values, std::map<std::size_t, Vec> jump_left_values = {},
               bool validate = true);

    static CadlagPath constant(int state_dim, int control_dim, const Vec& value, double horizon);

    int state_dim() const { return d_; }
    int control_dim() const { return l_; }
    int width() const { return d_ + l_; }
    double horizon() const { return times_.back(); }
    std::size_t size() const { return times_.size(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec>& values() const { return values_; }
    const std::map<std::size_t, Vec>& jump_marks() const { return jumps_; }

    // Value at 0-: the stored left value at the first stamp when a jump at
    // time zero is recorded, otherwise the value at the first stamp.
    Vec pre_initial() const;

    bool has_jump_at(std::size_t index) const { return jumps_.count(index) > 0; }
    // Left value at a stamp (equals the right value at continuity stamps).
    Vec left_value(std::size_t index) const;

    // Right limit at t in [0, T].  t outside the horizon is a range error.
    Vec evaluate(double t) const;
    // Left limit at t; left_limit(0) is the pre-initial value.
    Vec left_limit(double t) const;

    Vec state_at(double t) const { return evaluate(t).head(d_); }
    Vec control_at(double t) const { return evaluate(t).tail(l_); }

    // Jumps in stamp order as (time, left, right).
    struct Jump {
        double time;
        Vec left;
        Vec right;
    };
    std::vector<Jump> jumps() const;

    // Restrict to the control components (state components dropped).
    CadlagPath control_part() const;

private:
    void check_invariants() const;

    int d_ = 0;
    int l_ = 0;
    std::vector<double> times_;
    std::vector<Vec> values_;
    std::map<std::size_t, Vec> jumps_;
};

// Continuous triple (xbar, xibar, rbar) on the parameter interval [0,1],
// stored at increasing parameter stamps and interpolated linearly.
struct ParametrisedPath {
    int state_dim = 0;
    int control_dim = 0;
    std::vector<double> u;       // increasing, front 0, back 1
    std::vector<Vec> xbar;       // state_dim entries per stamp
    std::vector<Vec> xibar;      // control_dim entries per stamp, non-decreasing
    std::vector<double> rbar;    // [0, T], non-decreasing, rbar front 0, back T

    double horizon() const { return rbar.back(); }
    std::size_t size() const { return u.size(); }

    Vec x_at(double v) const;
    Vec xi_at(double v) const;
    double r_at(double v) const;
    // Stacked (x, xi) at a parameter point.
    Vec value_at(double v) const;

    void validate_shape() const;
};

// A non-decreasing time scale rbar: [0,1] -> [0,T] together with its
// generalised inverse r_t = inf{v in [0,1] | rbar_v > t}.  Stored as a
// piecewise-linear graph over parameter knots; plateaus of rbar become jumps
// of r and vice versa.
class TimeScalePair {
public:
    TimeScalePair(std::vector<double> u_knots, std::vector<double> rbar_knots);

    static TimeScalePair affine(double horizon);

    double horizon() const { return rbar_.back(); }
    const std::vector<double>& u_knots() const { return u_; }
    const std::vector<double>& rbar_knots() const { return rbar_; }

    double rbar(double v) const;
    // Generalised inverse, right-continuous; capped at 1 past the range.
    double r(double t) const;
    // Left limit r(t-); r_left(0) = 0.
    double r_left(double t) const;

private:
    std::vector<double> u_;
    std::vector<double> rbar_;
};

// Structured result of the D(S) membership check.
struct DomainViolation {
    enum class Kind { RbarDecreasing, XibarDecreasing, EndpointR0, EndpointR1, PlateauNotMonotone };
    Kind kind;
    double u_lo = 0;
    double u_hi = 0;
    int component = -1;  // xbar component for plateau violations
    double magnitude = 0;
    std::string describe() const;
};

struct DomainReport {
    bool ok = true;
    std::vector<DomainViolation> violations;
};

// ---- path_core operations ----------------------------------------------

// l1 variation of the control components over [0-, t]; for componentwise
// monotone controls this equals sum_i (xi^i_t - xi^i_{0-}) and includes any
// jump at time zero.
double total_variation(const CadlagPath& control, double t);

struct Decomposition {
    CadlagPath continuous_part;
    std::vector<CadlagPath::Jump> jumps;
};

// Splits a path into its continuous part plus the ordered jump list; the
// continuous part carries no jump marks and summing the jumps back
// reproduces the original values at every stamp.
Decomposition decompose_continuous_part(const CadlagPath& control);

// Generalised inverse of a piecewise-linear time scale given on a u-grid.
TimeScalePair generalized_inverse(const std::vector<double>& u_grid,
                                  const std::vector<double>& rbar_values);
TimeScalePair generalized_inverse(const ParametrisedPath& p);

// Membership test for the domain of the unparametrisation map S: xibar and
// rbar non-decreasing within tol, exact endpoints, and every xbar component
// monotone on each maximal rbar-plateau within tol.
DomainReport check_domain_S(const ParametrisedPath& p, double tol = kMonotoneTol);

// The unparametrisation map S: (xbar, xibar, rbar) -> (xbar o r, xibar o r).
// Jumps of the output sit exactly at the plateau levels of rbar, with stamps
// emitted at both plateau endpoints so left limits are preserved.  Throws
// DomainError (citing the offending plateau) when p is not in D(S).
CadlagPath apply_S(const ParametrisedPath& p, double tol = kMonotoneTol);

}  // namespace smfg
