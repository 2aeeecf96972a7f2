#include "smfg/path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smfg {

namespace {

std::size_t segment_index(const std::vector<double>& ts, double t) {
    // largest i with ts[i] <= t
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin()) throw RangeError("time below first stamp");
    return static_cast<std::size_t>(std::distance(ts.begin(), it)) - 1;
}

}  // namespace

CadlagPath::CadlagPath(int state_dim, int control_dim, std::vector<double> times,
                       std::vector<Vec> values, std::map<std::size_t, Vec> jump_left_values,
                       bool validate)
    : d_(state_dim), l_(control_dim), times_(std::move(times)), values_(std::move(values)),
      jumps_(std::move(jump_left_values)) {
    if (d_ < 0 || l_ < 0 || d_ + l_ == 0) throw ParameterError("CadlagPath: bad dimensions");
    if (times_.empty() || times_.size() != values_.size())
        throw ParameterError("CadlagPath: grid/value size mismatch");
    // Drop marks that do not actually jump.
    for (auto it = jumps_.begin(); it != jumps_.end();) {
        if (it->first >= times_.size())
            throw ParameterError("CadlagPath: jump mark outside grid");
        if ((it->second - values_[it->first]).lpNorm<Eigen::Infinity>() == 0.0)
            it = jumps_.erase(it);
        else
            ++it;
    }
    if (validate) check_invariants();
}

void CadlagPath::check_invariants() const {
    if (times_.front() != 0.0) throw ContractError("CadlagPath: first stamp must be 0");
    for (std::size_t i = 0; i + 1 < times_.size(); ++i)
        if (!(times_[i] < times_[i + 1]))
            throw ContractError("CadlagPath: stamps not strictly increasing");
    for (const auto& [idx, left] : jumps_)
        if (left.size() != width()) throw ContractError("CadlagPath: jump value width mismatch");
    for (const auto& v : values_)
        if (v.size() != width()) throw ContractError("CadlagPath: value width mismatch");
    if (l_ > 0) {
        Vec pre = pre_initial();
        for (int c = 0; c < l_; ++c)
            if (std::abs(pre[d_ + c]) > kMonotoneTol)
                throw ContractError("CadlagPath: pre-initial control must be zero");
        // Non-decreasing through segments and across jumps.
        Vec prev = pre;
        for (std::size_t i = 0; i < times_.size(); ++i) {
            Vec left = left_value(i);
            for (int c = 0; c < l_; ++c) {
                if (left[d_ + c] < prev[d_ + c] - kMonotoneTol ||
                    values_[i][d_ + c] < left[d_ + c] - kMonotoneTol)
                    throw ContractError("CadlagPath: control component decreases");
            }
            prev = values_[i];
        }
    }
}

CadlagPath CadlagPath::constant(int state_dim, int control_dim, const Vec& value, double horizon) {
    std::vector<double> ts{0.0, horizon};
    std::vector<Vec> vals{value, value};
    return CadlagPath(state_dim, control_dim, std::move(ts), std::move(vals));
}

Vec CadlagPath::pre_initial() const {
    auto it = jumps_.find(0);
    return it != jumps_.end() ? it->second : values_.front();
}

Vec CadlagPath::left_value(std::size_t index) const {
    auto it = jumps_.find(index);
    return it != jumps_.end() ? it->second : values_[index];
}

Vec CadlagPath::evaluate(double t) const {
    const double T = horizon();
    if (t < -kMonotoneTol || t > T + kMonotoneTol) throw RangeError("evaluate: t outside [0-,T]");
    t = std::clamp(t, 0.0, T);
    std::size_t i = segment_index(times_, t);
    if (t == times_[i] || i + 1 == times_.size()) return values_[i];
    double t0 = times_[i], t1 = times_[i + 1];
    double w = (t - t0) / (t1 - t0);
    Vec right_end = left_value(i + 1);  // segment ends at the next left limit
    return (1.0 - w) * values_[i] + w * right_end;
}

Vec CadlagPath::left_limit(double t) const {
    const double T = horizon();
    if (t < -kMonotoneTol || t > T + kMonotoneTol) throw RangeError("left_limit: t outside [0-,T]");
    t = std::clamp(t, 0.0, T);
    if (t == 0.0) return pre_initial();
    std::size_t i = segment_index(times_, t);
    if (t == times_[i]) return left_value(i);
    return evaluate(t);  // interior of a continuity segment
}

std::vector<CadlagPath::Jump> CadlagPath::jumps() const {
    std::vector<Jump> out;
    out.reserve(jumps_.size());
    for (const auto& [idx, left] : jumps_) out.push_back({times_[idx], left, values_[idx]});
    return out;
}

CadlagPath CadlagPath::control_part() const {
    std::vector<Vec> vals(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) vals[i] = values_[i].tail(l_);
    std::map<std::size_t, Vec> marks;
    for (const auto& [idx, left] : jumps_) marks[idx] = left.tail(l_);
    return CadlagPath(0, l_, times_, std::move(vals), std::move(marks));
}

// ---- ParametrisedPath -----------------------------------------------------

namespace {

double interp_scalar(const std::vector<double>& grid, const std::vector<double>& vals, double v) {
    std::size_t i = segment_index(grid, v);
    if (v == grid[i] || i + 1 == grid.size()) return vals[i];
    double w = (v - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - w) * vals[i] + w * vals[i + 1];
}

Vec interp_vec(const std::vector<double>& grid, const std::vector<Vec>& vals, double v) {
    std::size_t i = segment_index(grid, v);
    if (v == grid[i] || i + 1 == grid.size()) return vals[i];
    double w = (v - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - w) * vals[i] + w * vals[i + 1];
}

}  // namespace

void ParametrisedPath::validate_shape() const {
    if (u.empty() || u.front() != 0.0 || u.back() != 1.0)
        throw ParameterError("ParametrisedPath: u grid must span [0,1]");
    if (u.size() != xbar.size() || u.size() != xibar.size() || u.size() != rbar.size())
        throw ParameterError("ParametrisedPath: column size mismatch");
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        if (!(u[i] < u[i + 1])) throw ParameterError("ParametrisedPath: u not increasing");
    for (const auto& x : xbar)
        if (x.size() != state_dim) throw ParameterError("ParametrisedPath: xbar width");
    for (const auto& c : xibar)
        if (c.size() != control_dim) throw ParameterError("ParametrisedPath: xibar width");
}

Vec ParametrisedPath::x_at(double v) const { return interp_vec(u, xbar, v); }
Vec ParametrisedPath::xi_at(double v) const { return interp_vec(u, xibar, v); }
double ParametrisedPath::r_at(double v) const { return interp_scalar(u, rbar, v); }

Vec ParametrisedPath::value_at(double v) const {
    Vec out(state_dim + control_dim);
    out.head(state_dim) = x_at(v);
    out.tail(control_dim) = xi_at(v);
    return out;
}

// ---- TimeScalePair ---------------------------------------------------------

TimeScalePair::TimeScalePair(std::vector<double> u_knots, std::vector<double> rbar_knots)
    : u_(std::move(u_knots)), rbar_(std::move(rbar_knots)) {
    if (u_.size() != rbar_.size() || u_.size() < 2)
        throw ParameterError("TimeScalePair: knot size mismatch");
    if (u_.front() != 0.0 || u_.back() != 1.0)
        throw ParameterError("TimeScalePair: u knots must span [0,1]");
    if (rbar_.front() != 0.0) throw ContractError("TimeScalePair: rbar(0) must be 0");
    for (std::size_t i = 0; i + 1 < u_.size(); ++i) {
        if (!(u_[i] <= u_[i + 1])) throw ParameterError("TimeScalePair: u knots decrease");
        if (rbar_[i] > rbar_[i + 1] + kMonotoneTol)
            throw ContractError("TimeScalePair: rbar decreases");
    }
    // Collapse duplicate u knots (vertical jumps are not allowed in rbar).
    for (std::size_t i = 0; i + 1 < u_.size(); ++i)
        if (u_[i] == u_[i + 1] && rbar_[i] != rbar_[i + 1])
            throw ContractError("TimeScalePair: rbar must be continuous");
}

TimeScalePair TimeScalePair::affine(double horizon) {
    return TimeScalePair({0.0, 1.0}, {0.0, horizon});
}

double TimeScalePair::rbar(double v) const {
    if (v < 0.0 || v > 1.0) throw RangeError("rbar: parameter outside [0,1]");
    return interp_scalar(u_, rbar_, v);
}

double TimeScalePair::r(double t) const {
    if (t < 0.0) throw RangeError("r: time below 0");
    // inf{v : rbar_v > t}; capped at 1 when rbar never exceeds t.
    if (t >= rbar_.back()) return 1.0;
    auto it = std::upper_bound(rbar_.begin(), rbar_.end(), t);
    std::size_t j = static_cast<std::size_t>(std::distance(rbar_.begin(), it));
    // rbar_[j] > t >= rbar_[j-1]; the crossing lies in segment (j-1, j).
    double r0 = rbar_[j - 1], r1 = rbar_[j];
    double u0 = u_[j - 1], u1 = u_[j];
    if (r1 == r0) return u1;
    return u0 + (t - r0) / (r1 - r0) * (u1 - u0);
}

double TimeScalePair::r_left(double t) const {
    if (t <= 0.0) return 0.0;
    // sup{v : rbar_v < t} = inf{v : rbar_v >= t}
    auto it = std::lower_bound(rbar_.begin(), rbar_.end(), t);
    if (it == rbar_.end()) return 1.0;
    std::size_t j = static_cast<std::size_t>(std::distance(rbar_.begin(), it));
    if (j == 0) return 0.0;
    double r0 = rbar_[j - 1], r1 = rbar_[j];
    double u0 = u_[j - 1], u1 = u_[j];
    if (r1 == r0) return u0;
    return u0 + (t - r0) / (r1 - r0) * (u1 - u0);
}

// ---- operations ------------------------------------------------------------

double total_variation(const CadlagPath& control, double t) {
    const int d = control.state_dim();
    const int l = control.control_dim();
    if (l == 0) throw ContractError("total_variation: path has no control components");
    // Type invariants already guarantee monotone controls; re-verify so paths
    // constructed with validation off are rejected here.
    Vec prev = control.pre_initial().tail(l);
    for (std::size_t i = 0; i < control.size(); ++i) {
        Vec left = control.left_value(i).tail(l);
        Vec right = control.values()[i].tail(l);
        for (int c = 0; c < l; ++c)
            if (left[c] < prev[c] - kMonotoneTol || right[c] < left[c] - kMonotoneTol)
                throw ContractError("total_variation: control not monotone");
        prev = right;
    }
    Vec now = control.evaluate(t).tail(l);
    Vec pre = control.pre_initial().tail(l);
    (void)d;
    return (now - pre).sum();
}

Decomposition decompose_continuous_part(const CadlagPath& path) {
    const auto& ts = path.times();
    std::vector<Vec> vals(ts.size());
    Vec cum = Vec::Zero(path.width());
    std::vector<CadlagPath::Jump> jumps = path.jumps();
    std::size_t next_jump = 0;
    auto marks = path.jump_marks();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        auto it = marks.find(i);
        if (it != marks.end()) cum += path.values()[i] - it->second;
        vals[i] = path.values()[i] - cum;
        (void)next_jump;
    }
    CadlagPath cont(path.state_dim(), path.control_dim(), ts, std::move(vals));
    return {std::move(cont), std::move(jumps)};
}

TimeScalePair generalized_inverse(const std::vector<double>& u_grid,
                                  const std::vector<double>& rbar_values) {
    if (u_grid.size() != rbar_values.size() || u_grid.size() < 2)
        throw ParameterError("generalized_inverse: bad grids");
    return TimeScalePair(u_grid, rbar_values);
}

TimeScalePair generalized_inverse(const ParametrisedPath& p) {
    return generalized_inverse(p.u, p.rbar);
}

std::string DomainViolation::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::RbarDecreasing: os << "rbar decreasing"; break;
        case Kind::XibarDecreasing: os << "xibar decreasing"; break;
        case Kind::EndpointR0: os << "rbar(0) != 0"; break;
        case Kind::EndpointR1: os << "rbar(1) != T"; break;
        case Kind::PlateauNotMonotone:
            os << "xbar component " << component << " not monotone on plateau";
            break;
    }
    os << " on u in [" << u_lo << ", " << u_hi << "], magnitude " << magnitude;
    return os.str();
}

namespace {

// Maximal index ranges [lo, hi] on which rbar is constant within tol.
std::vector<std::pair<std::size_t, std::size_t>> find_plateaus(const std::vector<double>& rbar,
                                                               double tol) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i + 1 < rbar.size()) {
        if (std::abs(rbar[i + 1] - rbar[i]) <= tol) {
            std::size_t j = i;
            while (j + 1 < rbar.size() && std::abs(rbar[j + 1] - rbar[j]) <= tol) ++j;
            out.emplace_back(i, j);
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

// Largest monotonicity violation of a scalar sequence: how far it backtracks
// against its better-fitting direction.
double monotone_violation(const std::vector<double>& xs) {
    double run_max = xs.front(), run_min = xs.front();
    double down = 0.0, up = 0.0;  // violation if treated as incr / decr
    for (double x : xs) {
        run_max = std::max(run_max, x);
        run_min = std::min(run_min, x);
        down = std::max(down, run_max - x);
        up = std::max(up, x - run_min);
    }
    return std::min(down, up);
}

}  // namespace

DomainReport check_domain_S(const ParametrisedPath& p, double tol) {
    p.validate_shape();
    DomainReport rep;
    auto add = [&rep](DomainViolation v) {
        rep.ok = false;
        rep.violations.push_back(std::move(v));
    };
    const double T = p.rbar.back();
    if (p.rbar.front() != 0.0)
        add({DomainViolation::Kind::EndpointR0, 0.0, 0.0, -1, std::abs(p.rbar.front())});
    for (std::size_t i = 0; i + 1 < p.u.size(); ++i) {
        if (p.rbar[i + 1] < p.rbar[i] - tol)
            add({DomainViolation::Kind::RbarDecreasing, p.u[i], p.u[i + 1], -1,
                 p.rbar[i] - p.rbar[i + 1]});
        for (int c = 0; c < p.control_dim; ++c)
            if (p.xibar[i + 1][c] < p.xibar[i][c] - tol)
                add({DomainViolation::Kind::XibarDecreasing, p.u[i], p.u[i + 1], c,
                     p.xibar[i][c] - p.xibar[i + 1][c]});
    }
    for (const auto& [lo, hi] : find_plateaus(p.rbar, tol)) {
        for (int c = 0; c < p.state_dim; ++c) {
            std::vector<double> xs;
            xs.reserve(hi - lo + 1);
            for (std::size_t i = lo; i <= hi; ++i) xs.push_back(p.xbar[i][c]);
            double viol = monotone_violation(xs);
            if (viol > tol)
                add({DomainViolation::Kind::PlateauNotMonotone, p.u[lo], p.u[hi], c, viol});
        }
    }
    (void)T;
    return rep;
}

CadlagPath apply_S(const ParametrisedPath& p, double tol) {
    DomainReport rep = check_domain_S(p, tol);
    if (!rep.ok) {
        std::string msg = "apply_S: path not in D(S): " + rep.violations.front().describe();
        throw DomainError(msg);
    }
    const int w = p.state_dim + p.control_dim;
    for (int c = 0; c < p.control_dim; ++c)
        if (std::abs(p.xibar.front()[c]) > tol)
            throw DomainError("apply_S: xibar(0) must be 0 (control starts at the origin)");

    auto plateaus = find_plateaus(p.rbar, tol);
    std::vector<bool> in_plateau(p.u.size(), false);
    // Mark strict plateau interiors; endpoints stay visible as stamps.
    std::vector<std::pair<std::size_t, std::size_t>> pl = plateaus;

    std::vector<double> ts;
    std::vector<Vec> vals;
    std::map<std::size_t, Vec> marks;

    auto stack = [&](std::size_t i) {
        Vec v(w);
        v.head(p.state_dim) = p.xbar[i];
        v.tail(p.control_dim) = p.xibar[i];
        return v;
    };
    auto push_stamp = [&](double t, const Vec& v) {
        if (!ts.empty() && t <= ts.back() + tol) {
            // Same output time: replace the right value (later u wins).
            vals.back() = v;
            return;
        }
        ts.push_back(t);
        vals.push_back(v);
    };

    std::size_t pi = 0;
    for (std::size_t i = 0; i < p.u.size(); ++i) {
        bool plateau_start = pi < pl.size() && pl[pi].first == i;
        if (plateau_start) {
            auto [lo, hi] = pl[pi];
            double level = p.rbar[lo];
            Vec left = stack(lo);
            Vec right = stack(hi);
            if (ts.empty()) {
                // plateau at time 0: pre-initial value is the plateau entry
                ts.push_back(level);
                vals.push_back(right);
                if ((right - left).lpNorm<Eigen::Infinity>() > 0.0) marks[0] = left;
            } else {
                if (ts.back() >= level - tol) {
                    // continuity stretch already emitted this time; turn it
                    // into the left limit of a jump
                    vals.back() = right;
                    if ((right - left).lpNorm<Eigen::Infinity>() > 0.0)
                        marks[ts.size() - 1] = left;
                } else {
                    ts.push_back(level);
                    vals.push_back(right);
                    if ((right - left).lpNorm<Eigen::Infinity>() > 0.0)
                        marks[ts.size() - 1] = left;
                }
            }
            i = hi;  // resume after the plateau (hi itself re-examined below)
            ++pi;
            // fall through: hi may start the next stretch; nothing more to do
            continue;
        }
        push_stamp(p.rbar[i], stack(i));
    }
    (void)in_plateau;
    if (ts.front() != 0.0) {
        // Shouldn't happen (rbar front is 0), but normalise exact zero.
        ts.front() = 0.0;
    }
    return CadlagPath(p.state_dim, p.control_dim, std::move(ts), std::move(vals),
                      std::move(marks));
}

}  // namespace smfg
