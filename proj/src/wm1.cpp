#include "smfg/wm1.hpp"

#include <algorithm>
#include <cmath>

namespace smfg {

ThickGraph ThickGraph::from_path(const CadlagPath& x) {
    ThickGraph g;
    g.horizon = x.horizon();
    for (const auto& j : x.jumps()) {
        JumpSegment s;
        s.time = j.time;
        s.left = j.left;
        s.right = j.right;
        s.lo = j.left.cwiseMin(j.right);
        s.hi = j.left.cwiseMax(j.right);
        g.jump_segments.push_back(std::move(s));
    }
    return g;
}

bool thick_graph_membership(const Vec& value, double time, const CadlagPath& x, double tol) {
    if (time < -tol || time > x.horizon() + tol) return false;
    if (value.size() != x.width()) return false;
    // Jump stamp: box test.
    for (const auto& j : x.jumps()) {
        if (std::abs(j.time - time) <= tol) {
            Vec lo = j.left.cwiseMin(j.right);
            Vec hi = j.left.cwiseMax(j.right);
            bool inside = true;
            for (int c = 0; c < value.size(); ++c)
                if (value[c] < lo[c] - tol || value[c] > hi[c] + tol) inside = false;
            if (inside) return true;
        }
    }
    Vec y = x.evaluate(std::clamp(time, 0.0, x.horizon()));
    return (value - y).lpNorm<Eigen::Infinity>() <= tol;
}

ParametrisedPath canonical_parametrisation(const CadlagPath& x) {
    const double T = x.horizon();
    if (T <= 0.0) throw ParameterError("canonical_parametrisation: horizon must be positive");
    const int d = x.state_dim(), l = x.control_dim();

    auto jumps = x.jumps();
    double jump_mass = 0.0;
    for (const auto& j : jumps) jump_mass += (j.right - j.left).cwiseAbs().sum();
    const double den = T + jump_mass;

    ParametrisedPath p;
    p.state_dim = d;
    p.control_dim = l;

    auto push = [&p, d, l](double u, const Vec& v, double r) {
        if (!p.u.empty() && u <= p.u.back()) {
            if (u == p.u.back()) return;  // duplicate knot
            u = std::nextafter(p.u.back(), 1.0);
        }
        p.u.push_back(u);
        p.xbar.push_back(v.head(d));
        p.xibar.push_back(v.tail(l));
        p.rbar.push_back(r);
    };

    const auto& ts = x.times();
    double acc = 0.0;  // time + jump mass traversed so far
    double prev_t = 0.0;
    push(0.0, x.pre_initial(), 0.0);  // start at y(0-)
    for (std::size_t i = 0; i < ts.size(); ++i) {
        acc += ts[i] - prev_t;
        prev_t = ts[i];
        if (x.has_jump_at(i)) {
            Vec left = x.left_value(i);
            Vec right = x.values()[i];
            double sz = (right - left).cwiseAbs().sum();
            push(acc / den, left, ts[i]);
            acc += sz;
            push(acc / den, right, ts[i]);
        } else {
            push(acc / den, x.values()[i], ts[i]);
        }
    }
    if (p.u.back() != 1.0) {
        // Exact endpoint (acc == T + jump_mass up to rounding).
        p.u.back() = 1.0;
    }
    p.u.front() = 0.0;
    return p;
}

namespace {

struct SampledParam {
    Mat values;           // resolution x width
    std::vector<double> r;
};

SampledParam sample_param(const ParametrisedPath& p, int resolution) {
    SampledParam s;
    const int w = p.state_dim + p.control_dim;
    s.values.resize(resolution, w);
    s.r.resize(resolution);
    for (int k = 0; k < resolution; ++k) {
        double u = static_cast<double>(k) / (resolution - 1);
        Vec v = p.value_at(u);
        s.values.row(k) = v.transpose();
        s.r[k] = p.r_at(u);
    }
    return s;
}

// Bottleneck alignment: min over monotone matchings of the max matched cost,
// cost(i,j) = max(|values_i - values_j|_2, |r_i - r_j|).  Squared costs are
// used internally (max/min commute with the square root).
double bottleneck_alignment(const SampledParam& a, const SampledParam& b) {
    const int n = static_cast<int>(a.r.size());
    const int m = static_cast<int>(b.r.size());
    std::vector<double> prev(m), cur(m);
    auto cost2 = [&](int i, int j) {
        double d2 = (a.values.row(i) - b.values.row(j)).squaredNorm();
        double dt = a.r[i] - b.r[j];
        return std::max(d2, dt * dt);
    };
    prev[0] = cost2(0, 0);
    for (int j = 1; j < m; ++j) prev[j] = std::max(prev[j - 1], cost2(0, j));
    for (int i = 1; i < n; ++i) {
        cur[0] = std::max(prev[0], cost2(i, 0));
        for (int j = 1; j < m; ++j) {
            double best = std::min(prev[j], std::min(prev[j - 1], cur[j - 1]));
            cur[j] = std::max(best, cost2(i, j));
        }
        std::swap(prev, cur);
    }
    return std::sqrt(prev[m - 1]);
}

}  // namespace

double wm1_alignment_bound(const ParametrisedPath& a, const ParametrisedPath& b, int resolution) {
    if (resolution < 2) throw ParameterError("wm1 alignment: resolution must be >= 2");
    if (a.state_dim + a.control_dim != b.state_dim + b.control_dim)
        throw ParameterError("wm1 alignment: width mismatch");
    return bottleneck_alignment(sample_param(a, resolution), sample_param(b, resolution));
}

double wm1_distance(const CadlagPath& y, const CadlagPath& z, int resolution) {
    if (resolution < 2) throw ParameterError("wm1_distance: resolution must be >= 2");
    if (y.width() != z.width()) throw ParameterError("wm1_distance: width mismatch");
    ParametrisedPath py = canonical_parametrisation(y);
    ParametrisedPath pz = canonical_parametrisation(z);
    return wm1_alignment_bound(py, pz, resolution);
}

}  // namespace smfg
