#include "smfg/jump_cost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace smfg {

void JumpCostProblem::validate() const {
    if (!coeffs) throw ParameterError("JumpCostProblem: coefficients missing");
    if (!c) throw ParameterError("JumpCostProblem: cost function missing");
    const int l = coeffs->l;
    if (xi.size() != l || xi_next.size() != l)
        throw ParameterError("JumpCostProblem: control dimension mismatch");
    if (x.size() != coeffs->d) throw ParameterError("JumpCostProblem: state dimension mismatch");
    for (int i = 0; i < l; ++i)
        if (xi_next[i] < xi[i] - kMonotoneTol)
            throw ContractError("JumpCostProblem: xi' must dominate xi componentwise");
    if (lattice_steps < 1) throw ParameterError("JumpCostProblem: lattice_steps must be >= 1");
}

namespace {

struct Walk {
    double cost = 0.0;
    std::vector<Vec> y;
    std::vector<Vec> zeta;
};

// Advance y by RK4 and accumulate the trapezoid quadrature of c . dzeta along
// the straight legs of a monotone zeta path.
Walk walk_path(const JumpCostProblem& p, const std::vector<Vec>& knots, int steps_per_leg) {
    Walk w;
    const auto& coeffs = *p.coeffs;
    Vec y = p.x;
    w.y.push_back(y);
    w.zeta.push_back(knots.front());
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const Vec& za = knots[k];
        const Vec& zb = knots[k + 1];
        Vec dz_leg = zb - za;
        if (dz_leg.lpNorm<Eigen::Infinity>() == 0.0) continue;
        for (int q = 0; q < steps_per_leg; ++q) {
            double a = static_cast<double>(q) / steps_per_leg;
            double b = static_cast<double>(q + 1) / steps_per_leg;
            Vec z0 = za + a * dz_leg;
            Vec z1 = za + b * dz_leg;
            Vec dz = z1 - z0;
            RowVec c0 = p.c(p.t, y, z0);
            Vec y1 = jump_map_along(p.t, y, {z0, z1}, coeffs, 1);
            RowVec c1 = p.c(p.t, y1, z1);
            w.cost += 0.5 * (c0 + c1).dot(dz);
            y = y1;
            w.y.push_back(y);
            w.zeta.push_back(z1);
        }
    }
    return w;
}

}  // namespace

double path_cost(const JumpCostProblem& p, const std::vector<Vec>& zeta_knots,
                 int steps_per_leg, std::vector<Vec>* y_out) {
    p.validate();
    Walk w = walk_path(p, zeta_knots, steps_per_leg);
    if (y_out) *y_out = w.y;
    return w.cost;
}

double linear_interp_cost(const JumpCostProblem& p, int steps) {
    p.validate();
    if (steps < 1) throw ParameterError("linear_interp_cost: steps must be >= 1");
    return walk_path(p, {p.xi, p.xi_next}, steps).cost;
}

namespace {

// Exact DP over monotone lattice staircases.  State = lattice node with the y
// reached along the stored argmin path; exact when the jump ODE is
// path-independent there, a lower-envelope heuristic otherwise.
JumpCostResult lattice_dp(const JumpCostProblem& p) {
    const int l = p.coeffs->l;
    const int N = p.lattice_steps;
    Vec h = (p.xi_next - p.xi) / N;

    // active components (zero-increment components never move)
    std::vector<int> active;
    for (int c = 0; c < l; ++c)
        if (h[c] != 0.0) active.push_back(c);
    if (active.empty()) return {0.0, {}};

    const int la = static_cast<int>(active.size());
    std::size_t n_nodes = 1;
    for (int c = 0; c < la; ++c) n_nodes *= static_cast<std::size_t>(N + 1);

    std::vector<std::size_t> stride(la);
    stride[0] = 1;
    for (int c = 1; c < la; ++c) stride[c] = stride[c - 1] * (N + 1);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(n_nodes, inf);
    std::vector<signed char> parent(n_nodes, -1);
    std::vector<Vec> ystate(n_nodes);

    auto zeta_of = [&](const std::vector<int>& idx) {
        Vec z = p.xi;
        for (int c = 0; c < la; ++c) z[active[c]] += idx[c] * h[active[c]];
        return z;
    };

    const int nSub = 4;
    auto edge = [&](const Vec& y0, const Vec& z0, int comp, double& edge_cost) -> Vec {
        Vec z1 = z0;
        z1[comp] += h[comp];
        Vec y = y0;
        double acc = 0.0;
        for (int q = 0; q < nSub; ++q) {
            double a = static_cast<double>(q) / nSub;
            double b = static_cast<double>(q + 1) / nSub;
            Vec za = z0 + a * (z1 - z0);
            Vec zb = z0 + b * (z1 - z0);
            RowVec c0 = p.c(p.t, y, za);
            Vec yb = jump_map_along(p.t, y, {za, zb}, *p.coeffs, 1);
            RowVec c1 = p.c(p.t, yb, zb);
            acc += 0.5 * (c0 + c1).dot(zb - za);
            y = yb;
        }
        edge_cost = acc;
        return y;
    };

    cost[0] = 0.0;
    ystate[0] = p.x;
    const double tie = 1e-12 * (1.0 + std::abs(p.x.cwiseAbs().sum()));

    // process nodes by level (sum of indices); predecessors are one level down
    std::vector<int> idx(la, 0);
    for (int level = 1; level <= la * N; ++level) {
        // enumerate nodes with index sum == level
        std::fill(idx.begin(), idx.end(), 0);
        std::function<void(int, int)> enumerate = [&](int comp, int remaining) {
            if (comp == la - 1) {
                if (remaining > N) return;
                idx[comp] = remaining;
                std::size_t flat = 0;
                for (int c = 0; c < la; ++c) flat += stride[c] * idx[c];
                double best = inf;
                signed char best_parent = -1;
                Vec best_y;
                for (int c = 0; c < la; ++c) {
                    if (idx[c] == 0) continue;
                    idx[c] -= 1;
                    std::size_t pflat = 0;
                    for (int cc = 0; cc < la; ++cc) pflat += stride[cc] * idx[cc];
                    if (cost[pflat] < inf) {
                        Vec z0 = zeta_of(idx);
                        double ec = 0.0;
                        Vec y1 = edge(ystate[pflat], z0, active[c], ec);
                        double cand = cost[pflat] + ec;
                        if (cand < best - tie || (cand <= best + tie && best_parent >= 0)) {
                            // larger component index wins ties so the forward
                            // move sequence is lexicographically smallest
                            best = std::min(best, cand);
                            best_parent = static_cast<signed char>(c);
                            best_y = y1;
                        } else if (best_parent < 0) {
                            best = cand;
                            best_parent = static_cast<signed char>(c);
                            best_y = y1;
                        }
                    }
                    idx[c] += 1;
                }
                cost[flat] = best;
                parent[flat] = best_parent;
                ystate[flat] = best_y;
                return;
            }
            for (int v = 0; v <= std::min(remaining, N); ++v) {
                idx[comp] = v;
                enumerate(comp + 1, remaining - v);
            }
        };
        enumerate(0, level);
    }

    // reconstruct argmin move sequence backwards from the terminal node
    std::vector<int> moves;
    std::vector<int> cur(la, N);
    std::size_t flat = n_nodes - 1;
    while (flat != 0) {
        int c = parent[flat];
        if (c < 0) throw NumericError("lattice_dp: broken parent chain");
        moves.push_back(active[c]);
        cur[c] -= 1;
        flat -= stride[c];
    }
    std::reverse(moves.begin(), moves.end());

    std::vector<Vec> knots{p.xi};
    Vec z = p.xi;
    for (int comp : moves) {
        z[comp] += h[comp];
        knots.push_back(z);
    }
    knots.back() = p.xi_next;

    Walk w = walk_path(p, knots, nSub);
    JumpCostResult res;
    res.cost = cost[n_nodes - 1];
    res.path.y = std::move(w.y);
    res.path.zeta = std::move(w.zeta);
    return res;
}

// Simplex projection of a column (Euclidean).
void project_simplex(Eigen::Ref<Vec> v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0) {
            rho = i + 1;
            theta = t;
        }
    }
    (void)rho;
    for (int i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - theta);
}

// Fallback for l > 3: optimise over "speed allocation" matrices, each column
// a simplex-constrained split of one component's increment across K ordered
// phases.  Projected finite-difference descent from the uniform (linear)
// start; returns the best path seen.
JumpCostResult speed_allocation_descent(const JumpCostProblem& p, int phases) {
    const int l = p.coeffs->l;
    Mat alloc = Mat::Constant(phases, l, 1.0 / phases);
    auto knots_of = [&](const Mat& a) {
        std::vector<Vec> knots{p.xi};
        Vec z = p.xi;
        for (int k = 0; k < phases; ++k) {
            for (int c = 0; c < l; ++c) z[c] += a(k, c) * (p.xi_next[c] - p.xi[c]);
            knots.push_back(z);
        }
        knots.back() = p.xi_next;
        return knots;
    };
    auto eval = [&](const Mat& a) { return walk_path(p, knots_of(a), 4).cost; };

    double best = eval(alloc);
    Mat best_alloc = alloc;
    double step = 0.25;
    const double fd = 1e-4;
    for (int it = 0; it < 200; ++it) {
        Mat grad = Mat::Zero(phases, l);
        double base = eval(alloc);
        for (int k = 0; k < phases; ++k)
            for (int c = 0; c < l; ++c) {
                Mat a2 = alloc;
                a2(k, c) += fd;
                a2.col(c) /= a2.col(c).sum();
                grad(k, c) = (eval(a2) - base) / fd;
            }
        Mat trial = alloc - step * grad;
        for (int c = 0; c < l; ++c) {
            Vec col = trial.col(c);
            project_simplex(col);
            trial.col(c) = col;
        }
        double v = eval(trial);
        if (v < base - 1e-12) {
            alloc = trial;
            if (v < best) {
                best = v;
                best_alloc = alloc;
            }
        } else {
            step *= 0.5;
            if (step < 1e-6) break;
        }
    }
    Walk w = walk_path(p, knots_of(best_alloc), 8);
    JumpCostResult res;
    res.cost = w.cost;
    res.path.y = std::move(w.y);
    res.path.zeta = std::move(w.zeta);
    return res;
}

}  // namespace

JumpCostResult min_jump_cost(const JumpCostProblem& p, bool allow_fallback) {
    p.validate();
    const int l = p.coeffs->l;
    if ((p.xi_next - p.xi).lpNorm<Eigen::Infinity>() == 0.0) return {0.0, {}};

    JumpCostResult res;
    if (l == 1) {
        // every monotone path is a reparametrisation of the linear one
        int steps = std::max(p.lattice_steps, 256);
        Walk w = walk_path(p, {p.xi, p.xi_next}, steps);
        res.cost = w.cost;
        res.path.y = std::move(w.y);
        res.path.zeta = std::move(w.zeta);
        return res;
    }
    if (l <= 3) {
        res = lattice_dp(p);
    } else {
        if (!allow_fallback)
            throw CapabilityError(
                "min_jump_cost: lattice method supports l <= 3; enable the fallback");
        res = speed_allocation_descent(p, 8);
    }
    // The linear interpolation is itself a member of the admissible path
    // class; never return anything worse.
    Walk lin = walk_path(p, {p.xi, p.xi_next}, std::max(64, p.lattice_steps));
    if (lin.cost < res.cost) {
        res.cost = lin.cost;
        res.path.y = std::move(lin.y);
        res.path.zeta = std::move(lin.zeta);
    }
    return res;
}

}  // namespace smfg
