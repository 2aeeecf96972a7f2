#include "smfg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smfg/rng.hpp"

namespace smfg {

Vec CoefficientSpec::eval_b(double t, const Marginal& mu, const Vec& x, const Vec& xi) const {
    Vec out = b ? b(t, mu, x, xi) : Vec::Zero(d);
    if (out.size() != d) throw ContractError("b: wrong output dimension");
    return out;
}

Mat CoefficientSpec::eval_sigma(double t, const Marginal& mu, const Vec& x, const Vec& xi) const {
    Mat out = sigma ? sigma(t, mu, x, xi) : Mat::Zero(d, m);
    if (out.rows() != d || out.cols() != m) throw ContractError("sigma: wrong output dimension");
    return out;
}

Mat CoefficientSpec::eval_gamma(double t, const Vec& x, const Vec& xi) const {
    Mat out = gamma ? gamma(t, x, xi) : Mat::Zero(d, l);
    if (out.rows() != d || out.cols() != l) throw ContractError("gamma: wrong output dimension");
    if (std::isfinite(gamma_bound) &&
        out.cwiseAbs().maxCoeff() > gamma_bound * (1.0 + 1e-12) + 1e-300)
        throw ContractError("gamma: evaluation exceeds declared bound");
    return out;
}

CoefficientSpec CoefficientSpec::zero(int d, int l, int m) {
    CoefficientSpec c;
    c.d = d;
    c.l = l;
    c.m = m;
    c.gamma_bound = 0.0;
    return c;
}

Vec NoisePath::increment(std::size_t step) const {
    double dt = times[step + 1] - times[step];
    return std::sqrt(dt) * z.row(static_cast<Eigen::Index>(step)).transpose();
}

NoisePath make_noise(const std::vector<double>& grid, int m, std::uint64_t master_seed,
                     std::uint64_t particle) {
    if (grid.size() < 2) throw ParameterError("make_noise: grid too short");
    NoisePath n;
    n.times = grid;
    n.seed = master_seed;
    n.z.resize(static_cast<Eigen::Index>(grid.size() - 1), m);
    auto rng = make_rng(master_seed, "noise", particle);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < n.z.rows(); ++i)
        for (int j = 0; j < m; ++j) n.z(i, j) = gauss(rng);
    return n;
}

namespace {

// One RK4 leg for dy/ds = gamma(t, y, zeta(s)) * dzeta/ds with zeta affine
// between za and zb over s in [0,1], split into `steps` substeps.
Vec rk4_leg(double t, Vec y, const Vec& za, const Vec& zb, const CoefficientSpec& coeffs,
            int steps) {
    const Vec dz = zb - za;
    const double h = 1.0 / steps;
    auto f = [&](double s, const Vec& yy) -> Vec {
        Vec zeta = za + s * dz;
        return coeffs.eval_gamma(t, yy, zeta) * dz;
    };
    for (int k = 0; k < steps; ++k) {
        double s = k * h;
        Vec k1 = f(s, y);
        Vec k2 = f(s + 0.5 * h, y + 0.5 * h * k1);
        Vec k3 = f(s + 0.5 * h, y + 0.5 * h * k2);
        Vec k4 = f(s + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

}  // namespace

Vec jump_map_psi(double t, const Vec& x, const Vec& xi, const Vec& xi_next,
                 const CoefficientSpec& coeffs, int ode_steps) {
    if (ode_steps < 1) throw ParameterError("jump_map_psi: ode_steps must be >= 1");
    if (xi.size() != coeffs.l || xi_next.size() != coeffs.l)
        throw ParameterError("jump_map_psi: control dimension mismatch");
    for (int c = 0; c < coeffs.l; ++c)
        if (xi_next[c] < xi[c] - kMonotoneTol)
            throw ContractError("jump_map_psi: xi' must dominate xi componentwise");
    return rk4_leg(t, x, xi, xi_next, coeffs, ode_steps);
}

Vec jump_map_along(double t, const Vec& x, const std::vector<Vec>& zeta_knots,
                   const CoefficientSpec& coeffs, int steps_per_leg) {
    if (zeta_knots.size() < 2) throw ParameterError("jump_map_along: need at least two knots");
    Vec y = x;
    for (std::size_t k = 0; k + 1 < zeta_knots.size(); ++k)
        y = rk4_leg(t, std::move(y), zeta_knots[k], zeta_knots[k + 1], coeffs, steps_per_leg);
    return y;
}

std::vector<double> make_simulation_grid(const std::vector<double>& base,
                                         const CadlagPath& control) {
    std::vector<double> grid = base;
    grid.insert(grid.end(), control.times().begin(), control.times().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-14; }),
               grid.end());
    return grid;
}

namespace {

void ensure_finite(const Vec& x, double t, const char* where) {
    if (!x.allFinite()) {
        std::ostringstream os;
        os << where << ": non-finite state at t = " << t;
        throw NumericError(os.str());
    }
}

}  // namespace

CadlagPath marcus_integrate(const CoefficientSpec& coeffs, const CadlagPath& control,
                            const NoisePath& noise, const EmpiricalMeasureFlow& flow,
                            const std::vector<double>& grid, const Vec& x0,
                            int psi_ode_steps) {
    if (x0.size() != coeffs.d) throw ParameterError("marcus_integrate: x0 dimension");
    if (control.control_dim() != coeffs.l || control.state_dim() != 0)
        throw ParameterError("marcus_integrate: control path must be control-only");
    if (noise.times != grid) throw AlignmentError("marcus_integrate: noise grid mismatch");
    // Every control jump must sit on a grid stamp.
    for (const auto& j : control.jumps()) {
        auto it = std::lower_bound(grid.begin(), grid.end(), j.time - 1e-14);
        if (it == grid.end() || std::abs(*it - j.time) > 1e-14)
            throw AlignmentError("marcus_integrate: control jump off the simulation grid");
    }

    const int w = coeffs.d + coeffs.l;
    std::vector<Vec> vals(grid.size());
    std::map<std::size_t, Vec> marks;

    Vec x = x0;
    Vec xi_pre = control.pre_initial();
    // jump at 0- -> 0 first
    Vec xi0 = control.evaluate(grid.front());
    if ((xi0 - xi_pre).lpNorm<Eigen::Infinity>() > 0.0) {
        Vec left(w);
        left.head(coeffs.d) = x;
        left.tail(coeffs.l) = xi_pre;
        x = jump_map_psi(grid.front(), x, xi_pre, xi0, coeffs, psi_ode_steps);
        marks[0] = left;
    }
    Vec cur(w);
    cur.head(coeffs.d) = x;
    cur.tail(coeffs.l) = xi0;
    vals[0] = cur;

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double t = grid[k];
        const double tn = grid[k + 1];
        const double dt = tn - t;
        Vec xi_t = control.evaluate(t);
        Vec xi_next_left = control.left_limit(tn);
        Marginal mu = flow.marginal(t);
        Vec drift = coeffs.eval_b(t, mu, x, xi_t);
        Mat sig = coeffs.eval_sigma(t, mu, x, xi_t);
        Mat gam = coeffs.eval_gamma(t, x, xi_t);
        Vec dxi_c = xi_next_left - xi_t;
        x += drift * dt + sig * noise.increment(k) + gam * dxi_c;
        ensure_finite(x, tn, "marcus_integrate");
        Vec xi_right = control.evaluate(tn);
        if ((xi_right - xi_next_left).lpNorm<Eigen::Infinity>() > 0.0) {
            Vec left(w);
            left.head(coeffs.d) = x;
            left.tail(coeffs.l) = xi_next_left;
            x = jump_map_psi(tn, x, xi_next_left, xi_right, coeffs, psi_ode_steps);
            ensure_finite(x, tn, "marcus_integrate (jump)");
            marks[k + 1] = left;
        }
        Vec v(w);
        v.head(coeffs.d) = x;
        v.tail(coeffs.l) = xi_right;
        vals[k + 1] = v;
    }
    return CadlagPath(coeffs.d, coeffs.l, grid, std::move(vals), std::move(marks));
}

std::vector<double> make_parameter_grid(const ParametrisedPath& control_part, int u_steps) {
    if (u_steps < 1) throw ParameterError("make_parameter_grid: u_steps must be >= 1");
    std::vector<double> grid = control_part.u;
    for (int k = 0; k <= u_steps; ++k)
        grid.push_back(static_cast<double>(k) / u_steps);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-14; }),
               grid.end());
    grid.front() = 0.0;
    grid.back() = 1.0;
    return grid;
}

ParametrisedPath simulate_parametrised(const CoefficientSpec& coeffs,
                                       const ParametrisedPath& control_part,
                                       const NoisePath& noise, const EmpiricalMeasureFlow& flow,
                                       int u_steps, const Vec& x0) {
    if (control_part.rbar.front() != 0.0)
        throw ContractError("simulate_parametrised: rbar(0) must be 0");
    std::vector<double> grid = make_parameter_grid(control_part, u_steps);
    if (noise.times != grid)
        throw AlignmentError("simulate_parametrised: noise grid mismatch (use make_parameter_grid)");

    ParametrisedPath out;
    out.state_dim = coeffs.d;
    out.control_dim = coeffs.l;
    out.u = grid;
    out.xbar.resize(grid.size());
    out.xibar.resize(grid.size());
    out.rbar.resize(grid.size());

    Vec x = x0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out.rbar[k] = control_part.r_at(grid[k]);
        out.xibar[k] = control_part.xi_at(grid[k]);
    }
    out.xbar[0] = x;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double r = out.rbar[k];
        const double dr = out.rbar[k + 1] - out.rbar[k];
        const Vec& xi = out.xibar[k];
        Vec dxi = out.xibar[k + 1] - out.xibar[k];
        Marginal mu = flow.marginal(r);
        Vec drift = coeffs.eval_b(r, mu, x, xi);
        Mat sig = coeffs.eval_sigma(r, mu, x, xi);
        Mat gam = coeffs.eval_gamma(r, x, xi);
        // dW_{rbar} increments drawn as sqrt(d rbar) * z; plateaus get zero.
        Vec dw = dr > 0.0 ? Vec(std::sqrt(dr) * noise.z.row(static_cast<Eigen::Index>(k)).transpose())
                          : Vec(Vec::Zero(coeffs.m));
        x += drift * dr + sig * dw + gam * dxi;
        ensure_finite(x, r, "simulate_parametrised");
        out.xbar[k + 1] = x;
    }
    return out;
}

// ---- assumption checkers ---------------------------------------------------

namespace {

Vec sample_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Vec out(lo.size());
    for (int i = 0; i < lo.size(); ++i) out[i] = lo[i] + uni(rng) * (hi[i] - lo[i]);
    return out;
}

// Random monotone staircase from xi to xi_next: the componentwise increments
// are split into chunks and interleaved in random order (a monotone lattice
// walk).
std::vector<Vec> random_staircase(std::mt19937_64& rng, const Vec& xi, const Vec& xi_next,
                                  int chunks_per_component) {
    const int l = static_cast<int>(xi.size());
    std::vector<int> moves;
    for (int c = 0; c < l; ++c)
        for (int k = 0; k < chunks_per_component; ++k) moves.push_back(c);
    std::shuffle(moves.begin(), moves.end(), rng);
    std::vector<Vec> knots{xi};
    Vec cur = xi;
    Vec step = (xi_next - xi) / chunks_per_component;
    for (int c : moves) {
        cur[c] += step[c];
        knots.push_back(cur);
    }
    knots.back() = xi_next;  // kill rounding drift
    return knots;
}

CoefficientSpec wrap_gamma(const JumpImpactFn& gamma, int d, int l) {
    CoefficientSpec c;
    c.d = d;
    c.l = l;
    c.m = 1;
    c.gamma = gamma;
    return c;
}

}  // namespace

CheckReport check_path_independence(const JumpImpactFn& gamma, int d, int l,
                                    const SampleBox& box, int n_samples, double tol,
                                    std::uint64_t seed, int staircases_per_sample) {
    CheckReport rep;
    CoefficientSpec coeffs = wrap_gamma(gamma, d, l);
    auto rng = make_rng(seed, "path-independence");
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // x-independence probe at a few sample points
    rep.x_independent = true;
    for (int k = 0; k < 8; ++k) {
        double t = box.t_lo + uni(rng) * (box.t_hi - box.t_lo);
        Vec x = sample_box(rng, box.x_lo, box.x_hi);
        Vec xi = sample_box(rng, box.xi_lo, box.xi_hi);
        Mat g0 = gamma(t, x, xi);
        Mat g1 = gamma(t, x + Vec::Constant(d, 0.37), xi);
        if ((g1 - g0).cwiseAbs().maxCoeff() > 1e-12) rep.x_independent = false;
    }

    double lip = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        double t = box.t_lo + uni(rng) * (box.t_hi - box.t_lo);
        Vec x = sample_box(rng, box.x_lo, box.x_hi);
        Vec xi = sample_box(rng, box.xi_lo, box.xi_hi);
        Vec jump = sample_box(rng, Vec::Zero(l), box.jump_max);
        Vec xi_next = xi + jump;

        Vec y_lin = jump_map_psi(t, x, xi, xi_next, coeffs, 128);
        double worst = 0.0;
        for (int w = 0; w < staircases_per_sample; ++w) {
            auto stair = random_staircase(rng, xi, xi_next, 8);
            Vec y = jump_map_along(t, x, stair, coeffs, 16);
            worst = std::max(worst, (y - y_lin).lpNorm<Eigen::Infinity>());
        }
        if (worst > rep.max_discrepancy) rep.max_discrepancy = worst;
        if (worst > tol && rep.witnesses.size() < 4)
            rep.witnesses.push_back({t, x, xi, xi_next, worst});

        // crude local Lipschitz estimate of gamma in (x, xi)
        Vec dx = Vec::Constant(d, 1e-4);
        Mat g0 = gamma(t, x, xi);
        Mat gx = gamma(t, x + dx, xi);
        Mat gxi = gamma(t, x, xi + Vec::Constant(l, 1e-4));
        lip = std::max(lip, (gx - g0).cwiseAbs().maxCoeff() / 1e-4);
        lip = std::max(lip, (gxi - g0).cwiseAbs().maxCoeff() / 1e-4);
    }
    rep.local_lipschitz_estimate = lip;

    if (rep.x_independent && l >= 2) {
        // conservativity: d gamma_{kc} / d xi_e symmetric in (c, e)
        double asym = 0.0;
        const double h = 1e-5;
        for (int s = 0; s < 16; ++s) {
            double t = box.t_lo + uni(rng) * (box.t_hi - box.t_lo);
            Vec x = sample_box(rng, box.x_lo, box.x_hi);
            Vec xi = sample_box(rng, box.xi_lo, box.xi_hi);
            for (int c = 0; c < l; ++c)
                for (int e = c + 1; e < l; ++e) {
                    Vec de = Vec::Zero(l);
                    de[e] = h;
                    Vec dc = Vec::Zero(l);
                    dc[c] = h;
                    Mat d_c_by_e = (gamma(t, x, xi + de) - gamma(t, x, xi - de)) / (2 * h);
                    Mat d_e_by_c = (gamma(t, x, xi + dc) - gamma(t, x, xi - dc)) / (2 * h);
                    for (int k = 0; k < d; ++k)
                        asym = std::max(asym, std::abs(d_c_by_e(k, c) - d_e_by_c(k, e)));
                }
        }
        rep.mixed_partial_asymmetry = asym;
    }

    rep.pass = rep.max_discrepancy <= tol;
    return rep;
}

CheckReport check_jump_monotonicity(const JumpImpactFn& gamma, int d, int l,
                                    const SampleBox& box, int samples, double tol,
                                    std::uint64_t seed) {
    CheckReport rep;
    CoefficientSpec coeffs = wrap_gamma(gamma, d, l);
    auto rng = make_rng(seed, "jump-monotonicity");
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (int s = 0; s < samples; ++s) {
        double t = box.t_lo + uni(rng) * (box.t_hi - box.t_lo);
        Vec x = sample_box(rng, box.x_lo, box.x_hi);
        Vec xi = sample_box(rng, box.xi_lo, box.xi_hi);
        Vec xi_next = xi + sample_box(rng, Vec::Zero(l), box.jump_max);
        // linear path plus a couple of staircases
        std::vector<std::vector<Vec>> paths;
        paths.push_back({xi, xi_next});
        paths.push_back(random_staircase(rng, xi, xi_next, 6));
        paths.push_back(random_staircase(rng, xi, xi_next, 6));
        for (const auto& zeta : paths) {
            // integrate leg by leg recording intermediate states
            std::vector<Vec> track{x};
            Vec y = x;
            for (std::size_t k = 0; k + 1 < zeta.size(); ++k) {
                const int sub = 16;
                Vec za = zeta[k], zb = zeta[k + 1];
                for (int q = 0; q < sub; ++q) {
                    double a = static_cast<double>(q) / sub;
                    double bq = static_cast<double>(q + 1) / sub;
                    Vec z0 = (1 - a) * za + a * zb;
                    Vec z1 = (1 - bq) * za + bq * zb;
                    y = jump_map_along(t, y, {z0, z1}, coeffs, 4);
                    track.push_back(y);
                }
            }
            for (int comp = 0; comp < d; ++comp) {
                double run_max = track.front()[comp], run_min = track.front()[comp];
                double down = 0.0, up = 0.0;
                for (const auto& v : track) {
                    run_max = std::max(run_max, v[comp]);
                    run_min = std::min(run_min, v[comp]);
                    down = std::max(down, run_max - v[comp]);
                    up = std::max(up, v[comp] - run_min);
                }
                double viol = std::min(down, up);
                if (viol > rep.max_discrepancy) rep.max_discrepancy = viol;
                if (viol > tol && rep.witnesses.size() < 4)
                    rep.witnesses.push_back({t, x, xi, xi_next, viol});
            }
        }
    }
    rep.pass = rep.max_discrepancy <= tol;
    return rep;
}

}  // namespace smfg
