#include "smfg/reward.hpp"

#include <cmath>

namespace smfg {

void RewardSpec::validate(int l) const {
    if (!(p > 2.0)) throw ContractError("RewardSpec: growth exponent p must exceed 2");
    (void)l;
}

namespace {

// Ensemble members share grids, so marginals repeat across paths; cache them
// per evaluation call.
struct MarginalCache {
    const EmpiricalMeasureFlow& flow;
    std::map<double, Marginal> cache;
    const Marginal& at(double t) {
        auto it = cache.find(t);
        if (it == cache.end()) it = cache.emplace(t, flow.marginal(t)).first;
        return it->second;
    }
};

bool violates_growth(const RewardSpec& spec, const std::vector<CadlagPath>& ensemble, int l) {
    if (!std::isfinite(spec.moment_cap)) return false;
    double acc = 0.0;
    for (const auto& path : ensemble)
        acc += std::pow(path.values().back().tail(l).norm(), spec.p);
    return acc / static_cast<double>(ensemble.size()) > spec.moment_cap;
}

bool violates_growth_param(const RewardSpec& spec, const std::vector<ParametrisedPath>& ensemble) {
    if (!std::isfinite(spec.moment_cap)) return false;
    double acc = 0.0;
    for (const auto& p : ensemble) acc += std::pow(p.xibar.back().norm(), spec.p);
    return acc / static_cast<double>(ensemble.size()) > spec.moment_cap;
}

}  // namespace

RewardValue reward_continuous(const EmpiricalMeasureFlow& flow,
                              const std::vector<CadlagPath>& ensemble, const RewardSpec& spec) {
    if (ensemble.empty()) throw ParameterError("reward_continuous: empty ensemble");
    const int d = ensemble.front().state_dim();
    const int l = ensemble.front().control_dim();
    spec.validate(l);
    for (const auto& path : ensemble)
        if (!path.jump_marks().empty())
            throw ContractError(
                "reward_continuous: ensemble has jumps; use reward_singular");

    RewardValue out;
    if (violates_growth(spec, ensemble, l)) {
        out.neg_infinity = true;
        return out;
    }
    const double T = ensemble.front().horizon();
    Marginal mu_T = flow.marginal(T);

    // fixed summation order by path index for bit-reproducibility
    for (const auto& path : ensemble) {
        const auto& ts = path.times();
        Vec xT = path.values().back().head(d);
        Vec xiT = path.values().back().tail(l);
        out.breakdown.g_term += spec.g ? spec.g(mu_T, xT, xiT) : 0.0;
        double f_acc = 0.0, c_acc = 0.0;
        double f_prev = 0.0;
        bool have_prev = false;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            Vec x = path.values()[i].head(d);
            Vec xi = path.values()[i].tail(l);
            double f_here = spec.f ? spec.f(ts[i], flow.marginal(ts[i]), x, xi) : 0.0;
            if (have_prev) f_acc += 0.5 * (f_prev + f_here) * (ts[i] - ts[i - 1]);
            f_prev = f_here;
            have_prev = true;
            if (spec.c && i + 1 < ts.size()) {
                Vec dxi = path.values()[i + 1].tail(l) - xi;
                c_acc += spec.c(ts[i], x, xi).dot(dxi);  // left point
            }
        }
        out.breakdown.f_term += f_acc;
        out.breakdown.continuous_cost += c_acc;
    }
    const double M = static_cast<double>(ensemble.size());
    out.breakdown.g_term /= M;
    out.breakdown.f_term /= M;
    out.breakdown.continuous_cost /= M;
    out.value = out.breakdown.g_term + out.breakdown.f_term - out.breakdown.continuous_cost;
    return out;
}

RewardValue reward_parametrised(const EmpiricalMeasureFlow& flow,
                                const std::vector<ParametrisedPath>& ensemble,
                                const RewardSpec& spec) {
    if (ensemble.empty()) throw ParameterError("reward_parametrised: empty ensemble");
    const int l = ensemble.front().control_dim;
    spec.validate(l);
    for (const auto& p : ensemble) {
        DomainReport rep = check_domain_S(p);
        if (!rep.ok)
            throw DomainError("reward_parametrised: member not in D(S): " +
                              rep.violations.front().describe());
    }
    RewardValue out;
    if (violates_growth_param(spec, ensemble)) {
        out.neg_infinity = true;
        return out;
    }
    const double T = ensemble.front().horizon();
    Marginal mu_T = flow.marginal(T);

    for (const auto& p : ensemble) {
        out.breakdown.g_term += spec.g ? spec.g(mu_T, p.xbar.back(), p.xibar.back()) : 0.0;
        double f_acc = 0.0, c_acc = 0.0;
        for (std::size_t i = 0; i + 1 < p.u.size(); ++i) {
            double dr = p.rbar[i + 1] - p.rbar[i];
            if (spec.f && dr > 0.0) {
                double f0 = spec.f(p.rbar[i], flow.marginal(p.rbar[i]), p.xbar[i], p.xibar[i]);
                double f1 = spec.f(p.rbar[i + 1], flow.marginal(p.rbar[i + 1]), p.xbar[i + 1],
                                   p.xibar[i + 1]);
                f_acc += 0.5 * (f0 + f1) * dr;
            }
            if (spec.c) {
                Vec dxi = p.xibar[i + 1] - p.xibar[i];
                if (dxi.lpNorm<Eigen::Infinity>() > 0.0)
                    c_acc += spec.c(p.rbar[i], p.xbar[i], p.xibar[i]).dot(dxi);
            }
        }
        out.breakdown.f_term += f_acc;
        out.breakdown.continuous_cost += c_acc;
    }
    const double M = static_cast<double>(ensemble.size());
    out.breakdown.g_term /= M;
    out.breakdown.f_term /= M;
    out.breakdown.continuous_cost /= M;
    out.value = out.breakdown.g_term + out.breakdown.f_term - out.breakdown.continuous_cost;
    return out;
}

RewardValue reward_singular(const EmpiricalMeasureFlow& flow,
                            const std::vector<CadlagPath>& ensemble, const RewardSpec& spec,
                            const CoefficientSpec& coeffs, int jump_lattice_steps) {
    if (ensemble.empty()) throw ParameterError("reward_singular: empty ensemble");
    const int d = ensemble.front().state_dim();
    const int l = ensemble.front().control_dim();
    spec.validate(l);

    RewardValue out;
    if (violates_growth(spec, ensemble, l)) {
        out.neg_infinity = true;
        return out;
    }
    const double T = ensemble.front().horizon();
    Marginal mu_T = flow.marginal(T);

    for (const auto& path : ensemble) {
        const auto& ts = path.times();
        Vec xT = path.values().back().head(d);
        Vec xiT = path.values().back().tail(l);
        out.breakdown.g_term += spec.g ? spec.g(mu_T, xT, xiT) : 0.0;

        double f_acc = 0.0, c_acc = 0.0;
        double f_prev = 0.0;
        bool have_prev = false;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            Vec x = path.values()[i].head(d);
            Vec xi = path.values()[i].tail(l);
            double f_here = spec.f ? spec.f(ts[i], flow.marginal(ts[i]), x, xi) : 0.0;
            if (have_prev) f_acc += 0.5 * (f_prev + f_here) * (ts[i] - ts[i - 1]);
            f_prev = f_here;
            have_prev = true;
            if (spec.c && i + 1 < ts.size()) {
                // continuous increment only: segment ends at the next left limit
                Vec dxi_c = path.left_value(i + 1).tail(l) - xi;
                c_acc += spec.c(ts[i], x, xi).dot(dxi_c);
            }
        }
        out.breakdown.f_term += f_acc;
        out.breakdown.continuous_cost += c_acc;

        std::size_t jidx = 0;
        for (const auto& jump : path.jumps()) {
            JumpCostProblem prob;
            prob.t = jump.time;
            prob.x = jump.left.head(d);
            prob.xi = jump.left.tail(l);
            prob.xi_next = jump.right.tail(l);
            prob.coeffs = &coeffs;
            prob.c = spec.c ? spec.c
                            : JumpCostFn([l](double, const Vec&, const Vec&) {
                                  return RowVec(RowVec::Zero(l));
                              });
            prob.lattice_steps = jump_lattice_steps;
            double cj = min_jump_cost(prob).cost;
            out.breakdown.jump_cost += cj;
            if (out.breakdown.per_jump.size() <= jidx) out.breakdown.per_jump.push_back(0.0);
            out.breakdown.per_jump[jidx] += cj;
            ++jidx;
        }
    }
    const double M = static_cast<double>(ensemble.size());
    out.breakdown.g_term /= M;
    out.breakdown.f_term /= M;
    out.breakdown.continuous_cost /= M;
    out.breakdown.jump_cost /= M;
    for (auto& v : out.breakdown.per_jump) v /= M;
    out.value = out.breakdown.g_term + out.breakdown.f_term - out.breakdown.continuous_cost -
                out.breakdown.jump_cost;
    return out;
}

}  // namespace smfg
