#include "smfg/flow.hpp"

#include <cmath>

namespace smfg {

Vec Marginal::mean() const {
    if (empty()) return Vec::Zero(state_dim + control_dim);
    return points.transpose() * weights;
}

Vec Marginal::second_moment() const {
    if (empty()) return Vec::Zero(state_dim + control_dim);
    return points.array().square().matrix().transpose() * weights;
}

double Marginal::integrate(const std::function<double(const Vec&)>& fn) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        acc += weights[i] * fn(points.row(i).transpose());
    return acc;
}

EmpiricalMeasureFlow::EmpiricalMeasureFlow(std::vector<CadlagPath> paths, Vec weights)
    : paths_(std::move(paths)) {
    if (paths_.empty()) throw ParameterError("EmpiricalMeasureFlow: no paths");
    d_ = paths_.front().state_dim();
    l_ = paths_.front().control_dim();
    for (const auto& p : paths_)
        if (p.state_dim() != d_ || p.control_dim() != l_)
            throw ParameterError("EmpiricalMeasureFlow: mixed dimensions");
    if (weights.size() == 0) {
        weights_ = Vec::Constant(static_cast<Eigen::Index>(paths_.size()),
                                 1.0 / static_cast<double>(paths_.size()));
    } else {
        if (static_cast<std::size_t>(weights.size()) != paths_.size())
            throw ParameterError("EmpiricalMeasureFlow: weight count mismatch");
        double s = weights.sum();
        if (std::abs(s - 1.0) > 1e-9)
            throw ContractError("EmpiricalMeasureFlow: weights must sum to 1");
        weights_ = std::move(weights);
    }
}

EmpiricalMeasureFlow EmpiricalMeasureFlow::empty(int state_dim, int control_dim) {
    EmpiricalMeasureFlow f;
    f.d_ = state_dim;
    f.l_ = control_dim;
    return f;
}

Marginal EmpiricalMeasureFlow::marginal(double t) const {
    Marginal m;
    m.state_dim = d_;
    m.control_dim = l_;
    if (paths_.empty()) {
        m.points.resize(0, d_ + l_);
        m.weights.resize(0);
        return m;
    }
    m.points.resize(static_cast<Eigen::Index>(paths_.size()), d_ + l_);
    for (std::size_t i = 0; i < paths_.size(); ++i)
        m.points.row(static_cast<Eigen::Index>(i)) = paths_[i].evaluate(t).transpose();
    m.weights = weights_;
    return m;
}

double EmpiricalMeasureFlow::moment_track(double p) const {
    if (paths_.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < paths_.size(); ++i) {
        const auto& path = paths_[i];
        double sup_x = 0.0;
        for (const auto& v : path.values())
            sup_x = std::max(sup_x, v.head(d_).norm());
        double xi_T = path.values().back().tail(l_).norm();
        acc += weights_[static_cast<Eigen::Index>(i)] *
               (std::pow(sup_x, p) + std::pow(xi_T, p));
    }
    return acc;
}

}  // namespace smfg
