#pragma once

#include <functional>
#include <vector>

#include "smfg/path.hpp"

namespace smfg {

// Weighted point cloud in R^{d+l}: the time-t marginal of an empirical
// measure flow.  Coefficients see the flow only through these marginals.
struct Marginal {
    int state_dim = 0;
    int control_dim = 0;
    Mat points;    // n x (d+l)
    Vec weights;   // sums to 1 (empty cloud allowed for interaction-free runs)

    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
    bool empty() const { return points.rows() == 0; }

    Vec mean() const;
    Vec second_moment() const;  // componentwise E[Y^2]
    Vec mean_state() const { return mean().head(state_dim); }
    Vec mean_control() const { return mean().tail(control_dim); }
    double integrate(const std::function<double(const Vec&)>& fn) const;
};

// M weighted sample paths representing a measure flow on the path space.
// Immutable after construction; marginal() is pure and safe to call from
// multiple workers.
class EmpiricalMeasureFlow {
public:
    EmpiricalMeasureFlow() = default;
    EmpiricalMeasureFlow(std::vector<CadlagPath> paths, Vec weights = Vec());

    static EmpiricalMeasureFlow empty(int state_dim, int control_dim);

    std::size_t size() const { return paths_.size(); }
    const std::vector<CadlagPath>& paths() const { return paths_; }
    const Vec& weights() const { return weights_; }
    int state_dim() const { return d_; }
    int control_dim() const { return l_; }

    Marginal marginal(double t) const;

    // E[ sup_t |X_t|^p + |xi_T|^p ] over the ensemble (grid sup).
    double moment_track(double p) const;

private:
    std::vector<CadlagPath> paths_;
    Vec weights_;
    int d_ = 0;
    int l_ = 0;
};

}  // namespace smfg
