#pragma once

#include "smfg/path.hpp"

namespace smfg {

// Completed graph of a càdlàg path: continuity stretches plus, at every jump
// stamp, the product of the per-component intervals spanned by the jump.
struct ThickGraph {
    struct JumpSegment {
        double time;
        Vec lo;  // componentwise min of left/right
        Vec hi;  // componentwise max of left/right
        Vec left;
        Vec right;
    };
    double horizon = 0;
    std::vector<JumpSegment> jump_segments;  // ordered by time

    static ThickGraph from_path(const CadlagPath& x);
};

// True iff (value, time) lies on the thick graph of x: on a continuity
// stretch the value must match the path, at a jump stamp it must lie in the
// spanned box.
bool thick_graph_membership(const Vec& value, double time, const CadlagPath& x,
                            double tol = 1e-9);

// Canonical WM1-parametrisation: continuity stretches traversed at uniform
// rbar speed, every jump filled linearly on an rbar plateau whose parameter
// length is proportional to the jump's l1 size (relative to total variation
// plus T, mirroring the arctan clock's allocation).
ParametrisedPath canonical_parametrisation(const CadlagPath& x);

// Upper bound on the WM1 distance between two càdlàg paths: both canonical
// parametrisations are sampled at `resolution` points and aligned by a
// monotone (bottleneck) dynamic program over the product of the value and
// time-scale discrepancies.  Symmetric, zero on identical paths, and weakly
// decreasing in the resolution.
double wm1_distance(const CadlagPath& y, const CadlagPath& z, int resolution = 512);

// Same alignment bound applied directly to two parametrised paths (used by
// diagnostics that compare parametrisations rather than unparametrised
// paths).
double wm1_alignment_bound(const ParametrisedPath& a, const ParametrisedPath& b, int resolution);

}  // namespace smfg
