#pragma once

#include <string>
#include <vector>

#include "susyode/darboux.hpp"
#include "susyode/layers.hpp"

namespace susyode::solve {

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> values; // one flat sample per time
    bool blew_up = false;

    double stop_time() const { return times.empty() ? 0.0 : times.back(); }
};

/// Classical fourth-order Runge-Kutta with a fixed step. Integration stops
/// early (with blew_up set) as soon as a step produces a non-finite value or
/// exceeds the threshold; the trajectory keeps the last finite sample.
Trajectory integrate_rk4(const LayerSystem& sys, const std::vector<double>& y0,
                         double t0, double t_end, double h,
                         double blowup_threshold = 1e12);

/// Header "t,<label>,..." followed by one row per sample.
std::string to_csv(const LayerSystem& sys, const Trajectory& traj);

/// Evaluate an expression (f/g)*exp(h) over Lambda_L at one flat sample.
Multivector<double> evaluate_expression(const LayerSystem& sys,
                                        const darboux::FirstIntegralExpr& expr,
                                        const std::vector<double>& y);

/// Maximum absolute deviation, over the whole trajectory and all basis
/// words, of each expression's value from its value at the first sample.
std::vector<double> expression_drift(const LayerSystem& sys, const Trajectory& traj,
                                     const std::vector<darboux::FirstIntegralExpr>& exprs);

/// Drift of plain polynomial invariants (g = 1, h = 0).
std::vector<double> invariant_drift(const LayerSystem& sys, const Trajectory& traj,
                                    const std::vector<sym::GradedPoly>& invariants);

} // namespace susyode::solve
