#include "susyode/integrate.hpp"

#include <cmath>
#include <cstdio>

namespace susyode::solve {

namespace {

bool sample_ok(const std::vector<double>& y, double threshold) {
    for (double v : y)
        if (!std::isfinite(v) || std::abs(v) > threshold) return false;
    return true;
}

std::vector<double> axpy(const std::vector<double>& y, double a,
                         const std::vector<double>& d) {
    std::vector<double> out(y.size());
    for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * d[i];
    return out;
}

} // namespace

Trajectory integrate_rk4(const LayerSystem& sys, const std::vector<double>& y0,
                         double t0, double t_end, double h,
                         double blowup_threshold) {
    if (y0.size() != sys.unknowns.size())
        throw Error("initial sample has " + std::to_string(y0.size()) +
                    " entries for " + std::to_string(sys.unknowns.size()) +
                    " unknowns");
    if (h <= 0.0) throw Error("step size must be positive");

    Trajectory traj;
    traj.times.push_back(t0);
    traj.values.push_back(y0);
    if (!sample_ok(y0, blowup_threshold)) {
        traj.blew_up = true;
        return traj;
    }

    std::vector<double> y = y0;
    double t = t0;
    while (t < t_end - 1e-12 * std::max(1.0, std::abs(t_end))) {
        double step = std::min(h, t_end - t);
        auto k1 = sys.derivative(y);
        auto k2 = sys.derivative(axpy(y, step / 2, k1));
        auto k3 = sys.derivative(axpy(y, step / 2, k2));
        auto k4 = sys.derivative(axpy(y, step, k3));
        std::vector<double> next(y.size());
        for (size_t i = 0; i < y.size(); ++i)
            next[i] = y[i] + step / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (!sample_ok(next, blowup_threshold)) {
            traj.blew_up = true;
            break;
        }
        y = std::move(next);
        t += step;
        traj.times.push_back(t);
        traj.values.push_back(y);
    }
    return traj;
}

std::string to_csv(const LayerSystem& sys, const Trajectory& traj) {
    std::string out = "t";
    for (const auto& u : sys.unknowns) {
        out += ",";
        out += u.label;
    }
    out += "\n";
    char buf[40];
    for (size_t row = 0; row < traj.times.size(); ++row) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[row]);
        out += buf;
        for (double v : traj.values[row]) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

Multivector<double> evaluate_expression(const LayerSystem& sys,
                                        const darboux::FirstIntegralExpr& expr,
                                        const std::vector<double>& y) {
    std::map<SymbolId, Multivector<double>> vals;
    for (SymbolId s : sys.states) vals.emplace(s, sys.state_value(y, s));
    for (const auto& [s, v] : sys.constants) vals.emplace(s, grassmann::to_double(v));
    auto conv = [&](const Rational& r) {
        return Multivector<double>::scalar(sys.ctx, r.get_d());
    };
    Multivector<double> value = expr.f.evaluate(vals, conv, sys.table);
    if (!(expr.g == GradedPoly::constant(Rational(1))))
        value = value * grassmann::inverse(expr.g.evaluate(vals, conv, sys.table));
    if (!expr.h.is_zero())
        value = value * grassmann::exponential(expr.h.evaluate(vals, conv, sys.table));
    return value;
}

std::vector<double> expression_drift(const LayerSystem& sys, const Trajectory& traj,
                                     const std::vector<darboux::FirstIntegralExpr>& exprs) {
    std::vector<double> drift(exprs.size(), 0.0);
    if (traj.values.empty()) return drift;
    for (size_t e = 0; e < exprs.size(); ++e) {
        Multivector<double> first = evaluate_expression(sys, exprs[e], traj.values.front());
        for (const auto& y : traj.values) {
            Multivector<double> diff = evaluate_expression(sys, exprs[e], y) - first;
            for (const auto& [w, c] : diff.terms())
                drift[e] = std::max(drift[e], std::abs(c));
        }
    }
    return drift;
}

std::vector<double> invariant_drift(const LayerSystem& sys, const Trajectory& traj,
                                    const std::vector<sym::GradedPoly>& invariants) {
    std::vector<darboux::FirstIntegralExpr> exprs;
    exprs.reserve(invariants.size());
    for (const auto& f : invariants)
        exprs.push_back({f, GradedPoly::constant(Rational(1)), GradedPoly()});
    return expression_drift(sys, traj, exprs);
}

} // namespace susyode::solve
