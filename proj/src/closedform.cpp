#include "susyode/closedform.hpp"

#include "susyode/superfield.hpp"

namespace susyode::solve {

using superspace::ComponentSystem;

std::vector<LaurentPoly> closed_form_residual(
    const darboux::PolyVectorField& vf,
    const std::map<SymbolId, LaurentPoly>& assignment,
    const std::map<SymbolId, Multivector<Rational>>& constants) {
    AlgebraCtx ctx{1};
    if (!assignment.empty()) ctx = assignment.begin()->second.ctx();

    std::map<SymbolId, LaurentPoly> vals = assignment;
    for (const auto& [s, v] : constants) vals.emplace(s, LaurentPoly::constant(v));
    auto conv = [ctx](const Rational& r) {
        return LaurentPoly::constant(Multivector<Rational>::scalar(ctx, r));
    };

    std::vector<LaurentPoly> out;
    out.reserve(vf.vars.size());
    for (size_t i = 0; i < vf.vars.size(); ++i) {
        auto it = assignment.find(vf.vars[i]);
        if (it == assignment.end())
            throw Error("no closed form assigned to " + vf.table.name(vf.vars[i]));
        out.push_back(it->second.dt() - vf.rhs[i].evaluate(vals, conv, vf.table));
    }
    return out;
}

bool verify_closed_form(const darboux::PolyVectorField& vf,
                        const std::map<SymbolId, LaurentPoly>& assignment,
                        const std::map<SymbolId, Multivector<Rational>>& constants) {
    for (const LaurentPoly& r : closed_form_residual(vf, assignment, constants))
        if (!r.is_zero()) return false;
    return true;
}

std::map<SymbolId, LaurentPoly> transform_solution(
    const ComponentSystem& sys, const std::map<SymbolId, LaurentPoly>& solution,
    int eps_generator, int generator) {
    if (solution.empty()) return {};
    AlgebraCtx ctx = solution.begin()->second.ctx();

    SymbolTable table = sys.table;
    SymbolId eps = table.declare(superspace::fresh_name(table, "eps"), Parity::Odd,
                                 sym::SymbolKind::Constant);
    std::map<SymbolId, GradedPoly> delta =
        superspace::susy_variation(sys, table, eps, generator);

    // the variation may reference time derivatives of the components;
    // differentiate the closed forms as often as needed
    std::map<SymbolId, LaurentPoly> vals = solution;
    vals.emplace(eps, LaurentPoly::constant(
                          Multivector<Rational>::generator(ctx, eps_generator)));
    for (const auto& [s, p] : delta) {
        for (SymbolId used : p.symbols()) {
            int order = sym::derivative_order(used);
            if (order == 0 || vals.count(used)) continue;
            auto base = solution.find(sym::base_symbol(used));
            if (base == solution.end())
                throw Error("no closed form assigned to " +
                            table.name(sym::base_symbol(used)));
            LaurentPoly d = base->second;
            for (int k = 0; k < order; ++k) d = d.dt();
            vals.emplace(used, std::move(d));
        }
    }

    auto conv = [ctx](const Rational& r) {
        return LaurentPoly::constant(Multivector<Rational>::scalar(ctx, r));
    };
    std::map<SymbolId, LaurentPoly> out;
    for (const auto& [s, sol] : solution) {
        auto it = delta.find(s);
        if (it == delta.end())
            throw Error(table.name(s) + " is not a component of the system");
        out.emplace(s, sol + it->second.evaluate(vals, conv, table));
    }
    return out;
}

Trajectory transform_trajectory(const LayerSystem& layers, const Trajectory& traj,
                                const ComponentSystem& sys, int eps_generator,
                                int generator) {
    SymbolTable table = sys.table;
    SymbolId eps = table.declare(superspace::fresh_name(table, "eps"), Parity::Odd,
                                 sym::SymbolKind::Constant);
    std::map<SymbolId, GradedPoly> delta =
        superspace::susy_variation(sys, table, eps, generator);
    // eliminate derivative symbols on shell so samples alone determine the
    // variation
    for (auto& [s, p] : delta) p = reduce_on_shell(sys, table, p);

    auto conv = [&](const Rational& r) {
        return Multivector<double>::scalar(layers.ctx, r.get_d());
    };
    Trajectory out = traj;
    for (size_t row = 0; row < traj.values.size(); ++row) {
        std::map<SymbolId, Multivector<double>> vals;
        for (SymbolId s : layers.states)
            vals.emplace(s, layers.state_value(traj.values[row], s));
        for (const auto& [s, v] : layers.constants)
            vals.emplace(s, grassmann::to_double(v));
        vals.emplace(eps, Multivector<double>::generator(layers.ctx, eps_generator));
        for (SymbolId s : layers.states) {
            auto it = delta.find(s);
            if (it == delta.end())
                throw Error("state " + table.name(s) +
                            " is not a component of the system; transform "
                            "requires a first-order component flow");
            Multivector<double> shifted =
                vals.at(s) + it->second.evaluate(vals, conv, table);
            layers.set_state(out.values[row], s, shifted);
        }
    }
    return out;
}

} // namespace susyode::solve
