#include "susyode/picard.hpp"

namespace susyode::solve {

std::vector<TPoly> picard_iterate(
    const darboux::PolyVectorField& vf,
    const std::map<SymbolId, Multivector<Rational>>& initial, int passes,
    const std::map<SymbolId, Multivector<Rational>>& constants) {
    if (passes < 0) throw Error("pass count must be nonnegative");

    AlgebraCtx ctx{1};
    if (!initial.empty()) ctx = initial.begin()->second.ctx();
    std::vector<TPoly> current;
    current.reserve(vf.vars.size());
    std::map<SymbolId, TPoly> values;
    for (SymbolId s : vf.vars) {
        auto it = initial.find(s);
        if (it == initial.end())
            throw Error("no initial value for " + vf.table.name(s));
        Parity want = vf.table.parity(s);
        if (!it->second.is_zero() && it->second.parity() != want)
            throw ParityError("initial value for " + vf.table.name(s) +
                              " must be " + parity_name(want));
        current.push_back(TPoly::constant(it->second));
    }
    std::map<SymbolId, TPoly> const_values;
    for (const auto& [s, v] : constants)
        const_values.emplace(s, TPoly::constant(v));

    auto conv = [ctx](const Rational& r) {
        return TPoly::constant(Multivector<Rational>::scalar(ctx, r));
    };
    for (int pass = 0; pass < passes; ++pass) {
        std::map<SymbolId, TPoly> vals = const_values;
        for (size_t i = 0; i < vf.vars.size(); ++i)
            vals.insert_or_assign(vf.vars[i], current[i]);
        std::vector<TPoly> next;
        next.reserve(current.size());
        for (size_t i = 0; i < vf.vars.size(); ++i) {
            TPoly rhs = vf.rhs[i].evaluate(vals, conv, vf.table);
            next.push_back(TPoly::constant(initial.at(vf.vars[i])) + rhs.integral());
        }
        current = std::move(next);
    }
    return current;
}

} // namespace susyode::solve
