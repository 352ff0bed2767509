#include "susyode/layers.hpp"

#include <algorithm>

namespace susyode::solve {

using grassmann::word_length;
using grassmann::word_less;
using grassmann::word_label;

int LayerSystem::find(SymbolId s, Word w) const {
    for (size_t i = 0; i < unknowns.size(); ++i)
        if (unknowns[i].symbol == s && unknowns[i].word == w)
            return static_cast<int>(i);
    throw Error("no layer unknown for " + table.name(s) + "@" + word_label(w));
}

Multivector<double> LayerSystem::state_value(const std::vector<double>& y,
                                             SymbolId s) const {
    Multivector<double> v(ctx);
    bool seen = false;
    for (size_t i = 0; i < unknowns.size(); ++i) {
        if (unknowns[i].symbol != s) continue;
        seen = true;
        v.add_term(unknowns[i].word, y[i]);
    }
    if (!seen) throw Error("symbol " + table.name(s) + " is not a layered state");
    return v;
}

void LayerSystem::set_state(std::vector<double>& y, SymbolId s,
                            const Multivector<double>& value) const {
    bool seen = false;
    for (size_t i = 0; i < unknowns.size(); ++i) {
        if (unknowns[i].symbol != s) continue;
        seen = true;
        y[i] = value.coefficient(unknowns[i].word);
    }
    if (!seen) throw Error("symbol " + table.name(s) + " is not a layered state");
    // reject components of the value outside the matching-parity words
    for (const auto& [w, c] : value.terms()) {
        bool matches = false;
        for (const auto& u : unknowns)
            if (u.symbol == s && u.word == w) matches = true;
        if (!matches)
            throw ParityError("initial value for " + table.name(s) +
                              " has a component on " + word_label(w) +
                              " of the wrong parity");
    }
}

std::vector<double> LayerSystem::derivative(const std::vector<double>& y) const {
    std::vector<double> out(rhs.size());
    for (size_t i = 0; i < rhs.size(); ++i) out[i] = rhs[i].evaluate(y);
    return out;
}

LayerSystem expand_to_layers(
    const darboux::PolyVectorField& vf, AlgebraCtx ctx,
    const std::map<SymbolId, Multivector<Rational>>& constants) {
    LayerSystem sys;
    sys.ctx = ctx;
    sys.table = vf.table;
    sys.constants = constants;
    sys.states = vf.vars;

    // words of each parity, graded order (body first)
    std::vector<Word> words[2];
    for (Word w = 0; w <= ctx.top_word(); ++w)
        words[word_length(w) & 1].push_back(w);
    for (auto& ws : words) std::sort(ws.begin(), ws.end(), word_less);

    std::map<SymbolId, Multivector<RealPoly>> values;
    for (SymbolId s : vf.vars) {
        Parity p = vf.table.parity(s);
        Multivector<RealPoly> expansion(ctx);
        for (Word w : words[p == Parity::Odd ? 1 : 0]) {
            int idx = static_cast<int>(sys.unknowns.size());
            sys.unknowns.push_back(
                {s, w, vf.table.name(s) + "@" + word_label(w)});
            expansion.add_term(w, RealPoly::variable(idx));
        }
        values.emplace(s, std::move(expansion));
    }
    for (const auto& [s, v] : constants) {
        if (!(v.ctx() == ctx))
            throw ContextMismatch("constant value for " + vf.table.name(s) +
                                  " lives in a different algebra context");
        Parity want = vf.table.parity(s);
        if (!v.is_zero() && v.parity() != want)
            throw ParityError("constant value for " + vf.table.name(s) + " must be " +
                              parity_name(want));
        values.emplace(s, grassmann::map_scalars<RealPoly>(
                              v, [](const Rational& r) { return RealPoly::constant(r.get_d()); }));
    }

    auto conv = [ctx](const Rational& r) {
        return Multivector<RealPoly>::scalar(ctx, RealPoly::constant(r.get_d()));
    };
    sys.rhs.resize(sys.unknowns.size());
    for (size_t i = 0; i < vf.vars.size(); ++i) {
        Multivector<RealPoly> value = vf.rhs[i].evaluate(values, conv, vf.table);
        for (size_t k = 0; k < sys.unknowns.size(); ++k) {
            if (sys.unknowns[k].symbol != vf.vars[i]) continue;
            sys.rhs[k] = value.coefficient(sys.unknowns[k].word);
        }
        // a parity violation in the rhs would leave coefficients on words the
        // state does not carry
        for (const auto& [w, p] : value.terms()) {
            if ((word_length(w) & 1) !=
                (vf.table.parity(vf.vars[i]) == Parity::Odd ? 1 : 0))
                throw ParityError("right-hand side of " + vf.table.name(vf.vars[i]) +
                                  " acquires a component of the wrong parity on " +
                                  word_label(w));
        }
    }

    if (!verify_triangular(sys))
        throw Error("layer expansion lost its triangular structure");
    return sys;
}

bool verify_triangular(const LayerSystem& sys) {
    for (size_t k = 0; k < sys.rhs.size(); ++k) {
        Word w = sys.unknowns[k].word;
        for (const auto& [m, c] : sys.rhs[k].terms())
            for (int idx : m)
                if (sys.unknowns[static_cast<size_t>(idx)].word & ~w) return false;
    }
    return true;
}

} // namespace susyode::solve
