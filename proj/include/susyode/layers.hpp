#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "susyode/algebra.hpp"
#include "susyode/darboux.hpp"
#include "susyode/poly.hpp"

namespace susyode::solve {

using grassmann::AlgebraCtx;
using grassmann::Multivector;
using grassmann::Word;
using sym::GradedPoly;
using sym::SymbolId;
using sym::SymbolTable;

/// Multivariate polynomial over flat unknown indices with double
/// coefficients; the right-hand sides of the layered real system.
class RealPoly {
public:
    /// Sorted multiset of unknown indices.
    using Monomial = std::vector<int>;
    using Terms = std::map<Monomial, double>;

    RealPoly() = default;

    static RealPoly constant(double v) {
        RealPoly p;
        if (v != 0.0) p.terms_.emplace(Monomial{}, v);
        return p;
    }

    static RealPoly variable(int index) {
        RealPoly p;
        p.terms_.emplace(Monomial{index}, 1.0);
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    RealPoly operator-() const {
        RealPoly p;
        for (const auto& [m, c] : terms_) p.terms_.emplace(m, -c);
        return p;
    }

    friend RealPoly operator+(const RealPoly& a, const RealPoly& b) {
        RealPoly p = a;
        for (const auto& [m, c] : b.terms_) p.add_term(m, c);
        return p;
    }

    friend RealPoly operator*(const RealPoly& a, const RealPoly& b) {
        RealPoly p;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m;
                m.reserve(ma.size() + mb.size());
                std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(),
                           std::back_inserter(m));
                p.add_term(m, ca * cb);
            }
        }
        return p;
    }

    bool operator==(const RealPoly&) const = default;

    double evaluate(const std::vector<double>& xs) const {
        double acc = 0.0;
        for (const auto& [m, c] : terms_) {
            double term = c;
            for (int i : m) term *= xs[static_cast<size_t>(i)];
            acc += term;
        }
        return acc;
    }

    void add_term(const Monomial& m, double c) {
        auto [it, fresh] = terms_.emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        } else if (c == 0.0) {
            terms_.erase(it);
        }
    }

private:
    Terms terms_;
};

} // namespace susyode::solve

namespace susyode::grassmann {

template <>
struct ScalarOps<solve::RealPoly> {
    static solve::RealPoly zero() { return {}; }
    static bool is_zero(const solve::RealPoly& p) { return p.is_zero(); }
    static solve::RealPoly from_rational(const Rational& r) {
        return solve::RealPoly::constant(r.get_d());
    }
    static solve::RealPoly exp_body(const solve::RealPoly&) {
        throw Error("exponential is not defined for polynomial coefficients");
    }
    static solve::RealPoly reciprocal(const solve::RealPoly&) {
        throw Error("reciprocal is not defined for polynomial coefficients");
    }
};

} // namespace susyode::grassmann

namespace susyode::solve {

/// One real unknown: the coefficient of basis word `word` in state `symbol`.
struct LayerUnknown {
    SymbolId symbol;
    Word word;
    std::string label; // e.g. "x@1", "xi@e1", "chi@e1e2"
};

/// The real first-order system for the basis coefficients of a
/// Grassmann-valued flow over Lambda_L. Unknowns are grouped by state, each
/// expanded over the words matching its parity, bodies first.
struct LayerSystem {
    AlgebraCtx ctx{1};
    SymbolTable table;
    std::vector<LayerUnknown> unknowns;
    std::vector<RealPoly> rhs;
    std::map<SymbolId, Multivector<Rational>> constants;
    std::vector<SymbolId> states;

    int find(SymbolId s, Word w) const;

    /// Reassemble the multivector value of one state from a flat sample.
    Multivector<double> state_value(const std::vector<double>& y, SymbolId s) const;

    /// Scatter a multivector initial value into a flat sample.
    void set_state(std::vector<double>& y, SymbolId s,
                   const Multivector<double>& value) const;

    std::vector<double> derivative(const std::vector<double>& y) const;
};

/// Expands each right-hand side over the basis words of Lambda_L. Symbolic
/// constants must be given Grassmann values of matching parity. The layered
/// system is triangular across soul grades; expansion verifies that and the
/// parity discipline, so the result integrates like any real ODE system.
LayerSystem expand_to_layers(
    const darboux::PolyVectorField& vf, AlgebraCtx ctx,
    const std::map<SymbolId, Multivector<Rational>>& constants = {});

/// True when every equation's monomials only reference unknowns whose words
/// are subsets of the equation's own word.
bool verify_triangular(const LayerSystem& sys);

} // namespace susyode::solve
