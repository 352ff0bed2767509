#pragma once

#include <map>
#include <vector>

#include "susyode/algebra.hpp"
#include "susyode/component.hpp"
#include "susyode/darboux.hpp"
#include "susyode/integrate.hpp"

namespace susyode::solve {

using grassmann::AlgebraCtx;
using grassmann::Multivector;
using sym::GradedPoly;
using sym::SymbolId;
using sym::SymbolTable;

/// Laurent polynomial in t with exact Grassmann-valued coefficients: a
/// closed-form candidate solution such as -1/t or -e1/t^2.
class LaurentPoly {
public:
    using MRat = Multivector<Rational>;
    using Terms = std::map<int, MRat>;

    explicit LaurentPoly(AlgebraCtx ctx) : ctx_(ctx) {}

    static LaurentPoly constant(MRat v) {
        LaurentPoly p(v.ctx());
        p.add_term(0, std::move(v));
        return p;
    }

    static LaurentPoly term(MRat coeff, int power) {
        LaurentPoly p(coeff.ctx());
        p.add_term(power, std::move(coeff));
        return p;
    }

    const AlgebraCtx& ctx() const { return ctx_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    MRat coefficient(int k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? MRat::zero(ctx_) : it->second;
    }

    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
        a.check(b);
        LaurentPoly p = a;
        for (const auto& [k, c] : b.terms_) p.add_term(k, c);
        return p;
    }

    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
        a.check(b);
        LaurentPoly p = a;
        for (const auto& [k, c] : b.terms_) p.add_term(k, -c);
        return p;
    }

    LaurentPoly operator-() const {
        LaurentPoly p(ctx_);
        for (const auto& [k, c] : terms_) p.add_term(k, -c);
        return p;
    }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        a.check(b);
        LaurentPoly p(a.ctx_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) p.add_term(ka + kb, ca * cb);
        return p;
    }

    bool operator==(const LaurentPoly& rhs) const {
        return ctx_ == rhs.ctx_ && terms_ == rhs.terms_;
    }

    /// d/dt, term by term.
    LaurentPoly dt() const {
        LaurentPoly p(ctx_);
        for (const auto& [k, c] : terms_)
            if (k != 0) p.add_term(k - 1, c.scaled(Rational(k)));
        return p;
    }

    MRat evaluate(const Rational& t) const {
        MRat acc = MRat::zero(ctx_);
        for (const auto& [k, c] : terms_) {
            Rational tk = k >= 0 ? rat_pow(t, k) : Rational(1) / rat_pow(t, -k);
            acc += c.scaled(tk);
        }
        return acc;
    }

    void add_term(int k, MRat c) {
        if (c.is_zero()) return;
        auto [it, fresh] = terms_.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

private:
    void check(const LaurentPoly& rhs) const {
        if (!(ctx_ == rhs.ctx_))
            throw ContextMismatch("series belong to different algebra contexts");
    }

    AlgebraCtx ctx_;
    Terms terms_;
};

/// Residuals d/dt v_i - P_i(v) of a candidate closed-form assignment, one
/// per state; all zero exactly when the assignment solves the system.
std::vector<LaurentPoly> closed_form_residual(
    const darboux::PolyVectorField& vf,
    const std::map<SymbolId, LaurentPoly>& assignment,
    const std::map<SymbolId, Multivector<Rational>>& constants = {});

bool verify_closed_form(const darboux::PolyVectorField& vf,
                        const std::map<SymbolId, LaurentPoly>& assignment,
                        const std::map<SymbolId, Multivector<Rational>>& constants = {});

/// Applies the supersymmetry variation to an exact solution of a first-order
/// component system: each component picks up its variation evaluated on the
/// solution, with the odd parameter set to the given generator of Lambda_L.
/// generator = 0 uses the summed charge, i >= 1 the i-th charge.
std::map<SymbolId, LaurentPoly> transform_solution(
    const superspace::ComponentSystem& sys,
    const std::map<SymbolId, LaurentPoly>& solution, int eps_generator,
    int generator = 0);

/// Pointwise numeric version of the same map: every sample of the trajectory
/// is shifted by the variation, evaluated on the sample itself with the odd
/// parameter set to e^(eps_generator).
Trajectory transform_trajectory(const LayerSystem& layers, const Trajectory& traj,
                                const superspace::ComponentSystem& sys,
                                int eps_generator, int generator = 0);

} // namespace susyode::solve
