#pragma once

#include <map>
#include <vector>

#include "susyode/algebra.hpp"
#include "susyode/darboux.hpp"

namespace susyode::solve {

using grassmann::AlgebraCtx;
using grassmann::Multivector;
using sym::SymbolId;

/// Polynomial in t with exact Grassmann-valued coefficients.
class TPoly {
public:
    using MRat = Multivector<Rational>;
    using Terms = std::map<int, MRat>;

    explicit TPoly(AlgebraCtx ctx) : ctx_(ctx) {}

    static TPoly constant(MRat v) {
        TPoly p(v.ctx());
        p.add_term(0, std::move(v));
        return p;
    }

    const AlgebraCtx& ctx() const { return ctx_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    MRat coefficient(int k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? MRat::zero(ctx_) : it->second;
    }

    friend TPoly operator+(const TPoly& a, const TPoly& b) {
        a.check(b);
        TPoly p = a;
        for (const auto& [k, c] : b.terms_) p.add_term(k, c);
        return p;
    }

    friend TPoly operator-(const TPoly& a, const TPoly& b) {
        a.check(b);
        TPoly p = a;
        for (const auto& [k, c] : b.terms_) p.add_term(k, -c);
        return p;
    }

    friend TPoly operator*(const TPoly& a, const TPoly& b) {
        a.check(b);
        TPoly p(a.ctx_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) p.add_term(ka + kb, ca * cb);
        return p;
    }

    bool operator==(const TPoly& rhs) const {
        return ctx_ == rhs.ctx_ && terms_ == rhs.terms_;
    }

    /// Antiderivative vanishing at t = 0.
    TPoly integral() const {
        TPoly p(ctx_);
        for (const auto& [k, c] : terms_)
            p.add_term(k + 1, c.scaled(Rational(1) / Rational(k + 1)));
        return p;
    }

    TPoly truncated(int max_degree) const {
        TPoly p(ctx_);
        for (const auto& [k, c] : terms_)
            if (k <= max_degree) p.add_term(k, c);
        return p;
    }

    MRat evaluate(const Rational& t) const {
        MRat acc = MRat::zero(ctx_);
        for (const auto& [k, c] : terms_) acc += c.scaled(rat_pow(t, k));
        return acc;
    }

    void add_term(int k, MRat c) {
        if (c.is_zero()) {
            return;
        }
        auto [it, fresh] = terms_.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

private:
    void check(const TPoly& rhs) const {
        if (!(ctx_ == rhs.ctx_))
            throw ContextMismatch("series belong to different algebra contexts");
    }

    AlgebraCtx ctx_;
    Terms terms_;
};

/// Successive-approximation passes v <- v0 + integral of P(v), starting from
/// the constant initial data. Returns one t-polynomial per state, in state
/// order. After a passes the result matches the exact flow through degree a.
std::vector<TPoly> picard_iterate(
    const darboux::PolyVectorField& vf,
    const std::map<SymbolId, Multivector<Rational>>& initial, int passes,
    const std::map<SymbolId, Multivector<Rational>>& constants = {});

} // namespace susyode::solve
