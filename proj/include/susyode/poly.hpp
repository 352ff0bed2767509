#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "susyode/errors.hpp"
#include "susyode/parity.hpp"
#include "susyode/rational.hpp"
#include "susyode/symbols.hpp"

namespace susyode::sym {

/// Even factors with exponents (sorted by id) and odd factors (strictly
/// ascending ids; the sign of any reordering is folded into the coefficient
/// by the polynomial arithmetic).
struct Monomial {
    std::vector<std::pair<SymbolId, int>> even;
    std::vector<SymbolId> odd;

    int total_degree() const {
        int d = static_cast<int>(odd.size());
        for (const auto& [s, e] : even) d += e;
        return d;
    }
    bool empty() const { return even.empty() && odd.empty(); }
    bool operator==(const Monomial&) const = default;
};

/// Canonical term order: total degree, then number of odd factors, then the
/// even factor sequence, then the odd factor sequence. Doubles as the map
/// ordering so iteration is already canonical.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = a.total_degree(), db = b.total_degree();
        if (da != db) return da < db;
        if (a.odd.size() != b.odd.size()) return a.odd.size() < b.odd.size();
        if (a.even != b.even) return a.even < b.even;
        return a.odd < b.odd;
    }
};

/// Merge two ascending odd-factor lists, counting the transpositions needed;
/// nullopt when a factor repeats (the term vanishes).
inline std::optional<std::pair<std::vector<SymbolId>, int>>
merge_odd_factors(const std::vector<SymbolId>& a, const std::vector<SymbolId>& b) {
    std::vector<SymbolId> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    long swaps = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return std::nullopt;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            swaps += static_cast<long>(a.size() - i);
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return std::make_pair(std::move(out), (swaps & 1) ? -1 : 1);
}

class GradedPoly {
public:
    using Terms = std::map<Monomial, Rational, MonomialOrder>;

    GradedPoly() = default; // zero

    static GradedPoly constant(Rational c) {
        GradedPoly p;
        p.add_term(Monomial{}, std::move(c));
        return p;
    }

    static GradedPoly symbol(const SymbolTable& table, SymbolId s) {
        GradedPoly p;
        Monomial m;
        if (table.parity(s) == Parity::Odd)
            m.odd.push_back(s);
        else
            m.even.push_back({s, 1});
        p.add_term(std::move(m), Rational(1));
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Parity parity() const {
        bool even = false, odd = false;
        for (const auto& [m, c] : terms_)
            (m.odd.size() & 1 ? odd : even) = true;
        if (even && odd) return Parity::Mixed;
        if (odd) return Parity::Odd;
        return Parity::Even;
    }

    GradedPoly even_part() const { return parity_part(false); }
    GradedPoly odd_part() const { return parity_part(true); }

    GradedPoly operator-() const {
        GradedPoly p;
        for (const auto& [m, c] : terms_) p.terms_.emplace(m, -c);
        return p;
    }

    GradedPoly& operator+=(const GradedPoly& rhs) {
        for (const auto& [m, c] : rhs.terms_) add_term(m, c);
        return *this;
    }
    GradedPoly& operator-=(const GradedPoly& rhs) {
        for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
        return *this;
    }
    friend GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
    friend GradedPoly operator-(GradedPoly a, const GradedPoly& b) { return a -= b; }

    friend GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
        GradedPoly out;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                auto merged = merge_odd_factors(ma.odd, mb.odd);
                if (!merged) continue;
                Monomial m;
                m.odd = std::move(merged->first);
                m.even = merge_even(ma.even, mb.even);
                Rational c = ca * cb;
                if (merged->second < 0) c = -c;
                out.add_term(std::move(m), std::move(c));
            }
        }
        return out;
    }

    GradedPoly scaled(const Rational& s) const {
        GradedPoly p;
        if (sgn(s) == 0) return p;
        for (const auto& [m, c] : terms_) p.terms_.emplace(m, c * s);
        return p;
    }

    bool operator==(const GradedPoly& rhs) const { return terms_ == rhs.terms_; }

    /// All distinct symbol ids appearing in the polynomial.
    std::vector<SymbolId> symbols() const {
        std::vector<SymbolId> out;
        for (const auto& [m, c] : terms_) {
            for (const auto& [s, e] : m.even) out.push_back(s);
            for (SymbolId s : m.odd) out.push_back(s);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool depends_on(SymbolId s) const {
        for (const auto& [m, c] : terms_) {
            for (const auto& [t, e] : m.even)
                if (t == s) return true;
            for (SymbolId t : m.odd)
                if (t == s) return true;
        }
        return false;
    }

    void add_term(Monomial m, Rational c) {
        if (sgn(c) == 0) return;
        auto [it, fresh] = terms_.emplace(std::move(m), c);
        if (!fresh) {
            it->second += c;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    // --- calculus -----------------------------------------------------------

    /// Left partial derivative with respect to s; graded Leibniz signs for odd
    /// s, ordinary rule for even s.
    GradedPoly partial(const SymbolTable& table, SymbolId s) const {
        GradedPoly out;
        bool odd = table.parity(s) == Parity::Odd;
        for (const auto& [m, c] : terms_) {
            if (odd) {
                for (size_t j = 0; j < m.odd.size(); ++j) {
                    if (m.odd[j] != s) continue;
                    Monomial r = m;
                    r.odd.erase(r.odd.begin() + j);
                    out.add_term(std::move(r), (j & 1) ? -c : c);
                    break;
                }
            } else {
                for (size_t j = 0; j < m.even.size(); ++j) {
                    if (m.even[j].first != s) continue;
                    Monomial r = m;
                    Rational coeff = c * r.even[j].second;
                    if (--r.even[j].second == 0) r.even.erase(r.even.begin() + j);
                    out.add_term(std::move(r), std::move(coeff));
                    break;
                }
            }
        }
        return out;
    }

    /// d/dt: each dynamic factor is replaced in place by its derivative
    /// symbol; constants are annihilated. Odd factors keep their position, so
    /// no signs appear (d(xi1*xi2) = dt(xi1)*xi2 + xi1*dt(xi2)).
    GradedPoly time_derivative(const SymbolTable& table) const {
        GradedPoly out;
        for (const auto& [m, c] : terms_) {
            for (size_t j = 0; j < m.even.size(); ++j) {
                auto [s, e] = m.even[j];
                if (table.kind(s) == SymbolKind::Constant) continue;
                GradedPoly term = GradedPoly::constant(c * e);
                for (size_t i = 0; i < m.even.size(); ++i) {
                    auto [t, f] = m.even[i];
                    int rep = static_cast<int>(i) == static_cast<int>(j) ? f - 1 : f;
                    for (int k = 0; k < rep; ++k) term = term * symbol(table, t);
                    if (i == j) term = term * symbol(table, derivative(t));
                }
                for (SymbolId o : m.odd) term = term * symbol(table, o);
                out += term;
            }
            for (size_t j = 0; j < m.odd.size(); ++j) {
                if (table.kind(m.odd[j]) == SymbolKind::Constant) continue;
                GradedPoly term = GradedPoly::constant(c);
                for (const auto& [t, f] : m.even)
                    for (int k = 0; k < f; ++k) term = term * symbol(table, t);
                for (size_t i = 0; i < m.odd.size(); ++i)
                    term = term * symbol(table, i == j ? derivative(m.odd[i]) : m.odd[i]);
                out += term;
            }
        }
        return out;
    }

    GradedPoly time_derivative(const SymbolTable& table, int order) const {
        GradedPoly p = *this;
        for (int i = 0; i < order; ++i) p = p.time_derivative(table);
        return p;
    }

    /// Simultaneous substitution. Each binding must have the parity of the
    /// symbol it replaces (zero passes for either parity).
    GradedPoly substitute(const SymbolTable& table, const std::map<SymbolId, GradedPoly>& bind) const {
        for (const auto& [s, p] : bind) {
            if (p.is_zero()) continue;
            Parity sp = table.parity(s);
            Parity pp = p.parity();
            if (pp != sp)
                throw ParityError("substitution for " + table.name(s) + " must be " +
                                  parity_name(sp) + ", got " + parity_name(pp));
        }
        GradedPoly out;
        for (const auto& [m, c] : terms_) {
            GradedPoly term = GradedPoly::constant(c);
            bool dead = false;
            for (const auto& [s, e] : m.even) {
                auto it = bind.find(s);
                const GradedPoly* rep = nullptr;
                GradedPoly sympoly;
                if (it != bind.end()) {
                    rep = &it->second;
                } else {
                    sympoly = symbol(table, s);
                    rep = &sympoly;
                }
                for (int k = 0; k < e && !dead; ++k) {
                    term = term * *rep;
                    dead = term.is_zero();
                }
                if (dead) break;
            }
            if (!dead) {
                for (SymbolId s : m.odd) {
                    auto it = bind.find(s);
                    term = term * (it != bind.end() ? it->second : symbol(table, s));
                    if (term.is_zero()) break;
                }
            }
            out += term;
        }
        return out;
    }

    /// Evaluate in any ring R, multiplying factors left to right.
    /// conv: Rational -> R. Missing assignments throw.
    template <class R, class Conv>
    R evaluate(const std::map<SymbolId, R>& vals, Conv conv, const SymbolTable& table) const {
        R acc = conv(Rational(0));
        for (const auto& [m, c] : terms_) {
            R term = conv(c);
            for (const auto& [s, e] : m.even)
                for (int k = 0; k < e; ++k) term = term * lookup(vals, s, table);
            for (SymbolId s : m.odd) term = term * lookup(vals, s, table);
            acc = acc + term;
        }
        return acc;
    }

    std::string to_string(const SymbolTable& table) const;

private:
    template <class R>
    static const R& lookup(const std::map<SymbolId, R>& vals, SymbolId s, const SymbolTable& table) {
        auto it = vals.find(s);
        if (it == vals.end()) throw Error("no value assigned to " + table.name(s));
        return it->second;
    }

    GradedPoly parity_part(bool odd) const {
        GradedPoly p;
        for (const auto& [m, c] : terms_)
            if ((m.odd.size() & 1) == static_cast<size_t>(odd)) p.terms_.emplace(m, c);
        return p;
    }

    static std::vector<std::pair<SymbolId, int>> merge_even(
        const std::vector<std::pair<SymbolId, int>>& a,
        const std::vector<std::pair<SymbolId, int>>& b) {
        std::vector<std::pair<SymbolId, int>> out;
        out.reserve(a.size() + b.size());
        size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].first == b[j].first) {
                out.push_back({a[i].first, a[i].second + b[j].second});
                ++i, ++j;
            } else if (a[i].first < b[j].first) {
                out.push_back(a[i++]);
            } else {
                out.push_back(b[j++]);
            }
        }
        while (i < a.size()) out.push_back(a[i++]);
        while (j < b.size()) out.push_back(b[j++]);
        return out;
    }

    Terms terms_;
};

inline GradedPoly operator*(const Rational& s, const GradedPoly& p) { return p.scaled(s); }

/// Power with a nonnegative exponent.
inline GradedPoly pow(const GradedPoly& p, int n) {
    GradedPoly acc = GradedPoly::constant(Rational(1));
    for (int i = 0; i < n; ++i) acc = acc * p;
    return acc;
}

} // namespace susyode::sym
