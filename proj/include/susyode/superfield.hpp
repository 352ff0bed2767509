#pragma once

#include <map>
#include <string>
#include <vector>

#include "susyode/algebra.hpp"
#include "susyode/poly.hpp"

namespace susyode::superspace {

using grassmann::Word;
using grassmann::word_length;
using grassmann::merge_sign;
using sym::GradedPoly;
using sym::SymbolId;
using sym::SymbolTable;

/// Systematic component name for the theta-subset S of a superfield.
/// Stems follow the component's parity (x/chi for even, xi/psi for odd);
/// theta indices are spelled out only at intermediate levels, and the
/// superfield's trailing tag is appended: an even N=2 field "X1" expands to
/// x1, xi1_1, xi2_1, chi1.
std::string component_name(const std::string& field, Parity field_parity, int n_theta, Word subset);

/// Declaration of one superfield: parity, number of thetas, and the
/// component symbol for every theta-subset (indexed by subset word).
struct SuperfieldDecl {
    std::string name;
    Parity parity = Parity::Even;
    int n_theta = 1;
    std::vector<SymbolId> comp; // size 2^n_theta

    SymbolId component(Word subset) const { return comp.at(subset); }
    Parity component_parity(Word subset) const {
        return (word_length(subset) & 1) ? flip(parity) : parity;
    }
};

/// Declares all 2^N component symbols of a superfield in graded subset order.
SuperfieldDecl declare_superfield(SymbolTable& table, const std::string& name, Parity parity,
                                  int n_theta);

/// Finite expansion over anticommuting thetas: a map from theta-subset words
/// to graded-polynomial coefficients, X = sum_S theta^S p_S with theta^S
/// written in ascending index order.
class ThetaPoly {
public:
    explicit ThetaPoly(int n_theta) : n_(n_theta) {
        if (n_theta < 0 || n_theta > grassmann::kMaxGenerators)
            throw Error("theta count out of range");
    }

    static ThetaPoly from_poly(int n_theta, GradedPoly p) {
        ThetaPoly t(n_theta);
        t.add(0, std::move(p));
        return t;
    }

    /// theta^i as a ThetaPoly, 1-based index.
    static ThetaPoly theta(int n_theta, int i) {
        ThetaPoly t(n_theta);
        t.check_index(i);
        t.add(Word(1) << (i - 1), GradedPoly::constant(Rational(1)));
        return t;
    }

    static ThetaPoly of_field(const SuperfieldDecl& f, const SymbolTable& table) {
        ThetaPoly t(f.n_theta);
        for (Word s = 0; s < f.comp.size(); ++s)
            t.add(s, GradedPoly::symbol(table, f.comp[s]));
        return t;
    }

    int n_theta() const { return n_; }
    bool is_zero() const { return parts_.empty(); }
    const std::map<Word, GradedPoly>& parts() const { return parts_; }

    GradedPoly coeff(Word subset) const {
        auto it = parts_.find(subset);
        return it == parts_.end() ? GradedPoly() : it->second;
    }

    void add(Word subset, GradedPoly p) {
        if (subset >= (Word(1) << n_)) throw Error("theta subset outside field");
        if (p.is_zero()) return;
        auto it = parts_.find(subset);
        if (it == parts_.end()) {
            parts_.emplace(subset, std::move(p));
        } else {
            it->second += p;
            if (it->second.is_zero()) parts_.erase(it);
        }
    }

    ThetaPoly operator-() const {
        ThetaPoly out(n_);
        for (const auto& [s, p] : parts_) out.parts_.emplace(s, -p);
        return out;
    }

    ThetaPoly& operator+=(const ThetaPoly& rhs) {
        check_same(rhs);
        for (const auto& [s, p] : rhs.parts_) add(s, p);
        return *this;
    }
    ThetaPoly& operator-=(const ThetaPoly& rhs) {
        check_same(rhs);
        for (const auto& [s, p] : rhs.parts_) add(s, -p);
        return *this;
    }
    friend ThetaPoly operator+(ThetaPoly a, const ThetaPoly& b) { return a += b; }
    friend ThetaPoly operator-(ThetaPoly a, const ThetaPoly& b) { return a -= b; }

    /// (theta^S p)(theta^T q) = (-1)^{|p||T|} sign(S,T) theta^{S u T} p q,
    /// applied monomial-parity-wise via the even/odd split of p.
    friend ThetaPoly operator*(const ThetaPoly& a, const ThetaPoly& b) {
        a.check_same(b);
        ThetaPoly out(a.n_);
        for (const auto& [s, p] : a.parts_) {
            GradedPoly pe = p.even_part(), po = p.odd_part();
            for (const auto& [t, q] : b.parts_) {
                if (s & t) continue;
                int ms = merge_sign(s, t);
                GradedPoly coeff = pe * q;
                if (word_length(t) & 1)
                    coeff -= po * q;
                else
                    coeff += po * q;
                out.add(s | t, ms < 0 ? -coeff : coeff);
            }
        }
        return out;
    }

    ThetaPoly scaled(const Rational& c) const {
        ThetaPoly out(n_);
        for (const auto& [s, p] : parts_) out.add(s, p.scaled(c));
        return out;
    }

    bool operator==(const ThetaPoly& rhs) const { return n_ == rhs.n_ && parts_ == rhs.parts_; }

    ThetaPoly dt(const SymbolTable& table, int order = 1) const {
        ThetaPoly out(n_);
        for (const auto& [s, p] : parts_) out.add(s, p.time_derivative(table, order));
        return out;
    }

    /// Left partial derivative with respect to theta^i.
    ThetaPoly d_theta(int i) const {
        check_index(i);
        Word bit = Word(1) << (i - 1);
        ThetaPoly out(n_);
        for (const auto& [s, p] : parts_) {
            if (!(s & bit)) continue;
            int before = word_length(s & (bit - 1));
            out.add(s & ~bit, (before & 1) ? -p : p);
        }
        return out;
    }

    /// Left multiplication by theta^i.
    ThetaPoly theta_mul(int i) const {
        check_index(i);
        Word bit = Word(1) << (i - 1);
        ThetaPoly out(n_);
        for (const auto& [s, p] : parts_) {
            if (s & bit) continue;
            out.add(s | bit, merge_sign(bit, s) < 0 ? -p : p);
        }
        return out;
    }

    /// Q_i = d/d theta^i + theta^i d/dt.
    ThetaPoly applyQ(const SymbolTable& table, int i) const {
        return d_theta(i) + dt(table).theta_mul(i);
    }

    /// D_i = d/d theta^i - theta^i d/dt.
    ThetaPoly applyD(const SymbolTable& table, int i) const {
        return d_theta(i) - dt(table).theta_mul(i);
    }

    ThetaPoly applyQsum(const SymbolTable& table) const {
        ThetaPoly out(n_);
        for (int i = 1; i <= n_; ++i) out += applyQ(table, i);
        return out;
    }

    ThetaPoly applyDsum(const SymbolTable& table) const {
        ThetaPoly out(n_);
        for (int i = 1; i <= n_; ++i) out += applyD(table, i);
        return out;
    }

    /// Every coefficient must have a definite parity: the one of theta^S
    /// relative to the given total parity. Zero passes.
    bool homogeneous(Parity total) const {
        for (const auto& [s, p] : parts_) {
            Parity want = (word_length(s) & 1) ? flip(total) : total;
            if (p.parity() != want) return false; // stored parts are never zero
        }
        return true;
    }

private:
    void check_same(const ThetaPoly& rhs) const {
        if (n_ != rhs.n_) throw ContextMismatch("theta expansions have different N");
    }
    void check_index(int i) const {
        if (i < 1 || i > n_) throw Error("theta index " + std::to_string(i) + " out of range for N=" + std::to_string(n_));
    }

    int n_;
    std::map<Word, GradedPoly> parts_;
};

} // namespace susyode::superspace
