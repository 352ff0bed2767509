#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "susyode/superfield.hpp"

namespace susyode::superspace {

enum class OpKind { Dt, Dsub, Qsub, Dsum, Qsum };

struct SuperExpr;
using SuperExprPtr = std::shared_ptr<const SuperExpr>;

/// Immutable superfield-level expression: sums and products of superfields,
/// scalars, declared constants, explicit theta factors and the superspace
/// operators dt, D_i, Q_i, D, Q.
struct SuperExpr {
    enum class Kind { Scalar, Constant, Field, Theta, Sum, Product, Power, Op };

    Kind kind = Kind::Scalar;
    Rational value;                  // Scalar
    SymbolId constant;               // Constant
    int index = 0;                   // Field: field index; Theta: 1-based theta index;
                                     // Power: exponent; Op: operator index or dt order
    OpKind op = OpKind::Dt;          // Op
    std::vector<SuperExprPtr> kids;  // Sum, Product; single child for Power/Op

    static SuperExprPtr scalar(Rational v) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Scalar;
        e->value = std::move(v);
        return e;
    }
    static SuperExprPtr constant_ref(SymbolId s) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Constant;
        e->constant = s;
        return e;
    }
    static SuperExprPtr field(int idx) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Field;
        e->index = idx;
        return e;
    }
    static SuperExprPtr theta(int i) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Theta;
        e->index = i;
        return e;
    }
    static SuperExprPtr sum(std::vector<SuperExprPtr> kids) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Sum;
        e->kids = std::move(kids);
        return e;
    }
    static SuperExprPtr product(std::vector<SuperExprPtr> kids) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Product;
        e->kids = std::move(kids);
        return e;
    }
    static SuperExprPtr power(SuperExprPtr base, int n) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Power;
        e->index = n;
        e->kids.push_back(std::move(base));
        return e;
    }
    static SuperExprPtr apply(OpKind op, int index, SuperExprPtr arg) {
        auto e = std::make_shared<SuperExpr>();
        e->kind = Kind::Op;
        e->op = op;
        e->index = index;
        e->kids.push_back(std::move(arg));
        return e;
    }
    static SuperExprPtr negate(const SuperExprPtr& a) {
        return product({scalar(Rational(-1)), a});
    }

    bool equals(const SuperExpr& rhs) const;
};

bool equal(const SuperExprPtr& a, const SuperExprPtr& b);

/// Evaluation context for expansion: the declared fields, the symbol table,
/// and the values of rational-valued constants (folded into coefficients).
struct ExpandCtx {
    int n_theta = 1;
    const std::vector<SuperfieldDecl>* fields = nullptr;
    const SymbolTable* table = nullptr;
    const std::map<SymbolId, Rational>* folded = nullptr; // may be null
};

/// Expand a superfield expression into its theta components.
ThetaPoly theta_expand(const SuperExprPtr& expr, const ExpandCtx& ctx);

/// X^n via the binomial bookkeeping over body and nilpotent part:
/// sum_k C(n,k) x^{n-k} W^k with W the soul of the theta expansion. For an
/// even field the coefficients line up with derivatives of F(x) = x^n; an
/// odd field squares to zero, so n >= 2 collapses to the zero expansion.
ThetaPoly expand_power(const SuperfieldDecl& f, const SymbolTable& table, int n);

} // namespace susyode::superspace
