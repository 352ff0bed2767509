#include "susyode/superexpr.hpp"

#include "susyode/errors.hpp"

namespace susyode::superspace {

bool SuperExpr::equals(const SuperExpr& rhs) const {
    if (kind != rhs.kind) return false;
    switch (kind) {
    case Kind::Scalar: return value == rhs.value;
    case Kind::Constant: return constant == rhs.constant;
    case Kind::Field:
    case Kind::Theta: return index == rhs.index;
    case Kind::Power:
        return index == rhs.index && equal(kids[0], rhs.kids[0]);
    case Kind::Op:
        return op == rhs.op && index == rhs.index && equal(kids[0], rhs.kids[0]);
    case Kind::Sum:
    case Kind::Product:
        if (kids.size() != rhs.kids.size()) return false;
        for (size_t i = 0; i < kids.size(); ++i)
            if (!equal(kids[i], rhs.kids[i])) return false;
        return true;
    }
    return false;
}

bool equal(const SuperExprPtr& a, const SuperExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->equals(*b);
}

ThetaPoly theta_expand(const SuperExprPtr& expr, const ExpandCtx& ctx) {
    if (!expr) throw Error("empty expression");
    const int n = ctx.n_theta;
    switch (expr->kind) {
    case SuperExpr::Kind::Scalar:
        return ThetaPoly::from_poly(n, GradedPoly::constant(expr->value));
    case SuperExpr::Kind::Constant: {
        if (ctx.folded) {
            auto it = ctx.folded->find(expr->constant);
            if (it != ctx.folded->end())
                return ThetaPoly::from_poly(n, GradedPoly::constant(it->second));
        }
        return ThetaPoly::from_poly(n, GradedPoly::symbol(*ctx.table, expr->constant));
    }
    case SuperExpr::Kind::Field:
        return ThetaPoly::of_field(ctx.fields->at(expr->index), *ctx.table);
    case SuperExpr::Kind::Theta:
        return ThetaPoly::theta(n, expr->index);
    case SuperExpr::Kind::Sum: {
        ThetaPoly out(n);
        for (const auto& k : expr->kids) out += theta_expand(k, ctx);
        return out;
    }
    case SuperExpr::Kind::Product: {
        ThetaPoly out = ThetaPoly::from_poly(n, GradedPoly::constant(Rational(1)));
        for (const auto& k : expr->kids) out = out * theta_expand(k, ctx);
        return out;
    }
    case SuperExpr::Kind::Power: {
        if (expr->index < 0) throw Error("negative power in superfield expression");
        ThetaPoly base = theta_expand(expr->kids[0], ctx);
        ThetaPoly out = ThetaPoly::from_poly(n, GradedPoly::constant(Rational(1)));
        for (int i = 0; i < expr->index; ++i) out = out * base;
        return out;
    }
    case SuperExpr::Kind::Op: {
        ThetaPoly arg = theta_expand(expr->kids[0], ctx);
        switch (expr->op) {
        case OpKind::Dt: return arg.dt(*ctx.table, expr->index);
        case OpKind::Dsub: return arg.applyD(*ctx.table, expr->index);
        case OpKind::Qsub: return arg.applyQ(*ctx.table, expr->index);
        case OpKind::Dsum: return arg.applyDsum(*ctx.table);
        case OpKind::Qsum: return arg.applyQsum(*ctx.table);
        }
        throw Error("unknown operator");
    }
    }
    throw Error("unknown expression node");
}

ThetaPoly expand_power(const SuperfieldDecl& f, const SymbolTable& table, int n) {
    if (n < 0) throw Error("negative power of a superfield");
    ThetaPoly unit = ThetaPoly::from_poly(f.n_theta, GradedPoly::constant(Rational(1)));
    if (n == 0) return unit;

    ThetaPoly full = ThetaPoly::of_field(f, table);
    if (f.parity == Parity::Odd)
        return n == 1 ? full : ThetaPoly(f.n_theta);

    // Body commutes with everything; the rest is nilpotent of index <= N+1,
    // so the binomial sum truncates after min(n, N) terms.
    GradedPoly body = full.coeff(0);
    ThetaPoly soul = full - ThetaPoly::from_poly(f.n_theta, body);

    ThetaPoly out(f.n_theta);
    ThetaPoly soul_pow = unit;
    for (int k = 0; k <= std::min(n, f.n_theta); ++k) {
        if (k > 0) soul_pow = soul_pow * soul;
        if (soul_pow.is_zero()) break;
        Rational c = binomial(n, k);
        GradedPoly scale = sym::pow(body, n - k).scaled(c);
        out += soul_pow * ThetaPoly::from_poly(f.n_theta, scale);
    }
    return out;
}

} // namespace susyode::superspace
