#include "susyode/nonassoc.hpp"

#include <algorithm>
#include <random>

#include "susyode/superfield.hpp"

namespace susyode::nonassoc {

namespace {

int coordinate_degree(const sym::Monomial& m, const std::vector<SymbolId>& coords) {
    auto is_coord = [&](SymbolId s) {
        return std::find(coords.begin(), coords.end(), s) != coords.end();
    };
    int d = 0;
    for (const auto& [s, e] : m.even)
        if (is_coord(s)) d += e;
    for (SymbolId s : m.odd)
        if (is_coord(s)) ++d;
    return d;
}

} // namespace

QuadraticMap homogenize(const SymbolTable& table, std::vector<SymbolId> coords,
                        std::vector<GradedPoly> rhs, const std::string& u_name) {
    if (coords.size() != rhs.size())
        throw Error("coordinate and right-hand side counts differ");
    QuadraticMap map;
    map.table = table;
    map.u = map.table.declare(superspace::fresh_name(map.table, u_name),
                              Parity::Even, sym::SymbolKind::Dynamic);
    GradedPoly u = GradedPoly::symbol(map.table, map.u);

    map.coords = std::move(coords);
    for (const GradedPoly& p : rhs) {
        GradedPoly padded;
        for (const auto& [m, c] : p.terms()) {
            int d = coordinate_degree(m, map.coords);
            if (d > 2)
                throw UnsupportedDegree("degree-" + std::to_string(d) +
                                        " term prevents a quadratic embedding");
            GradedPoly term;
            term.add_term(m, c);
            padded += term * sym::pow(u, 2 - d);
        }
        map.rhs.push_back(std::move(padded));
    }
    map.coords.push_back(map.u);
    map.rhs.push_back(GradedPoly());
    return map;
}

QuadraticMap homogenize(const superspace::ComponentSystem& sys,
                        const std::string& u_name) {
    for (const auto& eq : sys.equations)
        if (eq.order != 1)
            throw Error("quadratic embedding requires a first-order system");
    std::vector<SymbolId> coords;
    std::vector<GradedPoly> rhs;
    for (const auto& eq : sys.equations) {
        coords.push_back(eq.symbol);
        rhs.push_back(eq.rhs);
    }
    return homogenize(sys.table, std::move(coords), std::move(rhs), u_name);
}

BilinearProduct polarize(const QuadraticMap& map) {
    BilinearProduct b;
    b.table_ = map.table;
    b.coords_ = map.coords;
    for (SymbolId s : map.coords)
        b.coords_y_.push_back(b.table_.declare(b.table_.base_name(s) + "_y",
                                               b.table_.parity(s),
                                               sym::SymbolKind::Dynamic));

    std::map<SymbolId, GradedPoly> to_sum, to_primed;
    for (size_t i = 0; i < map.coords.size(); ++i) {
        GradedPoly xi = GradedPoly::symbol(b.table_, map.coords[i]);
        GradedPoly yi = GradedPoly::symbol(b.table_, b.coords_y_[i]);
        to_sum.emplace(map.coords[i], xi + yi);
        to_primed.emplace(map.coords[i], yi);
    }
    for (const GradedPoly& q : map.rhs) {
        GradedPoly both = q.substitute(b.table_, to_sum);
        GradedPoly second = q.substitute(b.table_, to_primed);
        b.forms_.push_back(rat(1, 2) * (both - q - second));
    }
    return b;
}

std::vector<GradedPoly> BilinearProduct::apply(
    const std::vector<GradedPoly>& a, const std::vector<GradedPoly>& b) const {
    if (a.size() != coords_.size() || b.size() != coords_.size())
        throw Error("argument arity does not match the coordinate count");
    std::map<SymbolId, GradedPoly> bind;
    for (size_t i = 0; i < coords_.size(); ++i) {
        bind.emplace(coords_[i], a[i]);
        bind.emplace(coords_y_[i], b[i]);
    }
    std::vector<GradedPoly> out;
    out.reserve(forms_.size());
    for (const GradedPoly& f : forms_) out.push_back(f.substitute(table_, bind));
    return out;
}

std::vector<Multivector<Rational>> BilinearProduct::apply(
    const std::vector<Multivector<Rational>>& a,
    const std::vector<Multivector<Rational>>& b) const {
    if (a.size() != coords_.size() || b.size() != coords_.size())
        throw Error("argument arity does not match the coordinate count");
    if (a.empty()) return {};
    AlgebraCtx ctx = a.front().ctx();
    std::map<SymbolId, Multivector<Rational>> vals;
    for (size_t i = 0; i < coords_.size(); ++i) {
        vals.emplace(coords_[i], a[i]);
        vals.emplace(coords_y_[i], b[i]);
    }
    auto conv = [ctx](const Rational& r) {
        return Multivector<Rational>::scalar(ctx, r);
    };
    std::vector<Multivector<Rational>> out;
    out.reserve(forms_.size());
    for (const GradedPoly& f : forms_)
        out.push_back(f.evaluate(vals, conv, table_));
    return out;
}

std::vector<GradedPoly> BilinearProduct::identity() const {
    std::vector<GradedPoly> id;
    id.reserve(coords_.size());
    for (SymbolId s : coords_) id.push_back(GradedPoly::symbol(table_, s));
    return id;
}

std::vector<GradedPoly> left_power(const BilinearProduct& product, int n) {
    if (n < 1) throw Error("left powers start at 1");
    std::vector<GradedPoly> acc = product.identity();
    for (int k = 1; k < n; ++k) acc = product.apply(product.identity(), acc);
    return acc;
}

std::vector<std::vector<GradedPoly>> taylor_coefficients(
    const BilinearProduct& product, int order) {
    std::vector<std::vector<GradedPoly>> c;
    c.push_back(product.identity());
    for (int k = 0; k < order; ++k) {
        std::vector<GradedPoly> next(product.coords().size());
        for (int i = 0; i <= k; ++i) {
            std::vector<GradedPoly> term = product.apply(c[i], c[k - i]);
            for (size_t m = 0; m < next.size(); ++m) next[m] += term[m];
        }
        const Rational inv = Rational(1) / Rational(k + 1);
        for (GradedPoly& p : next) p = inv * p;
        c.push_back(std::move(next));
    }
    return c;
}

std::vector<std::vector<Multivector<Rational>>> taylor_coefficients(
    const BilinearProduct& product, const std::vector<Multivector<Rational>>& x0,
    int order) {
    std::vector<std::vector<Multivector<Rational>>> c;
    c.push_back(x0);
    for (int k = 0; k < order; ++k) {
        std::vector<Multivector<Rational>> next = product.apply(c[0], c[k]);
        for (int i = 1; i <= k; ++i) {
            std::vector<Multivector<Rational>> term = product.apply(c[i], c[k - i]);
            for (size_t m = 0; m < next.size(); ++m) next[m] += term[m];
        }
        const Rational inv = Rational(1) / Rational(k + 1);
        for (auto& v : next) v = v.scaled(inv);
        c.push_back(std::move(next));
    }
    return c;
}

namespace {

/// Unit vector on one coordinate; odd slots use the generator family of the
/// given argument position (0, 1, or 2).
std::vector<Multivector<Rational>> basis_point(const BilinearProduct& b,
                                               AlgebraCtx ctx, size_t slot,
                                               int arg, int n_odd) {
    std::vector<Multivector<Rational>> v;
    int odd_seen = 0;
    for (size_t i = 0; i < b.coords().size(); ++i) {
        bool odd = b.table().parity(b.coords()[i]) == Parity::Odd;
        if (i == slot) {
            v.push_back(odd ? Multivector<Rational>::generator(
                                  ctx, arg * n_odd + odd_seen + 1)
                            : Multivector<Rational>::scalar(ctx, Rational(1)));
        } else {
            v.push_back(Multivector<Rational>::zero(ctx));
        }
        if (odd) ++odd_seen;
    }
    return v;
}

std::vector<Multivector<Rational>> random_point(const BilinearProduct& b,
                                                AlgebraCtx ctx, int arg,
                                                int n_odd, std::mt19937& rng) {
    std::uniform_int_distribution<int> dist(-3, 3);
    std::vector<Multivector<Rational>> v;
    int odd_seen = 0;
    for (size_t i = 0; i < b.coords().size(); ++i) {
        bool odd = b.table().parity(b.coords()[i]) == Parity::Odd;
        Rational c(dist(rng));
        if (odd) {
            v.push_back(Multivector<Rational>::generator(ctx, arg * n_odd + odd_seen + 1)
                            .scaled(c));
            ++odd_seen;
        } else {
            v.push_back(Multivector<Rational>::scalar(ctx, c));
        }
    }
    return v;
}

} // namespace

AlgebraReport algebra_report(const BilinearProduct& product, unsigned seed,
                             int trials) {
    AlgebraReport report;

    // commutativity, decided once and symbolically: swap the argument slots
    std::map<SymbolId, GradedPoly> swap;
    for (size_t i = 0; i < product.coords().size(); ++i) {
        swap.emplace(product.coords()[i],
                     GradedPoly::symbol(product.table(), product.coords_y()[i]));
        swap.emplace(product.coords_y()[i],
                     GradedPoly::symbol(product.table(), product.coords()[i]));
    }
    report.commutative = true;
    for (const GradedPoly& f : product.forms())
        if (!(f.substitute(product.table(), swap) == f)) report.commutative = false;

    int n_odd = 0;
    for (SymbolId s : product.coords())
        if (product.table().parity(s) == Parity::Odd) ++n_odd;
    AlgebraCtx ctx(std::max(1, 3 * n_odd));

    auto probe = [&](const std::vector<Multivector<Rational>>& x,
                     const std::vector<Multivector<Rational>>& y,
                     const std::vector<Multivector<Rational>>& z) {
        ++report.triples_checked;
        auto left = product.apply(product.apply(x, y), z);
        auto right = product.apply(x, product.apply(y, z));
        if (left != right) {
            report.associative = false;
            report.witness = AssociatorWitness{x, y, z, left, right};
        }
        return report.associative;
    };

    size_t n = product.coords().size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                if (!probe(basis_point(product, ctx, i, 0, n_odd),
                           basis_point(product, ctx, j, 1, n_odd),
                           basis_point(product, ctx, k, 2, n_odd)))
                    return report;

    std::mt19937 rng(seed);
    for (int trial = 0; trial < trials; ++trial)
        if (!probe(random_point(product, ctx, 0, n_odd, rng),
                   random_point(product, ctx, 1, n_odd, rng),
                   random_point(product, ctx, 2, n_odd, rng)))
            return report;
    return report;
}

} // namespace susyode::nonassoc
