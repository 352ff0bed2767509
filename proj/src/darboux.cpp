#include "susyode/darboux.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace susyode::darboux {

using sym::Monomial;
using sym::MonomialOrder;

PolyVectorField field_of(const superspace::ComponentSystem& sys) {
    superspace::FirstOrderSystem fo = to_first_order(sys);
    return {sys.table, std::move(fo.states), std::move(fo.rhs)};
}

GradedPoly lie_derivative(const PolyVectorField& vf, const GradedPoly& f) {
    GradedPoly out;
    for (size_t i = 0; i < vf.vars.size(); ++i)
        out += vf.rhs[i] * f.partial(vf.table, vf.vars[i]);
    return out;
}

bool verify_darboux(const PolyVectorField& vf, const GradedPoly& f,
                    const GradedPoly& kappa) {
    return lie_derivative(vf, f) == kappa * f;
}

namespace {

/// All monomials of even parity and total degree <= max_degree in the given
/// symbols, as single-term polynomials in canonical monomial order.
std::vector<GradedPoly> candidate_monomials(const SymbolTable& table,
                                            const std::vector<SymbolId>& syms,
                                            int max_degree) {
    std::vector<GradedPoly> out;
    std::function<void(size_t, int, const GradedPoly&)> extend =
        [&](size_t i, int budget, const GradedPoly& cur) {
            if (i == syms.size()) {
                if (cur.parity() == Parity::Even) out.push_back(cur);
                return;
            }
            SymbolId s = syms[i];
            int cap = table.parity(s) == Parity::Odd ? std::min(1, budget) : budget;
            GradedPoly p = cur;
            for (int e = 0;; ++e) {
                extend(i + 1, budget - e, p);
                if (e == cap) break;
                p = p * GradedPoly::symbol(table, s);
            }
        };
    extend(0, max_degree, GradedPoly::constant(Rational(1)));
    std::sort(out.begin(), out.end(), [](const GradedPoly& a, const GradedPoly& b) {
        return MonomialOrder{}(a.terms().begin()->first, b.terms().begin()->first);
    });
    return out;
}

} // namespace

std::optional<GradedPoly> search_cofactor(const PolyVectorField& vf,
                                          const GradedPoly& f, int max_degree) {
    GradedPoly target = lie_derivative(vf, f);

    // Candidate cofactor monomials range over the states and every declared
    // constant (the parameters of the system).
    std::vector<SymbolId> syms = vf.vars;
    for (size_t base = 0; base < vf.table.size(); ++base) {
        SymbolId s = vf.table.at(base);
        if (vf.table.kind(s) == sym::SymbolKind::Constant) syms.push_back(s);
    }
    std::sort(syms.begin(), syms.end());
    syms.erase(std::unique(syms.begin(), syms.end()), syms.end());

    std::vector<GradedPoly> cands = candidate_monomials(vf.table, syms, max_degree);
    std::vector<GradedPoly> cols;
    cols.reserve(cands.size());
    for (const GradedPoly& m : cands) cols.push_back(m * f);

    // Row space: every monomial appearing in the target or any column.
    std::map<Monomial, size_t, MonomialOrder> row_of;
    auto intern = [&](const GradedPoly& p) {
        for (const auto& [m, c] : p.terms()) row_of.emplace(m, 0);
    };
    intern(target);
    for (const GradedPoly& col : cols) intern(col);
    size_t n_rows = 0;
    for (auto& [m, idx] : row_of) idx = n_rows++;

    size_t n_cols = cands.size();
    std::vector<std::vector<Rational>> a(n_rows, std::vector<Rational>(n_cols + 1, Rational(0)));
    for (size_t j = 0; j < n_cols; ++j)
        for (const auto& [m, c] : cols[j].terms()) a[row_of.at(m)][j] = c;
    for (const auto& [m, c] : target.terms()) a[row_of.at(m)][n_cols] = c;

    // Exact Gaussian elimination; columns are already in canonical monomial
    // order, so the first usable pivot keeps low-degree candidates.
    std::vector<long> pivot_row_of_col(n_cols, -1);
    size_t next_row = 0;
    for (size_t j = 0; j < n_cols && next_row < n_rows; ++j) {
        size_t p = next_row;
        while (p < n_rows && sgn(a[p][j]) == 0) ++p;
        if (p == n_rows) continue; // free column, coefficient stays zero
        std::swap(a[p], a[next_row]);
        const Rational inv = Rational(1) / a[next_row][j];
        for (size_t k = j; k <= n_cols; ++k) a[next_row][k] *= inv;
        for (size_t r = 0; r < n_rows; ++r) {
            if (r == next_row || sgn(a[r][j]) == 0) continue;
            const Rational factor = a[r][j];
            for (size_t k = j; k <= n_cols; ++k) a[r][k] -= factor * a[next_row][k];
        }
        pivot_row_of_col[j] = static_cast<long>(next_row++);
    }
    // Inconsistent system: a zeroed row with a nonzero right-hand side.
    for (size_t r = next_row; r < n_rows; ++r)
        if (sgn(a[r][n_cols]) != 0) return std::nullopt;

    GradedPoly kappa;
    for (size_t j = 0; j < n_cols; ++j) {
        if (pivot_row_of_col[j] < 0) continue;
        const Rational& c = a[static_cast<size_t>(pivot_row_of_col[j])][n_cols];
        if (sgn(c) != 0) kappa += c * cands[j];
    }
    if (!verify_darboux(vf, f, kappa)) return std::nullopt;
    return kappa;
}

GradedPoly first_integral_residual(const PolyVectorField& vf,
                                   const FirstIntegralExpr& integral) {
    const GradedPoly &f = integral.f, &g = integral.g, &h = integral.h;
    return g * lie_derivative(vf, f) - f * lie_derivative(vf, g) +
           f * g * lie_derivative(vf, h);
}

bool verify_first_integral(const PolyVectorField& vf,
                           const FirstIntegralExpr& integral) {
    return first_integral_residual(vf, integral).is_zero();
}

} // namespace susyode::darboux
