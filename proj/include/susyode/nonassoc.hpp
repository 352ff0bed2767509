#pragma once

#include <optional>
#include <string>
#include <vector>

#include "susyode/algebra.hpp"
#include "susyode/component.hpp"
#include "susyode/poly.hpp"

namespace susyode::nonassoc {

using grassmann::AlgebraCtx;
using grassmann::Multivector;
using sym::GradedPoly;
using sym::SymbolId;
using sym::SymbolTable;

/// A homogeneous quadratic flow dv/dt = Q(v) including the auxiliary even
/// coordinate u (du/dt = 0) introduced by the embedding.
struct QuadraticMap {
    SymbolTable table;
    std::vector<SymbolId> coords; // u is the last entry
    std::vector<GradedPoly> rhs;
    SymbolId u;
};

/// Embeds a polynomial system of degree at most two into a homogeneous
/// quadratic one: every monomial of degree d in the coordinates is padded
/// with u^(2-d), and u itself joins the flow with du/dt = 0. On u = 1 the
/// embedded flow restricts to the original one. Cubic or higher terms throw.
QuadraticMap homogenize(const SymbolTable& table, std::vector<SymbolId> coords,
                        std::vector<GradedPoly> rhs,
                        const std::string& u_name = "u");

/// The same embedding for a first-order component system.
QuadraticMap homogenize(const superspace::ComponentSystem& sys,
                        const std::string& u_name = "u");

/// The commutative (generally nonassociative) product obtained by polarizing
/// the quadratic map: B(X;Y) = (Q(X+Y) - Q(X) - Q(Y))/2. The forms live on a
/// doubled symbol table whose second-argument coordinates carry a "_y" tag.
class BilinearProduct {
public:
    const SymbolTable& table() const { return table_; }
    const std::vector<SymbolId>& coords() const { return coords_; }
    const std::vector<SymbolId>& coords_y() const { return coords_y_; }
    const std::vector<GradedPoly>& forms() const { return forms_; }

    /// Substitute polynomial arguments (given in coordinate order) into the
    /// two slots. Chained calls express words like B(B(X,Y),Z) symbolically.
    std::vector<GradedPoly> apply(const std::vector<GradedPoly>& a,
                                  const std::vector<GradedPoly>& b) const;

    /// Evaluate on Grassmann-valued points.
    std::vector<Multivector<Rational>> apply(
        const std::vector<Multivector<Rational>>& a,
        const std::vector<Multivector<Rational>>& b) const;

    /// Coordinate symbols (the identity argument for the first slot).
    std::vector<GradedPoly> identity() const;

private:
    friend BilinearProduct polarize(const QuadraticMap& map);
    SymbolTable table_;
    std::vector<SymbolId> coords_, coords_y_;
    std::vector<GradedPoly> forms_;
};

BilinearProduct polarize(const QuadraticMap& map);

/// Left powers X^1 = X, X^n = B(X, X^(n-1)), symbolically.
std::vector<GradedPoly> left_power(const BilinearProduct& product, int n);

/// Taylor coefficients of the flow through t^order via the product
/// recursion: c_0 = X, (k+1) c_(k+1) = sum_(i+j=k) B(c_i, c_j).
std::vector<std::vector<GradedPoly>> taylor_coefficients(
    const BilinearProduct& product, int order);

/// The same recursion from a concrete starting point.
std::vector<std::vector<Multivector<Rational>>> taylor_coefficients(
    const BilinearProduct& product, const std::vector<Multivector<Rational>>& x0,
    int order);

struct AssociatorWitness {
    std::vector<Multivector<Rational>> x, y, z;
    std::vector<Multivector<Rational>> left;  // B(B(x,y),z)
    std::vector<Multivector<Rational>> right; // B(x,B(y,z))
};

struct AlgebraReport {
    bool commutative = false;
    bool associative = true;
    long triples_checked = 0;
    std::optional<AssociatorWitness> witness;
};

/// Commutativity is decided symbolically. Associativity is probed on every
/// basis triple and then on seeded integer points with entries in [-3, 3];
/// odd coordinates are seeded on distinct Grassmann generators (three per
/// odd slot, one family per argument) so products cannot vanish by accident.
AlgebraReport algebra_report(const BilinearProduct& product, unsigned seed = 0,
                             int trials = 1000);

} // namespace susyode::nonassoc
