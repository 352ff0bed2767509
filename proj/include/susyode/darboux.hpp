#pragma once

#include <optional>
#include <vector>

#include "susyode/component.hpp"
#include "susyode/poly.hpp"
#include "susyode/symbols.hpp"

namespace susyode::darboux {

using sym::GradedPoly;
using sym::SymbolId;
using sym::SymbolTable;

/// Autonomous polynomial vector field d(vars[i])/dt = rhs[i] over a shared
/// symbol table. Symbols that are not listed in vars are constants of the
/// motion by fiat (declared constants, or parameters of the family).
struct PolyVectorField {
    SymbolTable table;
    std::vector<SymbolId> vars;
    std::vector<GradedPoly> rhs;
};

/// The first-order vector field of a component system, with derivative
/// symbols promoted to states for higher-order equations.
PolyVectorField field_of(const superspace::ComponentSystem& sys);

/// Derivative of f along the flow: sum_i rhs_i * (left partial of f by
/// vars_i). Agrees with the on-shell time derivative of f.
GradedPoly lie_derivative(const PolyVectorField& vf, const GradedPoly& f);

/// Checks the eigenpolynomial relation X(f) = kappa * f exactly.
bool verify_darboux(const PolyVectorField& vf, const GradedPoly& f,
                    const GradedPoly& kappa);

/// Searches for an even cofactor of total degree <= max_degree satisfying
/// X(f) = kappa*f, by exact rational elimination over all even candidate
/// monomials in the states and declared constants. Candidates are processed
/// in canonical monomial order and unconstrained coefficients are set to
/// zero, so the result is the unique minimal representative when one exists.
std::optional<GradedPoly> search_cofactor(const PolyVectorField& vf,
                                          const GradedPoly& f, int max_degree);

/// The expression (f/g) * exp(h).
struct FirstIntegralExpr {
    GradedPoly f;
    GradedPoly g = GradedPoly::constant(Rational(1));
    GradedPoly h; // zero by default
};

/// Residual g*X(f) - f*X(g) + f*g*X(h). It vanishes identically exactly when
/// (f/g)*exp(h) is constant along the flow, wherever g is invertible.
GradedPoly first_integral_residual(const PolyVectorField& vf,
                                   const FirstIntegralExpr& integral);

bool verify_first_integral(const PolyVectorField& vf,
                           const FirstIntegralExpr& integral);

} // namespace susyode::darboux
