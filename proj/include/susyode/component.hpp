#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "susyode/superexpr.hpp"

namespace susyode::superspace {

using sym::SymbolKind;

/// d^order(symbol)/dt^order = rhs, with rhs free of derivative symbols at or
/// above the defining order of any variable.
struct ComponentEquation {
    SymbolId symbol;
    int order = 1;
    GradedPoly rhs;
};

struct ComponentSystem {
    int n_theta = 1;
    SymbolTable table;
    std::vector<SuperfieldDecl> fields;
    std::vector<SymbolId> constants;
    std::map<SymbolId, Rational> folded;
    std::vector<ComponentEquation> equations; // field declaration order, then graded theta-subset order
    std::map<SymbolId, std::pair<int, Word>> component_of; // base symbol -> (field, subset)

    const ComponentEquation* equation_for(SymbolId base) const {
        for (const auto& e : equations)
            if (e.symbol == base) return &e;
        return nullptr;
    }

    bool is_component(SymbolId base) const { return component_of.count(base) != 0; }

    GradedPoly reduce_on_shell(const GradedPoly& p, int max_passes = 10) const;
};

/// Substitute defining equations for every derivative symbol of order >= the
/// defining order of its base until none remain; ClosureFailure if the bound
/// on passes is hit. The table may extend sys.table with extra constants.
GradedPoly reduce_on_shell(const ComponentSystem& sys, const SymbolTable& table, GradedPoly p,
                           int max_passes = 10);

/// Canonical listing, one `dt^k(name) = rhs` line per component equation.
std::string render(const ComponentSystem& sys);

/// Collects declarations and superfield-level equations, then theta-expands
/// and closes them into a ComponentSystem.
class SystemBuilder {
public:
    explicit SystemBuilder(int n_theta);

    int add_field(const std::string& name, Parity parity);
    SymbolId add_constant(const std::string& name, Parity parity);
    SymbolId add_constant(const std::string& name, const Rational& value); // folded, even

    /// lhs must be dt^k applied to a field reference.
    void add_equation(SuperExprPtr lhs, SuperExprPtr rhs);
    void add_equation(int field, int order, SuperExprPtr rhs);

    int n_theta() const { return sys_.n_theta; }
    const SymbolTable& table() const { return sys_.table; }
    const std::vector<SuperfieldDecl>& fields() const { return sys_.fields; }
    const SuperfieldDecl& field(int i) const { return sys_.fields.at(i); }
    int field_index(const std::string& name) const;

    ExpandCtx ctx() const {
        return ExpandCtx{sys_.n_theta, &sys_.fields, &sys_.table, &sys_.folded};
    }
    ThetaPoly expand(const SuperExprPtr& e) const { return theta_expand(e, ctx()); }

    ComponentSystem build() const;

private:
    ComponentSystem sys_;
    std::vector<std::pair<SuperExprPtr, SuperExprPtr>> eqs_;
};

/// First variation of every component under a supersymmetry generator:
/// component c_S of field X maps to the theta^S coefficient of eps * (Q X).
/// generator 0 is the summed Q, i >= 1 the i-th one. The table must contain
/// eps (an odd constant) alongside everything in sys.table.
std::map<SymbolId, GradedPoly> susy_variation(const ComponentSystem& sys,
                                              const SymbolTable& table, SymbolId eps,
                                              int generator);

struct SusyCheck {
    SymbolTable table; // sys table extended by the fresh odd constant
    SymbolId eps;
    std::vector<std::pair<SymbolId, GradedPoly>> residuals; // per equation, canonical order
    bool invariant = true;
};

/// Transforms every component by its first variation, reduces the transformed
/// equations on-shell and reports the O(eps) residual of each.
SusyCheck check_susy_invariance(const ComponentSystem& sys, int generator);

struct AlgebraCheck {
    bool ok = true;
    int checked = 0;
    std::vector<std::string> failures;
};

/// Verifies, on generic even and odd superfields, {Q_i,Q_j} = 2 delta_ij d/dt,
/// {D_i,D_j} = -2 delta_ij d/dt, {Q_i,D_j} = 0, and the summed-operator
/// relations QQ = N d/dt, DD = -N d/dt, {Q,D} = 0.
AlgebraCheck operator_algebra_check(int n_theta);

struct FirstOrderSystem {
    std::vector<SymbolId> states; // derivative symbols stand in for the extra variables
    std::vector<GradedPoly> rhs;  // dt(states[i]) = rhs[i]
};

FirstOrderSystem to_first_order(const ComponentSystem& sys);

/// Keep only the equations of the listed components, substituting zero for
/// every other component wherever it appears.
ComponentSystem restrict_to(const ComponentSystem& sys, const std::vector<SymbolId>& keep);

/// A name not yet in the table: stem, then stem_2, stem_3, ...
std::string fresh_name(const SymbolTable& table, const std::string& stem);

} // namespace susyode::superspace
