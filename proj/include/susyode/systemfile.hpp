#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "susyode/closedform.hpp"
#include "susyode/component.hpp"
#include "susyode/darboux.hpp"
#include "susyode/layers.hpp"

namespace susyode::io {

using grassmann::Multivector;
using sym::GradedPoly;
using sym::SymbolId;
using sym::SymbolTable;

struct Pos {
    int line = 0;
    int column = 0;
};

/// Source-level expression tree shared by the four dialects of the system
/// file: superfield equations, constant values, first-integral candidates
/// and closed-form seeds. Names stay unresolved so the tree renders back to
/// the text it came from; lowering resolves them against the built system.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind {
        Number,   // value
        Ref,      // name (field, constant or component, dialect-dependent)
        Theta,    // theta<index>
        Gen,      // e<index>, a Grassmann generator in value dialects
        TVar,     // the time variable of a closed-form seed
        Op,       // dt/dt^k/D/D<i>/Q/Q<i> applied to kids[0]
        Exp,      // exp(kids[0]) in integral expressions
        Sum,      // kids joined by +/-
        Product,  // kids joined by *
        Power,    // kids[0] ^ index
        Quotient, // kids[0] / kids[1]
        Neg       // -kids[0], for terms with no numeric factor to absorb the sign
    };

    Kind kind = Kind::Number;
    Rational value;                        // Number
    std::string name;                      // Ref
    int index = 0;                         // Theta/Gen index, Power exponent, Op order/index
    superspace::OpKind op = superspace::OpKind::Dt; // Op
    std::vector<ExprPtr> kids;
    Pos pos;

    static ExprPtr number(Rational v, Pos p = {});
    static ExprPtr ref(std::string name, Pos p = {});
    static ExprPtr theta(int i, Pos p = {});
    static ExprPtr gen(int i, Pos p = {});
    static ExprPtr tvar(Pos p = {});
    static ExprPtr apply(superspace::OpKind op, int index, ExprPtr arg, Pos p = {});
    static ExprPtr exp(ExprPtr arg, Pos p = {});
    static ExprPtr sum(std::vector<ExprPtr> kids);
    static ExprPtr product(std::vector<ExprPtr> kids);
    static ExprPtr power(ExprPtr base, int n);
    static ExprPtr quotient(ExprPtr num, ExprPtr den);
    static ExprPtr neg(ExprPtr arg);

    /// Folds the sign into a leading numeric factor when there is one,
    /// distributes over quotients, and wraps everything else in Neg.
    static ExprPtr negate(const ExprPtr& e);
};

bool equal(const ExprPtr& a, const ExprPtr& b);
std::string render(const ExprPtr& e);

struct ConstantDecl {
    std::string name;
    Parity parity = Parity::Even;
    ExprPtr value; // null for a symbolic parameter; even constants only
    Pos pos;
};

struct FieldDecl {
    std::string name;
    Parity parity = Parity::Even;
    int n_theta = 1;
    Pos pos;
};

struct EquationDecl {
    std::string field;
    int order = 1;
    ExprPtr rhs;
    Pos pos;
};

/// One `init`/`seed` assignment in the [solve] section. order > 0 names a
/// derivative state `dt^order(name)` of a higher-order equation.
struct ValueDecl {
    std::string name; // component or constant
    int order = 0;
    ExprPtr value;
    Pos pos;
};

struct SolveSettings {
    bool present = false;
    std::optional<Rational> t0, t_end, h;
    std::vector<ValueDecl> init;  // Grassmann initial/constant values
    std::vector<ValueDecl> seeds; // closed-form assignments in t
};

/// Parsed, name-checked image of one .susy file. Expressions stay as parse
/// trees; build_system lowers them onto the symbolic modules.
struct SystemFile {
    int algebra_l = 4; // [algebra] L
    std::vector<ConstantDecl> constants;
    std::vector<FieldDecl> fields;
    std::vector<EquationDecl> equations;
    std::vector<ExprPtr> integrals;
    SolveSettings solve;
};

bool equal(const SystemFile& a, const SystemFile& b);

/// Parses the sectioned text format. Superfield-level names (fields,
/// constants, theta indices) are validated here with positions; component
/// names in [integrals] and [solve] are validated by build_system, which
/// reports them with their recorded positions.
SystemFile parse_system(const std::string& text);

/// Canonical text: fixed section order, one space around every operator,
/// rationals in lowest terms. render(parse_system(text)) is a fixed point:
/// parsing it again gives an equal SystemFile and identical bytes.
std::string render(const SystemFile& file);

/// A first-integral candidate lowered to component level. A superfield-level
/// candidate contributes one part per theta component, all of which must be
/// conserved; a component-level candidate is a single (f/g)exp(h) part.
struct BuiltIntegral {
    std::string source;
    std::vector<darboux::FirstIntegralExpr> parts;
};

/// The system file lowered onto the symbolic modules.
struct BuiltSystem {
    int algebra_l = 4;
    superspace::ComponentSystem sys;
    std::vector<BuiltIntegral> integrals;
    std::optional<Rational> t0, t_end, h;
    std::map<SymbolId, Multivector<Rational>> init;      // dynamic components
    std::map<SymbolId, Multivector<Rational>> constants; // symbolic constants
    std::map<SymbolId, solve::LaurentPoly> seeds;
};

BuiltSystem build_system(const SystemFile& file);

/// Lowers a component-level expression (sums, products, powers, dt^k(...) of
/// component symbols and constants) to a graded polynomial over sys.table.
GradedPoly lower_component_poly(const superspace::ComponentSystem& sys, const ExprPtr& e);

/// Lowers a component-level candidate `f / g * exp(h)` (each piece optional).
darboux::FirstIntegralExpr lower_integral(const superspace::ComponentSystem& sys,
                                          const ExprPtr& e);

/// Parses one expression in the component dialect (used by CLI flags).
ExprPtr parse_component_expr(const std::string& text);

} // namespace susyode::io
