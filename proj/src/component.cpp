#include "susyode/component.hpp"

#include <algorithm>

namespace susyode::superspace {

using sym::base_symbol;
using sym::derivative_order;

GradedPoly reduce_on_shell(const ComponentSystem& sys, const SymbolTable& table, GradedPoly p,
                           int max_passes) {
    for (int pass = 0; pass < max_passes; ++pass) {
        std::map<SymbolId, GradedPoly> bind;
        for (SymbolId s : p.symbols()) {
            int m = derivative_order(s);
            if (m == 0) continue;
            const ComponentEquation* eq = sys.equation_for(base_symbol(s));
            if (!eq || m < eq->order) continue;
            bind.emplace(s, eq->rhs.time_derivative(table, m - eq->order));
        }
        if (bind.empty()) return p;
        p = p.substitute(table, bind);
    }
    throw ClosureFailure("derivative symbols persist after " + std::to_string(max_passes) +
                         " substitution passes");
}

GradedPoly ComponentSystem::reduce_on_shell(const GradedPoly& p, int max_passes) const {
    return superspace::reduce_on_shell(*this, table, p, max_passes);
}

std::string render(const ComponentSystem& sys) {
    std::string out;
    for (const auto& eq : sys.equations) {
        out += sys.table.name(sym::derivative(eq.symbol, eq.order));
        out += " = ";
        out += eq.rhs.to_string(sys.table);
        out += "\n";
    }
    return out;
}

SystemBuilder::SystemBuilder(int n_theta) {
    if (n_theta < 1 || n_theta > grassmann::kMaxGenerators)
        throw Error("theta count out of range");
    sys_.n_theta = n_theta;
}

int SystemBuilder::add_field(const std::string& name, Parity parity) {
    sys_.fields.push_back(declare_superfield(sys_.table, name, parity, sys_.n_theta));
    int idx = static_cast<int>(sys_.fields.size()) - 1;
    const auto& f = sys_.fields.back();
    for (Word s = 0; s < f.comp.size(); ++s)
        sys_.component_of.emplace(f.comp[s], std::make_pair(idx, s));
    return idx;
}

SymbolId SystemBuilder::add_constant(const std::string& name, Parity parity) {
    SymbolId s = sys_.table.declare(name, parity, SymbolKind::Constant);
    sys_.constants.push_back(s);
    return s;
}

SymbolId SystemBuilder::add_constant(const std::string& name, const Rational& value) {
    SymbolId s = add_constant(name, Parity::Even);
    sys_.folded.emplace(s, value);
    return s;
}

int SystemBuilder::field_index(const std::string& name) const {
    for (size_t i = 0; i < sys_.fields.size(); ++i)
        if (sys_.fields[i].name == name) return static_cast<int>(i);
    throw Error("undeclared superfield: " + name);
}

void SystemBuilder::add_equation(SuperExprPtr lhs, SuperExprPtr rhs) {
    if (!lhs || lhs->kind != SuperExpr::Kind::Op || lhs->op != OpKind::Dt ||
        lhs->kids[0]->kind != SuperExpr::Kind::Field)
        throw Error("equation left side must be dt^k of a superfield");
    eqs_.emplace_back(std::move(lhs), std::move(rhs));
}

void SystemBuilder::add_equation(int field, int order, SuperExprPtr rhs) {
    add_equation(SuperExpr::apply(OpKind::Dt, order, SuperExpr::field(field)), std::move(rhs));
}

namespace {

std::vector<Word> graded_subsets(int n) {
    std::vector<Word> words;
    for (Word s = 0; s < (Word(1) << n); ++s) words.push_back(s);
    std::sort(words.begin(), words.end(), grassmann::word_less);
    return words;
}

} // namespace

ComponentSystem SystemBuilder::build() const {
    ComponentSystem sys = sys_;
    ExpandCtx ectx{sys.n_theta, &sys.fields, &sys.table, &sys.folded};

    // One superfield equation per field, expanded subset by subset.
    std::vector<std::pair<int, int>> defined(sys.fields.size(), {-1, 0}); // (eq index, order)
    std::vector<std::pair<int, ThetaPoly>> expanded; // (field, rhs expansion) per input equation
    for (const auto& [lhs, rhs] : eqs_) {
        int f = lhs->kids[0]->index;
        int order = lhs->index;
        if (order < 1) throw Error("equation order must be at least 1");
        if (defined.at(f).first >= 0)
            throw Error("superfield " + sys.fields[f].name + " defined twice");
        defined[f] = {static_cast<int>(expanded.size()), order};
        ThetaPoly r = theta_expand(rhs, ectx);
        if (!r.homogeneous(sys.fields[f].parity))
            throw ParityError("right side of the " + sys.fields[f].name +
                              " equation has mismatched parity");
        expanded.emplace_back(f, std::move(r));
    }
    for (size_t f = 0; f < sys.fields.size(); ++f)
        if (defined[f].first < 0)
            throw Error("no equation for superfield " + sys.fields[f].name);

    const auto subsets = graded_subsets(sys.n_theta);
    for (size_t f = 0; f < sys.fields.size(); ++f) {
        auto [idx, order] = defined[f];
        for (Word s : subsets)
            sys.equations.push_back(
                {sys.fields[f].comp[s], order, expanded[idx].second.coeff(s)});
    }

    // On-shell closure: replace derivative symbols at or above each variable's
    // defining order by derivatives of its right-hand side.
    const int max_passes = 10;
    for (int pass = 0;; ++pass) {
        bool changed = false;
        std::vector<ComponentEquation> snapshot = sys.equations;
        ComponentSystem view = sys; // equation_for over the snapshot
        view.equations = std::move(snapshot);
        for (auto& eq : sys.equations) {
            std::map<SymbolId, GradedPoly> bind;
            for (SymbolId s : eq.rhs.symbols()) {
                int m = derivative_order(s);
                if (m == 0) continue;
                const ComponentEquation* def = view.equation_for(base_symbol(s));
                if (!def || m < def->order) continue;
                bind.emplace(s, def->rhs.time_derivative(sys.table, m - def->order));
            }
            if (bind.empty()) continue;
            eq.rhs = eq.rhs.substitute(sys.table, bind);
            changed = true;
        }
        if (!changed) break;
        if (pass + 1 >= max_passes)
            throw ClosureFailure("system does not close after " + std::to_string(max_passes) +
                                 " substitution passes");
    }
    return sys;
}

std::map<SymbolId, GradedPoly> susy_variation(const ComponentSystem& sys,
                                              const SymbolTable& table, SymbolId eps,
                                              int generator) {
    std::map<SymbolId, GradedPoly> out;
    ThetaPoly epsf = ThetaPoly::from_poly(sys.n_theta, GradedPoly::symbol(table, eps));
    for (const auto& f : sys.fields) {
        ThetaPoly x = ThetaPoly::of_field(f, table);
        ThetaPoly qx = generator == 0 ? x.applyQsum(table) : x.applyQ(table, generator);
        ThetaPoly delta = epsf * qx;
        for (Word s = 0; s < f.comp.size(); ++s) out.emplace(f.comp[s], delta.coeff(s));
    }
    return out;
}

SusyCheck check_susy_invariance(const ComponentSystem& sys, int generator) {
    SusyCheck check;
    check.table = sys.table;
    check.eps = check.table.declare(fresh_name(check.table, "eps"), Parity::Odd,
                                    SymbolKind::Constant);
    auto delta = susy_variation(sys, check.table, check.eps, generator);

    for (const auto& eq : sys.equations) {
        std::map<SymbolId, GradedPoly> bind;
        for (SymbolId s : eq.rhs.symbols()) {
            auto it = delta.find(base_symbol(s));
            if (it == delta.end()) continue; // constants are unaffected
            GradedPoly ds = it->second.time_derivative(check.table, derivative_order(s));
            bind.emplace(s, GradedPoly::symbol(check.table, s) + ds);
        }
        GradedPoly transformed = eq.rhs.substitute(check.table, bind);
        GradedPoly lhs_shift = delta.at(eq.symbol).time_derivative(check.table, eq.order);
        GradedPoly residual =
            reduce_on_shell(sys, check.table, transformed - eq.rhs - lhs_shift);
        if (!residual.is_zero()) check.invariant = false;
        check.residuals.emplace_back(eq.symbol, std::move(residual));
    }
    return check;
}

namespace {

void check_identity(AlgebraCheck& out, const std::string& label, const ThetaPoly& got,
                    const ThetaPoly& want) {
    ++out.checked;
    if (got == want) return;
    out.ok = false;
    out.failures.push_back(label);
}

} // namespace

AlgebraCheck operator_algebra_check(int n_theta) {
    AlgebraCheck out;
    SymbolTable table;
    SuperfieldDecl even = declare_superfield(table, "X1", Parity::Even, n_theta);
    SuperfieldDecl odd = declare_superfield(table, "Y2", Parity::Odd, n_theta);

    for (const auto& f : {even, odd}) {
        ThetaPoly x = ThetaPoly::of_field(f, table);
        ThetaPoly dtx = x.dt(table);
        ThetaPoly zero(n_theta);
        std::string on = " on " + f.name;
        for (int i = 1; i <= n_theta; ++i) {
            for (int j = 1; j <= n_theta; ++j) {
                std::string ij = std::to_string(i) + "," + std::to_string(j);
                ThetaPoly qq = x.applyQ(table, j).applyQ(table, i) +
                               x.applyQ(table, i).applyQ(table, j);
                check_identity(out, "{Q" + ij + "}" + on, qq,
                               i == j ? dtx.scaled(Rational(2)) : zero);
                ThetaPoly dd = x.applyD(table, j).applyD(table, i) +
                               x.applyD(table, i).applyD(table, j);
                check_identity(out, "{D" + ij + "}" + on, dd,
                               i == j ? dtx.scaled(Rational(-2)) : zero);
                ThetaPoly qd = x.applyD(table, j).applyQ(table, i) +
                               x.applyQ(table, i).applyD(table, j);
                check_identity(out, "{Q" + std::to_string(i) + ",D" + std::to_string(j) + "}" + on,
                               qd, zero);
            }
        }
        check_identity(out, "QQ" + on, x.applyQsum(table).applyQsum(table),
                       dtx.scaled(Rational(n_theta)));
        check_identity(out, "DD" + on, x.applyDsum(table).applyDsum(table),
                       dtx.scaled(Rational(-n_theta)));
        check_identity(out, "{Q,D}" + on,
                       x.applyDsum(table).applyQsum(table) + x.applyQsum(table).applyDsum(table),
                       zero);
    }
    return out;
}

FirstOrderSystem to_first_order(const ComponentSystem& sys) {
    FirstOrderSystem out;
    for (const auto& eq : sys.equations) {
        for (int j = 0; j < eq.order; ++j) {
            SymbolId s = sym::derivative(eq.symbol, j);
            out.states.push_back(s);
            out.rhs.push_back(j + 1 < eq.order
                                  ? GradedPoly::symbol(sys.table, sym::derivative(eq.symbol, j + 1))
                                  : eq.rhs);
        }
    }
    return out;
}

ComponentSystem restrict_to(const ComponentSystem& sys, const std::vector<SymbolId>& keep) {
    auto kept = [&](SymbolId base) {
        return std::find(keep.begin(), keep.end(), base) != keep.end();
    };
    ComponentSystem out = sys;
    out.equations.clear();
    for (const auto& eq : sys.equations) {
        if (!kept(eq.symbol)) continue;
        std::map<SymbolId, GradedPoly> bind;
        for (SymbolId s : eq.rhs.symbols()) {
            SymbolId b = base_symbol(s);
            if (sys.is_component(b) && !kept(b)) bind.emplace(s, GradedPoly());
        }
        ComponentEquation r = eq;
        r.rhs = eq.rhs.substitute(sys.table, bind);
        out.equations.push_back(std::move(r));
    }
    return out;
}

std::string fresh_name(const SymbolTable& table, const std::string& stem) {
    if (!table.has(stem)) return stem;
    for (int k = 2;; ++k) {
        std::string name = stem + "_" + std::to_string(k);
        if (!table.has(name)) return name;
    }
}

} // namespace susyode::superspace
