#include "susyode/systemfile.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "susyode/superexpr.hpp"

namespace susyode::io {

using superspace::OpKind;
using superspace::SuperExpr;
using superspace::SuperExprPtr;

// ---------------------------------------------------------------------------
// Expression nodes

namespace {

std::shared_ptr<Expr> make(Expr::Kind k, Pos p = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->pos = p;
    return e;
}

} // namespace

ExprPtr Expr::number(Rational v, Pos p) {
    auto e = make(Kind::Number, p);
    e->value = std::move(v);
    return e;
}

ExprPtr Expr::ref(std::string name, Pos p) {
    auto e = make(Kind::Ref, p);
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::theta(int i, Pos p) {
    auto e = make(Kind::Theta, p);
    e->index = i;
    return e;
}

ExprPtr Expr::gen(int i, Pos p) {
    auto e = make(Kind::Gen, p);
    e->index = i;
    return e;
}

ExprPtr Expr::tvar(Pos p) { return make(Kind::TVar, p); }

ExprPtr Expr::apply(OpKind op, int index, ExprPtr arg, Pos p) {
    auto e = make(Kind::Op, p);
    e->op = op;
    e->index = index;
    e->kids.push_back(std::move(arg));
    return e;
}

ExprPtr Expr::exp(ExprPtr arg, Pos p) {
    auto e = make(Kind::Exp, p);
    e->kids.push_back(std::move(arg));
    return e;
}

ExprPtr Expr::sum(std::vector<ExprPtr> kids) {
    if (kids.size() == 1) return kids.front();
    auto e = make(Kind::Sum, kids.empty() ? Pos{} : kids.front()->pos);
    e->kids = std::move(kids);
    return e;
}

ExprPtr Expr::product(std::vector<ExprPtr> kids) {
    if (kids.size() == 1) return kids.front();
    auto e = make(Kind::Product, kids.empty() ? Pos{} : kids.front()->pos);
    e->kids = std::move(kids);
    return e;
}

ExprPtr Expr::power(ExprPtr base, int n) {
    auto e = make(Kind::Power, base->pos);
    e->index = n;
    e->kids.push_back(std::move(base));
    return e;
}

ExprPtr Expr::quotient(ExprPtr num, ExprPtr den) {
    auto e = make(Kind::Quotient, num->pos);
    e->kids.push_back(std::move(num));
    e->kids.push_back(std::move(den));
    return e;
}

ExprPtr Expr::neg(ExprPtr arg) {
    auto e = make(Kind::Neg, arg->pos);
    e->kids.push_back(std::move(arg));
    return e;
}

ExprPtr Expr::negate(const ExprPtr& e) {
    switch (e->kind) {
        case Kind::Number:
            return number(-e->value, e->pos);
        case Kind::Product:
            if (e->kids.front()->kind == Kind::Number) {
                std::vector<ExprPtr> kids = e->kids;
                kids[0] = number(-kids[0]->value, kids[0]->pos);
                auto out = make(Kind::Product, e->pos);
                out->kids = std::move(kids);
                return out;
            }
            return neg(e);
        case Kind::Quotient:
            return quotient(negate(e->kids[0]), e->kids[1]);
        case Kind::Neg:
            return e->kids[0];
        default:
            return neg(e);
    }
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->kids.size() != b->kids.size()) return false;
    switch (a->kind) {
        case Expr::Kind::Number:
            if (a->value != b->value) return false;
            break;
        case Expr::Kind::Ref:
            if (a->name != b->name) return false;
            break;
        case Expr::Kind::Theta:
        case Expr::Kind::Gen:
        case Expr::Kind::Power:
            if (a->index != b->index) return false;
            break;
        case Expr::Kind::Op:
            if (a->op != b->op || a->index != b->index) return false;
            break;
        default:
            break;
    }
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string op_head(OpKind op, int index) {
    switch (op) {
        case OpKind::Dt:
            return index == 1 ? "dt" : "dt^" + std::to_string(index);
        case OpKind::Dsub:
            return "D" + std::to_string(index);
        case OpKind::Qsub:
            return "Q" + std::to_string(index);
        case OpKind::Dsum:
            return "D";
        case OpKind::Qsum:
            return "Q";
    }
    return "?";
}

bool negative_headed(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Neg:
            return true;
        case Expr::Kind::Number:
            return is_negative(e->value);
        case Expr::Kind::Product:
            return negative_headed(e->kids.front());
        case Expr::Kind::Quotient:
            return negative_headed(e->kids.front());
        default:
            return false;
    }
}

/// The term with its leading sign stripped; only valid when negative_headed.
ExprPtr strip_sign(const ExprPtr& e) { return Expr::negate(e); }

std::string render_node(const ExprPtr& e);

std::string parenthesized(const ExprPtr& e) { return "(" + render_node(e) + ")"; }

std::string render_product(const ExprPtr& e) {
    std::string out;
    for (size_t i = 0; i < e->kids.size(); ++i) {
        const ExprPtr& kid = e->kids[i];
        if (i > 0) {
            bool wedge = kid->kind == Expr::Kind::Gen &&
                         e->kids[i - 1]->kind == Expr::Kind::Gen;
            out += wedge ? "^" : "*";
        }
        bool parens = kid->kind == Expr::Kind::Sum || kid->kind == Expr::Kind::Neg ||
                      (i > 0 && kid->kind == Expr::Kind::Quotient) ||
                      (i > 0 && kid->kind == Expr::Kind::Number && is_negative(kid->value));
        out += parens ? parenthesized(kid) : render_node(kid);
    }
    return out;
}

std::string render_node(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Number:
            return to_string(e->value);
        case Expr::Kind::Ref:
            return e->name;
        case Expr::Kind::Theta:
            return "theta" + std::to_string(e->index);
        case Expr::Kind::Gen:
            return "e" + std::to_string(e->index);
        case Expr::Kind::TVar:
            return "t";
        case Expr::Kind::Op:
            return op_head(e->op, e->index) + parenthesized(e->kids[0]);
        case Expr::Kind::Exp:
            return "exp" + parenthesized(e->kids[0]);
        case Expr::Kind::Sum: {
            std::string out;
            for (size_t i = 0; i < e->kids.size(); ++i) {
                const ExprPtr& term = e->kids[i];
                bool negative = negative_headed(term);
                const ExprPtr body = negative ? strip_sign(term) : term;
                if (i == 0) {
                    if (negative) out += "-";
                } else {
                    out += negative ? " - " : " + ";
                }
                if (body->kind == Expr::Kind::Sum)
                    out += parenthesized(body);
                else
                    out += render_node(body);
            }
            return out;
        }
        case Expr::Kind::Product:
            return render_product(e);
        case Expr::Kind::Power: {
            const ExprPtr& base = e->kids[0];
            bool parens = base->kind == Expr::Kind::Sum ||
                          base->kind == Expr::Kind::Product ||
                          base->kind == Expr::Kind::Quotient ||
                          base->kind == Expr::Kind::Neg ||
                          (base->kind == Expr::Kind::Number &&
                           (is_negative(base->value) || base->value.get_den() != 1));
            return (parens ? parenthesized(base) : render_node(base)) + "^" +
                   std::to_string(e->index);
        }
        case Expr::Kind::Quotient: {
            const ExprPtr& num = e->kids[0];
            const ExprPtr& den = e->kids[1];
            bool num_parens = num->kind == Expr::Kind::Sum || num->kind == Expr::Kind::Neg;
            bool den_parens = den->kind == Expr::Kind::Sum ||
                              den->kind == Expr::Kind::Product ||
                              den->kind == Expr::Kind::Quotient ||
                              den->kind == Expr::Kind::Neg;
            return (num_parens ? parenthesized(num) : render_node(num)) + "/" +
                   (den_parens ? parenthesized(den) : render_node(den));
        }
        case Expr::Kind::Neg: {
            const ExprPtr& kid = e->kids[0];
            bool parens = kid->kind == Expr::Kind::Sum || kid->kind == Expr::Kind::Quotient;
            return "-" + (parens ? parenthesized(kid) : render_node(kid));
        }
    }
    return "?";
}

} // namespace

std::string render(const ExprPtr& e) { return render_node(e); }

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct Token {
    enum class Type { Ident, Number, Punct, End };
    Type type = Type::End;
    std::string text;
    Rational value;
    Pos pos;
};

Rational rational_from_parts(const std::string& num, const std::string& den, Pos pos) {
    if (den.empty()) return Rational(mpz_class(num));
    mpz_class d(den);
    if (d == 0) throw ParseError("zero denominator in rational literal", pos.line, pos.column);
    Rational r(mpz_class(num), d);
    r.canonicalize();
    return r;
}

Rational rational_from_decimal(const std::string& digits, const std::string& frac) {
    Rational r(mpz_class(digits + frac), mpz_class("1" + std::string(frac.size(), '0')));
    r.canonicalize();
    return r;
}

std::vector<Token> lex_line(const std::string& line, int line_no) {
    std::vector<Token> out;
    size_t i = 0;
    auto pos_at = [&](size_t k) { return Pos{line_no, static_cast<int>(k) + 1}; };
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') break;
        Pos pos = pos_at(i);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) ||
                                       line[j] == '_'))
                ++j;
            out.push_back({Token::Type::Ident, line.substr(i, j - i), Rational(), pos});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
            std::string digits = line.substr(i, j - i);
            Rational value;
            if (j < line.size() && line[j] == '.' && j + 1 < line.size() &&
                std::isdigit(static_cast<unsigned char>(line[j + 1]))) {
                size_t k = j + 1;
                while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k])))
                    ++k;
                value = rational_from_decimal(digits, line.substr(j + 1, k - j - 1));
                j = k;
            } else if (j < line.size() && line[j] == '/' && j + 1 < line.size() &&
                       std::isdigit(static_cast<unsigned char>(line[j + 1]))) {
                size_t k = j + 1;
                while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k])))
                    ++k;
                value = rational_from_parts(digits, line.substr(j + 1, k - j - 1), pos);
                j = k;
            } else {
                value = rational_from_parts(digits, "", pos);
            }
            out.push_back({Token::Type::Number, line.substr(i, j - i), value, pos});
            i = j;
            continue;
        }
        static const std::string punct = "[]():=+-*/^,";
        if (punct.find(c) != std::string::npos) {
            out.push_back({Token::Type::Punct, std::string(1, c), Rational(), pos});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos.line, pos.column);
    }
    Pos end = pos_at(line.size());
    out.push_back({Token::Type::End, "", Rational(), end});
    return out;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

/// Names that the grammar claims for itself.
bool reserved_name(const std::string& name) {
    if (name == "dt" || name == "exp" || name == "t" || name == "init" ||
        name == "seed" || name == "L" || name == "N" || name == "t0" ||
        name == "t_end" || name == "h" || name == "D" || name == "Q")
        return true;
    if (name.size() > 1 && (name[0] == 'D' || name[0] == 'Q') && all_digits(name.substr(1)))
        return true;
    if (name.size() > 5 && name.rfind("theta", 0) == 0 && all_digits(name.substr(5)))
        return true;
    if (name.size() > 1 && name[0] == 'e' && all_digits(name.substr(1))) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Expression parser

struct Dialect {
    bool thetas = false;    // theta<k> factors
    bool super_ops = false; // D/Q/D<i>/Q<i> calls
    bool dt_calls = false;  // dt^k(...) calls
    bool exp_calls = false; // exp(...) factors
    bool refs = false;      // named identifiers
    bool gens = false;      // e<k> generator words
    bool tvar = false;      // closed-form time variable
    bool div_in_term = false; // '/' binds at product level (closed-form seeds)
};

const Dialect kEquationDialect = {true, true, true, false, true, false, false, false};
const Dialect kConstantDialect = {false, false, false, false, true, false, false, false};
const Dialect kIntegralDialect = {false, false, true, true, true, false, false, false};
const Dialect kValueDialect = {false, false, false, false, false, true, false, false};
const Dialect kSeedDialect = {false, false, false, false, false, true, true, true};

class ExprParser {
public:
    ExprParser(const std::vector<Token>& toks, Dialect dialect)
        : toks_(toks), d_(dialect) {}

    ExprPtr parse_sum() {
        std::vector<ExprPtr> terms;
        bool negate_first = false;
        if (at_punct("-")) {
            advance();
            negate_first = true;
        } else if (at_punct("+")) {
            advance();
        }
        ExprPtr first = parse_term();
        terms.push_back(negate_first ? Expr::negate(first) : first);
        while (at_punct("+") || at_punct("-")) {
            bool minus = peek().text == "-";
            advance();
            ExprPtr term = parse_term();
            terms.push_back(minus ? Expr::negate(term) : term);
        }
        return Expr::sum(std::move(terms));
    }

    const Token& peek() const { return toks_[i_]; }

    bool at_end() const { return peek().type == Token::Type::End; }

    void expect_end(const std::string& context) const {
        if (!at_end())
            throw ParseError("unexpected trailing input in " + context, peek().pos.line,
                             peek().pos.column);
    }

private:
    bool at_punct(const std::string& s) const {
        return peek().type == Token::Type::Punct && peek().text == s;
    }

    Token advance() { return toks_[i_++]; }

    Token expect_punct(const std::string& s) {
        if (!at_punct(s))
            throw ParseError("expected '" + s + "'", peek().pos.line, peek().pos.column);
        return advance();
    }

    [[noreturn]] void fail(const std::string& msg, Pos pos) const {
        throw ParseError(msg, pos.line, pos.column);
    }

    ExprPtr parse_term() {
        std::vector<ExprPtr> factors{parse_power()};
        while (true) {
            if (at_punct("*")) {
                advance();
                factors.push_back(parse_power());
            } else if (d_.div_in_term && at_punct("/")) {
                advance();
                ExprPtr num = Expr::product(std::move(factors));
                ExprPtr den = parse_power();
                factors = {Expr::quotient(std::move(num), std::move(den))};
            } else {
                break;
            }
        }
        return Expr::product(std::move(factors));
    }

    int parse_exponent() {
        const Token& t = peek();
        if (t.type != Token::Type::Number || t.value.get_den() != 1 || t.value < 1)
            fail("exponent must be a positive integer", t.pos);
        advance();
        return static_cast<int>(t.value.get_num().get_si());
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_factor();
        if (!at_punct("^")) return base;
        if (base->kind == Expr::Kind::Gen ||
            (base->kind == Expr::Kind::Product &&
             base->kids.back()->kind == Expr::Kind::Gen))
            fail("generators are nilpotent; powers do not apply", peek().pos);
        advance();
        return Expr::power(std::move(base), parse_exponent());
    }

    ExprPtr parse_call(OpKind op, int index, Pos pos) {
        expect_punct("(");
        ExprPtr arg = parse_sum();
        expect_punct(")");
        return Expr::apply(op, index, std::move(arg), pos);
    }

    /// e<k> [^ e<j>]* — one basis word of the algebra.
    ExprPtr parse_gen_word(int first_index, Pos pos) {
        std::vector<ExprPtr> gens{Expr::gen(first_index, pos)};
        while (at_punct("^")) {
            const Token& next = toks_[i_ + 1];
            if (next.type != Token::Type::Ident || next.text[0] != 'e' ||
                !all_digits(next.text.substr(1)))
                break;
            advance();
            Token g = advance();
            gens.push_back(Expr::gen(std::stoi(g.text.substr(1)), g.pos));
        }
        return Expr::product(std::move(gens));
    }

    ExprPtr parse_factor() {
        const Token& t = peek();
        if (t.type == Token::Type::Punct && t.text == "(") {
            advance();
            ExprPtr inner = parse_sum();
            expect_punct(")");
            return inner;
        }
        if (t.type == Token::Type::Punct && t.text == "-") {
            advance();
            return Expr::negate(parse_factor());
        }
        if (t.type == Token::Type::Number) {
            advance();
            return Expr::number(t.value, t.pos);
        }
        if (t.type != Token::Type::Ident)
            fail("expected an expression", t.pos);
        const std::string& name = t.text;
        if (name == "dt" && d_.dt_calls) {
            advance();
            int order = 1;
            if (at_punct("^")) {
                advance();
                order = parse_exponent();
            }
            return parse_call(OpKind::Dt, order, t.pos);
        }
        if (d_.super_ops && (name == "D" || name == "Q")) {
            advance();
            return parse_call(name == "D" ? OpKind::Dsum : OpKind::Qsum, 0, t.pos);
        }
        if (d_.super_ops && name.size() > 1 && (name[0] == 'D' || name[0] == 'Q') &&
            all_digits(name.substr(1))) {
            advance();
            return parse_call(name[0] == 'D' ? OpKind::Dsub : OpKind::Qsub,
                              std::stoi(name.substr(1)), t.pos);
        }
        if (d_.thetas && name.rfind("theta", 0) == 0 && all_digits(name.substr(5))) {
            advance();
            return Expr::theta(std::stoi(name.substr(5)), t.pos);
        }
        if (d_.exp_calls && name == "exp") {
            advance();
            expect_punct("(");
            ExprPtr arg = parse_sum();
            expect_punct(")");
            return Expr::exp(std::move(arg), t.pos);
        }
        if (d_.gens && name.size() > 1 && name[0] == 'e' && all_digits(name.substr(1))) {
            advance();
            return parse_gen_word(std::stoi(name.substr(1)), t.pos);
        }
        if (d_.tvar && name == "t") {
            advance();
            return Expr::tvar(t.pos);
        }
        if (!d_.refs) fail("unexpected identifier '" + name + "'", t.pos);
        advance();
        return Expr::ref(name, t.pos);
    }

    const std::vector<Token>& toks_;
    size_t i_ = 0;
    Dialect d_;
};

/// Integral candidates allow one top-level '/': f / g with optional exp
/// factors in the numerator. Split at the first depth-zero '/'.
ExprPtr parse_integral_tokens(const std::vector<Token>& toks, size_t start) {
    int depth = 0;
    size_t slash = 0;
    bool found = false;
    for (size_t k = start; k < toks.size(); ++k) {
        const Token& t = toks[k];
        if (t.type != Token::Type::Punct) continue;
        if (t.text == "(") ++depth;
        if (t.text == ")") --depth;
        if (t.text == "/" && depth == 0) {
            slash = k;
            found = true;
            break;
        }
    }
    if (!found) {
        std::vector<Token> rest(toks.begin() + static_cast<std::ptrdiff_t>(start), toks.end());
        ExprParser p(rest, kIntegralDialect);
        ExprPtr e = p.parse_sum();
        p.expect_end("integral expression");
        return e;
    }
    std::vector<Token> num_toks(toks.begin() + static_cast<std::ptrdiff_t>(start),
                                toks.begin() + static_cast<std::ptrdiff_t>(slash));
    num_toks.push_back({Token::Type::End, "", Rational(), toks[slash].pos});
    ExprParser np(num_toks, kIntegralDialect);
    ExprPtr num = np.parse_sum();
    np.expect_end("integral numerator");
    std::vector<Token> den_toks(toks.begin() + static_cast<std::ptrdiff_t>(slash) + 1,
                                toks.end());
    ExprParser dp(den_toks, kIntegralDialect);
    ExprPtr den = dp.parse_sum();
    dp.expect_end("integral denominator");
    return Expr::quotient(std::move(num), std::move(den));
}

} // namespace

ExprPtr parse_component_expr(const std::string& text) {
    std::vector<Token> toks = lex_line(text, 1);
    if (toks.front().type == Token::Type::End)
        throw ParseError("empty expression", 1, 1);
    return parse_integral_tokens(toks, 0);
}

// ---------------------------------------------------------------------------
// File parser

namespace {

enum class Section { None, Algebra, Constants, Superfields, Equations, Integrals, Solve };

int section_rank(Section s) { return static_cast<int>(s); }

Section section_by_name(const std::string& name, Pos pos) {
    if (name == "algebra") return Section::Algebra;
    if (name == "constants") return Section::Constants;
    if (name == "superfields") return Section::Superfields;
    if (name == "equations") return Section::Equations;
    if (name == "integrals") return Section::Integrals;
    if (name == "solve") return Section::Solve;
    throw ParseError("unknown section [" + name + "]", pos.line, pos.column);
}

Parity parity_by_name(const std::string& name, Pos pos) {
    if (name == "even") return Parity::Even;
    if (name == "odd") return Parity::Odd;
    throw ParseError("parity must be 'even' or 'odd', got '" + name + "'", pos.line,
                     pos.column);
}

class FileParser {
public:
    explicit FileParser(const std::string& text) : text_(text) {}

    SystemFile run() {
        std::istringstream in(text_);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            parse_line(line, line_no);
        }
        finish();
        return std::move(file_);
    }

private:
    void parse_line(const std::string& line, int line_no) {
        std::vector<Token> toks = lex_line(line, line_no);
        if (toks.front().type == Token::Type::End) return;
        if (toks.front().type == Token::Type::Punct && toks.front().text == "[") {
            enter_section(toks);
            return;
        }
        switch (section_) {
            case Section::None:
                throw ParseError("content before the first section header",
                                 toks.front().pos.line, toks.front().pos.column);
            case Section::Algebra:
                parse_algebra(toks);
                break;
            case Section::Constants:
                parse_constant(toks);
                break;
            case Section::Superfields:
                parse_superfield(toks);
                break;
            case Section::Equations:
                parse_equation(toks);
                break;
            case Section::Integrals:
                file_.integrals.push_back(validated_integral(toks));
                break;
            case Section::Solve:
                parse_solve(toks);
                break;
        }
    }

    void enter_section(const std::vector<Token>& toks) {
        if (toks.size() != 4 || toks[1].type != Token::Type::Ident ||
            toks[2].type != Token::Type::Punct || toks[2].text != "]" ||
            toks[3].type != Token::Type::End)
            throw ParseError("malformed section header", toks[0].pos.line,
                             toks[0].pos.column);
        Section next = section_by_name(toks[1].text, toks[1].pos);
        if (section_rank(next) <= section_rank(section_))
            throw ParseError("section [" + toks[1].text +
                                 "] is out of order or repeated",
                             toks[1].pos.line, toks[1].pos.column);
        section_ = next;
        if (next == Section::Solve) file_.solve.present = true;
    }

    Token expect_ident(const std::vector<Token>& toks, size_t i,
                       const std::string& what) {
        if (i >= toks.size() || toks[i].type != Token::Type::Ident)
            throw ParseError("expected " + what, toks[std::min(i, toks.size() - 1)].pos.line,
                             toks[std::min(i, toks.size() - 1)].pos.column);
        return toks[i];
    }

    void expect_punct(const std::vector<Token>& toks, size_t i, const std::string& s) {
        if (i >= toks.size() || toks[i].type != Token::Type::Punct || toks[i].text != s)
            throw ParseError("expected '" + s + "'",
                             toks[std::min(i, toks.size() - 1)].pos.line,
                             toks[std::min(i, toks.size() - 1)].pos.column);
    }

    int expect_small_int(const std::vector<Token>& toks, size_t i, const std::string& what) {
        if (i >= toks.size() || toks[i].type != Token::Type::Number ||
            toks[i].value.get_den() != 1)
            throw ParseError("expected " + what,
                             toks[std::min(i, toks.size() - 1)].pos.line,
                             toks[std::min(i, toks.size() - 1)].pos.column);
        return static_cast<int>(toks[i].value.get_num().get_si());
    }

    void expect_end(const std::vector<Token>& toks, size_t i) {
        if (i >= toks.size() || toks[i].type != Token::Type::End)
            throw ParseError("unexpected trailing input",
                             toks[std::min(i, toks.size() - 1)].pos.line,
                             toks[std::min(i, toks.size() - 1)].pos.column);
    }

    void parse_algebra(const std::vector<Token>& toks) {
        Token key = expect_ident(toks, 0, "'L'");
        if (key.text != "L")
            throw ParseError("the [algebra] section only sets L", key.pos.line,
                             key.pos.column);
        if (seen_l_)
            throw ParseError("L is already set", key.pos.line, key.pos.column);
        expect_punct(toks, 1, "=");
        int l = expect_small_int(toks, 2, "an integer generator count");
        expect_end(toks, 3);
        if (l < 1 || l > grassmann::kMaxGenerators)
            throw ParseError("L must be between 1 and " +
                                 std::to_string(grassmann::kMaxGenerators),
                             toks[2].pos.line, toks[2].pos.column);
        file_.algebra_l = l;
        seen_l_ = true;
    }

    void declare_name(const Token& name) {
        if (reserved_name(name.text))
            throw ParseError("'" + name.text + "' is a reserved name", name.pos.line,
                             name.pos.column);
        if (!declared_.insert(name.text).second)
            throw ParseError("duplicate declaration of '" + name.text + "'",
                             name.pos.line, name.pos.column);
    }

    void parse_constant(const std::vector<Token>& toks) {
        Token name = expect_ident(toks, 0, "a constant name");
        declare_name(name);
        expect_punct(toks, 1, ":");
        Token parity_tok = expect_ident(toks, 2, "a parity");
        Parity parity = parity_by_name(parity_tok.text, parity_tok.pos);
        ConstantDecl decl{name.text, parity, nullptr, name.pos};
        if (toks.size() > 3 && toks[3].type == Token::Type::Punct && toks[3].text == "=") {
            if (parity == Parity::Odd)
                throw ParseError("an odd constant cannot take a rational value",
                                 toks[3].pos.line, toks[3].pos.column);
            std::vector<Token> rest(toks.begin() + 4, toks.end());
            ExprParser p(rest, kConstantDialect);
            decl.value = p.parse_sum();
            p.expect_end("constant value");
            validate_constant_value(decl.value);
            folded_.insert(name.text);
        } else {
            expect_end(toks, 3);
        }
        constants_.insert(name.text);
        file_.constants.push_back(std::move(decl));
    }

    void validate_constant_value(const ExprPtr& e) {
        if (e->kind == Expr::Kind::Ref && folded_.count(e->name) == 0)
            throw ParseError("'" + e->name +
                                 "' is not a previously defined constant value",
                             e->pos.line, e->pos.column);
        for (const ExprPtr& kid : e->kids) validate_constant_value(kid);
    }

    void parse_superfield(const std::vector<Token>& toks) {
        Token name = expect_ident(toks, 0, "a superfield name");
        declare_name(name);
        expect_punct(toks, 1, ":");
        Token parity_tok = expect_ident(toks, 2, "a parity");
        Parity parity = parity_by_name(parity_tok.text, parity_tok.pos);
        expect_punct(toks, 3, ",");
        Token n_key = expect_ident(toks, 4, "'N'");
        if (n_key.text != "N")
            throw ParseError("expected 'N = <count>'", n_key.pos.line, n_key.pos.column);
        expect_punct(toks, 5, "=");
        int n = expect_small_int(toks, 6, "a theta count");
        expect_end(toks, 7);
        if (n < 1 || n > grassmann::kMaxGenerators)
            throw ParseError("N must be between 1 and " +
                                 std::to_string(grassmann::kMaxGenerators),
                             toks[6].pos.line, toks[6].pos.column);
        if (!file_.fields.empty() && n != file_.fields.front().n_theta)
            throw ParseError("all superfields must share one N", toks[6].pos.line,
                             toks[6].pos.column);
        fields_.insert(name.text);
        file_.fields.push_back({name.text, parity, n, name.pos});
    }

    void parse_equation(const std::vector<Token>& toks) {
        if (file_.fields.empty())
            throw ParseError("equations need at least one declared superfield",
                             toks[0].pos.line, toks[0].pos.column);
        Token head = expect_ident(toks, 0, "'dt'");
        if (head.text != "dt")
            throw ParseError("equations take the form dt^k(Field) = ...",
                             head.pos.line, head.pos.column);
        size_t i = 1;
        int order = 1;
        if (toks[i].type == Token::Type::Punct && toks[i].text == "^") {
            order = expect_small_int(toks, i + 1, "a derivative order");
            if (order < 1)
                throw ParseError("derivative order must be at least 1",
                                 toks[i + 1].pos.line, toks[i + 1].pos.column);
            i += 2;
        }
        expect_punct(toks, i, "(");
        Token field = expect_ident(toks, i + 1, "a superfield name");
        if (fields_.count(field.text) == 0)
            throw ParseError("undeclared superfield: " + field.text, field.pos.line,
                             field.pos.column);
        expect_punct(toks, i + 2, ")");
        expect_punct(toks, i + 3, "=");
        std::vector<Token> rest(toks.begin() + static_cast<std::ptrdiff_t>(i) + 4,
                                toks.end());
        ExprParser p(rest, kEquationDialect);
        ExprPtr rhs = p.parse_sum();
        p.expect_end("equation right-hand side");
        validate_equation_expr(rhs);
        file_.equations.push_back({field.text, order, std::move(rhs), head.pos});
    }

    void validate_equation_expr(const ExprPtr& e) {
        int n = file_.fields.front().n_theta;
        switch (e->kind) {
            case Expr::Kind::Ref:
                if (fields_.count(e->name) == 0 && constants_.count(e->name) == 0)
                    throw ParseError("undeclared identifier: " + e->name, e->pos.line,
                                     e->pos.column);
                break;
            case Expr::Kind::Theta:
                if (e->index < 1 || e->index > n)
                    throw ParseError("theta index outside 1..N", e->pos.line,
                                     e->pos.column);
                break;
            case Expr::Kind::Op:
                if ((e->op == OpKind::Dsub || e->op == OpKind::Qsub) &&
                    (e->index < 1 || e->index > n))
                    throw ParseError("operator index outside 1..N", e->pos.line,
                                     e->pos.column);
                break;
            default:
                break;
        }
        for (const ExprPtr& kid : e->kids) validate_equation_expr(kid);
    }

    ExprPtr validated_integral(const std::vector<Token>& toks) {
        ExprPtr e = parse_integral_tokens(toks, 0);
        validate_integral_expr(e);
        return e;
    }

    void validate_integral_expr(const ExprPtr& e) {
        if (e->kind == Expr::Kind::Op && e->op != OpKind::Dt)
            throw ParseError("only dt may appear in integral expressions", e->pos.line,
                             e->pos.column);
        for (const ExprPtr& kid : e->kids) validate_integral_expr(kid);
    }

    void parse_solve(const std::vector<Token>& toks) {
        Token key = expect_ident(toks, 0, "a solve setting");
        if (key.text == "t0" || key.text == "t_end" || key.text == "h") {
            expect_punct(toks, 1, "=");
            size_t i = 2;
            bool minus = false;
            if (i < toks.size() && toks[i].type == Token::Type::Punct &&
                toks[i].text == "-") {
                minus = true;
                ++i;
            }
            if (i >= toks.size() || toks[i].type != Token::Type::Number)
                throw ParseError("expected a rational value",
                                 toks[std::min(i, toks.size() - 1)].pos.line,
                                 toks[std::min(i, toks.size() - 1)].pos.column);
            Rational v = minus ? Rational(-toks[i].value) : toks[i].value;
            expect_end(toks, i + 1);
            std::optional<Rational>& slot = key.text == "t0"  ? file_.solve.t0
                                        : key.text == "t_end" ? file_.solve.t_end
                                                              : file_.solve.h;
            if (slot)
                throw ParseError("'" + key.text + "' is already set", key.pos.line,
                                 key.pos.column);
            slot = v;
            return;
        }
        if (key.text == "init" || key.text == "seed") {
            bool is_init = key.text == "init";
            ValueDecl decl;
            decl.pos = key.pos;
            size_t i = 1;
            Token target = expect_ident(toks, i, "a component name");
            if (target.text == "dt") {
                ++i;
                decl.order = 1;
                if (toks[i].type == Token::Type::Punct && toks[i].text == "^") {
                    decl.order = expect_small_int(toks, i + 1, "a derivative order");
                    i += 2;
                }
                expect_punct(toks, i, "(");
                Token base = expect_ident(toks, i + 1, "a component name");
                decl.name = base.text;
                expect_punct(toks, i + 2, ")");
                i += 3;
            } else {
                decl.name = target.text;
                ++i;
            }
            expect_punct(toks, i, "=");
            std::vector<Token> rest(toks.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                    toks.end());
            ExprParser p(rest, is_init ? kValueDialect : kSeedDialect);
            decl.value = p.parse_sum();
            p.expect_end(is_init ? "initial value" : "closed-form seed");
            auto& bucket = is_init ? file_.solve.init : file_.solve.seeds;
            for (const ValueDecl& existing : bucket)
                if (existing.name == decl.name && existing.order == decl.order)
                    throw ParseError("duplicate assignment for '" + decl.name + "'",
                                     key.pos.line, key.pos.column);
            bucket.push_back(std::move(decl));
            return;
        }
        throw ParseError("unknown solve setting '" + key.text + "'", key.pos.line,
                         key.pos.column);
    }

    void finish() {
        if (file_.fields.empty())
            throw ParseError("a system file needs a [superfields] section", 1, 1);
    }

    const std::string& text_;
    SystemFile file_;
    Section section_ = Section::None;
    bool seen_l_ = false;
    std::set<std::string> declared_, fields_, constants_, folded_;
};

} // namespace

SystemFile parse_system(const std::string& text) { return FileParser(text).run(); }

// ---------------------------------------------------------------------------
// Canonical text

namespace {

std::string render_state_name(const std::string& name, int order) {
    if (order == 0) return name;
    if (order == 1) return "dt(" + name + ")";
    return "dt^" + std::to_string(order) + "(" + name + ")";
}

} // namespace

std::string render(const SystemFile& f) {
    std::string out;
    out += "[algebra]\nL = " + std::to_string(f.algebra_l) + "\n";
    if (!f.constants.empty()) {
        out += "\n[constants]\n";
        for (const ConstantDecl& c : f.constants) {
            out += c.name + ": " + (c.parity == Parity::Even ? "even" : "odd");
            if (c.value) out += " = " + render(c.value);
            out += "\n";
        }
    }
    out += "\n[superfields]\n";
    for (const FieldDecl& fd : f.fields)
        out += fd.name + ": " + (fd.parity == Parity::Even ? "even" : "odd") +
               ", N = " + std::to_string(fd.n_theta) + "\n";
    out += "\n[equations]\n";
    for (const EquationDecl& eq : f.equations)
        out += render_state_name(eq.field, eq.order) + " = " + render(eq.rhs) + "\n";
    if (!f.integrals.empty()) {
        out += "\n[integrals]\n";
        for (const ExprPtr& e : f.integrals) out += render(e) + "\n";
    }
    if (f.solve.present) {
        out += "\n[solve]\n";
        if (f.solve.t0) out += "t0 = " + to_string(*f.solve.t0) + "\n";
        if (f.solve.t_end) out += "t_end = " + to_string(*f.solve.t_end) + "\n";
        if (f.solve.h) out += "h = " + to_string(*f.solve.h) + "\n";
        for (const ValueDecl& v : f.solve.init)
            out += "init " + render_state_name(v.name, v.order) + " = " + render(v.value) +
                   "\n";
        for (const ValueDecl& v : f.solve.seeds)
            out += "seed " + v.name + " = " + render(v.value) + "\n";
    }
    return out;
}

bool equal(const SystemFile& a, const SystemFile& b) {
    auto value_decl_equal = [](const ValueDecl& x, const ValueDecl& y) {
        return x.name == y.name && x.order == y.order && equal(x.value, y.value);
    };
    if (a.algebra_l != b.algebra_l) return false;
    if (a.constants.size() != b.constants.size() || a.fields.size() != b.fields.size() ||
        a.equations.size() != b.equations.size() ||
        a.integrals.size() != b.integrals.size())
        return false;
    for (size_t i = 0; i < a.constants.size(); ++i) {
        const ConstantDecl &x = a.constants[i], &y = b.constants[i];
        if (x.name != y.name || x.parity != y.parity) return false;
        if ((x.value == nullptr) != (y.value == nullptr)) return false;
        if (x.value && !equal(x.value, y.value)) return false;
    }
    for (size_t i = 0; i < a.fields.size(); ++i) {
        const FieldDecl &x = a.fields[i], &y = b.fields[i];
        if (x.name != y.name || x.parity != y.parity || x.n_theta != y.n_theta)
            return false;
    }
    for (size_t i = 0; i < a.equations.size(); ++i) {
        const EquationDecl &x = a.equations[i], &y = b.equations[i];
        if (x.field != y.field || x.order != y.order || !equal(x.rhs, y.rhs)) return false;
    }
    for (size_t i = 0; i < a.integrals.size(); ++i)
        if (!equal(a.integrals[i], b.integrals[i])) return false;
    if (a.solve.present != b.solve.present || a.solve.t0 != b.solve.t0 ||
        a.solve.t_end != b.solve.t_end || a.solve.h != b.solve.h)
        return false;
    if (a.solve.init.size() != b.solve.init.size() ||
        a.solve.seeds.size() != b.solve.seeds.size())
        return false;
    for (size_t i = 0; i < a.solve.init.size(); ++i)
        if (!value_decl_equal(a.solve.init[i], b.solve.init[i])) return false;
    for (size_t i = 0; i < a.solve.seeds.size(); ++i)
        if (!value_decl_equal(a.solve.seeds[i], b.solve.seeds[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Lowering

namespace {

using grassmann::AlgebraCtx;
using solve::LaurentPoly;

[[noreturn]] void lower_fail(const ExprPtr& e, const std::string& msg) {
    throw ParseError(msg, e->pos.line, e->pos.column);
}

Rational eval_constant_value(const ExprPtr& e,
                             const std::map<std::string, Rational>& folded) {
    switch (e->kind) {
        case Expr::Kind::Number:
            return e->value;
        case Expr::Kind::Ref: {
            auto it = folded.find(e->name);
            if (it == folded.end())
                lower_fail(e, "'" + e->name + "' has no folded value");
            return it->second;
        }
        case Expr::Kind::Neg:
            return -eval_constant_value(e->kids[0], folded);
        case Expr::Kind::Sum: {
            Rational acc(0);
            for (const ExprPtr& kid : e->kids) acc += eval_constant_value(kid, folded);
            return acc;
        }
        case Expr::Kind::Product: {
            Rational acc(1);
            for (const ExprPtr& kid : e->kids) acc *= eval_constant_value(kid, folded);
            return acc;
        }
        case Expr::Kind::Power:
            return rat_pow(eval_constant_value(e->kids[0], folded), e->index);
        default:
            lower_fail(e, "constant values are rational arithmetic only");
    }
}

/// Resolves names for the superfield-level dialect.
struct SuperResolver {
    std::function<int(const std::string&)> field_index; // -1 when not a field
    std::function<SymbolId(const std::string&)> constant;
};

SuperExprPtr lower_super(const ExprPtr& e, const SuperResolver& r) {
    switch (e->kind) {
        case Expr::Kind::Number:
            return SuperExpr::scalar(e->value);
        case Expr::Kind::Ref: {
            int idx = r.field_index(e->name);
            if (idx >= 0) return SuperExpr::field(idx);
            return SuperExpr::constant_ref(r.constant(e->name));
        }
        case Expr::Kind::Theta:
            return SuperExpr::theta(e->index);
        case Expr::Kind::Op:
            return SuperExpr::apply(e->op, e->index, lower_super(e->kids[0], r));
        case Expr::Kind::Sum: {
            std::vector<SuperExprPtr> kids;
            for (const ExprPtr& kid : e->kids) kids.push_back(lower_super(kid, r));
            return SuperExpr::sum(std::move(kids));
        }
        case Expr::Kind::Product: {
            std::vector<SuperExprPtr> kids;
            for (const ExprPtr& kid : e->kids) kids.push_back(lower_super(kid, r));
            return SuperExpr::product(std::move(kids));
        }
        case Expr::Kind::Power:
            return SuperExpr::power(lower_super(e->kids[0], r), e->index);
        case Expr::Kind::Neg:
            return SuperExpr::negate(lower_super(e->kids[0], r));
        default:
            lower_fail(e, "expression form not allowed at superfield level");
    }
}

SymbolId find_symbol(const SymbolTable& table, const std::string& name, Pos pos) {
    if (!table.has(name))
        throw ParseError("undeclared symbol: " + name, pos.line, pos.column);
    return table.find(name);
}

GradedPoly lower_poly(const superspace::ComponentSystem& sys, const ExprPtr& e) {
    const SymbolTable& table = sys.table;
    switch (e->kind) {
        case Expr::Kind::Number:
            return GradedPoly::constant(e->value);
        case Expr::Kind::Ref:
            return GradedPoly::symbol(table, find_symbol(table, e->name, e->pos));
        case Expr::Kind::Op: {
            if (e->op != OpKind::Dt)
                lower_fail(e, "only dt applies to components");
            const ExprPtr& arg = e->kids[0];
            if (arg->kind != Expr::Kind::Ref)
                lower_fail(e, "dt applies to a single component here");
            SymbolId base = find_symbol(table, arg->name, arg->pos);
            return GradedPoly::symbol(table, sym::derivative(base, e->index));
        }
        case Expr::Kind::Sum: {
            GradedPoly acc;
            for (const ExprPtr& kid : e->kids) acc += lower_poly(sys, kid);
            return acc;
        }
        case Expr::Kind::Product: {
            GradedPoly acc = GradedPoly::constant(Rational(1));
            for (const ExprPtr& kid : e->kids) acc = acc * lower_poly(sys, kid);
            return acc;
        }
        case Expr::Kind::Power:
            return sym::pow(lower_poly(sys, e->kids[0]), e->index);
        case Expr::Kind::Neg:
            return -lower_poly(sys, e->kids[0]);
        default:
            lower_fail(e, "expression form not allowed in a component polynomial");
    }
}

/// Splits a numerator into its polynomial part and the summed exp arguments.
void split_exp(const superspace::ComponentSystem& sys, const ExprPtr& e, GradedPoly& f,
               GradedPoly& h) {
    if (e->kind == Expr::Kind::Exp) {
        h += lower_poly(sys, e->kids[0]);
        return;
    }
    if (e->kind == Expr::Kind::Neg) {
        GradedPoly inner_f = GradedPoly::constant(Rational(1));
        split_exp(sys, e->kids[0], inner_f, h);
        f = f * -inner_f;
        return;
    }
    if (e->kind == Expr::Kind::Product) {
        GradedPoly acc = GradedPoly::constant(Rational(1));
        for (const ExprPtr& kid : e->kids) {
            if (kid->kind == Expr::Kind::Exp) {
                h += lower_poly(sys, kid->kids[0]);
            } else {
                acc = acc * lower_poly(sys, kid);
            }
        }
        f = f * acc;
        return;
    }
    f = f * lower_poly(sys, e);
}

bool mentions_exp(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Exp) return true;
    for (const ExprPtr& kid : e->kids)
        if (mentions_exp(kid)) return true;
    return false;
}

Multivector<Rational> lower_value(AlgebraCtx ctx, const ExprPtr& e) {
    using MRat = Multivector<Rational>;
    switch (e->kind) {
        case Expr::Kind::Number:
            return MRat::scalar(ctx, e->value);
        case Expr::Kind::Gen:
            return MRat::generator(ctx, e->index);
        case Expr::Kind::Neg:
            return -lower_value(ctx, e->kids[0]);
        case Expr::Kind::Sum: {
            MRat acc = MRat::zero(ctx);
            for (const ExprPtr& kid : e->kids) acc += lower_value(ctx, kid);
            return acc;
        }
        case Expr::Kind::Product: {
            MRat acc = MRat::scalar(ctx, Rational(1));
            for (const ExprPtr& kid : e->kids) acc = acc * lower_value(ctx, kid);
            return acc;
        }
        default:
            lower_fail(e, "initial values are constant Grassmann expressions");
    }
}

LaurentPoly lower_seed(AlgebraCtx ctx, const ExprPtr& e) {
    using MRat = Multivector<Rational>;
    switch (e->kind) {
        case Expr::Kind::Number:
            return LaurentPoly::constant(MRat::scalar(ctx, e->value));
        case Expr::Kind::Gen:
            return LaurentPoly::constant(MRat::generator(ctx, e->index));
        case Expr::Kind::TVar:
            return LaurentPoly::term(MRat::scalar(ctx, Rational(1)), 1);
        case Expr::Kind::Power: {
            if (e->kids[0]->kind != Expr::Kind::TVar)
                lower_fail(e, "only t takes powers in a closed-form seed");
            return LaurentPoly::term(MRat::scalar(ctx, Rational(1)), e->index);
        }
        case Expr::Kind::Neg:
            return -lower_seed(ctx, e->kids[0]);
        case Expr::Kind::Sum: {
            LaurentPoly acc(ctx);
            for (const ExprPtr& kid : e->kids) acc = acc + lower_seed(ctx, kid);
            return acc;
        }
        case Expr::Kind::Product: {
            LaurentPoly acc = LaurentPoly::constant(MRat::scalar(ctx, Rational(1)));
            for (const ExprPtr& kid : e->kids) acc = acc * lower_seed(ctx, kid);
            return acc;
        }
        case Expr::Kind::Quotient: {
            const ExprPtr& den = e->kids[1];
            int power = 0;
            if (den->kind == Expr::Kind::TVar) {
                power = 1;
            } else if (den->kind == Expr::Kind::Power &&
                       den->kids[0]->kind == Expr::Kind::TVar) {
                power = den->index;
            } else {
                lower_fail(den, "seed denominators are powers of t");
            }
            return lower_seed(ctx, e->kids[0]) *
                   LaurentPoly::term(MRat::scalar(ctx, Rational(1)), -power);
        }
        default:
            lower_fail(e, "expression form not allowed in a closed-form seed");
    }
}

void check_value_parity(const Multivector<Rational>& v, Parity parity,
                        const std::string& name, Pos pos) {
    for (const auto& [w, c] : v.terms()) {
        Parity wp = (grassmann::word_length(w) & 1) ? Parity::Odd : Parity::Even;
        if (wp != parity)
            throw ParseError("value assigned to '" + name + "' has the wrong parity",
                             pos.line, pos.column);
    }
}

void collect_refs(const ExprPtr& e, std::vector<const Expr*>& out) {
    if (e->kind == Expr::Kind::Ref) out.push_back(e.get());
    for (const ExprPtr& kid : e->kids) collect_refs(kid, out);
}

} // namespace

GradedPoly lower_component_poly(const superspace::ComponentSystem& sys, const ExprPtr& e) {
    return lower_poly(sys, e);
}

darboux::FirstIntegralExpr lower_integral(const superspace::ComponentSystem& sys,
                                          const ExprPtr& e) {
    darboux::FirstIntegralExpr out;
    ExprPtr num = e;
    if (e->kind == Expr::Kind::Quotient) {
        num = e->kids[0];
        if (mentions_exp(e->kids[1]))
            lower_fail(e->kids[1], "exp is not allowed in an integral denominator");
        out.g = lower_poly(sys, e->kids[1]);
    }
    GradedPoly f = GradedPoly::constant(Rational(1));
    if (num->kind == Expr::Kind::Sum) {
        if (mentions_exp(num))
            lower_fail(num, "exp must appear as a factor of the whole expression");
        f = lower_poly(sys, num);
    } else {
        split_exp(sys, num, f, out.h);
    }
    out.f = f;
    return out;
}

BuiltSystem build_system(const SystemFile& file) {
    BuiltSystem built;
    built.algebra_l = file.algebra_l;

    int n_theta = file.fields.front().n_theta;
    superspace::SystemBuilder b(n_theta);

    std::map<std::string, Rational> folded;
    for (const ConstantDecl& c : file.constants) {
        if (c.value) {
            Rational v = eval_constant_value(c.value, folded);
            folded.emplace(c.name, v);
            b.add_constant(c.name, v);
        } else {
            b.add_constant(c.name, c.parity);
        }
    }
    for (const FieldDecl& fd : file.fields) b.add_field(fd.name, fd.parity);

    SuperResolver resolver{
        [&b](const std::string& name) {
            try {
                return b.field_index(name);
            } catch (const Error&) {
                return -1;
            }
        },
        [&b](const std::string& name) { return b.table().find(name); }};

    for (const EquationDecl& eq : file.equations)
        b.add_equation(b.field_index(eq.field), eq.order, lower_super(eq.rhs, resolver));

    built.sys = b.build();
    const superspace::ComponentSystem& sys = built.sys;

    for (const ExprPtr& candidate : file.integrals) {
        std::vector<const Expr*> refs;
        collect_refs(candidate, refs);
        bool superfield_level = false;
        for (const Expr* r : refs) {
            for (const superspace::SuperfieldDecl& fd : sys.fields)
                if (fd.name == r->name) superfield_level = true;
        }
        BuiltIntegral entry;
        entry.source = render(candidate);
        if (superfield_level) {
            if (candidate->kind == Expr::Kind::Quotient || mentions_exp(candidate))
                throw ParseError(
                    "superfield-level integrals are plain polynomials in the fields",
                    candidate->pos.line, candidate->pos.column);
            SuperResolver post{
                [&sys](const std::string& name) {
                    for (size_t i = 0; i < sys.fields.size(); ++i)
                        if (sys.fields[i].name == name) return static_cast<int>(i);
                    return -1;
                },
                [&sys](const std::string& name) { return sys.table.find(name); }};
            superspace::ExpandCtx ctx{sys.n_theta, &sys.fields, &sys.table, &sys.folded};
            superspace::ThetaPoly expanded = [&] {
                try {
                    return theta_expand(lower_super(candidate, post), ctx);
                } catch (const ParseError&) {
                    throw;
                } catch (const Error& err) {
                    throw ParseError(err.what(), candidate->pos.line,
                                     candidate->pos.column);
                }
            }();
            std::vector<grassmann::Word> words;
            for (const auto& [w, part] : expanded.parts()) words.push_back(w);
            std::sort(words.begin(), words.end(), grassmann::word_less);
            for (grassmann::Word w : words)
                entry.parts.push_back(darboux::FirstIntegralExpr{expanded.coeff(w)});
        } else {
            entry.parts.push_back(lower_integral(sys, candidate));
        }
        built.integrals.push_back(std::move(entry));
    }

    built.t0 = file.solve.t0;
    built.t_end = file.solve.t_end;
    built.h = file.solve.h;

    AlgebraCtx ctx(file.algebra_l);
    for (const ValueDecl& v : file.solve.init) {
        SymbolId base = find_symbol(sys.table, v.name, v.pos);
        Multivector<Rational> value = lower_value(ctx, v.value);
        if (sys.table.kind(base) == sym::SymbolKind::Constant) {
            if (v.order != 0)
                throw ParseError("derivatives of constants cannot be initialized",
                                 v.pos.line, v.pos.column);
            check_value_parity(value, sys.table.parity(base), v.name, v.pos);
            built.constants.emplace(base, std::move(value));
        } else {
            SymbolId state = v.order == 0 ? base : sym::derivative(base, v.order);
            check_value_parity(value, sys.table.parity(base), v.name, v.pos);
            built.init.emplace(state, std::move(value));
        }
    }
    for (const ValueDecl& v : file.solve.seeds) {
        SymbolId base = find_symbol(sys.table, v.name, v.pos);
        if (sys.table.kind(base) != sym::SymbolKind::Dynamic)
            throw ParseError("seeds assign to dynamic components", v.pos.line,
                             v.pos.column);
        built.seeds.emplace(base, lower_seed(ctx, v.value));
    }
    return built;
}

} // namespace susyode::io
