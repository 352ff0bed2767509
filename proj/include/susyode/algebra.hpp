#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "susyode/errors.hpp"
#include "susyode/parity.hpp"
#include "susyode/rational.hpp"

namespace susyode::grassmann {

/// A basis word of the exterior algebra: bit k-1 set means generator e^k
/// participates. The empty word (0) is the unit.
using Word = std::uint32_t;

constexpr int kMaxGenerators = 16;

inline int word_length(Word w) { return std::popcount(w); }

/// Graded comparison used for canonical printing and unknown ordering:
/// shorter words first, ties broken by bit pattern.
inline bool word_less(Word a, Word b) {
    int la = word_length(a), lb = word_length(b);
    if (la != lb) return la < lb;
    return a < b;
}

/// Sign of e^a * e^b relative to the sorted concatenation e^(a|b):
/// parity of the number of transpositions needed to interleave the two
/// ascending generator lists. Caller must ensure a & b == 0.
inline int merge_sign(Word a, Word b) {
    int swaps = 0;
    a >>= 1;
    while (a) {
        swaps += std::popcount(a & b);
        a >>= 1;
    }
    return (swaps & 1) ? -1 : 1;
}

/// Compact rendering used in CSV headers and labels: "1", "e1", "e1e3".
std::string word_label(Word w);

/// Wedge rendering used in multivector text: "e1^e3".
std::string word_wedge(Word w);

/// Immutable description of a finite real Grassmann algebra Lambda_L.
class AlgebraCtx {
public:
    AlgebraCtx() : generators_(1) {}
    explicit AlgebraCtx(int generators) : generators_(generators) {
        if (generators < 1 || generators > kMaxGenerators)
            throw Error("generator count must be between 1 and 16, got " + std::to_string(generators));
    }
    int generators() const { return generators_; }
    Word top_word() const { return (Word(1) << generators_) - 1; }
    bool operator==(const AlgebraCtx&) const = default;

private:
    int generators_;
};

// --- scalar abstraction -----------------------------------------------------
//
// The same multivector type carries exact rational coefficients on the
// symbolic path and doubles on the numeric path; the layer expansion
// instantiates it once more with polynomial-valued coefficients.

template <class S>
struct ScalarOps; // specialize per coefficient type

template <>
struct ScalarOps<Rational> {
    static Rational zero() { return Rational(0); }
    static bool is_zero(const Rational& s) { return sgn(s) == 0; }
    static Rational from_rational(const Rational& r) { return r; }
    // exp over exact rationals only exists for nilpotent arguments
    static Rational exp_body(const Rational& s) {
        if (!is_zero(s)) throw Error("exact exponential requires zero body");
        return Rational(1);
    }
    static Rational reciprocal(const Rational& s) { return Rational(1) / s; }
};

template <>
struct ScalarOps<double> {
    static double zero() { return 0.0; }
    static bool is_zero(double s) { return s == 0.0; }
    static double from_rational(const Rational& r) { return r.get_d(); }
    static double exp_body(double s) { return std::exp(s); }
    static double reciprocal(double s) { return 1.0 / s; }
};

template <class S>
class Multivector;

template <class S>
struct GradeParts {
    S body;
    Multivector<S> soul;
    Parity parity;
};

/// Element of Lambda_L with coefficients in S, stored sparsely by basis word.
/// Value semantics; every operation validates that both operands belong to
/// the same algebra context.
template <class S>
class Multivector {
public:
    using Terms = std::map<Word, S>;

    explicit Multivector(AlgebraCtx ctx) : ctx_(ctx) {}

    static Multivector zero(AlgebraCtx ctx) { return Multivector(ctx); }

    static Multivector scalar(AlgebraCtx ctx, S value) {
        Multivector m(ctx);
        m.add_term(0, std::move(value));
        return m;
    }

    static Multivector basis(AlgebraCtx ctx, Word w) {
        if (w & ~ctx.top_word())
            throw Error("basis word references a generator beyond e" + std::to_string(ctx.generators()));
        Multivector m(ctx);
        m.add_term(w, ScalarOps<S>::from_rational(Rational(1)));
        return m;
    }

    /// e^k, 1-based.
    static Multivector generator(AlgebraCtx ctx, int k) {
        if (k < 1 || k > ctx.generators())
            throw Error("generator index " + std::to_string(k) + " outside context with L=" +
                        std::to_string(ctx.generators()));
        return basis(ctx, Word(1) << (k - 1));
    }

    const AlgebraCtx& ctx() const { return ctx_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    S coefficient(Word w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? ScalarOps<S>::zero() : it->second;
    }

    S body() const { return coefficient(0); }

    Multivector soul() const {
        Multivector m(ctx_);
        for (const auto& [w, c] : terms_)
            if (w != 0) m.terms_.emplace(w, c);
        return m;
    }

    Parity parity() const {
        bool even = false, odd = false;
        for (const auto& [w, c] : terms_)
            (word_length(w) & 1 ? odd : even) = true;
        if (odd && even) return Parity::Mixed;
        if (odd) return Parity::Odd;
        return Parity::Even;
    }

    GradeParts<S> grade_parts() const { return {body(), soul(), parity()}; }

    Multivector operator-() const {
        Multivector m(ctx_);
        for (const auto& [w, c] : terms_) m.terms_.emplace(w, -c);
        return m;
    }

    Multivector& operator+=(const Multivector& rhs) {
        check_ctx(rhs);
        for (const auto& [w, c] : rhs.terms_) add_term(w, c);
        return *this;
    }

    Multivector& operator-=(const Multivector& rhs) {
        check_ctx(rhs);
        for (const auto& [w, c] : rhs.terms_) add_term(w, -c);
        return *this;
    }

    friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
    friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }

    friend Multivector operator*(const Multivector& a, const Multivector& b) {
        a.check_ctx(b);
        Multivector out(a.ctx_);
        for (const auto& [wa, ca] : a.terms_) {
            for (const auto& [wb, cb] : b.terms_) {
                if (wa & wb) continue; // repeated generator annihilates
                S c = ca * cb;
                if (merge_sign(wa, wb) < 0) c = -c;
                out.add_term(wa | wb, std::move(c));
            }
        }
        return out;
    }

    Multivector scaled(const S& s) const {
        Multivector m(ctx_);
        if (ScalarOps<S>::is_zero(s)) return m;
        for (const auto& [w, c] : terms_) m.add_term(w, c * s);
        return m;
    }

    bool operator==(const Multivector& rhs) const {
        return ctx_ == rhs.ctx_ && terms_ == rhs.terms_;
    }

    void add_term(Word w, S c) {
        if (w & ~ctx_.top_word())
            throw Error("word outside algebra context");
        auto [it, fresh] = terms_.emplace(w, c);
        if (!fresh) {
            it->second = it->second + c;
            if (ScalarOps<S>::is_zero(it->second)) terms_.erase(it);
        } else if (ScalarOps<S>::is_zero(it->second)) {
            terms_.erase(it);
        }
    }

private:
    void check_ctx(const Multivector& rhs) const {
        if (!(ctx_ == rhs.ctx_))
            throw ContextMismatch("multivectors belong to different algebra contexts");
    }

    AlgebraCtx ctx_;
    Terms terms_;
};

template <class S>
Multivector<S> pow(const Multivector<S>& a, int n) {
    Multivector<S> acc = Multivector<S>::scalar(a.ctx(), ScalarOps<S>::from_rational(Rational(1)));
    for (int i = 0; i < n; ++i) acc = acc * a;
    return acc;
}

/// 1/a via the terminating Neumann series (1/b) sum_k (-soul/b)^k.
/// Requires an invertible body.
template <class S>
Multivector<S> inverse(const Multivector<S>& a) {
    S b = a.body();
    if (ScalarOps<S>::is_zero(b))
        throw NotInvertible("multivector has zero body");
    S binv = ScalarOps<S>::reciprocal(b);
    Multivector<S> y = a.soul().scaled(binv); // nilpotent
    Multivector<S> out = Multivector<S>::zero(a.ctx());
    Multivector<S> term = Multivector<S>::scalar(a.ctx(), ScalarOps<S>::from_rational(Rational(1)));
    for (int k = 0; k <= a.ctx().generators(); ++k) {
        out += k % 2 == 0 ? term : -term;
        term = term * y;
        if (term.is_zero()) break;
    }
    return out.scaled(binv);
}

/// exp(a) = exp(body) * sum_k soul^k / k!; defined for even arguments.
/// The exact-rational instantiation additionally requires a nilpotent
/// argument (zero body), since exp of a nonzero rational is irrational.
template <class S>
Multivector<S> exponential(const Multivector<S>& a) {
    if (a.parity() != Parity::Even)
        throw ParityError("exponential requires an even multivector");
    S eb = ScalarOps<S>::exp_body(a.body());
    Multivector<S> x = a.soul();
    Multivector<S> out = Multivector<S>::zero(a.ctx());
    Multivector<S> term = Multivector<S>::scalar(a.ctx(), ScalarOps<S>::from_rational(Rational(1)));
    for (int k = 0; k <= a.ctx().generators(); ++k) {
        out += term.scaled(ScalarOps<S>::from_rational(Rational(1) / factorial(k)));
        term = term * x;
        if (term.is_zero()) break;
    }
    return out.scaled(eb);
}

template <class To, class From, class F>
Multivector<To> map_scalars(const Multivector<From>& a, F f) {
    Multivector<To> out(a.ctx());
    for (const auto& [w, c] : a.terms()) out.add_term(w, f(c));
    return out;
}

inline Multivector<double> to_double(const Multivector<Rational>& a) {
    return map_scalars<double>(a, [](const Rational& r) { return r.get_d(); });
}

std::string format_coefficient(const Rational& c);
std::string format_coefficient(double c);

/// Canonical text form: terms in graded word order, generators joined
/// with '^': "3 + 2*e1^e2 - e1^e3^e4".
template <class S>
std::string to_string(const Multivector<S>& a) {
    if (a.is_zero()) return "0";
    std::vector<Word> words;
    for (const auto& [w, c] : a.terms()) words.push_back(w);
    std::sort(words.begin(), words.end(), word_less);
    std::string out;
    bool first = true;
    for (Word w : words) {
        S c = a.coefficient(w);
        std::string mag = format_coefficient(c);
        bool negative = !mag.empty() && mag[0] == '-';
        if (negative) mag = mag.substr(1);
        if (first) {
            if (negative) out += "-";
            first = false;
        } else {
            out += negative ? " - " : " + ";
        }
        if (w == 0) {
            out += mag;
        } else if (mag == "1") {
            out += word_wedge(w);
        } else {
            out += mag + "*" + word_wedge(w);
        }
    }
    return out;
}

} // namespace susyode::grassmann
