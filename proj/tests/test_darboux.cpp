#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "susyode/darboux.hpp"
#include "susyode/component.hpp"
#include "susyode/superexpr.hpp"

using namespace susyode;
using namespace susyode::darboux;
using superspace::ComponentSystem;
using superspace::OpKind;
using superspace::SuperExpr;
using superspace::SystemBuilder;
using sym::SymbolKind;

namespace {

GradedPoly sp(const SymbolTable& t, const std::string& name, int order = 0) {
    return GradedPoly::symbol(t, sym::derivative(t.find(name), order));
}

GradedPoly c(long n, long d = 1) { return GradedPoly::constant(rat(n, d)); }

ComponentSystem planar() {
    SystemBuilder b(1);
    int X = b.add_field("X", Parity::Even);
    b.add_equation(X, 1, SuperExpr::power(SuperExpr::field(X), 2));
    return b.build();
}

ComponentSystem fermionic() {
    SystemBuilder b(1);
    int Y1 = b.add_field("Y1", Parity::Odd);
    int Y2 = b.add_field("Y2", Parity::Odd);
    auto D = [](int f) { return SuperExpr::apply(OpKind::Dsum, 0, SuperExpr::field(f)); };
    b.add_equation(Y1, 1, SuperExpr::product({SuperExpr::field(Y1), D(Y2)}));
    b.add_equation(Y2, 1, SuperExpr::product({SuperExpr::field(Y2), D(Y2)}));
    return b.build();
}

// dt(X1) = alpha*X1 + (D X1)(D X2), dt(X2) = X2; alpha symbolic or folded.
ComponentSystem two_even(std::optional<Rational> alpha_value) {
    SystemBuilder b(1);
    SymbolId alpha = alpha_value ? b.add_constant("alpha", *alpha_value)
                                 : b.add_constant("alpha", Parity::Even);
    int X1 = b.add_field("X1", Parity::Even);
    int X2 = b.add_field("X2", Parity::Even);
    auto D = [](int f) { return SuperExpr::apply(OpKind::Dsum, 0, SuperExpr::field(f)); };
    b.add_equation(X1, 1,
                   SuperExpr::sum({SuperExpr::product({SuperExpr::constant_ref(alpha),
                                                       SuperExpr::field(X1)}),
                                   SuperExpr::product({D(X1), D(X2)})}));
    b.add_equation(X2, 1, SuperExpr::field(X2));
    return b.build();
}

} // namespace

TEST_CASE("lie derivative agrees with the reduced time derivative") {
    ComponentSystem sys = planar();
    PolyVectorField vf = field_of(sys);
    const auto& t = vf.table;
    GradedPoly x = sp(t, "x"), xi = sp(t, "xi");

    CHECK(lie_derivative(vf, xi) == c(2) * x * xi);
    CHECK(lie_derivative(vf, x * x) == c(2) * sym::pow(x, 3));

    for (const GradedPoly& f : {x * x + x * xi, xi, x + xi, x * x * x - c(3) * x}) {
        GradedPoly direct = reduce_on_shell(sys, t, f.time_derivative(t));
        CHECK(lie_derivative(vf, f) == direct);
    }
}

TEST_CASE("lie derivative is an even derivation") {
    PolyVectorField vf = field_of(planar());
    const auto& t = vf.table;
    GradedPoly x = sp(t, "x"), xi = sp(t, "xi");

    GradedPoly polys[] = {x + xi, x * x + x * xi, xi, c(2) * x - c(1)};
    for (const GradedPoly& f : polys)
        for (const GradedPoly& g : polys)
            CHECK(lie_derivative(vf, f * g) ==
                  lie_derivative(vf, f) * g + f * lie_derivative(vf, g));
}

TEST_CASE("eigenpolynomials of the planar system") {
    PolyVectorField vf = field_of(planar());
    const auto& t = vf.table;
    GradedPoly x = sp(t, "x"), xi = sp(t, "xi");

    CHECK(verify_darboux(vf, x, x));
    CHECK(verify_darboux(vf, xi, c(2) * x));
    CHECK_FALSE(verify_darboux(vf, x, c(2) * x));

    auto kx = search_cofactor(vf, x, 1);
    REQUIRE(kx.has_value());
    CHECK(*kx == x);
    auto kxi = search_cofactor(vf, xi, 1);
    REQUIRE(kxi.has_value());
    CHECK(*kxi == c(2) * x);
    CHECK(kxi->to_string(t) == "2*x");
}

TEST_CASE("product of eigenpolynomials has the summed cofactor") {
    PolyVectorField vf = field_of(planar());
    const auto& t = vf.table;
    GradedPoly x = sp(t, "x"), xi = sp(t, "xi");
    auto k1 = search_cofactor(vf, x, 1);
    auto k2 = search_cofactor(vf, xi, 1);
    REQUIRE(k1.has_value());
    REQUIRE(k2.has_value());
    CHECK(verify_darboux(vf, x * xi, *k1 + *k2));
}

TEST_CASE("no polynomial cofactor for x when xdot = 1") {
    SymbolTable t;
    SymbolId x = t.declare("x", Parity::Even, SymbolKind::Dynamic);
    PolyVectorField vf{t, {x}, {c(1)}};
    CHECK_FALSE(search_cofactor(vf, sp(t, "x"), 3).has_value());
}

TEST_CASE("odd constant in the field, cubic cofactor recovered") {
    // xdot = x^2 + alpha*xi, xidot = -x^3*xi with an odd constant alpha
    SymbolTable t;
    t.declare("alpha", Parity::Odd, SymbolKind::Constant);
    SymbolId x = t.declare("x", Parity::Even, SymbolKind::Dynamic);
    SymbolId xi = t.declare("xi", Parity::Odd, SymbolKind::Dynamic);
    GradedPoly X = sp(t, "x"), XI = sp(t, "xi"), AL = sp(t, "alpha");
    PolyVectorField vf{t, {x, xi}, {X * X + AL * XI, -(sym::pow(X, 3) * XI)}};

    auto kappa = search_cofactor(vf, XI, 3);
    REQUIRE(kappa.has_value());
    CHECK(*kappa == -sym::pow(X, 3));
    CHECK(kappa->to_string(t) == "-x^3");

    // xi * exp(x^2/2) is a first integral: the alpha-term dies on xi*xi = 0
    FirstIntegralExpr I{XI, c(1), rat(1, 2) * X * X};
    CHECK(first_integral_residual(vf, I).is_zero());
    CHECK(verify_first_integral(vf, I));
}

TEST_CASE("first integrals of the planar system") {
    PolyVectorField vf = field_of(planar());
    const auto& t = vf.table;
    GradedPoly x = sp(t, "x"), xi = sp(t, "xi");

    CHECK(verify_first_integral(vf, {xi, x * x, GradedPoly()}));
    // xi/x is not conserved
    FirstIntegralExpr bad{xi, x, GradedPoly()};
    CHECK_FALSE(verify_first_integral(vf, bad));
    CHECK(first_integral_residual(vf, bad) == x * x * xi);
}

TEST_CASE("fermionic system: three ratios pass, one fails") {
    ComponentSystem sys = fermionic();
    PolyVectorField vf = field_of(sys);
    const auto& t = vf.table;
    GradedPoly x1 = sp(t, "x1"), x2 = sp(t, "x2"), xi1 = sp(t, "xi1"), xi2 = sp(t, "xi2");

    CHECK(verify_darboux(vf, x1 - xi1 * xi2, x2));
    auto kappa = search_cofactor(vf, x1 - xi1 * xi2, 1);
    REQUIRE(kappa.has_value());
    CHECK(*kappa == x2);

    CHECK(verify_first_integral(vf, {xi1, x2, GradedPoly()}));
    CHECK(verify_first_integral(vf, {xi2, x2, GradedPoly()}));
    CHECK(verify_first_integral(vf, {x1 - xi1 * xi2, x2, GradedPoly()}));

    FirstIntegralExpr bad{x1, x2, GradedPoly()};
    CHECK_FALSE(verify_first_integral(vf, bad));
    CHECK(first_integral_residual(vf, bad) == x2 * x2 * xi1 * xi2);
    // x1 alone is not an eigenpolynomial either
    CHECK_FALSE(search_cofactor(vf, x1, 2).has_value());
}

TEST_CASE("two even superfields: integrals with and without the parameter") {
    {
        ComponentSystem sys = two_even(std::nullopt); // symbolic alpha
        PolyVectorField vf = field_of(sys);
        const auto& t = vf.table;
        CHECK(verify_first_integral(vf, {sp(t, "xi2"), sp(t, "x2"), GradedPoly()}));
        // kappa = 1 is a degree-zero cofactor
        auto kappa = search_cofactor(vf, sp(t, "xi2"), 2);
        REQUIRE(kappa.has_value());
        CHECK(*kappa == c(1));
    }
    {
        ComponentSystem sys = two_even(Rational(0)); // alpha folded to zero
        PolyVectorField vf = field_of(sys);
        const auto& t = vf.table;
        // xi1 * exp(-x2) is conserved only in the alpha = 0 family member
        CHECK(verify_first_integral(vf, {sp(t, "xi1"), c(1), -sp(t, "x2")}));
    }
    {
        ComponentSystem sys = two_even(Rational(1));
        PolyVectorField vf = field_of(sys);
        const auto& t = vf.table;
        CHECK_FALSE(verify_first_integral(vf, {sp(t, "xi1"), c(1), -sp(t, "x2")}));
    }
}

TEST_CASE("second-order oscillator conserves its graded energies") {
    SystemBuilder b(1);
    int X = b.add_field("X", Parity::Even);
    b.add_equation(X, 2, SuperExpr::negate(SuperExpr::field(X)));
    ComponentSystem sys = b.build();
    PolyVectorField vf = field_of(sys);
    const auto& t = vf.table;

    REQUIRE(vf.vars.size() == 4);
    GradedPoly even_energy = sp(t, "x") * sp(t, "x") + sp(t, "x", 1) * sp(t, "x", 1);
    GradedPoly odd_energy = sp(t, "xi") * sp(t, "xi", 1);
    CHECK(lie_derivative(vf, even_energy).is_zero());
    CHECK(lie_derivative(vf, odd_energy).is_zero());
}

TEST_CASE("three-wave system: superfield invariants expand to first integrals") {
    SystemBuilder b(1);
    for (int a = 1; a <= 6; ++a) b.add_field("X" + std::to_string(a), Parity::Even);
    auto X = [](int a) { return SuperExpr::field(a - 1); };
    auto prod = [&](int s, int a, int bb) {
        return SuperExpr::product({SuperExpr::scalar(Rational(s)), X(a), X(bb)});
    };
    b.add_equation(0, 1, SuperExpr::sum({prod(-1, 3, 5), prod(1, 4, 6)}));
    b.add_equation(1, 1, SuperExpr::sum({prod(-1, 4, 5), prod(-1, 3, 6)}));
    b.add_equation(2, 1, SuperExpr::sum({prod(1, 1, 5), prod(1, 2, 6)}));
    b.add_equation(3, 1, SuperExpr::sum({prod(1, 2, 5), prod(-1, 1, 6)}));
    b.add_equation(4, 1, SuperExpr::sum({prod(1, 1, 3), prod(1, 2, 4)}));
    b.add_equation(5, 1, SuperExpr::sum({prod(1, 2, 3), prod(-1, 1, 4)}));
    ComponentSystem sys = b.build();
    PolyVectorField vf = field_of(sys);

    auto sq = [&](int a) { return SuperExpr::power(X(a), 2); };
    auto I1 = SuperExpr::sum({sq(1), sq(2), sq(5), sq(6)});
    auto I2 = SuperExpr::sum(
        {sq(3), sq(4), SuperExpr::negate(sq(5)), SuperExpr::negate(sq(6))});
    for (const auto& inv : {I1, I2}) {
        superspace::ThetaPoly parts = b.expand(inv);
        for (const auto& [word, poly] : parts.parts()) {
            INFO("theta word ", word);
            CHECK(lie_derivative(vf, poly).is_zero());
        }
        // and the expansion is nontrivial
        CHECK_FALSE(parts.coeff(0).is_zero());
        CHECK_FALSE(parts.coeff(1).is_zero());
    }
}
