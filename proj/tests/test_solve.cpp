#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "susyode/closedform.hpp"
#include "susyode/component.hpp"
#include "susyode/integrate.hpp"
#include "susyode/layers.hpp"
#include "susyode/picard.hpp"
#include "susyode/superexpr.hpp"

using namespace susyode;
using namespace susyode::solve;
using darboux::FirstIntegralExpr;
using darboux::PolyVectorField;
using grassmann::AlgebraCtx;
using superspace::ComponentSystem;
using superspace::OpKind;
using superspace::SuperExpr;
using superspace::SystemBuilder;
using sym::SymbolKind;

namespace {

GradedPoly sp(const SymbolTable& t, const std::string& name, int order = 0) {
    return GradedPoly::symbol(t, sym::derivative(t.find(name), order));
}

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

ComponentSystem two_even_alpha0() {
    SystemBuilder b(1);
    SymbolId alpha = b.add_constant("alpha", Rational(0));
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

double body_error_at_one(const LayerSystem& layers, double h) {
    std::vector<double> y0(layers.unknowns.size(), 0.0);
    y0[0] = -1.0; // x@1
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 1.0, h);
    return std::abs(traj.values.back()[0] - (-0.5));
}

} // namespace

TEST_CASE("flat polynomial arithmetic and evaluation") {
    RealPoly x0 = RealPoly::variable(0), x1 = RealPoly::variable(1);
    RealPoly p = x0 * x0 + RealPoly::constant(2.0) * x0 * x1 + RealPoly::constant(-3.0);
    CHECK(p.evaluate({2.0, 5.0}) == 2 * 2 + 2 * 2 * 5 - 3);
    CHECK((p + (-p)).is_zero());
    CHECK((x0 * x1) == (x1 * x0));
}

TEST_CASE("layer expansion of the planar system over two generators") {
    PolyVectorField vf = darboux::field_of(planar());
    AlgebraCtx ctx(2);
    LayerSystem layers = expand_to_layers(vf, ctx);

    REQUIRE(layers.unknowns.size() == 4);
    CHECK(layers.unknowns[0].label == "x@1");
    CHECK(layers.unknowns[1].label == "x@e1e2");
    CHECK(layers.unknowns[2].label == "xi@e1");
    CHECK(layers.unknowns[3].label == "xi@e2");
    CHECK(verify_triangular(layers));

    // xdot = x^2, xidot = 2x xi layer by layer: a'=a^2, b'=2ab, c'=2ac, d'=2ad
    std::vector<double> y = {3.0, 5.0, 7.0, 11.0};
    std::vector<double> d = layers.derivative(y);
    CHECK(d[0] == 9.0);
    CHECK(d[1] == 30.0);
    CHECK(d[2] == 42.0);
    CHECK(d[3] == 66.0);
}

TEST_CASE("round trip between flat samples and multivector states") {
    PolyVectorField vf = darboux::field_of(planar());
    AlgebraCtx ctx(2);
    LayerSystem layers = expand_to_layers(vf, ctx);
    const auto& t = layers.table;

    std::vector<double> y(4, 0.0);
    auto xval = Multivector<double>::scalar(ctx, -1.0) +
                Multivector<double>::basis(ctx, 0b11).scaled(0.25);
    auto xival = Multivector<double>::generator(ctx, 1) +
                 Multivector<double>::generator(ctx, 2).scaled(2.0);
    layers.set_state(y, t.find("x"), xval);
    layers.set_state(y, t.find("xi"), xival);
    CHECK(layers.state_value(y, t.find("x")) == xval);
    CHECK(layers.state_value(y, t.find("xi")) == xival);

    // an even state cannot carry an odd component
    CHECK_THROWS_AS(layers.set_state(y, t.find("x"),
                                     Multivector<double>::generator(ctx, 1)),
                    ParityError);
}

TEST_CASE("fourth-order convergence against the exact rational flow") {
    PolyVectorField vf = darboux::field_of(planar());
    LayerSystem layers = expand_to_layers(vf, AlgebraCtx(2));

    CHECK(body_error_at_one(layers, 1e-3) <= 1e-8);
    double coarse = body_error_at_one(layers, 0.04);
    double fine = body_error_at_one(layers, 0.02);
    double ratio = coarse / fine;
    INFO("halving ratio ", ratio);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("soul layers track their exact solutions") {
    // x(0) = -1, xi(0) = e1: x = -1/(1+t), xi = e1/(1+t)^2
    PolyVectorField vf = darboux::field_of(planar());
    AlgebraCtx ctx(2);
    LayerSystem layers = expand_to_layers(vf, ctx);
    std::vector<double> y0(4, 0.0);
    y0[0] = -1.0;
    y0[2] = 1.0;
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 1.0, 1e-3);
    CHECK_FALSE(traj.blew_up);
    CHECK(std::abs(traj.values.back()[2] - 0.25) <= 1e-8);
}

TEST_CASE("integration stops at a finite-time blow-up") {
    PolyVectorField vf = darboux::field_of(planar());
    LayerSystem layers = expand_to_layers(vf, AlgebraCtx(2));
    std::vector<double> y0(4, 0.0);
    y0[0] = 1.0; // x = 1/(1-t) escapes at t = 1
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 2.0, 1e-3);
    CHECK(traj.blew_up);
    CHECK(traj.stop_time() <= 1.01);
    CHECK(traj.stop_time() >= 0.9);
    for (double v : traj.values.back()) CHECK(std::isfinite(v));
}

TEST_CASE("csv rendering carries the layer labels") {
    PolyVectorField vf = darboux::field_of(planar());
    LayerSystem layers = expand_to_layers(vf, AlgebraCtx(2));
    std::vector<double> y0 = {1.0, 0.0, 0.5, 0.0};
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 0.01, 0.01);
    std::string csv = to_csv(layers, traj);
    CHECK(csv.substr(0, csv.find('\n')) == "t,x@1,x@e1e2,xi@e1,xi@e2");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3); // header + 2 samples
}

TEST_CASE("certified first integrals stay flat along the numeric flow") {
    ComponentSystem sys = planar();
    PolyVectorField vf = darboux::field_of(sys);
    AlgebraCtx ctx(2);
    LayerSystem layers = expand_to_layers(vf, ctx);
    const auto& t = layers.table;

    std::vector<double> y0(4, 0.0);
    y0[0] = -1.0;
    y0[2] = 1.0;
    y0[3] = 2.0;
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 1.0, 1e-3);

    FirstIntegralExpr ratio{sp(t, "xi"), sp(t, "x") * sp(t, "x"), GradedPoly()};
    std::vector<double> drift = expression_drift(layers, traj, {ratio});
    CHECK(drift[0] <= 1e-8);

    // a non-integral drifts visibly
    FirstIntegralExpr bad{sp(t, "xi"), sp(t, "x"), GradedPoly()};
    CHECK(expression_drift(layers, traj, {bad})[0] > 1e-3);
}

TEST_CASE("fermionic ratio integral holds numerically") {
    ComponentSystem sys = fermionic();
    PolyVectorField vf = darboux::field_of(sys);
    AlgebraCtx ctx(2);
    LayerSystem layers = expand_to_layers(vf, ctx);
    const auto& t = layers.table;

    std::vector<double> y0(layers.unknowns.size(), 0.0);
    layers.set_state(y0, t.find("x1"), Multivector<double>::scalar(ctx, 0.5));
    layers.set_state(y0, t.find("x2"), Multivector<double>::scalar(ctx, -1.0));
    layers.set_state(y0, t.find("xi1"), Multivector<double>::generator(ctx, 1));
    layers.set_state(y0, t.find("xi2"), Multivector<double>::generator(ctx, 2));
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 1.0, 1e-3);
    CHECK_FALSE(traj.blew_up);

    FirstIntegralExpr I{sp(t, "xi1"), sp(t, "x2"), GradedPoly()};
    CHECK(expression_drift(layers, traj, {I})[0] <= 1e-8);
}

TEST_CASE("exponential-weighted integral holds numerically") {
    ComponentSystem sys = two_even_alpha0();
    PolyVectorField vf = darboux::field_of(sys);
    AlgebraCtx ctx(2);
    LayerSystem layers = expand_to_layers(vf, ctx);
    const auto& t = layers.table;

    std::vector<double> y0(layers.unknowns.size(), 0.0);
    layers.set_state(y0, t.find("x1"), Multivector<double>::scalar(ctx, 0.3));
    layers.set_state(y0, t.find("x2"), Multivector<double>::scalar(ctx, 0.5));
    layers.set_state(y0, t.find("xi1"), Multivector<double>::generator(ctx, 1));
    layers.set_state(y0, t.find("xi2"), Multivector<double>::generator(ctx, 2));
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 1.0, 1e-3);

    FirstIntegralExpr I{sp(t, "xi1"), GradedPoly::constant(Rational(1)), -sp(t, "x2")};
    CHECK(expression_drift(layers, traj, {I})[0] <= 1e-8);
}

TEST_CASE("odd constants take Grassmann values in the layer expansion") {
    // xdot = x^2 + alpha*xi, xidot = -x^3*xi with alpha = e3
    SymbolTable t;
    SymbolId alpha = t.declare("alpha", Parity::Odd, SymbolKind::Constant);
    SymbolId x = t.declare("x", Parity::Even, SymbolKind::Dynamic);
    SymbolId xi = t.declare("xi", Parity::Odd, SymbolKind::Dynamic);
    GradedPoly X = sp(t, "x"), XI = sp(t, "xi"), AL = sp(t, "alpha");
    PolyVectorField vf{t, {x, xi}, {X * X + AL * XI, -(sym::pow(X, 3) * XI)}};

    AlgebraCtx ctx(3);
    std::map<SymbolId, Multivector<Rational>> consts;
    consts.emplace(alpha, Multivector<Rational>::generator(ctx, 3));
    LayerSystem layers = expand_to_layers(vf, ctx, consts);
    CHECK(verify_triangular(layers));

    std::vector<double> y0(layers.unknowns.size(), 0.0);
    layers.set_state(y0, x, Multivector<double>::scalar(ctx, -1.0));
    layers.set_state(y0, xi, Multivector<double>::generator(ctx, 1));
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 1.0, 1e-3);
    CHECK_FALSE(traj.blew_up);

    FirstIntegralExpr I{XI, GradedPoly::constant(Rational(1)),
                        rat(1, 2) * X * X};
    CHECK(expression_drift(layers, traj, {I})[0] <= 1e-8);

    // a value of the wrong parity is rejected
    std::map<SymbolId, Multivector<Rational>> wrong;
    wrong.emplace(alpha, Multivector<Rational>::scalar(ctx, Rational(1)));
    CHECK_THROWS_AS(expand_to_layers(vf, ctx, wrong), ParityError);
}

TEST_CASE("successive approximation reproduces the exact series") {
    PolyVectorField vf = darboux::field_of(planar());
    const auto& t = vf.table;
    AlgebraCtx ctx(1);
    auto S = [&](long n, long d = 1) {
        return Multivector<Rational>::scalar(ctx, rat(n, d));
    };
    Multivector<Rational> E1 = Multivector<Rational>::generator(ctx, 1);

    std::map<SymbolId, Multivector<Rational>> init;
    init.emplace(t.find("x"), S(1));
    init.emplace(t.find("xi"), E1);

    std::vector<TPoly> two = picard_iterate(vf, init, 2);
    REQUIRE(two.size() == 2);
    TPoly want_x(ctx);
    want_x.add_term(0, S(1));
    want_x.add_term(1, S(1));
    want_x.add_term(2, S(1));
    want_x.add_term(3, S(1, 3));
    CHECK(two[0] == want_x);
    TPoly want_xi(ctx);
    want_xi.add_term(0, E1);
    want_xi.add_term(1, E1.scaled(Rational(2)));
    want_xi.add_term(2, E1.scaled(Rational(3)));
    want_xi.add_term(3, E1.scaled(rat(4, 3)));
    CHECK(two[1] == want_xi);

    // pass a matches the exact flow exactly through degree a, and the next
    // coefficient is the first to move between passes
    std::vector<TPoly> three = picard_iterate(vf, init, 3);
    CHECK(three[0].truncated(2) == two[0].truncated(2));
    CHECK(three[0].coefficient(3) == S(1));
    CHECK(two[0].coefficient(3) == S(1, 3));
    for (int k = 0; k <= 3; ++k) {
        CHECK(three[0].coefficient(k) == S(1)); // 1/(1-t) = sum t^k
        CHECK(three[1].coefficient(k) == E1.scaled(Rational(k + 1)));
    }

    CHECK(two[1].evaluate(rat(1, 2)) == E1.scaled(rat(1, 1) + rat(2, 2) + rat(3, 4) + rat(4, 24)));

    std::map<SymbolId, Multivector<Rational>> bad;
    bad.emplace(t.find("x"), E1); // odd seed for an even state
    bad.emplace(t.find("xi"), E1);
    CHECK_THROWS_AS(picard_iterate(vf, bad, 1), ParityError);
}

TEST_CASE("closed forms verify exactly and transform to new solutions") {
    ComponentSystem sys = planar();
    PolyVectorField vf = darboux::field_of(sys);
    const auto& t = vf.table;
    AlgebraCtx ctx(1);
    auto S = [&](long n) { return Multivector<Rational>::scalar(ctx, Rational(n)); };
    Multivector<Rational> E1 = Multivector<Rational>::generator(ctx, 1);

    // x = -1/t, xi = 0 solves the system
    std::map<SymbolId, LaurentPoly> sol;
    sol.emplace(t.find("x"), LaurentPoly::term(S(-1), -1));
    sol.emplace(t.find("xi"), LaurentPoly(ctx));
    CHECK(verify_closed_form(vf, sol));

    // xi = e1/t^2 rides along as well
    std::map<SymbolId, LaurentPoly> sol2 = sol;
    sol2.insert_or_assign(t.find("xi"), LaurentPoly::term(E1, -2));
    CHECK(verify_closed_form(vf, sol2));

    // x = 1/t does not solve it
    std::map<SymbolId, LaurentPoly> bad = sol;
    bad.insert_or_assign(t.find("x"), LaurentPoly::term(S(1), -1));
    CHECK_FALSE(verify_closed_form(vf, bad));
    auto residuals = closed_form_residual(vf, bad);
    LaurentPoly want(ctx);
    want.add_term(-2, S(-2));
    CHECK(residuals[0] == want);

    // the variation moves (-1/t, 0) to (-1/t, -e1/t^2), still a solution
    auto moved = transform_solution(sys, sol, 1);
    CHECK(moved.at(t.find("x")) == sol.at(t.find("x")));
    CHECK(moved.at(t.find("xi")) == LaurentPoly::term(-E1, -2));
    CHECK(verify_closed_form(vf, moved));
}

TEST_CASE("trajectory transform matches re-integration from shifted data") {
    ComponentSystem sys = planar();
    PolyVectorField vf = darboux::field_of(sys);
    AlgebraCtx ctx(2);
    LayerSystem layers = expand_to_layers(vf, ctx);
    const auto& t = layers.table;

    std::vector<double> y0(4, 0.0);
    layers.set_state(y0, t.find("x"), Multivector<double>::scalar(ctx, -1.0));
    layers.set_state(y0, t.find("xi"), Multivector<double>::generator(ctx, 1));
    Trajectory traj = integrate_rk4(layers, y0, 0.0, 1.0, 1e-2);

    Trajectory shifted = transform_trajectory(layers, traj, sys, 2);
    Trajectory reintegrated =
        integrate_rk4(layers, shifted.values.front(), 0.0, 1.0, 1e-2);
    REQUIRE(shifted.values.size() == reintegrated.values.size());
    double worst = 0.0;
    for (size_t row = 0; row < shifted.values.size(); ++row)
        for (size_t i = 0; i < shifted.values[row].size(); ++i)
            worst = std::max(worst, std::abs(shifted.values[row][i] -
                                             reintegrated.values[row][i]));
    CHECK(worst <= 1e-6);

    // the variation actually populates the e1e2 and e2 layers
    double moved = 0.0;
    for (size_t row = 0; row < shifted.values.size(); ++row)
        moved = std::max({moved,
                          std::abs(shifted.values[row][1] - traj.values[row][1]),
                          std::abs(shifted.values[row][3] - traj.values[row][3])});
    CHECK(moved > 1e-3);
}
