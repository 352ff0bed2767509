// End-to-end acceptance suite: one pass/fail line per criterion, exercising
// the bundled systems and the public API at pinned values and tolerances.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "susyode/closedform.hpp"
#include "susyode/component.hpp"
#include "susyode/darboux.hpp"
#include "susyode/integrate.hpp"
#include "susyode/nonassoc.hpp"
#include "susyode/picard.hpp"
#include "susyode/superexpr.hpp"
#include "susyode/superfield.hpp"
#include "susyode/systemfile.hpp"

using namespace susyode;
using superspace::ComponentSystem;
using superspace::OpKind;
using superspace::SuperExpr;
using superspace::SuperfieldDecl;
using superspace::SystemBuilder;
using superspace::ThetaPoly;
using superspace::declare_superfield;
using superspace::expand_power;
using grassmann::AlgebraCtx;
using grassmann::Multivector;
using grassmann::Word;
using sym::GradedPoly;
using sym::SymbolId;
using sym::SymbolKind;
using sym::SymbolTable;

namespace {

// ---------------------------------------------------------------------------
// reporting

struct Checker {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

bool report(int number, const std::string& label, Checker& c) {
    bool ok = c.failures.empty();
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", number, label.c_str());
    for (const auto& f : c.failures) std::printf("       - %s\n", f.c_str());
    return ok;
}

// ---------------------------------------------------------------------------
// shared helpers

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string sys_path(const std::string& name) {
    return std::string(SYSTEMS_DIR) + "/" + name + ".susy";
}

io::BuiltSystem load(const std::string& name) {
    return io::build_system(io::parse_system(slurp(sys_path(name))));
}

GradedPoly sp(const SymbolTable& t, const std::string& name, int order = 0) {
    return GradedPoly::symbol(t, sym::derivative(t.find(name), order));
}

GradedPoly cq(long num, long den = 1) { return GradedPoly::constant(rat(num, den)); }

ComponentSystem planar_system() {
    SystemBuilder b(1);
    int X = b.add_field("X", Parity::Even);
    b.add_equation(X, 1, SuperExpr::power(SuperExpr::field(X), 2));
    return b.build();
}

ComponentSystem simple_quadratic_system() {
    SystemBuilder b(1);
    int X = b.add_field("X", Parity::Even);
    b.add_equation(X, 1,
                   SuperExpr::sum({SuperExpr::field(X),
                                   SuperExpr::power(SuperExpr::field(X), 2)}));
    return b.build();
}

// ---------------------------------------------------------------------------
// criterion 1: component expansion golden suite

const char* kPlanarGolden =
    "dt(x) = x^2\n"
    "dt(xi) = 2*x*xi\n";

const char* kFermionicGolden =
    "dt(xi1) = x2*xi1\n"
    "dt(x1) = x1*x2 + x2*xi1.xi2\n"
    "dt(xi2) = x2*xi2\n"
    "dt(x2) = x2^2\n";

const char* kTwoEvenGolden =
    "dt(x1) = alpha*x1 + xi1.xi2\n"
    "dt(xi1) = alpha*xi1 + x2*xi1 - alpha*x1*xi2\n"
    "dt(x2) = x2\n"
    "dt(xi2) = xi2\n";

const char* kChiSquareGolden =
    "dt(x) = x^2 - xi1.xi2\n"
    "dt(xi1) = 2*x*xi1 - chi*xi1 + x^2*xi2\n"
    "dt(xi2) = 2*x*xi2 - chi*xi2 - x^2*xi1\n"
    "dt(chi) = 2*chi*x - chi^2 - 2*xi1.xi2 - x^4\n";

const char* kHenonHeilesGolden =
    "dt^2(x1) = -x1 - 2*lambda*xi1_1.xi2_3\n"
    "dt^2(xi1_1) = -xi1_1 + 2*dt(x1)*lambda*xi2_3 - 2*chi3*lambda*xi1_1\n"
    "dt^2(xi2_1) = -xi2_1 - 2*chi1*lambda*xi2_3 - 2*dt(x3)*lambda*xi1_1\n"
    "dt^2(chi1) = -chi1 - 2*dt(x1)*dt(x3)*lambda - 2*chi1*chi3*lambda - "
    "2*lambda*xi1_1.dt(xi1_3) + 2*lambda*dt(xi2_1).xi2_3\n"
    "dt^2(x3) = -x3 - lambda*xi1_1.xi2_1 + lambda*xi1_3.xi2_3\n"
    "dt^2(xi1_3) = -xi1_3 + dt(x1)*lambda*xi2_1 - chi1*lambda*xi1_1 - "
    "dt(x3)*lambda*xi2_3 + chi3*lambda*xi1_3\n"
    "dt^2(xi2_3) = -xi2_3 - dt(x1)*lambda*xi1_1 - chi1*lambda*xi2_1 + "
    "dt(x3)*lambda*xi1_3 + chi3*lambda*xi2_3\n"
    "dt^2(chi3) = -chi3 - dt(x1)^2*lambda - chi1^2*lambda + dt(x3)^2*lambda + "
    "chi3^2*lambda - lambda*xi1_1.dt(xi1_1) - lambda*xi2_1.dt(xi2_1) + "
    "lambda*xi1_3.dt(xi1_3) + lambda*xi2_3.dt(xi2_3)\n";

const char* kThreeWaveOddXi1 =
    "dt(xi1) = -1/2*x3*xi5 + 1/2*x4*xi6 - 1/2*x5*xi3 + 1/2*x6*xi4";

const char* kThreeWaveOddX1 =
    "dt(x1) = -x3*x5 + x4*x6 - 1/2*x2*xi3.xi4 - 1/2*x2*xi5.xi6 + "
    "1/4*x3*xi1.xi3 - 1/4*x3*xi2.xi4 + 1/4*x4*xi1.xi4 + 1/4*x4*xi2.xi3 + "
    "1/4*x5*xi1.xi5 - 1/4*x5*xi2.xi6 + 1/4*x6*xi1.xi6 + 1/4*x6*xi2.xi5";

bool criterion_expansion_goldens() {
    Checker c;

    auto check_golden = [&](const std::string& name, const std::string& want) {
        std::string got = superspace::render(load(name).sys);
        c.require(got == want, name + ": canonical expansion differs");
    };

    check_golden("planar-f", kPlanarGolden);
    check_golden("fermionic-2field", kFermionicGolden);
    check_golden("two-even-nontrivial", kTwoEvenGolden);
    check_golden("n2-chi-square", kChiSquareGolden);
    check_golden("henon-heiles-n2", kHenonHeilesGolden);

    // Cross-check the first four against systems assembled through the
    // builder API rather than the file front end.
    c.require(superspace::render(planar_system()) == kPlanarGolden,
              "planar builder expansion differs");

    {
        SystemBuilder b(1);
        int Y1 = b.add_field("Y1", Parity::Odd);
        int Y2 = b.add_field("Y2", Parity::Odd);
        auto D = [](int f) {
            return SuperExpr::apply(OpKind::Dsum, 0, SuperExpr::field(f));
        };
        b.add_equation(Y1, 1, SuperExpr::product({SuperExpr::field(Y1), D(Y2)}));
        b.add_equation(Y2, 1, SuperExpr::product({SuperExpr::field(Y2), D(Y2)}));
        c.require(superspace::render(b.build()) == kFermionicGolden,
                  "fermionic builder expansion differs");
    }

    {
        SystemBuilder b(1);
        SymbolId alpha = b.add_constant("alpha", Parity::Even);
        int X1 = b.add_field("X1", Parity::Even);
        int X2 = b.add_field("X2", Parity::Even);
        auto D = [](int f) {
            return SuperExpr::apply(OpKind::Dsum, 0, SuperExpr::field(f));
        };
        b.add_equation(X1, 1,
                       SuperExpr::sum({SuperExpr::product({SuperExpr::constant_ref(alpha),
                                                           SuperExpr::field(X1)}),
                                       SuperExpr::product({D(X1), D(X2)})}));
        b.add_equation(X2, 1, SuperExpr::field(X2));
        c.require(superspace::render(b.build()) == kTwoEvenGolden,
                  "two-even builder expansion differs");
    }

    {
        SystemBuilder b(2);
        int X = b.add_field("X", Parity::Even);
        auto D = [&](int i) {
            return SuperExpr::apply(OpKind::Dsub, i, SuperExpr::field(X));
        };
        b.add_equation(X, 1,
                       SuperExpr::sum({SuperExpr::power(SuperExpr::field(X), 2),
                                       SuperExpr::product({D(2), D(1)})}));
        c.require(superspace::render(b.build()) == kChiSquareGolden,
                  "quadratic-with-cross-term builder expansion differs");
    }

    {
        std::string rendered = superspace::render(load("three-wave-odd").sys);
        std::istringstream lines(rendered);
        std::string xi1_line, x1_line;
        std::getline(lines, xi1_line);
        std::getline(lines, x1_line);
        c.require(xi1_line == kThreeWaveOddXi1, "three-wave odd xi1 equation differs");
        c.require(x1_line == kThreeWaveOddX1, "three-wave odd x1 equation differs");
    }

    return report(1, "component expansion reproduces the golden equations", c);
}

// ---------------------------------------------------------------------------
// criterion 2: operator algebra

bool criterion_operator_algebra() {
    Checker c;

    for (int n = 1; n <= 3; ++n) {
        superspace::AlgebraCheck r = superspace::operator_algebra_check(n);
        c.require(r.ok, "pairwise relations fail for N=" + std::to_string(n) +
                            (r.failures.empty() ? "" : ": " + r.failures.front()));
        c.require(r.checked == 2 * (3 * n * n + 3),
                  "unexpected relation count for N=" + std::to_string(n));
    }

    // Summed charges on a generic superfield of either parity.
    for (int n = 1; n <= 3; ++n) {
        for (Parity p : {Parity::Even, Parity::Odd}) {
            SymbolTable t;
            SuperfieldDecl f = declare_superfield(t, "X", p, n);
            ThetaPoly y = ThetaPoly::of_field(f, t);

            // {Q, Q} = 2 Q^2 = 2N d/dt, so the composition itself is N d/dt.
            ThetaPoly qq = y.applyQsum(t).applyQsum(t);
            ThetaPoly n_dt = ThetaPoly::from_poly(n, GradedPoly::constant(Rational(n)));
            c.require((qq + qq - n_dt * y.dt(t) - n_dt * y.dt(t)).is_zero(),
                      "summed charge anticommutator is not 2N d/dt at N=" + std::to_string(n));

            ThetaPoly mixed = y.applyQsum(t).applyDsum(t) + y.applyDsum(t).applyQsum(t);
            c.require(mixed.is_zero(),
                      "summed charge and covariant derivative fail to anticommute at N=" +
                          std::to_string(n));
        }
    }

    // D^2 = -d/dt for a single theta.
    for (Parity p : {Parity::Even, Parity::Odd}) {
        SymbolTable t;
        SuperfieldDecl f = declare_superfield(t, "X", p, 1);
        ThetaPoly y = ThetaPoly::of_field(f, t);
        c.require((y.applyD(t, 1).applyD(t, 1) + y.dt(t)).is_zero(),
                  "covariant derivative squared is not -d/dt");
    }

    return report(2, "superspace operator algebra holds identically", c);
}

// ---------------------------------------------------------------------------
// criterion 3: invariance of every bundled variation-closed system

bool criterion_susy_invariance() {
    Checker c;

    const char* names[] = {"planar-f",         "fermionic-2field", "two-even-nontrivial",
                           "n2-chi-square",    "henon-heiles-n2",  "three-wave-odd",
                           "darboux-halphen",  "euler-arnold-n3"};
    for (const char* name : names) {
        io::BuiltSystem built = load(name);
        for (int g = 0; g <= built.sys.n_theta; ++g) {
            superspace::SusyCheck r = superspace::check_susy_invariance(built.sys, g);
            c.require(r.invariant, std::string(name) + ": residual under generator " +
                                       std::to_string(g));
        }
    }

    // Deliberately broken companion: dt(x) = x^2 with the xi equation zeroed.
    ComponentSystem broken = planar_system();
    broken.equations[1].rhs = GradedPoly();
    superspace::SusyCheck r = superspace::check_susy_invariance(broken, 0);
    c.require(!r.invariant, "zeroed companion equation still reports invariance");
    if (!r.invariant) {
        const auto& t = r.table;
        GradedPoly want = cq(2) * GradedPoly::symbol(t, r.eps) * sym::pow(sp(t, "x"), 3);
        c.require(r.residuals.size() == 2 && r.residuals[1].second == want,
                  "broken system residual is not 2*eps*x^3");
    }

    return report(3, "supersymmetry variation annihilates every bundled system", c);
}

// ---------------------------------------------------------------------------
// criterion 4: multinomial power expansion

bool criterion_power_expansion() {
    Checker c;

    SymbolTable t;
    SuperfieldDecl f = declare_superfield(t, "X", Parity::Even, 2);
    GradedPoly x = sp(t, "x"), xi1 = sp(t, "xi1"), xi2 = sp(t, "xi2"), chi = sp(t, "chi");

    for (int n = 2; n <= 5; ++n) {
        ThetaPoly got = expand_power(f, t, n);
        GradedPoly fx = sym::pow(x, n);
        GradedPoly fpx = cq(n) * sym::pow(x, n - 1);
        GradedPoly fppx = cq(n) * cq(n - 1) * sym::pow(x, n - 2);

        bool closed = got.coeff(0b00) == fx && got.coeff(0b01) == fpx * xi1 &&
                      got.coeff(0b10) == fpx * xi2 &&
                      got.coeff(0b11) == fpx * chi - fppx * xi1 * xi2;
        c.require(closed, "derivative closed form fails at n=" + std::to_string(n));

        ThetaPoly prod = ThetaPoly::of_field(f, t);
        for (int k = 1; k < n; ++k) prod = prod * ThetaPoly::of_field(f, t);
        c.require(got == prod, "n-fold product oracle fails at n=" + std::to_string(n));
    }

    return report(4, "power expansion matches the derivative form and the product oracle", c);
}

// ---------------------------------------------------------------------------
// criterion 5: conserved-expression certification

bool criterion_first_integrals() {
    Checker c;

    // xi / x^2 on dt(x) = x^2, and the cofactor of xi is 2x.
    {
        darboux::PolyVectorField vf = darboux::field_of(planar_system());
        const auto& t = vf.table;
        darboux::FirstIntegralExpr ratio{sp(t, "xi"), sym::pow(sp(t, "x"), 2), GradedPoly()};
        c.require(darboux::verify_first_integral(vf, ratio), "xi/x^2 fails on the planar flow");

        auto kappa = darboux::search_cofactor(vf, sp(t, "xi"), 1);
        c.require(kappa && *kappa == cq(2) * sp(t, "x"),
                  "cofactor of xi on the planar flow is not 2x");
    }

    // xi * exp(x^2/2) on dt(x) = x^2 + alpha*xi, dt(xi) = -x^3*xi with an odd
    // constant alpha; the cofactor of xi is -x^3.
    {
        SymbolTable t;
        SymbolId x = t.declare("x", Parity::Even, SymbolKind::Dynamic);
        SymbolId xi = t.declare("xi", Parity::Odd, SymbolKind::Dynamic);
        t.declare("alpha", Parity::Odd, SymbolKind::Constant);
        GradedPoly X = sp(t, "x"), XI = sp(t, "xi"), A = sp(t, "alpha");
        darboux::PolyVectorField vf{t, {x, xi},
                                    {X * X + A * XI, -sym::pow(X, 3) * XI}};

        darboux::FirstIntegralExpr damped{XI, cq(1), rat(1, 2) * X * X};
        c.require(darboux::verify_first_integral(vf, damped),
                  "xi*exp(x^2/2) fails on the odd-constant flow");

        auto kappa = darboux::search_cofactor(vf, XI, 3);
        c.require(kappa && *kappa == -sym::pow(X, 3),
                  "cofactor of xi on the odd-constant flow is not -x^3");
    }

    // The three conserved ratios of the fermionic system; x1/x2 must fail.
    {
        io::BuiltSystem built = load("fermionic-2field");
        darboux::PolyVectorField vf = darboux::field_of(built.sys);
        const auto& t = built.sys.table;
        GradedPoly x1 = sp(t, "x1"), x2 = sp(t, "x2");
        GradedPoly xi1 = sp(t, "xi1"), xi2 = sp(t, "xi2");

        darboux::FirstIntegralExpr r1{xi1, x2, GradedPoly()};
        darboux::FirstIntegralExpr r2{xi2, x2, GradedPoly()};
        darboux::FirstIntegralExpr r3{x1 - xi1 * xi2, x2, GradedPoly()};
        darboux::FirstIntegralExpr bad{x1, x2, GradedPoly()};
        c.require(darboux::verify_first_integral(vf, r1), "xi1/x2 fails on the fermionic flow");
        c.require(darboux::verify_first_integral(vf, r2), "xi2/x2 fails on the fermionic flow");
        c.require(darboux::verify_first_integral(vf, r3),
                  "(x1 - xi1*xi2)/x2 fails on the fermionic flow");
        c.require(!darboux::verify_first_integral(vf, bad),
                  "x1/x2 wrongly certified on the fermionic flow");
    }

    // xi2/x2 holds for symbolic alpha; xi1*exp(-x2) holds once alpha = 0.
    {
        io::BuiltSystem built = load("two-even-nontrivial");
        darboux::PolyVectorField vf = darboux::field_of(built.sys);
        const auto& t = built.sys.table;
        darboux::FirstIntegralExpr ratio{sp(t, "xi2"), sp(t, "x2"), GradedPoly()};
        c.require(darboux::verify_first_integral(vf, ratio),
                  "xi2/x2 fails on the two-even flow with symbolic alpha");
    }
    {
        SystemBuilder b(1);
        int X1 = b.add_field("X1", Parity::Even);
        int X2 = b.add_field("X2", Parity::Even);
        auto D = [](int f) {
            return SuperExpr::apply(OpKind::Dsum, 0, SuperExpr::field(f));
        };
        b.add_equation(X1, 1, SuperExpr::product({D(X1), D(X2)}));
        b.add_equation(X2, 1, SuperExpr::field(X2));
        ComponentSystem sys = b.build();
        darboux::PolyVectorField vf = darboux::field_of(sys);
        const auto& t = sys.table;
        darboux::FirstIntegralExpr damped{sp(t, "xi1"), cq(1), -sp(t, "x2")};
        c.require(darboux::verify_first_integral(vf, damped),
                  "xi1*exp(-x2) fails on the two-even flow at alpha = 0");
    }

    return report(5, "conserved expressions certify and the decoy is rejected", c);
}

// ---------------------------------------------------------------------------
// criterion 6: successive approximation

bool criterion_picard() {
    Checker c;

    ComponentSystem sys = planar_system();
    darboux::PolyVectorField vf = darboux::field_of(sys);
    const auto& t = sys.table;

    AlgebraCtx ctx(1);
    using MRat = Multivector<Rational>;
    std::map<SymbolId, MRat> init;
    init.emplace(t.find("x"), MRat::scalar(ctx, Rational(1)));
    init.emplace(t.find("xi"), MRat::generator(ctx, 1));

    auto series = solve::picard_iterate(vf, init, 2);
    if (series.size() != 2) {
        c.require(false, "expected two state series");
        return report(6, "two passes of successive approximation are exact", c);
    }

    MRat alpha = MRat::generator(ctx, 1);
    Rational want_x[] = {rat(1), rat(1), rat(1), rat(1, 3)};
    Rational want_xi[] = {rat(1), rat(2), rat(3), rat(4, 3)};
    for (int k = 0; k <= 3; ++k) {
        c.require(series[0].coefficient(k) == MRat::scalar(ctx, want_x[k]),
                  "body series coefficient t^" + std::to_string(k));
        c.require(series[1].coefficient(k) == alpha.scaled(want_xi[k]),
                  "soul series coefficient t^" + std::to_string(k));
    }
    c.require(series[0].degree() == 3 && series[1].degree() == 3,
              "series carry terms beyond t^3");

    return report(6, "two passes of successive approximation are exact", c);
}

// ---------------------------------------------------------------------------
// criterion 7: variation of an exact solution

bool criterion_transform() {
    Checker c;

    io::BuiltSystem built = load("planar-f");
    darboux::PolyVectorField vf = darboux::field_of(built.sys);
    const auto& t = built.sys.table;
    AlgebraCtx ctx(built.algebra_l);
    using MRat = Multivector<Rational>;

    c.require(solve::verify_closed_form(vf, built.seeds), "seed pair is not a solution");

    auto image = solve::transform_solution(built.sys, built.seeds, 1);
    solve::LaurentPoly want_x = solve::LaurentPoly::term(MRat::scalar(ctx, rat(-1)), -1);
    solve::LaurentPoly want_xi =
        solve::LaurentPoly::term(MRat::generator(ctx, 1).scaled(rat(-1)), -2);
    c.require(image.at(t.find("x")) == want_x, "even component moved away from -1/t");
    c.require(image.at(t.find("xi")) == want_xi, "odd component is not -e1/t^2");

    auto residuals = solve::closed_form_residual(vf, image);
    for (const auto& r : residuals)
        c.require(r.is_zero(), "transformed pair leaves a nonzero residual");

    return report(7, "the variation maps the seed solution to another exact solution", c);
}

// ---------------------------------------------------------------------------
// criterion 8: commutative non-associative products

bool criterion_nonassoc() {
    Checker c;

    using nonassoc::BilinearProduct;
    using nonassoc::QuadraticMap;

    QuadraticMap graded = nonassoc::homogenize(simple_quadratic_system());
    BilinearProduct B0 = nonassoc::polarize(graded);

    // Golden bilinear forms of the embedded graded flow.
    {
        const auto& t = B0.table();
        GradedPoly x = sp(t, "x"), xi = sp(t, "xi"), u = sp(t, "u");
        GradedPoly y = sp(t, "x_y"), chi = sp(t, "xi_y"), v = sp(t, "u_y");
        c.require(B0.forms().size() == 3 &&
                      B0.forms()[0] == rat(1, 2) * (u * y + v * x) + x * y &&
                      B0.forms()[1] == rat(1, 2) * (u * chi + v * xi) + x * chi + y * xi &&
                      B0.forms()[2].is_zero(),
                  "polarized forms of the graded flow differ from the golden pair");
    }

    // Golden bilinear forms of the three-mode chain embedding.
    SymbolTable chain_t;
    std::vector<SymbolId> chain_coords;
    for (const char* name : {"x1", "x2", "x3"})
        chain_coords.push_back(chain_t.declare(name, Parity::Even, SymbolKind::Dynamic));
    std::vector<GradedPoly> chain_rhs = {sp(chain_t, "x2"), sp(chain_t, "x3"),
                                         cq(6) * sp(chain_t, "x1") * sp(chain_t, "x2")};
    QuadraticMap chain = nonassoc::homogenize(chain_t, chain_coords, chain_rhs);
    BilinearProduct B1 = nonassoc::polarize(chain);
    {
        const auto& t = B1.table();
        auto half = rat(1, 2);
        GradedPoly u = sp(t, "u"), v = sp(t, "u_y");
        c.require(B1.forms().size() == 4 &&
                      B1.forms()[0] == half * (u * sp(t, "x2_y") + v * sp(t, "x2")) &&
                      B1.forms()[1] == half * (u * sp(t, "x3_y") + v * sp(t, "x3")) &&
                      B1.forms()[2] == cq(3) * (sp(t, "x1") * sp(t, "x2_y") +
                                               sp(t, "x1_y") * sp(t, "x2")) &&
                      B1.forms()[3].is_zero(),
                  "polarized forms of the chain embedding differ from the golden set");
    }

    // Both products admit a non-associativity witness within the seeded probe.
    for (BilinearProduct* B : {&B0, &B1}) {
        nonassoc::AlgebraReport r = nonassoc::algebra_report(*B, 0, 1000);
        c.require(r.commutative, "product is not commutative");
        c.require(!r.associative && r.witness.has_value(),
                  "no associativity witness found in 1000 trials");
        if (r.witness) {
            auto left = B->apply(B->apply(r.witness->x, r.witness->y), r.witness->z);
            auto right = B->apply(r.witness->x, B->apply(r.witness->y, r.witness->z));
            c.require(left == r.witness->left && right == r.witness->right && !(left == right),
                      "reported witness does not reproduce");
        }
    }

    // Flow coefficients through third order in closed product form.
    {
        auto coeff = nonassoc::taylor_coefficients(B1, 3);
        std::vector<GradedPoly> X = B1.identity();
        std::vector<GradedPoly> X2 = nonassoc::left_power(B1, 2);
        std::vector<GradedPoly> X3 = nonassoc::left_power(B1, 3);
        std::vector<GradedPoly> X4 = nonassoc::left_power(B1, 4);
        std::vector<GradedPoly> X2X2 = B1.apply(X2, X2);
        bool ok = coeff.size() == 4;
        for (size_t m = 0; ok && m < X.size(); ++m) {
            ok = coeff[0][m] == X[m] && coeff[1][m] == X2[m] && coeff[2][m] == X3[m] &&
                 coeff[3][m] == rat(1, 3) * (X2X2[m] + cq(2) * X4[m]);
        }
        c.require(ok, "closed product form of the flow coefficients fails through t^3");
    }

    // Order-8 numeric coefficients reproduce the integrated flow at t = 0.05.
    {
        AlgebraCtx ctx(1);
        using MRat = Multivector<Rational>;
        std::vector<MRat> x0 = {MRat::scalar(ctx, rat(1, 2)), MRat::generator(ctx, 1),
                                MRat::scalar(ctx, rat(1))};
        auto coeff = nonassoc::taylor_coefficients(B0, x0, 8);

        Rational tq = rat(1, 20);
        std::vector<MRat> sum = {MRat::zero(ctx), MRat::zero(ctx), MRat::zero(ctx)};
        Rational tk = rat(1);
        for (size_t k = 0; k < coeff.size(); ++k) {
            for (size_t i = 0; i < sum.size(); ++i) sum[i] += coeff[k][i].scaled(tk);
            tk = tk * tq;
        }

        ComponentSystem sys = simple_quadratic_system();
        darboux::PolyVectorField vf = darboux::field_of(sys);
        solve::LayerSystem layers = solve::expand_to_layers(vf, ctx);
        std::vector<double> y0(layers.unknowns.size(), 0.0);
        layers.set_state(y0, sys.table.find("x"), Multivector<double>::scalar(ctx, 0.5));
        layers.set_state(y0, sys.table.find("xi"), Multivector<double>::generator(ctx, 1));
        solve::Trajectory traj = solve::integrate_rk4(layers, y0, 0.0, 0.05, 1e-3);
        c.require(!traj.blew_up, "reference integration did not finish");

        const std::vector<double>& yend = traj.values.back();
        double x_err = std::abs(grassmann::to_double(sum[0]).coefficient(0) -
                                layers.state_value(yend, sys.table.find("x")).coefficient(0));
        double xi_err = std::abs(grassmann::to_double(sum[1]).coefficient(1) -
                                 layers.state_value(yend, sys.table.find("xi")).coefficient(1));
        c.require(x_err <= 1e-6, "body partial sum misses the trajectory");
        c.require(xi_err <= 1e-6, "soul partial sum misses the trajectory");
    }

    return report(8, "product polarization, witnesses and flow coefficients agree", c);
}

// ---------------------------------------------------------------------------
// criterion 9: numeric properties of the integrator

bool criterion_numeric() {
    Checker c;

    io::BuiltSystem planar = load("planar-f");
    darboux::PolyVectorField planar_vf = darboux::field_of(planar.sys);
    AlgebraCtx ctx(planar.algebra_l);
    solve::LayerSystem layers = solve::expand_to_layers(planar_vf, ctx);
    SymbolId x_sym = planar.sys.table.find("x");
    SymbolId xi_sym = planar.sys.table.find("xi");

    auto start = [&]() {
        std::vector<double> y0(layers.unknowns.size(), 0.0);
        for (const auto& [s, v] : planar.init)
            layers.set_state(y0, s, grassmann::to_double(v));
        return y0;
    };
    auto body_error_at_one = [&](double h) {
        solve::Trajectory traj = solve::integrate_rk4(layers, start(), 0.0, 1.0, h);
        double x_end = layers.state_value(traj.values.back(), x_sym).coefficient(0);
        return std::abs(x_end - (-0.5)); // exact solution -1/(t+1)
    };

    // Fourth-order accuracy against the exact solution, and the step-halving
    // gain close to the theoretical factor 16.
    c.require(body_error_at_one(1e-3) <= 1e-8, "h = 1e-3 error above 1e-8 at t = 1");
    double ratio = body_error_at_one(0.04) / body_error_at_one(0.02);
    c.require(ratio >= 12.0 && ratio <= 20.0, "halving gain outside [12, 20]");

    // Certified conserved expressions drift below 1e-8 over [0, 1].
    {
        solve::Trajectory traj = solve::integrate_rk4(layers, start(), 0.0, 1.0, 1e-3);
        std::vector<darboux::FirstIntegralExpr> exprs;
        for (const auto& integral : planar.integrals)
            exprs.insert(exprs.end(), integral.parts.begin(), integral.parts.end());
        for (double d : solve::expression_drift(layers, traj, exprs))
            c.require(d < 1e-8, "planar conserved expression drifts");

        // The odd layer obeys its quadrature: xi(t) = xi(0) exp(int 2x ds).
        int x_at = layers.find(x_sym, 0);
        int xi_at = layers.find(xi_sym, 1);
        double integral = 0.0;
        double worst = 0.0;
        for (size_t i = 0; i < traj.times.size(); ++i) {
            if (i > 0) {
                double dt = traj.times[i] - traj.times[i - 1];
                integral += 0.5 * dt *
                            (2.0 * traj.values[i - 1][x_at] + 2.0 * traj.values[i][x_at]);
            }
            double predicted = traj.values[0][xi_at] * std::exp(integral);
            worst = std::max(worst, std::abs(predicted - traj.values[i][xi_at]));
        }
        c.require(worst <= 1e-6, "odd layer leaves its quadrature");
    }

    // The fermionic system conserves its three certified ratios numerically.
    {
        io::BuiltSystem built = load("fermionic-2field");
        darboux::PolyVectorField vf = darboux::field_of(built.sys);
        AlgebraCtx fctx(2);
        solve::LayerSystem fl = solve::expand_to_layers(vf, fctx);
        const auto& t = built.sys.table;
        std::vector<double> y0(fl.unknowns.size(), 0.0);
        fl.set_state(y0, t.find("x1"), Multivector<double>::scalar(fctx, 1.0 / 3.0));
        fl.set_state(y0, t.find("x2"), Multivector<double>::scalar(fctx, 0.5));
        fl.set_state(y0, t.find("xi1"), Multivector<double>::generator(fctx, 1));
        fl.set_state(y0, t.find("xi2"), Multivector<double>::generator(fctx, 2));
        solve::Trajectory traj = solve::integrate_rk4(fl, y0, 0.0, 1.0, 1e-3);
        c.require(!traj.blew_up, "fermionic integration did not finish");

        GradedPoly x1 = sp(t, "x1"), x2 = sp(t, "x2");
        GradedPoly xi1 = sp(t, "xi1"), xi2 = sp(t, "xi2");
        std::vector<darboux::FirstIntegralExpr> exprs = {
            {xi1, x2, GradedPoly()}, {xi2, x2, GradedPoly()}, {x1 - xi1 * xi2, x2, GradedPoly()}};
        for (double d : solve::expression_drift(fl, traj, exprs))
            c.require(d < 1e-8, "fermionic conserved expression drifts");
    }

    // Both quadratic invariants of the bundled three-wave system hold.
    {
        io::BuiltSystem built = load("three-wave-even");
        darboux::PolyVectorField vf = darboux::field_of(built.sys);
        AlgebraCtx wctx(built.algebra_l);
        solve::LayerSystem wl = solve::expand_to_layers(vf, wctx);
        std::vector<double> y0(wl.unknowns.size(), 0.0);
        for (const auto& [s, v] : built.init) wl.set_state(y0, s, grassmann::to_double(v));
        solve::Trajectory traj = solve::integrate_rk4(wl, y0, 0.0, 1.0, 1e-3);
        c.require(!traj.blew_up, "three-wave integration did not finish");

        const auto& t = built.sys.table;
        auto sq = [&](const char* n) { return sym::pow(sp(t, n), 2); };
        std::vector<GradedPoly> invariants = {
            sq("x1") + sq("x2") + sq("x5") + sq("x6"),
            sq("x3") + sq("x4") - sq("x5") - sq("x6")};
        for (double d : solve::invariant_drift(wl, traj, invariants))
            c.require(d < 1e-8, "three-wave invariant drifts");
    }

    return report(9, "integrator meets order, drift and quadrature tolerances", c);
}

// ---------------------------------------------------------------------------
// criterion 10: kernel properties and file round-trips

bool criterion_kernel() {
    Checker c;

    using MRat = Multivector<Rational>;
    std::mt19937 rng(12345);

    auto random_rational = [&]() {
        long num = static_cast<long>(rng() % 13) - 6;
        long den = 1 + static_cast<long>(rng() % 4);
        return rat(num == 0 ? 1 : num, den);
    };
    auto random_mv = [&](AlgebraCtx ctx, int parity /* -1 any, 0 even, 1 odd */,
                         bool soul_only) {
        MRat m = MRat::zero(ctx);
        Word span = Word(1) << ctx.generators();
        int terms = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < terms; ++i) {
            Word w = static_cast<Word>(rng()) & (span - 1);
            if (parity >= 0 && static_cast<int>(grassmann::word_length(w) & 1) != parity)
                continue;
            if (soul_only && w == 0) continue;
            m += MRat::basis(ctx, w).scaled(random_rational());
        }
        return m;
    };

    long failures = 0;
    const long total = 10000;
    for (long i = 0; i < total; ++i) {
        AlgebraCtx ctx(1 + static_cast<int>(rng() % 8));
        switch (i % 4) {
            case 0: { // associativity
                MRat a = random_mv(ctx, -1, false), b = random_mv(ctx, -1, false),
                     x = random_mv(ctx, -1, false);
                if (!((a * b) * x == a * (b * x))) ++failures;
                break;
            }
            case 1: { // graded commutation of homogeneous elements
                int pa = static_cast<int>(rng() % 2), pb = static_cast<int>(rng() % 2);
                MRat a = random_mv(ctx, pa, false), b = random_mv(ctx, pb, false);
                MRat ba = b * a;
                if (!(a * b == (pa && pb ? ba.scaled(rat(-1)) : ba))) ++failures;
                break;
            }
            case 2: { // nilpotency of odd elements and of souls
                MRat a = random_mv(ctx, 1, false);
                if (!(a * a).is_zero()) ++failures;
                MRat s = random_mv(ctx, -1, true);
                MRat p = MRat::scalar(ctx, Rational(1));
                for (int k = 0; k <= ctx.generators(); ++k) p = p * s;
                if (!p.is_zero()) ++failures;
                break;
            }
            default: { // two-sided inverse for invertible bodies
                MRat a = random_mv(ctx, -1, true) + MRat::scalar(ctx, random_rational());
                MRat inv = grassmann::inverse(a);
                MRat one = MRat::scalar(ctx, Rational(1));
                if (!(a * inv == one && inv * a == one)) ++failures;
                break;
            }
        }
    }
    c.require(failures == 0,
              std::to_string(failures) + " of " + std::to_string(total) +
                  " randomized kernel checks failed");

    // Canonical file form is a fixed point of parse-then-render.
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SYSTEMS_DIR)) {
        if (entry.path().extension() != ".susy") continue;
        ++files;
        std::string name = entry.path().filename().string();
        io::SystemFile first = io::parse_system(slurp(entry.path().string()));
        std::string canon = io::render(first);
        io::SystemFile second = io::parse_system(canon);
        c.require(io::render(second) == canon, name + ": canonical form is not stable");
        c.require(io::equal(first, second), name + ": reparse changed the description");
    }
    c.require(files == 11, "expected 11 bundled system files");

    return report(10, "randomized kernel checks and file round-trips hold", c);
}

} // namespace

int main() {
    bool all = true;
    bool (*criteria[])() = {
        criterion_expansion_goldens, criterion_operator_algebra, criterion_susy_invariance,
        criterion_power_expansion,   criterion_first_integrals,  criterion_picard,
        criterion_transform,         criterion_nonassoc,         criterion_numeric,
        criterion_kernel,
    };
    int number = 1;
    for (auto fn : criteria) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion %d: unexpected error: %s\n", number, e.what());
        }
        all = all && ok;
        ++number;
    }
    std::printf("%s\n", all ? "acceptance: all criteria hold"
                            : "acceptance: at least one criterion failed");
    return all ? 0 : 1;
}
