#include "susyode/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "susyode/component.hpp"
#include "susyode/darboux.hpp"
#include "susyode/errors.hpp"
#include "susyode/integrate.hpp"
#include "susyode/layers.hpp"
#include "susyode/nonassoc.hpp"
#include "susyode/systemfile.hpp"

namespace susyode::cli {

using json = nlohmann::json;
using sym::GradedPoly;
using sym::SymbolId;

namespace {

// ---------------------------------------------------------------------------
// series rendering

std::string series_term(const std::string& coeff, int k) {
    bool multi = coeff.find(" + ") != std::string::npos ||
                 coeff.find(" - ") != std::string::npos;
    std::string cs = multi ? "(" + coeff + ")" : coeff;
    if (k == 0) return cs;
    if (k > 0) {
        std::string t = k == 1 ? "t" : "t^" + std::to_string(k);
        if (cs == "1") return t;
        if (cs == "-1") return "-" + t;
        return cs + "*" + t;
    }
    std::string tail = k == -1 ? "/t" : "/t^" + std::to_string(-k);
    return cs + tail;
}

std::string join_series(std::vector<std::string> terms) {
    if (terms.empty()) return "0";
    std::string out = terms.front();
    for (size_t i = 1; i < terms.size(); ++i) {
        const std::string& s = terms[i];
        if (!s.empty() && s.front() == '-')
            out += " - " + s.substr(1);
        else
            out += " + " + s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// output helpers

struct Style {
    bool color = false;
    std::string ok(const std::string& s) const {
        return color ? "\x1b[32m" + s + "\x1b[0m" : s;
    }
    std::string bad(const std::string& s) const {
        return color ? "\x1b[31m" + s + "\x1b[0m" : s;
    }
    std::string verdict(bool good, const std::string& yes, const std::string& no) const {
        return good ? ok(yes) : bad(no);
    }
};

struct Common {
    std::string system_path;
    std::string format = "text";
    std::string out_dir;
    Style style;

    bool text() const { return format == "text"; }
    bool structured() const { return format == "structured"; }
    bool csv() const { return format == "csv"; }
};

void add_common(CLI::App* sub, Common& c, bool with_csv = false) {
    sub->add_option("--system", c.system_path, "system file to load")
        ->required()
        ->option_text("FILE");
    std::vector<std::string> formats = {"text", "structured"};
    if (with_csv) formats.push_back("csv");
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
}

struct UsageError {
    std::string message;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError{"cannot open system file: " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

io::BuiltSystem load(const Common& c) {
    return io::build_system(io::parse_system(slurp(c.system_path)));
}

std::string rhs_string(const superspace::ComponentSystem& sys, const GradedPoly& p) {
    return p.to_string(sys.table);
}

// Point in coordinate order, "(1, e1, 0)".
std::string point_string(const std::vector<grassmann::Multivector<Rational>>& v) {
    std::string out = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += grassmann::to_string(v[i]);
    }
    return out + ")";
}

// ---------------------------------------------------------------------------
// expand

int cmd_expand(const Common& c, std::ostream& out) {
    io::BuiltSystem built = load(c);
    if (c.structured()) {
        json j;
        j["algebra_l"] = built.algebra_l;
        j["n_theta"] = built.sys.n_theta;
        j["equations"] = json::array();
        for (const auto& eq : built.sys.equations)
            j["equations"].push_back({{"state", built.sys.table.name(eq.symbol)},
                                      {"order", eq.order},
                                      {"rhs", rhs_string(built.sys, eq.rhs)}});
        j["components"] = json::array();
        for (const auto& [base, of] : built.sys.component_of)
            j["components"].push_back({{"name", built.sys.table.name(base)},
                                       {"field", built.sys.fields[of.first].name},
                                       {"parity", parity_name(built.sys.table.parity(base))}});
        out << j.dump(2) << "\n";
        return 0;
    }
    out << superspace::render(built.sys);
    return 0;
}

// ---------------------------------------------------------------------------
// check-susy

int cmd_check_susy(const Common& c, int generator, std::ostream& out) {
    io::BuiltSystem built = load(c);
    std::vector<int> gens;
    if (generator >= 0) {
        gens.push_back(generator);
    } else {
        for (int g = 1; g <= built.sys.n_theta; ++g) gens.push_back(g);
    }
    bool all_ok = true;
    json checks = json::array();
    for (int g : gens) {
        superspace::SusyCheck chk = superspace::check_susy_invariance(built.sys, g);
        all_ok = all_ok && chk.invariant;
        std::string label = g == 0 ? "Q" : "Q" + std::to_string(g);
        if (c.structured()) {
            json residuals = json::array();
            for (const auto& [s, r] : chk.residuals)
                if (!r.is_zero())
                    residuals.push_back({{"state", chk.table.name(s)},
                                         {"residual", r.to_string(chk.table)}});
            checks.push_back({{"generator", label},
                              {"invariant", chk.invariant},
                              {"residuals", residuals}});
        } else {
            out << label << ": "
                << c.style.verdict(chk.invariant, "invariant", "broken") << "\n";
            if (!chk.invariant)
                for (const auto& [s, r] : chk.residuals)
                    if (!r.is_zero())
                        out << "  " << chk.table.name(s)
                            << " residual: " << r.to_string(chk.table) << "\n";
        }
    }
    if (c.structured())
        out << json{{"invariant", all_ok}, {"checks", checks}}.dump(2) << "\n";
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// darboux

int cmd_darboux(const Common& c, const std::string& f_text, const std::string& kappa_text,
                int search_degree, std::ostream& out) {
    io::BuiltSystem built = load(c);
    darboux::PolyVectorField vf = darboux::field_of(built.sys);
    GradedPoly f = io::lower_component_poly(built.sys, io::parse_component_expr(f_text));

    if (!kappa_text.empty()) {
        GradedPoly kappa =
            io::lower_component_poly(built.sys, io::parse_component_expr(kappa_text));
        bool ok = darboux::verify_darboux(vf, f, kappa);
        if (c.structured()) {
            out << json{{"f", f.to_string(built.sys.table)},
                        {"kappa", kappa.to_string(built.sys.table)},
                        {"darboux", ok}}
                       .dump(2)
                << "\n";
        } else {
            out << "X(f) = kappa*f: " << c.style.verdict(ok, "holds", "fails") << "\n";
            if (!ok)
                out << "  X(f) - kappa*f = "
                    << (darboux::lie_derivative(vf, f) - kappa * f).to_string(built.sys.table)
                    << "\n";
        }
        return ok ? 0 : 1;
    }

    std::optional<GradedPoly> kappa = darboux::search_cofactor(vf, f, search_degree);
    if (c.structured()) {
        json j{{"f", f.to_string(built.sys.table)}, {"found", kappa.has_value()}};
        if (kappa) j["kappa"] = kappa->to_string(built.sys.table);
        out << j.dump(2) << "\n";
    } else if (kappa) {
        out << "kappa = " << kappa->to_string(built.sys.table) << "\n";
    } else {
        out << c.style.bad("no cofactor") << " of degree <= "
            << search_degree << "\n";
    }
    return kappa ? 0 : 1;
}

// ---------------------------------------------------------------------------
// first-integral

int cmd_first_integral(const Common& c, const std::string& expr_text, std::ostream& out,
                       std::ostream& err) {
    io::BuiltSystem built = load(c);
    darboux::PolyVectorField vf = darboux::field_of(built.sys);

    struct Candidate {
        std::string label;
        darboux::FirstIntegralExpr expr;
    };
    std::vector<Candidate> candidates;
    if (!expr_text.empty()) {
        candidates.push_back(
            {expr_text, io::lower_integral(built.sys, io::parse_component_expr(expr_text))});
    } else {
        for (const io::BuiltIntegral& bi : built.integrals)
            for (size_t i = 0; i < bi.parts.size(); ++i) {
                std::string label = bi.source;
                if (bi.parts.size() > 1)
                    label += " [part " + std::to_string(i + 1) + "/" +
                             std::to_string(bi.parts.size()) + "]";
                candidates.push_back({label, bi.parts[i]});
            }
    }
    if (candidates.empty()) {
        err << "nothing to verify: the file has no [integrals] section and no --expr "
               "was given\n";
        return 2;
    }

    bool all_ok = true;
    json results = json::array();
    for (const Candidate& cand : candidates) {
        GradedPoly residual = darboux::first_integral_residual(vf, cand.expr);
        bool ok = residual.is_zero();
        all_ok = all_ok && ok;
        if (c.structured()) {
            json j{{"integral", cand.label}, {"conserved", ok}};
            if (!ok) j["residual"] = residual.to_string(built.sys.table);
            results.push_back(j);
        } else {
            out << cand.label << ": "
                << c.style.verdict(ok, "conserved", "NOT conserved") << "\n";
            if (!ok)
                out << "  residual: " << residual.to_string(built.sys.table) << "\n";
        }
    }
    if (c.structured())
        out << json{{"conserved", all_ok}, {"integrals", results}}.dump(2) << "\n";
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// integrate

int cmd_integrate(const Common& c, double tol, std::ostream& out, std::ostream& err) {
    io::BuiltSystem built = load(c);
    if (!built.t0 || !built.t_end || !built.h) {
        err << "integrate needs t0, t_end and h in the [solve] section\n";
        return 2;
    }
    if (built.init.empty()) {
        err << "integrate needs init values in the [solve] section\n";
        return 2;
    }
    for (SymbolId s : built.sys.constants)
        if (built.sys.folded.find(s) == built.sys.folded.end() &&
            built.constants.find(s) == built.constants.end()) {
            err << "constant " << built.sys.table.name(s)
                << " has no value; set one with 'init " << built.sys.table.name(s)
                << " = ...' in [solve]\n";
            return 2;
        }

    darboux::PolyVectorField vf = darboux::field_of(built.sys);
    grassmann::AlgebraCtx ctx(built.algebra_l);
    solve::LayerSystem layers = solve::expand_to_layers(vf, ctx, built.constants);

    std::vector<double> y0(layers.unknowns.size(), 0.0);
    for (const auto& [s, mv] : built.init)
        layers.set_state(y0, s, grassmann::to_double(mv));

    double t0 = built.t0->get_d(), t_end = built.t_end->get_d(), h = built.h->get_d();
    solve::Trajectory traj = solve::integrate_rk4(layers, y0, t0, t_end, h);

    std::vector<darboux::FirstIntegralExpr> exprs;
    std::vector<std::string> expr_labels;
    for (const io::BuiltIntegral& bi : built.integrals)
        for (size_t i = 0; i < bi.parts.size(); ++i) {
            exprs.push_back(bi.parts[i]);
            std::string label = bi.source;
            if (bi.parts.size() > 1)
                label += " [part " + std::to_string(i + 1) + "/" +
                         std::to_string(bi.parts.size()) + "]";
            expr_labels.push_back(label);
        }
    std::vector<double> drift = solve::expression_drift(layers, traj, exprs);
    double max_drift = 0.0;
    for (double d : drift) max_drift = std::max(max_drift, d);

    if (!c.out_dir.empty()) {
        std::filesystem::create_directories(c.out_dir);
        std::filesystem::path csv_path = std::filesystem::path(c.out_dir) / "trajectory.csv";
        std::ofstream csv(csv_path);
        if (!csv) {
            err << "cannot write " << csv_path.string() << "\n";
            return 2;
        }
        csv << solve::to_csv(layers, traj);
    }

    bool drift_ok = max_drift <= tol;
    bool ok = !traj.blew_up && drift_ok;

    if (c.csv()) {
        out << solve::to_csv(layers, traj);
    } else if (c.structured()) {
        json j;
        j["samples"] = traj.times.size();
        j["t_final"] = traj.stop_time();
        j["blew_up"] = traj.blew_up;
        j["final"] = json::object();
        if (!traj.values.empty())
            for (SymbolId s : layers.states)
                j["final"][layers.table.name(s)] = grassmann::to_string(
                    layers.state_value(traj.values.back(), s));
        j["drift"] = json::array();
        for (size_t i = 0; i < drift.size(); ++i)
            j["drift"].push_back({{"integral", expr_labels[i]}, {"max", drift[i]}});
        j["tolerance"] = tol;
        j["pass"] = ok;
        out << j.dump(2) << "\n";
    } else {
        out << "integrated " << traj.times.size() << " samples to t = "
            << traj.stop_time() << "\n";
        if (!traj.values.empty())
            for (SymbolId s : layers.states)
                out << "  " << layers.table.name(s) << " = "
                    << grassmann::to_string(layers.state_value(traj.values.back(), s))
                    << "\n";
        for (size_t i = 0; i < drift.size(); ++i)
            out << "drift " << expr_labels[i] << ": " << drift[i] << " "
                << c.style.verdict(drift[i] <= tol, "(<= tol)", "(EXCEEDS tol)") << "\n";
        if (traj.blew_up) out << c.style.bad("blow-up before t_end") << "\n";
    }
    if (traj.blew_up && !c.csv()) err << "integration blew up at t = " << traj.stop_time() << "\n";
    else if (!drift_ok && !c.csv())
        err << "integral drift " << max_drift << " exceeds tolerance " << tol << "\n";
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// picard

int cmd_picard(const Common& c, int iters, std::ostream& out, std::ostream& err) {
    io::BuiltSystem built = load(c);
    darboux::PolyVectorField vf = darboux::field_of(built.sys);
    for (SymbolId s : vf.vars)
        if (built.init.find(s) == built.init.end()) {
            err << "picard needs an init value for every state; missing "
                << built.sys.table.name(s) << "\n";
            return 2;
        }
    std::vector<solve::TPoly> series =
        solve::picard_iterate(vf, built.init, iters, built.constants);
    if (c.structured()) {
        json j;
        j["iterations"] = iters;
        j["series"] = json::array();
        for (size_t i = 0; i < series.size(); ++i)
            j["series"].push_back({{"state", built.sys.table.name(vf.vars[i])},
                                   {"value", tpoly_to_string(series[i])}});
        out << j.dump(2) << "\n";
    } else {
        for (size_t i = 0; i < series.size(); ++i)
            out << built.sys.table.name(vf.vars[i]) << "(t) = "
                << tpoly_to_string(series[i]) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// transform

int parse_generator_word(const std::string& text) {
    if (text.size() >= 2 && text[0] == 'e') {
        try {
            size_t used = 0;
            int k = std::stoi(text.substr(1), &used);
            if (used == text.size() - 1 && k >= 1) return k;
        } catch (const std::exception&) {
        }
    }
    throw UsageError{"--epsilon expects a generator word like e1"};
}

int cmd_transform(const Common& c, const std::string& epsilon, int generator,
                  std::ostream& out, std::ostream& err) {
    io::BuiltSystem built = load(c);
    int eps_gen = parse_generator_word(epsilon);
    if (eps_gen > built.algebra_l) {
        err << "--epsilon " << epsilon << " needs L >= " << eps_gen << " (file has L = "
            << built.algebra_l << ")\n";
        return 2;
    }
    darboux::PolyVectorField vf = darboux::field_of(built.sys);
    if (built.seeds.empty()) {
        err << "transform needs seed lines in the [solve] section\n";
        return 2;
    }
    for (SymbolId s : vf.vars)
        if (built.seeds.find(s) == built.seeds.end()) {
            err << "seed missing for state " << built.sys.table.name(s) << "\n";
            return 2;
        }

    bool seed_ok = solve::verify_closed_form(vf, built.seeds, built.constants);
    if (!seed_ok) {
        std::vector<solve::LaurentPoly> res =
            solve::closed_form_residual(vf, built.seeds, built.constants);
        err << "the seed does not solve the system\n";
        for (size_t i = 0; i < res.size(); ++i)
            if (!res[i].is_zero())
                err << "  " << built.sys.table.name(vf.vars[i])
                    << " residual: " << laurent_to_string(res[i]) << "\n";
        return 1;
    }

    std::map<SymbolId, solve::LaurentPoly> image =
        solve::transform_solution(built.sys, built.seeds, eps_gen, generator);
    bool image_ok = solve::verify_closed_form(vf, image, built.constants);

    if (c.structured()) {
        json j;
        j["epsilon"] = epsilon;
        j["generator"] = generator;
        j["seed_solves"] = seed_ok;
        j["image_solves"] = image_ok;
        j["image"] = json::array();
        for (SymbolId s : vf.vars)
            j["image"].push_back({{"state", built.sys.table.name(s)},
                                  {"value", laurent_to_string(image.at(s))}});
        out << j.dump(2) << "\n";
    } else {
        out << "seed: " << c.style.ok("solves the system") << "\n";
        for (SymbolId s : vf.vars)
            out << built.sys.table.name(s) << "(t) = " << laurent_to_string(image.at(s))
                << "\n";
        out << "transformed solution: "
            << c.style.verdict(image_ok, "solves the system", "residual is nonzero")
            << "\n";
    }
    if (!image_ok) err << "the transformed assignment does not solve the system\n";
    return image_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// series (homogenize + polarize + taylor)

int cmd_series(const Common& c, int order, std::ostream& out) {
    io::BuiltSystem built = load(c);
    nonassoc::QuadraticMap map = nonassoc::homogenize(built.sys);
    nonassoc::BilinearProduct product = nonassoc::polarize(map);
    std::vector<std::vector<GradedPoly>> coeffs =
        nonassoc::taylor_coefficients(product, order);
    auto name = [&](size_t i) { return map.table.name(map.coords[i]); };
    if (c.structured()) {
        json j;
        j["order"] = order;
        j["coordinates"] = json::array();
        for (size_t i = 0; i < map.coords.size(); ++i) j["coordinates"].push_back(name(i));
        j["coefficients"] = json::array();
        for (size_t k = 0; k < coeffs.size(); ++k) {
            json row = json::object();
            for (size_t i = 0; i < coeffs[k].size(); ++i)
                row[name(i)] = coeffs[k][i].to_string(map.table);
            j["coefficients"].push_back(row);
        }
        out << j.dump(2) << "\n";
    } else {
        for (size_t k = 0; k < coeffs.size(); ++k) {
            out << "t^" << k << ":\n";
            for (size_t i = 0; i < coeffs[k].size(); ++i)
                out << "  " << name(i) << " = " << coeffs[k][i].to_string(map.table)
                    << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// homogenize (embedding + product survey)

int cmd_homogenize(const Common& c, unsigned seed, int trials, std::ostream& out) {
    io::BuiltSystem built = load(c);
    nonassoc::QuadraticMap map = nonassoc::homogenize(built.sys);
    nonassoc::BilinearProduct product = nonassoc::polarize(map);
    nonassoc::AlgebraReport report = nonassoc::algebra_report(product, seed, trials);

    auto point = [&](const std::vector<grassmann::Multivector<Rational>>& v) {
        return point_string(v);
    };
    if (c.structured()) {
        json j;
        j["coordinates"] = json::array();
        for (SymbolId s : map.coords) j["coordinates"].push_back(map.table.name(s));
        j["embedded"] = json::array();
        for (size_t i = 0; i < map.rhs.size(); ++i)
            j["embedded"].push_back({{"state", map.table.name(map.coords[i])},
                                     {"rhs", map.rhs[i].to_string(map.table)}});
        j["commutative"] = report.commutative;
        j["associative"] = report.associative;
        j["triples_checked"] = report.triples_checked;
        if (report.witness) {
            j["witness"] = {{"x", point(report.witness->x)},
                            {"y", point(report.witness->y)},
                            {"z", point(report.witness->z)},
                            {"left", point(report.witness->left)},
                            {"right", point(report.witness->right)}};
        }
        out << j.dump(2) << "\n";
    } else {
        out << "embedded quadratic flow (u frozen):\n";
        for (size_t i = 0; i < map.rhs.size(); ++i)
            out << "  dt(" << map.table.name(map.coords[i]) << ") = "
                << map.rhs[i].to_string(map.table) << "\n";
        out << "product: " << (report.commutative ? "commutative" : "not commutative")
            << ", " << (report.associative ? "associative" : "not associative") << " ("
            << report.triples_checked << " triples checked)\n";
        if (report.witness) {
            out << "associator witness:\n";
            out << "  x = " << point(report.witness->x) << "\n";
            out << "  y = " << point(report.witness->y) << "\n";
            out << "  z = " << point(report.witness->z) << "\n";
            out << "  (x*y)*z = " << point(report.witness->left) << "\n";
            out << "  x*(y*z) = " << point(report.witness->right) << "\n";
        }
    }
    return 0;
}

} // namespace

// ---------------------------------------------------------------------------

std::string tpoly_to_string(const solve::TPoly& p) {
    std::vector<std::string> terms;
    for (const auto& [k, c] : p.terms())
        terms.push_back(series_term(grassmann::to_string(c), k));
    return join_series(std::move(terms));
}

std::string laurent_to_string(const solve::LaurentPoly& p) {
    std::vector<std::string> terms;
    for (const auto& [k, c] : p.terms())
        terms.push_back(series_term(grassmann::to_string(c), k));
    return join_series(std::move(terms));
}

int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"symbolic and numeric toolkit for Grassmann-valued polynomial flows"};
    app.require_subcommand(1);

    Style style;
    const char* color_env = std::getenv("SUSYODE_COLOR");
    style.color = color_env != nullptr && std::string(color_env) == "1";

    Common c_expand, c_susy, c_darboux, c_integral, c_integrate, c_picard, c_transform,
        c_series, c_homogenize;

    CLI::App* expand = app.add_subcommand("expand", "print the component equations");
    add_common(expand, c_expand);

    CLI::App* susy = app.add_subcommand(
        "check-susy", "verify invariance under the supersymmetry variations");
    add_common(susy, c_susy);
    int generator = -1;
    susy->add_option("--generator", generator,
                     "check one charge (0 = summed) instead of all of them");

    CLI::App* darboux_cmd =
        app.add_subcommand("darboux", "verify or search an eigenpolynomial cofactor");
    add_common(darboux_cmd, c_darboux);
    std::string f_text, kappa_text;
    int search_degree = 0;
    darboux_cmd->add_option("--f", f_text, "candidate polynomial in the components")
        ->required();
    CLI::Option* kappa_opt =
        darboux_cmd->add_option("--kappa", kappa_text, "cofactor to verify");
    darboux_cmd->add_option("--search", search_degree, "search cofactors up to this degree")
        ->excludes(kappa_opt);

    CLI::App* integral =
        app.add_subcommand("first-integral", "verify the declared first integrals");
    add_common(integral, c_integral);
    std::string expr_text;
    integral->add_option("--expr", expr_text,
                         "verify this expression instead of the [integrals] entries");

    CLI::App* integrate =
        app.add_subcommand("integrate", "integrate the layered real system with RK4");
    add_common(integrate, c_integrate, /*with_csv=*/true);
    integrate->add_option("--out", c_integrate.out_dir,
                          "directory for trajectory.csv")
        ->option_text("DIR");
    double tol = 1e-8;
    integrate->add_option("--tol", tol, "largest acceptable integral drift")
        ->capture_default_str();

    CLI::App* picard =
        app.add_subcommand("picard", "exact successive-approximation series");
    add_common(picard, c_picard);
    int iters = 3;
    picard->add_option("--iters", iters, "number of passes")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    CLI::App* transform = app.add_subcommand(
        "transform", "map a closed-form seed solution through the supersymmetry");
    add_common(transform, c_transform);
    std::string epsilon;
    int t_generator = 0;
    transform->add_option("--epsilon", epsilon, "odd parameter, a generator word like e1")
        ->required();
    transform->add_option("--generator", t_generator,
                          "variation charge (0 = summed)")
        ->capture_default_str();

    CLI::App* series = app.add_subcommand(
        "series", "Taylor coefficients of the homogenized flow, symbolically");
    add_common(series, c_series);
    int order = 4;
    series->add_option("--order", order, "highest power of t")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    CLI::App* homogenize = app.add_subcommand(
        "homogenize", "embed into a homogeneous quadratic flow and survey its product");
    add_common(homogenize, c_homogenize);
    unsigned seed = 0;
    int trials = 1000;
    homogenize->add_option("--seed", seed, "seed for the sampled associativity probes")
        ->capture_default_str();
    homogenize->add_option("--trials", trials, "number of sampled triples")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    for (Common* c : {&c_expand, &c_susy, &c_darboux, &c_integral, &c_integrate,
                      &c_picard, &c_transform, &c_series, &c_homogenize})
        c->style = style;

    try {
        if (expand->parsed()) return cmd_expand(c_expand, out);
        if (susy->parsed()) return cmd_check_susy(c_susy, generator, out);
        if (darboux_cmd->parsed()) {
            if (kappa_text.empty() && search_degree <= 0) {
                err << "darboux needs --kappa or --search\n";
                return 2;
            }
            return cmd_darboux(c_darboux, f_text, kappa_text, search_degree, out);
        }
        if (integral->parsed()) return cmd_first_integral(c_integral, expr_text, out, err);
        if (integrate->parsed()) return cmd_integrate(c_integrate, tol, out, err);
        if (picard->parsed()) return cmd_picard(c_picard, iters, out, err);
        if (transform->parsed())
            return cmd_transform(c_transform, epsilon, t_generator, out, err);
        if (series->parsed()) return cmd_series(c_series, order, out);
        if (homogenize->parsed()) return cmd_homogenize(c_homogenize, seed, trials, out);
    } catch (const UsageError& e) {
        err << "error: " << e.message << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no command\n";
    return 2;
}

} // namespace susyode::cli
