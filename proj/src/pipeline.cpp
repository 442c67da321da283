#include "dbvp/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dbvp {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Problem files

namespace {

[[noreturn]] void spec_fail(const std::string& msg) { throw SpecError("problem file: " + msg); }

expr::Expr parse_field_expr(const json& j, const char* field) {
    if (!j.is_string()) spec_fail(std::string(field) + " must be an expression string");
    try {
        return expr::Expr::parse(j.get<std::string>());
    } catch (const expr::ParseError& e) {
        spec_fail(std::string(field) + ": " + e.what());
    }
}

void require_t_only(const expr::Expr& e, const char* field) {
    expr::VarSet vs = e.free_vars();
    if (vs.x || vs.y) spec_fail(std::string(field) + " may only use the variable t");
}

GridFunction tabulate(const json& j, const char* field, int T) {
    const int n = T + 3;
    if (j.is_array()) {
        if (static_cast<int>(j.size()) != n)
            spec_fail(std::string(field) + " array must have exactly T+3 = " + std::to_string(n) +
                      " entries");
        std::vector<double> v;
        v.reserve(j.size());
        for (const auto& e : j) {
            if (!e.is_number()) spec_fail(std::string(field) + " array entries must be numbers");
            v.push_back(e.get<double>());
        }
        return GridFunction(0, std::move(v));
    }
    expr::Expr e = parse_field_expr(j, field);
    require_t_only(e, field);
    try {
        return GridFunction::sample(0, n, [&](int t) {
            expr::Env env;
            env.t = static_cast<double>(t);
            return e.eval(env);
        });
    } catch (const expr::EvalError& err) {
        spec_fail(std::string(field) + ": " + err.what());
    }
}

SolverOptions parse_solver(const json& j) {
    SolverOptions opt;
    if (!j.is_object()) spec_fail("solver must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "method") {
            if (!value.is_string()) spec_fail("solver.method must be a string");
            opt.method = value.get<std::string>();
            if (opt.method != "auto" && opt.method != "picard" && opt.method != "newton")
                spec_fail("solver.method must be auto, picard or newton");
        } else if (key == "tol") {
            if (!value.is_number() || !(value.get<double>() > 0.0))
                spec_fail("solver.tol must be a positive number");
            opt.tol = value.get<double>();
        } else if (key == "max_iter") {
            if (!value.is_number_integer() || value.get<long long>() < 1)
                spec_fail("solver.max_iter must be a positive integer");
            opt.max_iter = value.get<long long>();
        } else if (key == "damping") {
            if (!value.is_number()) spec_fail("solver.damping must be a number");
            double d = value.get<double>();
            if (!(d > 0.0) || d > 1.0) spec_fail("solver.damping must lie in (0, 1]");
            opt.damping = d;
        } else if (key == "grid_density") {
            if (!value.is_number_integer() || value.get<int>() < 2)
                spec_fail("solver.grid_density must be an integer >= 2");
            opt.grid_density = value.get<int>();
        } else {
            spec_fail("unknown solver field '" + key + "'");
        }
    }
    return opt;
}

}  // namespace

ProblemSpec load_spec(const json& j) {
    if (!j.is_object()) spec_fail("top level must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "T" && key != "h" && key != "g_T2" && key != "g" && key != "alpha" &&
            key != "beta" && key != "c" && key != "solver")
            spec_fail("unknown field '" + key + "'");
    }
    if (!j.contains("T") || !j.at("T").is_number_integer()) spec_fail("T must be an integer");
    int T = j.at("T").get<int>();
    if (T < 1) spec_fail("T must be >= 1");

    if (!j.contains("h")) spec_fail("missing field 'h'");
    expr::Expr h = parse_field_expr(j.at("h"), "h");

    if (j.contains("g_T2") == j.contains("g"))
        spec_fail("exactly one of g_T2 (number) or g (expression in t) is required");
    double g_T2 = 0.0;
    if (j.contains("g_T2")) {
        if (!j.at("g_T2").is_number()) spec_fail("g_T2 must be a number");
        g_T2 = j.at("g_T2").get<double>();
    } else {
        expr::Expr g = parse_field_expr(j.at("g"), "g");
        require_t_only(g, "g");
        expr::Env env;
        env.t = static_cast<double>(T + 2);
        try {
            g_T2 = g.eval(env);
        } catch (const expr::EvalError& e) {
            spec_fail(std::string("g: ") + e.what());
        }
    }

    if (!j.contains("alpha")) spec_fail("missing field 'alpha'");
    if (!j.contains("beta")) spec_fail("missing field 'beta'");
    GridFunction alpha = tabulate(j.at("alpha"), "alpha", T);
    GridFunction beta = tabulate(j.at("beta"), "beta", T);

    double c = 1.0;
    if (j.contains("c")) {
        if (!j.at("c").is_number() || !(j.at("c").get<double>() > 0.0))
            spec_fail("c must be a positive number");
        c = j.at("c").get<double>();
    }

    SolverOptions solver;
    if (j.contains("solver")) solver = parse_solver(j.at("solver"));

    return ProblemSpec{T, std::move(h), g_T2, std::move(alpha), std::move(beta), c, solver};
}

ProblemSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open problem file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SpecError("problem file '" + path + "': " + e.what());
    }
    return load_spec(j);
}

Problem ProblemSpec::to_problem() const {
    expr::Expr he = h;
    Nonlinearity fn = [he](int t, double x, double y) {
        expr::Env env;
        env.t = static_cast<double>(t);
        env.x = x;
        env.y = y;
        return he.eval(env);
    };
    return Problem(TimeScale(T), std::move(fn), g_T2, c);
}

// ---------------------------------------------------------------------------
// Enclosure

EnclosureVerdict enclosure_check(const GridFunction& u, const Bracket& b, double tol) {
    if (!u.same_domain(b.alpha))
        throw std::invalid_argument("enclosure_check: u does not live on the bracket domain");

    EnclosureVerdict out;
    double min_lower = std::numeric_limits<double>::infinity();
    double min_upper = std::numeric_limits<double>::infinity();
    for (int t = u.start(); t <= u.end(); ++t) {
        min_lower = std::min(min_lower, u(t) - b.alpha(t));
        min_upper = std::min(min_upper, b.beta(t) - u(t));
    }
    out.min_lower_slack = min_lower;
    out.min_upper_slack = min_upper;
    out.ok = min_lower >= -tol && min_upper >= -tol;
    if (out.ok) return out;

    // Worst violation, upper side meaning v = u - beta, lower side v = alpha - u.
    bool upper_side = -min_upper >= -min_lower;
    auto v_of = [&](int t) { return upper_side ? u(t) - b.beta(t) : b.alpha(t) - u(t); };
    int loc = u.start();
    for (int t = u.start(); t <= u.end(); ++t)
        if (v_of(t) > v_of(loc)) loc = t;

    ViolationDiagnostic d;
    d.side = upper_side ? "upper" : "lower";
    d.location = loc;
    d.v = v_of(loc);
    if (loc > u.start()) d.v_delta_left = v_of(loc) - v_of(loc - 1);
    if (loc < u.end()) d.v_delta_right = v_of(loc + 1) - v_of(loc);
    if (loc > u.start() && loc < u.end())
        d.curvature_gap = v_of(loc + 1) - 2.0 * v_of(loc) + v_of(loc - 1);
    d.penalty_ratio = d.v / (d.v + 1.0);
    out.diagnostic = std::move(d);
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

std::vector<BoxRect> bracket_box(const Bracket& b) {
    // h sees x in [alpha(t), beta(t)] and y = x - z with z in the t-1 bracket.
    std::vector<BoxRect> box;
    for (int t = 1; t <= b.alpha.end() - 1; ++t)
        box.push_back(BoxRect{b.alpha(t), b.beta(t), b.alpha(t) - b.beta(t - 1),
                              b.beta(t) - b.alpha(t - 1)});
    return box;
}

std::string describe_violation(const char* what, const BracketCheck& chk) {
    const auto& v = *chk.first_violation;
    std::ostringstream os;
    os << what << " check failed: " << v.where << " inequality at t=" << v.t
       << " (slack " << v.slack << ")";
    return os.str();
}

HypothesisResults hypotheses_of(const ProblemSpec& spec) {
    HypothesisResults hyp;
    hyp.g_nonneg = spec.g_T2 >= 0.0;
    if (!hyp.g_nonneg) return hyp;

    bool ordered = true;
    for (int t = spec.alpha.start(); t <= spec.alpha.end(); ++t) {
        if (!(spec.alpha(t) <= spec.beta(t))) {
            ordered = false;
            hyp.order_violation_at = t;
            break;
        }
    }
    hyp.bracket_ordered = ordered;

    Problem p = spec.to_problem();
    hyp.lower = check_lower(p, spec.alpha, kVerifyTol);
    hyp.upper = check_upper(p, spec.beta, kVerifyTol);

    if (ordered) {
        Bracket b(spec.alpha, spec.beta);
        hyp.a2 = check_A2_sampled(p, bracket_box(b), 16, kVerifyTol);
    }
    return hyp;
}

std::string hypothesis_denial(const HypothesisResults& hyp) {
    if (!hyp.g_nonneg) return "hypothesis failed: g(T+2) < 0";
    if (hyp.bracket_ordered && !*hyp.bracket_ordered)
        return "hypothesis failed: alpha > beta at t=" +
               std::to_string(hyp.order_violation_at.value_or(-1));
    if (hyp.lower && !hyp.lower->ok) return describe_violation("lower solution", *hyp.lower);
    if (hyp.upper && !hyp.upper->ok) return describe_violation("upper solution", *hyp.upper);
    return "hypothesis failed";
}

bool in_bracket(const Bracket& b, const GridFunction& u, int t) {
    return b.alpha(t) <= u(t) && u(t) <= b.beta(t);
}

// True when every modified-nonlinearity evaluation along u takes the
// untruncated middle branches.
bool agreement_along(const Bracket& b, const GridFunction& u) {
    for (int t = 0; t <= u.end() - 1; ++t)
        if (!in_bracket(b, u, t)) return false;
    return true;
}

SolveReport solve_phase(const ProblemSpec& spec, const Problem& p, const Bracket& b,
                        const AuxiliaryProblem& aux) {
    const SolverOptions& opt = spec.solver;
    std::optional<SolveReport> rep;

    if (opt.method == "auto" || opt.method == "picard") {
        std::vector<double> ladder =
            opt.damping ? std::vector<double>{*opt.damping} : std::vector<double>{1.0, 0.5, 0.25};
        for (double lambda : ladder) {
            SolveConfig cfg;
            cfg.tol = opt.tol;
            cfg.max_iter = opt.max_iter;
            cfg.damping = lambda;
            rep = picard_solve(aux, cfg);
            if (rep->converged) return *rep;
        }
    }

    if (opt.method == "auto" || opt.method == "newton") {
        NewtonConfig ncfg;
        ncfg.tol = opt.tol;
        SolveReport nrep = newton_solve(p, midpoint_guess(b), ncfg);
        if (!nrep.converged && nrep.note == "singular Jacobian" && p.ts.T <= 2) {
            // Desk-scale rescue: scan the bracket box itself.
            std::vector<Interval> bounds;
            for (int i = 0; i <= p.ts.T + 1; ++i) bounds.push_back({b.alpha(i), b.beta(i)});
            double span = 0.0;
            for (const auto& iv : bounds) span = std::max(span, iv.hi - iv.lo);
            double step = span > 0.0 ? span / 63.0 : 1.0;
            return brute_force_solve(p, bounds, step);
        }
        if (nrep.converged || !rep) return nrep;
    }
    return *rep;  // best failed attempt
}

}  // namespace

HypothesisResults run_hypotheses(const ProblemSpec& spec) { return hypotheses_of(spec); }

Certificate run_pipeline(const ProblemSpec& spec) {
    Certificate cert;
    try {
        cert.hypotheses = hypotheses_of(spec);
    } catch (const expr::EvalError& e) {
        cert.error = e.what();
        cert.reason = std::string("evaluation error during hypothesis checks: ") + e.what();
        return cert;
    }
    if (!cert.hypotheses.hard_pass()) {
        cert.reason = hypothesis_denial(cert.hypotheses);
        return cert;
    }

    try {
        Problem p = spec.to_problem();
        Bracket b(spec.alpha, spec.beta);
        AuxiliaryProblem aux = make_auxiliary(p, b, spec.solver.grid_density);
        cert.M = aux.M();
        cert.ball_radius = ball_radius(aux.M(), p.ts.T);

        cert.solve = solve_phase(spec, p, b, aux);
        const SolveReport& rep = *cert.solve;
        cert.enclosure = enclosure_check(rep.u, b, kVerifyTol);
        cert.agreement = agreement_along(b, rep.u);
        cert.original_residual = residual(p, rep.u).worst();
        cert.positive = is_positive_solution(rep.u);

        if (!rep.converged) {
            cert.reason = "solver did not converge (" + rep.method +
                          (rep.note.empty() ? "" : ": " + rep.note) + ")";
            return cert;
        }
        if (!cert.enclosure->ok) {
            cert.reason = "enclosure violated";
            return cert;
        }
        if (!(*cert.original_residual <= kVerifyTol)) {
            cert.reason = "solution does not satisfy the original problem within tolerance";
            return cert;
        }
        cert.granted = true;
        if (cert.hypotheses.a2 && !cert.hypotheses.a2->passed) {
            cert.warning = true;
            const auto& w = cert.hypotheses.a2->worst;
            std::ostringstream os;
            os << "granted with warning: sampled monotonicity check failed";
            if (w)
                os << " at t=" << w->t << ", x=" << w->x << ", y1=" << w->y1 << ", y2=" << w->y2
                   << " (rise " << w->amount << ")";
            cert.reason = os.str();
        }
        return cert;
    } catch (const expr::EvalError& e) {
        cert.error = e.what();
        cert.reason = std::string("evaluation error during solve: ") + e.what();
        return cert;
    } catch (const MBoundError& e) {
        cert.error = e.what();
        cert.reason = std::string("bound violation during solve: ") + e.what();
        return cert;
    }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ordered_json bracket_check_json(const BracketCheck& chk) {
    ordered_json j;
    j["ok"] = chk.ok;
    double min_diff = std::numeric_limits<double>::infinity();
    for (double s : chk.difference_slack) min_diff = std::min(min_diff, s);
    j["difference_slack"] = chk.difference_slack;
    j["min_difference_slack"] = min_diff;
    j["left_slack"] = chk.left_slack;
    j["right_slack"] = chk.right_slack;
    if (chk.first_violation) {
        j["first_violation"] = {{"where", chk.first_violation->where},
                                {"t", chk.first_violation->t},
                                {"slack", chk.first_violation->slack}};
    } else {
        j["first_violation"] = nullptr;
    }
    return j;
}

}  // namespace

ordered_json certificate_to_json(const Certificate& cert) {
    ordered_json j;
    j["version"] = Certificate::kVersion;
    j["granted"] = cert.granted;
    j["warning"] = cert.warning;
    j["reason"] = cert.reason;
    if (cert.error) j["error"] = *cert.error;

    ordered_json hyp;
    hyp["g_nonneg"] = cert.hypotheses.g_nonneg;
    hyp["bracket_ordered"] =
        cert.hypotheses.bracket_ordered ? ordered_json(*cert.hypotheses.bracket_ordered)
                                        : ordered_json(nullptr);
    if (cert.hypotheses.order_violation_at)
        hyp["order_violation_at"] = *cert.hypotheses.order_violation_at;
    hyp["lower"] = cert.hypotheses.lower ? bracket_check_json(*cert.hypotheses.lower)
                                         : ordered_json(nullptr);
    hyp["upper"] = cert.hypotheses.upper ? bracket_check_json(*cert.hypotheses.upper)
                                         : ordered_json(nullptr);
    if (cert.hypotheses.a2) {
        ordered_json a2;
        a2["passed"] = cert.hypotheses.a2->passed;
        a2["sampled"] = cert.hypotheses.a2->sampled;
        if (cert.hypotheses.a2->worst) {
            const auto& w = *cert.hypotheses.a2->worst;
            a2["worst"] = {{"t", w.t}, {"x", w.x}, {"y1", w.y1}, {"y2", w.y2},
                           {"amount", w.amount}};
        } else {
            a2["worst"] = nullptr;
        }
        hyp["a2"] = a2;
    } else {
        hyp["a2"] = nullptr;
    }
    j["hypotheses"] = hyp;

    j["M"] = cert.M ? ordered_json(*cert.M) : ordered_json(nullptr);
    j["ball_radius"] = cert.ball_radius ? ordered_json(*cert.ball_radius) : ordered_json(nullptr);

    if (cert.solve) {
        ordered_json s;
        s["method"] = cert.solve->method;
        s["converged"] = cert.solve->converged;
        s["iterations"] = cert.solve->iterations;
        s["final_gap"] = cert.solve->final_gap;
        s["final_residual"] = cert.solve->final_residual;
        s["note"] = cert.solve->note;
        s["u"] = cert.solve->u.values();
        j["solve"] = s;
    } else {
        j["solve"] = nullptr;
    }

    if (cert.enclosure) {
        ordered_json e;
        e["ok"] = cert.enclosure->ok;
        e["min_lower_slack"] = cert.enclosure->min_lower_slack;
        e["min_upper_slack"] = cert.enclosure->min_upper_slack;
        if (cert.enclosure->diagnostic) {
            const auto& d = *cert.enclosure->diagnostic;
            ordered_json dj;
            dj["side"] = d.side;
            dj["location"] = d.location;
            dj["v"] = d.v;
            dj["v_delta_left"] = d.v_delta_left ? ordered_json(*d.v_delta_left) : ordered_json(nullptr);
            dj["v_delta_right"] =
                d.v_delta_right ? ordered_json(*d.v_delta_right) : ordered_json(nullptr);
            dj["curvature_gap"] =
                d.curvature_gap ? ordered_json(*d.curvature_gap) : ordered_json(nullptr);
            dj["penalty_ratio"] = d.penalty_ratio;
            e["diagnostic"] = dj;
        } else {
            e["diagnostic"] = nullptr;
        }
        j["enclosure"] = e;
    } else {
        j["enclosure"] = nullptr;
    }

    j["original_residual"] =
        cert.original_residual ? ordered_json(*cert.original_residual) : ordered_json(nullptr);
    j["agreement"] = cert.agreement ? ordered_json(*cert.agreement) : ordered_json(nullptr);
    j["positive"] = cert.positive ? ordered_json(*cert.positive) : ordered_json(nullptr);
    return j;
}

void write_solution_csv(std::ostream& os, const GridFunction& u) {
    os << "t,u\n";
    for (int t = u.start(); t <= u.end(); ++t) os << t << ',' << fmt17(u(t)) << '\n';
}

GridFunction read_solution_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw SpecError("solution file: empty");
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line != "t,u") throw SpecError("solution file: expected header 't,u'");

    std::vector<double> values;
    int expected_t = 0;
    bool have_start = false;
    int start = 0;
    while (std::getline(is, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos) throw SpecError("solution file: malformed row '" + line + "'");
        int t = 0;
        auto [p1, ec1] = std::from_chars(line.data(), line.data() + comma, t);
        double v = 0.0;
        auto [p2, ec2] =
            std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
        if (ec1 != std::errc() || p1 != line.data() + comma || ec2 != std::errc() ||
            p2 != line.data() + line.size())
            throw SpecError("solution file: malformed row '" + line + "'");
        if (!have_start) {
            start = t;
            expected_t = t;
            have_start = true;
        }
        if (t != expected_t) throw SpecError("solution file: t values must ascend consecutively");
        ++expected_t;
        values.push_back(v);
    }
    if (values.empty()) throw SpecError("solution file: no rows");
    return GridFunction(start, std::move(values));
}

}  // namespace dbvp
