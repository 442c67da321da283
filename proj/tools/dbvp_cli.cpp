// Command-line front end: hypothesis checks, certified solves, and
// verification of externally supplied solutions.
//
// Exit codes: 0 granted/verified, 1 hypothesis or verification failure,
// 2 solver non-convergence, 3 input or parse error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dbvp/pipeline.hpp"

namespace {

constexpr int kExitGranted = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitInputError = 3;

int classify(const dbvp::Certificate& cert) {
    if (cert.error) return kExitInputError;
    if (cert.granted) return kExitGranted;
    if (!cert.hypotheses.hard_pass()) return kExitFailure;
    if (cert.solve && !cert.solve->converged) return kExitNoConvergence;
    return kExitFailure;
}

void write_payload(const std::string& payload, const std::string& out_path) {
    std::cout << payload;
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw dbvp::SpecError("cannot write output file '" + out_path + "'");
        out << payload;
    }
}

int run_check(const std::string& spec_path) {
    dbvp::ProblemSpec spec = dbvp::load_spec_file(spec_path);
    dbvp::HypothesisResults hyp = dbvp::run_hypotheses(spec);

    auto show = [](const char* name, const std::optional<dbvp::BracketCheck>& chk) {
        if (!chk) return;
        std::cerr << name << ": " << (chk->ok ? "ok" : "violated") << "\n";
        if (chk->first_violation)
            std::cerr << "  first violation: " << chk->first_violation->where << " inequality at t="
                      << chk->first_violation->t << " (slack " << chk->first_violation->slack
                      << ")\n";
    };
    std::cerr << "g(T+2) >= 0: " << (hyp.g_nonneg ? "ok" : "violated") << "\n";
    if (hyp.bracket_ordered)
        std::cerr << "alpha <= beta: " << (*hyp.bracket_ordered ? "ok" : "violated") << "\n";
    show("lower solution", hyp.lower);
    show("upper solution", hyp.upper);
    if (hyp.a2) {
        std::cerr << "monotone in y (sampled, not proved): "
                  << (hyp.a2->passed ? "ok" : "violated") << "\n";
        if (hyp.a2->worst)
            std::cerr << "  worst sample: t=" << hyp.a2->worst->t << ", x=" << hyp.a2->worst->x
                      << ", y1=" << hyp.a2->worst->y1 << ", y2=" << hyp.a2->worst->y2 << " (rise "
                      << hyp.a2->worst->amount << ")\n";
    }
    if (!hyp.hard_pass()) {
        std::cerr << "hypotheses: FAILED\n";
        return kExitFailure;
    }
    std::cerr << "hypotheses: ok" << (hyp.a2 && !hyp.a2->passed ? " (with warning)" : "") << "\n";
    return kExitGranted;
}

int run_solve(const std::string& spec_path, const std::string& method,
              std::optional<double> tol, std::optional<long long> max_iter,
              std::optional<double> damping, const std::string& out_path,
              const std::string& format) {
    dbvp::ProblemSpec spec = dbvp::load_spec_file(spec_path);
    if (!method.empty()) spec.solver.method = method;
    if (tol) spec.solver.tol = *tol;
    if (max_iter) spec.solver.max_iter = *max_iter;
    if (damping) spec.solver.damping = *damping;

    dbvp::Certificate cert = dbvp::run_pipeline(spec);
    if (!cert.reason.empty()) std::cerr << cert.reason << "\n";

    if (format == "json") {
        write_payload(dbvp::certificate_to_json(cert).dump(2) + "\n", out_path);
    } else if (cert.solve) {
        std::ostringstream os;
        dbvp::write_solution_csv(os, cert.solve->u);
        write_payload(os.str(), out_path);
    }

    if (cert.granted)
        std::cerr << "certificate granted" << (cert.warning ? " (with warning)" : "") << "\n";
    else
        std::cerr << "certificate denied\n";
    return classify(cert);
}

int run_verify(const std::string& spec_path, const std::string& solution_path) {
    dbvp::ProblemSpec spec = dbvp::load_spec_file(spec_path);
    std::ifstream in(solution_path);
    if (!in) throw dbvp::SpecError("cannot open solution file '" + solution_path + "'");
    dbvp::GridFunction u = dbvp::read_solution_csv(in);

    if (u.start() != 0 || u.size() != spec.T + 3)
        throw dbvp::SpecError("solution file domain does not match the problem (need t = 0.." +
                              std::to_string(spec.T + 2) + ")");
    if (spec.g_T2 < 0.0) {
        std::cerr << "verification failed: g(T+2) < 0\n";
        return kExitFailure;
    }

    dbvp::Problem p = spec.to_problem();
    dbvp::ResidualReport rep = dbvp::residual(p, u);
    std::cerr << "max |residual| = " << rep.max_abs_residual << ", u^d(0) = " << rep.bc_left
              << ", right gap = " << rep.bc_right_gap << "\n";

    bool ordered = true;
    for (int t = 0; t <= spec.alpha.end(); ++t)
        if (!(spec.alpha(t) <= spec.beta(t))) ordered = false;
    bool enclosed = false;
    if (ordered) {
        dbvp::Bracket b(spec.alpha, spec.beta);
        dbvp::EnclosureVerdict enc = dbvp::enclosure_check(u, b, dbvp::kVerifyTol);
        enclosed = enc.ok;
        std::cerr << "enclosure: " << (enc.ok ? "ok" : "violated")
                  << " (min u-alpha = " << enc.min_lower_slack
                  << ", min beta-u = " << enc.min_upper_slack << ")\n";
        if (enc.diagnostic)
            std::cerr << "  worst violation on the " << enc.diagnostic->side << " side at t="
                      << enc.diagnostic->location << ", v = " << enc.diagnostic->v
                      << ", v/(v+1) = " << enc.diagnostic->penalty_ratio << "\n";
    } else {
        std::cerr << "enclosure: bracket not ordered\n";
    }

    bool solves = rep.worst() <= dbvp::kVerifyTol;
    std::cerr << "positive solution: " << (dbvp::is_positive_solution(u) ? "yes" : "no") << "\n";
    if (solves && enclosed) {
        std::cerr << "verified\n";
        return kExitGranted;
    }
    std::cerr << "verification failed\n";
    return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Enclosure-certified solver for discrete second-order mixed boundary value "
                 "problems"};
    app.require_subcommand(1);

    std::string spec_path, solution_path, out_path, format = "csv", method;
    std::optional<double> tol, damping;
    std::optional<long long> max_iter;

    CLI::App* check = app.add_subcommand("check", "Run the hypothesis checks only");
    check->add_option("spec", spec_path, "problem file (JSON)")->required();

    CLI::App* solve = app.add_subcommand("solve", "Solve and emit a certified solution");
    solve->add_option("spec", spec_path, "problem file (JSON)")->required();
    solve->add_option("--method", method, "auto|picard|newton")
        ->check(CLI::IsMember({"auto", "picard", "newton"}));
    solve->add_option("--tol", tol, "solver tolerance");
    solve->add_option("--max-iter", max_iter, "iteration cap");
    solve->add_option("--damping", damping, "fixed Picard damping in (0,1]");
    solve->add_option("--out", out_path, "also write the output to this file");
    solve->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    CLI::App* verify = app.add_subcommand("verify", "Check an externally supplied solution");
    verify->add_option("spec", spec_path, "problem file (JSON)")->required();
    verify->add_option("solution", solution_path, "solution CSV from `solve`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInputError;
    }

    try {
        if (check->parsed()) return run_check(spec_path);
        if (solve->parsed()) return run_solve(spec_path, method, tol, max_iter, damping, out_path,
                                              format);
        if (verify->parsed()) return run_verify(spec_path, solution_path);
    } catch (const dbvp::SpecError& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    } catch (const dbvp::expr::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    } catch (const dbvp::expr::EvalError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
