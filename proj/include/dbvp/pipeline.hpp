#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "dbvp/direct_solver.hpp"
#include "dbvp/expr.hpp"

namespace dbvp {

/// Raised for invalid problem files and solution files.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    std::string method = "auto";  ///< auto | picard | newton
    double tol = 1e-10;
    long long max_iter = 10000;
    std::optional<double> damping;  ///< unset: try the ladder 1, 0.5, 0.25
    int grid_density = 128;
};

/// A problem file, validated and resolved: expressions compiled, g evaluated
/// at T+2, alpha/beta tabulated on [0, T+2].
struct ProblemSpec {
    int T = 1;
    expr::Expr h;
    double g_T2 = 0.0;
    GridFunction alpha;
    GridFunction beta;
    double c = 1.0;
    SolverOptions solver;

    /// Compile into a Problem; h evaluation failures surface as EvalError.
    Problem to_problem() const;
};

/// Parse and validate a problem file. Unknown fields are rejected.
ProblemSpec load_spec(const nlohmann::json& j);
ProblemSpec load_spec_file(const std::string& path);

/// Hypothesis phase results. The sampled monotonicity check can only warn;
/// everything else is required for a grant. Fields are unset when an earlier
/// failure made them unreachable.
struct HypothesisResults {
    bool g_nonneg = false;
    std::optional<bool> bracket_ordered;
    std::optional<int> order_violation_at;
    std::optional<BracketCheck> lower;
    std::optional<BracketCheck> upper;
    std::optional<A2Verdict> a2;

    /// All hard hypotheses hold (the sampled check is excluded).
    bool hard_pass() const {
        return g_nonneg && bracket_ordered.value_or(false) && lower && lower->ok && upper &&
               upper->ok;
    }
};

/// Step 5 quantities at the worst violating point, produced only when the
/// enclosure fails. v is u - beta (upper side) or alpha - u (lower side).
struct ViolationDiagnostic {
    std::string side;  ///< "upper" | "lower"
    int location;
    double v;                              ///< v at the argmax, > 0
    std::optional<double> v_delta_left;    ///< v^d(l-1), absent at l = 0
    std::optional<double> v_delta_right;   ///< v^d(l), absent at l = T+2
    std::optional<double> curvature_gap;   ///< v^dd(l-1), absent at the ends
    double penalty_ratio;                  ///< v/(v+1)
};

struct EnclosureVerdict {
    bool ok = false;
    double min_lower_slack = 0.0;  ///< min over t of u(t) - alpha(t)
    double min_upper_slack = 0.0;  ///< min over t of beta(t) - u(t)
    std::optional<ViolationDiagnostic> diagnostic;
};

/// Passes iff alpha(t) - tol <= u(t) <= beta(t) + tol for all t; on failure
/// the diagnostic reports the argmax of the violation.
EnclosureVerdict enclosure_check(const GridFunction& u, const Bracket& b, double tol);

/// The full verdict of one pipeline run.
struct Certificate {
    static constexpr const char* kVersion = "dbvp-cert/1";

    HypothesisResults hypotheses;
    std::optional<double> M;
    std::optional<double> ball_radius;
    std::optional<SolveReport> solve;  ///< absent when hypotheses short-circuit
    std::optional<EnclosureVerdict> enclosure;
    std::optional<double> original_residual;  ///< worst row/gap against the base problem
    std::optional<bool> agreement;  ///< truncation untouched along the final iterate
    std::optional<bool> positive;
    bool granted = false;
    bool warning = false;  ///< granted, but the sampled monotonicity check failed
    std::string reason;    ///< denial reason or warning text
    std::optional<std::string> error;  ///< captured evaluation error, when one occurred
};

/// Tolerance for the enclosure check and the original-problem residual.
inline constexpr double kVerifyTol = 1e-9;

/// Hypothesis checks, auxiliary construction, solve (damping ladder with
/// Newton fallback), enclosure certification and diagnostics, in order.
/// Hypothesis failure short-circuits with a denied certificate that still
/// names the failed inequality. Evaluation failures during the solve are
/// captured as a denied certificate, not thrown.
Certificate run_pipeline(const ProblemSpec& spec);

/// Hypothesis phase only (what the `check` subcommand runs).
HypothesisResults run_hypotheses(const ProblemSpec& spec);

nlohmann::ordered_json certificate_to_json(const Certificate& cert);

/// Solution CSV: header "t,u", one row per grid point, t ascending,
/// values at 17 significant digits.
void write_solution_csv(std::ostream& os, const GridFunction& u);
GridFunction read_solution_csv(std::istream& is);

}  // namespace dbvp
