#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dbvp/grid.hpp"

namespace dbvp {

/// Nonlinearity h(t, x, y) for integer t in [1, T+1]; must be reentrant and
/// side-effect free. Evaluation failures surface as exceptions, never as
/// silent values.
using Nonlinearity = std::function<double(int t, double x, double y)>;

/// The boundary value problem
///   u^dd(t-1) + h(t, u(t), u^d(t-1)) = 0 on [1, T+1],
///   u^d(0) = 0,  u(T+2) = c * g(T+2).
/// Only g's value at T+2 enters the problem.
struct Problem {
    TimeScale ts;
    Nonlinearity h;
    double g_T2;
    double c;

    Problem(TimeScale ts_, Nonlinearity h_, double g_T2_, double c_ = 1.0)
        : ts(ts_), h(std::move(h_)), g_T2(g_T2_), c(c_) {
        if (!h) throw std::invalid_argument("Problem: h must be callable");
        if (g_T2 < 0.0) throw std::invalid_argument("Problem: g(T+2) must be >= 0");
        if (!(c > 0.0)) throw std::invalid_argument("Problem: c must be > 0");
    }

    /// Dirichlet value at the right end, u(T+2) = c * g(T+2).
    double right_value() const { return c * g_T2; }
};

struct ResidualReport {
    GridFunction residual;    ///< equation rows on [1, T+1]
    double bc_left;           ///< u^d(0)
    double bc_right_gap;      ///< u(T+2) - c*g(T+2)
    double max_abs_residual;  ///< sup_norm(residual)

    /// Worst of all rows and both boundary gaps.
    double worst() const;
};

/// One-sided slack record for the lower/upper solution inequalities; a
/// nonnegative slack means the inequality holds.
struct BracketCheck {
    bool ok = false;
    std::vector<double> difference_slack;  ///< index t-1 holds the row for t in [1, T+1]
    double left_slack = 0.0;
    double right_slack = 0.0;

    struct Violation {
        std::string where;  ///< "difference" | "left boundary" | "right boundary"
        int t;              ///< grid point (0 for boundary rows)
        double slack;       ///< the offending (negative) slack
    };
    std::optional<Violation> first_violation;
};

/// Per-t sampling rectangle for the monotonicity check.
struct BoxRect {
    double x_lo, x_hi, y_lo, y_hi;
};

/// Verdict of the sampled monotonicity check of h in its third variable.
/// Sampling cannot prove the property; `sampled` records that caveat.
struct A2Verdict {
    bool passed = false;
    bool sampled = true;

    struct Violation {
        int t;
        double x, y1, y2;
        double amount;  ///< h(t,x,y2) - h(t,x,y1) > tol
    };
    std::optional<Violation> worst;
};

/// Equation rows and boundary gaps of u against the problem.
/// u must live on exactly [0, T+2].
ResidualReport residual(const Problem& p, const GridFunction& u);

/// True iff all residual rows and both boundary gaps are within tol.
bool is_solution(const Problem& p, const GridFunction& u, double tol);

/// True iff u > 0 at every interior point of its domain (endpoints exempt).
bool is_positive_solution(const GridFunction& u);

/// Lower-solution check: rows must satisfy
///   a^dd(t-1) + h(t, a(t), a^d(t-1)) >= 0,  a^d(0) >= 0,  a(T+2) <= g(T+2),
/// each up to -tol slack.
BracketCheck check_lower(const Problem& p, const GridFunction& alpha, double tol);

/// Upper-solution check, mirror image with reversed inequality signs.
BracketCheck check_upper(const Problem& p, const GridFunction& beta, double tol);

/// Deterministic lattice check that h is non-increasing in y over the given
/// per-t boxes (box index t-1 covers grid point t). samples >= 2.
A2Verdict check_A2_sampled(const Problem& p, const std::vector<BoxRect>& box, int samples,
                           double tol = 1e-9);

}  // namespace dbvp
