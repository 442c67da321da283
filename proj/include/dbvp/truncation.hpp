#pragma once

#include <stdexcept>

#include "dbvp/problem.hpp"

namespace dbvp {

/// A lower/upper solution pair on [0, T+2] with alpha <= beta pointwise.
/// The order must hold on the full domain (not just the interior) because
/// the clamp and the modified nonlinearity read both functions at t-1 down
/// to index 0.
struct Bracket {
    GridFunction alpha;
    GridFunction beta;

    Bracket(GridFunction alpha_, GridFunction beta_);
};

/// Clamp of z to [alpha(t-1), beta(t-1)], for t in [1, T+1].
double sigma(int t, double z, const Bracket& b);

/// The modified nonlinearity. Takes z = u(t-1) and internally forms the
/// third argument of h as x - sigma(t, z), a truncated forward difference:
///   x > beta(t):            h(t, beta(t), beta(t) - s) - (x-beta)/(x-beta+1)
///   alpha(t) <= x <= beta(t): h(t, x, x - s)
///   x < alpha(t):           h(t, alpha(t), alpha(t) - s) + (alpha-x)/(alpha-x+1)
/// where s = sigma(t, z). Each penalty term lies in [0, 1).
double h_tilde(int t, double x, double z, const Problem& p, const Bracket& b);

/// Upper bound for |h_tilde| over all real (x, z): the maximum of
/// |h(t, x, x-z)| over a grid_density^2 lattice of the bracket box per t,
/// plus 1 for the penalty terms. Serial reference implementation.
double estimate_M_serial(const Problem& p, const Bracket& b, int grid_density = 128);

/// Same lattice maximum computed with OpenMP; identical result to the
/// serial reference (max-reduction is order independent).
double estimate_M(const Problem& p, const Bracket& b, int grid_density = 128);

/// Raised when an evaluation of the modified nonlinearity exceeds the bound
/// M the auxiliary problem was built with. The lattice estimate is a
/// heuristic for general h; this converts a silent underestimate into a
/// loud failure.
class MBoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The truncated problem: same boundary data as the base problem, with the
/// nonlinearity replaced by h_tilde. Every evaluation re-checks |h_tilde| <= M.
class AuxiliaryProblem {
public:
    AuxiliaryProblem(Problem base, Bracket bracket, double M);

    const Problem& base() const noexcept { return base_; }
    const Bracket& bracket() const noexcept { return bracket_; }
    double M() const noexcept { return M_; }

    /// h_tilde(t, x, z) with the opportunistic M-bound check.
    double eval(int t, double x, double z) const;

    /// View of the auxiliary problem as a plain Problem; the nonlinearity
    /// receives (t, x, y) and recovers z = x - y.
    Problem as_problem() const;

private:
    Problem base_;
    Bracket bracket_;
    double M_;
};

AuxiliaryProblem make_auxiliary(const Problem& p, const Bracket& b, int grid_density = 128);

}  // namespace dbvp
