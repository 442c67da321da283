#pragma once

#include <optional>
#include <string>

#include "dbvp/truncation.hpp"

namespace dbvp {

struct SolveConfig {
    double tol = 1e-10;     ///< fixed-point gap and residual target
    long long max_iter = 10000;
    double damping = 1.0;   ///< in (0, 1]; u <- (1-damping)*u + damping*Tu
    std::optional<GridFunction> initial_guess;  ///< default: bracket midpoint

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("SolveConfig: tol must be > 0");
        if (max_iter < 1) throw std::invalid_argument("SolveConfig: max_iter must be >= 1");
        if (!(damping > 0.0) || damping > 1.0)
            throw std::invalid_argument("SolveConfig: damping must be in (0, 1]");
    }
};

struct SolveReport {
    GridFunction u;
    bool converged = false;
    long long iterations = 0;
    double final_gap = 0.0;       ///< fixed-point gap (Newton/brute: their own residual norm)
    double final_residual = 0.0;  ///< worst equation row / boundary gap of u
    std::string method;           ///< "picard" | "newton" | "brute"
    std::string note;             ///< failure detail, empty on success
};

/// The solution operator of the auxiliary problem:
///   (Tu)(t) = c*g(T+2) + sum_{s=t}^{T+1} sum_{i=1}^{s} h~(i, u(i), u(i-1))
/// with empty-sum conventions making (Tu)(T+2) = c*g(T+2) and (Tu)(0) = (Tu)(1)
/// exact assignments. Evaluated via prefix sums of the inner sums followed by
/// a suffix accumulation, O(T) per application.
GridFunction apply_T(const GridFunction& u, const AuxiliaryProblem& ap);

/// Sufficient invariant-ball radius: M * (T+1)(T+2)/2.
double ball_radius(double M, int T);

/// (alpha + beta)/2 on [0, T+2], the default initial iterate. It lies where
/// the modified nonlinearity agrees with h.
GridFunction midpoint_guess(const Bracket& b);

/// Damped Picard iteration for a fixed point of apply_T. Convergence requires
/// both the fixed-point gap and the auxiliary residual to reach tol; the
/// residual claim is checked, not assumed. Non-convergence returns the best
/// iterate with converged = false (evaluation failures still throw).
SolveReport picard_solve(const AuxiliaryProblem& ap, const SolveConfig& cfg);

}  // namespace dbvp
