#pragma once

#include <vector>

#include "dbvp/fixedpoint.hpp"

namespace dbvp {

struct NewtonConfig {
    double tol = 1e-12;
    int max_iter = 100;
    double fd_step = 1e-7;          ///< Jacobian finite-difference step
    double backtrack_factor = 0.5;  ///< line-search shrink factor, in (0, 1)
    int max_backtracks = 30;

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("NewtonConfig: tol must be > 0");
        if (max_iter < 1) throw std::invalid_argument("NewtonConfig: max_iter must be >= 1");
        if (!(fd_step > 0.0)) throw std::invalid_argument("NewtonConfig: fd_step must be > 0");
        if (!(backtrack_factor > 0.0) || backtrack_factor >= 1.0)
            throw std::invalid_argument("NewtonConfig: backtrack_factor must be in (0, 1)");
        if (max_backtracks < 0)
            throw std::invalid_argument("NewtonConfig: max_backtracks must be >= 0");
    }
};

/// Damped Newton on the full nonlinear system. Unknowns are u(0..T+1) with
/// u(T+2) pinned to c*g(T+2); equations are F_0 = u(1)-u(0) and
/// F_t = u^dd(t-1) + h(t, u(t), u^d(t-1)) for t in [1, T+1]. The Jacobian is
/// tridiagonal, approximated by forward differences, and solved with a
/// partial-pivoting tridiagonal factorization. Backtracking line search on
/// the sup-norm of F. Converged iff ||F||_sup <= tol; a singular Jacobian or
/// a stalled line search is reported in the note, not thrown.
SolveReport newton_solve(const Problem& p, const GridFunction& u0, const NewtonConfig& cfg = {});
SolveReport newton_solve(const AuxiliaryProblem& ap, const GridFunction& u0,
                         const NewtonConfig& cfg = {});

struct Interval {
    double lo, hi;
};

struct BruteOptions {
    long long cell_budget = 100000000;  ///< error out above this many lattice cells
    bool parallel = true;
};

/// Best point of an exhaustive lattice scan.
struct LatticeScanResult {
    std::vector<double> point;  ///< unknowns u(0..T+1)
    double objective;           ///< worst residual row / boundary gap at the point
    long long index;            ///< linear lattice index of the best point
    long long cells;            ///< total lattice size
};

/// Serial reference scan, kept as the oracle for the parallel kernel.
LatticeScanResult brute_force_scan_serial(const Problem& p, const std::vector<Interval>& bounds,
                                          double step, long long cell_budget = 100000000);

/// OpenMP scan over the same lattice; ties resolved toward the smallest
/// linear index, so the result is identical to the serial reference.
LatticeScanResult brute_force_scan_parallel(const Problem& p, const std::vector<Interval>& bounds,
                                            double step, long long cell_budget = 100000000);

/// Exhaustive search oracle for tiny problems (T <= 2). bounds gives one
/// interval per unknown u(0..T+1); u(T+2) stays pinned to c*g(T+2). Returns
/// the lattice point minimizing the max-abs residual including boundary rows.
SolveReport brute_force_solve(const Problem& p, const std::vector<Interval>& bounds, double step,
                              const BruteOptions& opt = {});

}  // namespace dbvp
