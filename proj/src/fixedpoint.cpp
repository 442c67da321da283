#include "dbvp/fixedpoint.hpp"

#include <cmath>
#include <limits>

namespace dbvp {

GridFunction apply_T(const GridFunction& u, const AuxiliaryProblem& ap) {
    const Problem& p = ap.base();
    const int T = p.ts.T;
    if (u.start() != 0 || u.size() != p.ts.size())
        throw std::invalid_argument("apply_T: u must be defined on exactly [0, T+2]");

    // inner[s] = sum_{i=1}^{s} h~(i, u(i), u(i-1)), inner[0] = 0
    std::vector<double> inner(static_cast<size_t>(T + 2), 0.0);
    for (int i = 1; i <= T + 1; ++i)
        inner[static_cast<size_t>(i)] = inner[static_cast<size_t>(i - 1)] + ap.eval(i, u(i), u(i - 1));

    const double right = p.right_value();
    std::vector<double> out(static_cast<size_t>(T + 3));
    out[static_cast<size_t>(T + 2)] = right;  // outer sum empty: exact assignment
    for (int t = T + 1; t >= 1; --t)
        out[static_cast<size_t>(t)] = out[static_cast<size_t>(t + 1)] + inner[static_cast<size_t>(t)];
    out[0] = out[1];  // inner sum at s = 0 is empty: exact assignment
    return GridFunction(0, std::move(out));
}

double ball_radius(double M, int T) {
    if (!(M > 0.0)) throw std::invalid_argument("ball_radius: M must be > 0");
    return M * static_cast<double>(T + 1) * static_cast<double>(T + 2) / 2.0;
}

GridFunction midpoint_guess(const Bracket& b) {
    return GridFunction::sample(b.alpha.start(), b.alpha.size(),
                                [&](int t) { return 0.5 * (b.alpha(t) + b.beta(t)); });
}

SolveReport picard_solve(const AuxiliaryProblem& ap, const SolveConfig& cfg) {
    cfg.validate();
    const Problem aux = ap.as_problem();

    GridFunction u = cfg.initial_guess ? *cfg.initial_guess : midpoint_guess(ap.bracket());
    if (u.start() != 0 || u.size() != ap.base().ts.size())
        throw std::invalid_argument("picard_solve: initial guess must live on [0, T+2]");

    const double lambda = cfg.damping;
    GridFunction best = u;
    double best_gap = std::numeric_limits<double>::infinity();

    for (long long k = 1; k <= cfg.max_iter; ++k) {
        GridFunction Tu = apply_T(u, ap);
        double gap = sup_norm(Tu - u);
        if (gap < best_gap) {
            best_gap = gap;
            best = u;
        }
        if (gap <= cfg.tol) {
            double res = residual(aux, u).worst();
            if (res <= cfg.tol)
                return SolveReport{std::move(u), true, k, gap, res, "picard", ""};
        }
        u = lambda == 1.0 ? std::move(Tu) : (1.0 - lambda) * u + lambda * Tu;
    }

    double res = residual(aux, best).worst();
    return SolveReport{std::move(best), false, cfg.max_iter, best_gap, res, "picard",
                       "fixed-point gap did not reach tol within max_iter"};
}

}  // namespace dbvp
