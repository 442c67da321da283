#include "dbvp/direct_solver.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <optional>

namespace dbvp {

namespace {

// Tridiagonal solve with partial pivoting (one superdiagonal of fill-in).
// sub[i] is row i's coefficient of x_{i-1} (sub[0] unused), sup[i] of x_{i+1}.
// Returns nullopt on a (numerically) singular pivot.
std::optional<std::vector<double>> solve_tridiag(std::vector<double> sub, std::vector<double> diag,
                                                 std::vector<double> sup, std::vector<double> rhs) {
    const size_t n = diag.size();
    std::vector<double> fill(n, 0.0);  // row i's coefficient of x_{i+2}
    for (size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(sub[i + 1]) > std::abs(diag[i])) {
            std::swap(diag[i], sub[i + 1]);
            // old row i's x_{i+1}, x_{i+2} coefficients move down; row i takes row i+1's
            std::swap(sup[i], diag[i + 1]);
            double old_fill = fill[i];
            fill[i] = i + 2 < n ? sup[i + 1] : 0.0;
            if (i + 2 < n) sup[i + 1] = old_fill;
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (diag[i] == 0.0) return std::nullopt;
        double m = sub[i + 1] / diag[i];
        diag[i + 1] -= m * sup[i];
        if (i + 2 < n) sup[i + 1] -= m * fill[i];
        rhs[i + 1] -= m * rhs[i];
    }
    if (diag[n - 1] == 0.0) return std::nullopt;

    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    if (n >= 2) x[n - 2] = (rhs[n - 2] - sup[n - 2] * x[n - 1]) / diag[n - 2];
    for (size_t k = n; k-- > 2;) {
        size_t i = k - 2;
        x[i] = (rhs[i] - sup[i] * x[i + 1] - fill[i] * x[i + 2]) / diag[i];
    }
    return x;
}

// Equation row r of the pinned system; v holds u(0..T+1), right = c*g(T+2).
double eval_row(const Problem& p, const std::vector<double>& v, double right, int r) {
    if (r == 0) return v[1] - v[0];
    const int T = p.ts.T;
    double up1 = r + 1 <= T + 1 ? v[static_cast<size_t>(r + 1)] : right;
    double ut = v[static_cast<size_t>(r)];
    double um1 = v[static_cast<size_t>(r - 1)];
    return (up1 - ut) - (ut - um1) + p.h(r, ut, ut - um1);
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

GridFunction assemble(const std::vector<double>& v, double right) {
    std::vector<double> u(v);
    u.push_back(right);
    return GridFunction(0, std::move(u));
}

}  // namespace

SolveReport newton_solve(const Problem& p, const GridFunction& u0, const NewtonConfig& cfg) {
    cfg.validate();
    const int T = p.ts.T;
    if (u0.start() != 0 || u0.size() != p.ts.size())
        throw std::invalid_argument("newton_solve: initial guess must live on [0, T+2]");

    const int n = T + 2;  // unknowns u(0..T+1)
    const double right = p.right_value();
    std::vector<double> v(u0.values().begin(), u0.values().begin() + n);

    std::vector<double> F(static_cast<size_t>(n));
    auto eval_F = [&](const std::vector<double>& w, std::vector<double>& out) {
        for (int r = 0; r < n; ++r) out[static_cast<size_t>(r)] = eval_row(p, w, right, r);
    };

    eval_F(v, F);
    double fnorm = sup_abs(F);

    auto finish = [&](bool ok, long long iters, std::string note) {
        GridFunction u = assemble(v, right);
        double res = residual(p, u).worst();
        return SolveReport{std::move(u), ok, iters, fnorm, res, "newton", std::move(note)};
    };

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        if (fnorm <= cfg.tol) return finish(true, iter, "");

        // Tridiagonal Jacobian by forward differences. Perturbing unknown j
        // touches rows j-1, j, j+1 only.
        std::vector<double> sub(static_cast<size_t>(n), 0.0);
        std::vector<double> diag(static_cast<size_t>(n), 0.0);
        std::vector<double> sup(static_cast<size_t>(n), 0.0);
        std::vector<double> w = v;
        for (int j = 0; j < n; ++j) {
            double eps = cfg.fd_step * (1.0 + std::abs(v[static_cast<size_t>(j)]));
            w[static_cast<size_t>(j)] = v[static_cast<size_t>(j)] + eps;
            for (int r = std::max(0, j - 1); r <= std::min(n - 1, j + 1); ++r) {
                double df = (eval_row(p, w, right, r) - F[static_cast<size_t>(r)]) / eps;
                if (r == j - 1)
                    sup[static_cast<size_t>(r)] = df;
                else if (r == j)
                    diag[static_cast<size_t>(r)] = df;
                else
                    sub[static_cast<size_t>(r)] = df;
            }
            w[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
        }

        std::vector<double> neg_F(F);
        for (double& x : neg_F) x = -x;
        auto step = solve_tridiag(sub, diag, sup, std::move(neg_F));
        if (!step) return finish(false, iter, "singular Jacobian");

        // Backtracking on ||F||_sup.
        double lambda = 1.0;
        bool accepted = false;
        std::vector<double> trial(static_cast<size_t>(n));
        std::vector<double> F_trial(static_cast<size_t>(n));
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            for (int j = 0; j < n; ++j)
                trial[static_cast<size_t>(j)] =
                    v[static_cast<size_t>(j)] + lambda * (*step)[static_cast<size_t>(j)];
            eval_F(trial, F_trial);
            double fn = sup_abs(F_trial);
            if (fn < fnorm) {
                v = trial;
                F = F_trial;
                fnorm = fn;
                accepted = true;
                break;
            }
            lambda *= cfg.backtrack_factor;
        }
        if (!accepted) return finish(false, iter, "line search stalled after max backtracks");
    }
    return finish(fnorm <= cfg.tol, cfg.max_iter,
                  fnorm <= cfg.tol ? "" : "max iterations reached");
}

SolveReport newton_solve(const AuxiliaryProblem& ap, const GridFunction& u0,
                         const NewtonConfig& cfg) {
    return newton_solve(ap.as_problem(), u0, cfg);
}

// ---------------------------------------------------------------------------
// Exhaustive lattice scan

namespace {

struct Lattice {
    std::vector<double> lo;
    std::vector<long long> counts;
    double step;
    long long cells;
};

Lattice build_lattice(const Problem& p, const std::vector<Interval>& bounds, double step,
                      long long cell_budget) {
    const int n = p.ts.T + 2;
    if (static_cast<int>(bounds.size()) != n)
        throw std::invalid_argument("brute force: need one interval per unknown u(0..T+1)");
    if (!(step > 0.0)) throw std::invalid_argument("brute force: step must be > 0");
    if (cell_budget < 1) throw std::invalid_argument("brute force: cell budget must be >= 1");

    Lattice lat;
    lat.step = step;
    lat.cells = 1;
    for (const Interval& iv : bounds) {
        if (iv.hi < iv.lo) throw std::invalid_argument("brute force: empty interval");
        // small forgiveness so exact multiples of step land on the lattice
        long long k = static_cast<long long>(std::floor((iv.hi - iv.lo) / step + 1e-9)) + 1;
        lat.lo.push_back(iv.lo);
        lat.counts.push_back(k);
        if (lat.cells > cell_budget / k)
            throw std::runtime_error("brute force: lattice exceeds the cell budget of " +
                                     std::to_string(cell_budget));
        lat.cells *= k;
    }
    return lat;
}

double point_coord(const Lattice& lat, int dim, long long k) {
    return lat.lo[static_cast<size_t>(dim)] + static_cast<double>(k) * lat.step;
}

void decode(const Lattice& lat, long long idx, std::vector<double>& v) {
    for (size_t d = lat.counts.size(); d-- > 0;) {
        long long k = idx % lat.counts[d];
        idx /= lat.counts[d];
        v[d] = point_coord(lat, static_cast<int>(d), k);
    }
}

// Worst residual row / boundary gap; u(T+2) pinned makes the right gap zero.
double objective(const Problem& p, const std::vector<double>& v, double right) {
    const int n = static_cast<int>(v.size());
    double m = 0.0;
    for (int r = 0; r < n; ++r) m = std::max(m, std::abs(eval_row(p, v, right, r)));
    return m;
}

}  // namespace

LatticeScanResult brute_force_scan_serial(const Problem& p, const std::vector<Interval>& bounds,
                                          double step, long long cell_budget) {
    Lattice lat = build_lattice(p, bounds, step, cell_budget);
    const double right = p.right_value();
    std::vector<double> v(bounds.size());

    double best = std::numeric_limits<double>::infinity();
    long long best_idx = 0;
    for (long long idx = 0; idx < lat.cells; ++idx) {
        decode(lat, idx, v);
        double obj = objective(p, v, right);
        if (obj < best) {
            best = obj;
            best_idx = idx;
        }
    }
    decode(lat, best_idx, v);
    return LatticeScanResult{std::move(v), best, best_idx, lat.cells};
}

LatticeScanResult brute_force_scan_parallel(const Problem& p, const std::vector<Interval>& bounds,
                                            double step, long long cell_budget) {
    Lattice lat = build_lattice(p, bounds, step, cell_budget);
    const double right = p.right_value();

    double best = std::numeric_limits<double>::infinity();
    long long best_idx = 0;
    std::exception_ptr failure = nullptr;

#pragma omp parallel
    {
        double local_best = std::numeric_limits<double>::infinity();
        long long local_idx = 0;
        std::vector<double> v(bounds.size());

#pragma omp for schedule(static) nowait
        for (long long idx = 0; idx < lat.cells; ++idx) {
            try {
                decode(lat, idx, v);
                double obj = objective(p, v, right);
                if (obj < local_best || (obj == local_best && idx < local_idx)) {
                    local_best = obj;
                    local_idx = idx;
                }
            } catch (...) {
#pragma omp critical(dbvp_brute_err)
                if (!failure) failure = std::current_exception();
            }
        }

#pragma omp critical(dbvp_brute_merge)
        {
            // ties resolve toward the smallest index: matches the serial scan
            if (local_best < best || (local_best == best && local_idx < best_idx)) {
                best = local_best;
                best_idx = local_idx;
            }
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<double> v(bounds.size());
    decode(lat, best_idx, v);
    return LatticeScanResult{std::move(v), best, best_idx, lat.cells};
}

SolveReport brute_force_solve(const Problem& p, const std::vector<Interval>& bounds, double step,
                              const BruteOptions& opt) {
    if (p.ts.T > 2)
        throw std::invalid_argument("brute_force_solve: only T <= 2 is searchable exhaustively");
    LatticeScanResult r = opt.parallel
                              ? brute_force_scan_parallel(p, bounds, step, opt.cell_budget)
                              : brute_force_scan_serial(p, bounds, step, opt.cell_budget);
    GridFunction u = assemble(r.point, p.right_value());
    return SolveReport{std::move(u), true, r.cells, r.objective, r.objective, "brute", ""};
}

}  // namespace dbvp
