#include "dbvp/truncation.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace dbvp {

Bracket::Bracket(GridFunction alpha_, GridFunction beta_)
    : alpha(std::move(alpha_)), beta(std::move(beta_)) {
    if (!alpha.same_domain(beta)) throw std::invalid_argument("Bracket: alpha/beta domain mismatch");
    if (alpha.start() != 0 || alpha.size() < 4)
        throw std::invalid_argument("Bracket: functions must be defined on [0, T+2]");
    for (int t = alpha.start(); t <= alpha.end(); ++t)
        if (!(alpha(t) <= beta(t)))
            throw std::invalid_argument("Bracket: alpha(" + std::to_string(t) +
                                        ") > beta(" + std::to_string(t) + ")");
}

double sigma(int t, double z, const Bracket& b) {
    if (t < 1 || t > b.alpha.end() - 1)
        throw std::invalid_argument("sigma: t must lie in [1, T+1]");
    double lo = b.alpha(t - 1);
    double hi = b.beta(t - 1);
    if (z > hi) return hi;
    if (z < lo) return lo;
    return z;
}

double h_tilde(int t, double x, double z, const Problem& p, const Bracket& b) {
    double s = sigma(t, z, b);
    double a = b.alpha(t);
    double bt = b.beta(t);
    if (x > bt) {
        double w = x - bt;
        return p.h(t, bt, bt - s) - w / (w + 1.0);
    }
    if (x < a) {
        double w = a - x;
        return p.h(t, a, a - s) + w / (w + 1.0);
    }
    return p.h(t, x, x - s);
}

namespace {

double lattice_point(double lo, double hi, int k, int n) {
    if (k == 0) return lo;
    if (k == n - 1) return hi;  // endpoints exact, corners are always sampled
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

}  // namespace

double estimate_M_serial(const Problem& p, const Bracket& b, int grid_density) {
    if (grid_density < 2) throw std::invalid_argument("estimate_M: grid_density must be >= 2");
    const int T = p.ts.T;
    double m = 0.0;
    for (int t = 1; t <= T + 1; ++t) {
        double xlo = b.alpha(t), xhi = b.beta(t);
        double zlo = b.alpha(t - 1), zhi = b.beta(t - 1);
        int nx = xlo == xhi ? 1 : grid_density;  // degenerate side collapses to a point
        int nz = zlo == zhi ? 1 : grid_density;
        for (int i = 0; i < nx; ++i) {
            double x = lattice_point(xlo, xhi, i, nx);
            for (int j = 0; j < nz; ++j) {
                double z = lattice_point(zlo, zhi, j, nz);
                m = std::max(m, std::abs(p.h(t, x, x - z)));
            }
        }
    }
    return m + 1.0;
}

double estimate_M(const Problem& p, const Bracket& b, int grid_density) {
    if (grid_density < 2) throw std::invalid_argument("estimate_M: grid_density must be >= 2");
    const int T = p.ts.T;
    double m = 0.0;
    std::exception_ptr failure = nullptr;

#pragma omp parallel for collapse(2) reduction(max : m) schedule(static)
    for (int t = 1; t <= T + 1; ++t) {
        for (int i = 0; i < grid_density; ++i) {
            try {
                double xlo = b.alpha(t), xhi = b.beta(t);
                double zlo = b.alpha(t - 1), zhi = b.beta(t - 1);
                int nx = xlo == xhi ? 1 : grid_density;
                int nz = zlo == zhi ? 1 : grid_density;
                if (i >= nx) continue;
                double x = lattice_point(xlo, xhi, i, nx);
                for (int j = 0; j < nz; ++j) {
                    double z = lattice_point(zlo, zhi, j, nz);
                    m = std::max(m, std::abs(p.h(t, x, x - z)));
                }
            } catch (...) {
#pragma omp critical(dbvp_estimate_m_err)
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return m + 1.0;
}

AuxiliaryProblem::AuxiliaryProblem(Problem base, Bracket bracket, double M)
    : base_(std::move(base)), bracket_(std::move(bracket)), M_(M) {
    if (!(M_ > 0.0)) throw std::invalid_argument("AuxiliaryProblem: M must be > 0");
    if (bracket_.alpha.size() != base_.ts.size())
        throw std::invalid_argument("AuxiliaryProblem: bracket domain does not match T");
}

double AuxiliaryProblem::eval(int t, double x, double z) const {
    double v = h_tilde(t, x, z, base_, bracket_);
    if (std::abs(v) > M_)
        throw MBoundError("auxiliary nonlinearity exceeded its bound M=" + std::to_string(M_) +
                          " at t=" + std::to_string(t) + ", x=" + std::to_string(x) +
                          ", z=" + std::to_string(z) + " (|value|=" + std::to_string(std::abs(v)) +
                          "); the lattice estimate missed an interior extremum");
    return v;
}

Problem AuxiliaryProblem::as_problem() const {
    // The lambda owns a copy, so the returned Problem is self-contained.
    AuxiliaryProblem self = *this;
    Nonlinearity h = [self](int t, double x, double y) { return self.eval(t, x, x - y); };
    return Problem(base_.ts, std::move(h), base_.g_T2, base_.c);
}

AuxiliaryProblem make_auxiliary(const Problem& p, const Bracket& b, int grid_density) {
    return AuxiliaryProblem(p, b, estimate_M(p, b, grid_density));
}

}  // namespace dbvp
