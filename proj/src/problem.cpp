#include "dbvp/problem.hpp"

#include <cmath>

namespace dbvp {

namespace {

void require_full_domain(const Problem& p, const GridFunction& u, const char* op) {
    if (u.start() != 0 || u.size() != p.ts.size())
        throw std::invalid_argument(std::string(op) + ": u must be defined on exactly [0, T+2]");
}

}  // namespace

double ResidualReport::worst() const {
    return std::max(max_abs_residual, std::max(std::abs(bc_left), std::abs(bc_right_gap)));
}

ResidualReport residual(const Problem& p, const GridFunction& u) {
    require_full_domain(p, u, "residual");
    const int T = p.ts.T;
    std::vector<double> rows(static_cast<size_t>(T + 1));
    for (int t = 1; t <= T + 1; ++t) {
        double udd = (u(t + 1) - u(t)) - (u(t) - u(t - 1));  // u^dd(t-1)
        double ud = u(t) - u(t - 1);                    // u^d(t-1)
        rows[static_cast<size_t>(t - 1)] = udd + p.h(t, u(t), ud);
    }
    GridFunction r(1, std::move(rows));
    double m = sup_norm(r);
    return ResidualReport{std::move(r), u(1) - u(0), u(p.ts.last()) - p.right_value(), m};
}

bool is_solution(const Problem& p, const GridFunction& u, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("is_solution: tol must be > 0");
    return residual(p, u).worst() <= tol;
}

bool is_positive_solution(const GridFunction& u) {
    if (u.size() < 3)
        throw std::invalid_argument("is_positive_solution: domain too short for interior points");
    for (int t = u.start() + 1; t <= u.end() - 1; ++t)
        if (!(u(t) > 0.0)) return false;
    return true;
}

namespace {

BracketCheck check_one_sided(const Problem& p, const GridFunction& f, double tol, bool lower) {
    require_full_domain(p, f, lower ? "check_lower" : "check_upper");
    const int T = p.ts.T;
    BracketCheck out;
    out.difference_slack.resize(static_cast<size_t>(T + 1));

    auto record = [&](const std::string& where, int t, double slack) {
        if (slack < -tol && !out.first_violation)
            out.first_violation = BracketCheck::Violation{where, t, slack};
    };

    for (int t = 1; t <= T + 1; ++t) {
        double fdd = (f(t + 1) - f(t)) - (f(t) - f(t - 1));
        double fd = f(t) - f(t - 1);
        double row = fdd + p.h(t, f(t), fd);
        double slack = lower ? row : -row;
        out.difference_slack[static_cast<size_t>(t - 1)] = slack;
        record("difference", t, slack);
    }
    double fd0 = f(1) - f(0);
    out.left_slack = lower ? fd0 : -fd0;
    record("left boundary", 0, out.left_slack);

    double gap = p.g_T2 - f(p.ts.last());
    out.right_slack = lower ? gap : -gap;
    record("right boundary", p.ts.last(), out.right_slack);

    out.ok = !out.first_violation.has_value();
    return out;
}

}  // namespace

BracketCheck check_lower(const Problem& p, const GridFunction& alpha, double tol) {
    return check_one_sided(p, alpha, tol, true);
}

BracketCheck check_upper(const Problem& p, const GridFunction& beta, double tol) {
    return check_one_sided(p, beta, tol, false);
}

A2Verdict check_A2_sampled(const Problem& p, const std::vector<BoxRect>& box, int samples,
                           double tol) {
    if (samples < 2) throw std::invalid_argument("check_A2_sampled: samples must be >= 2");
    const int T = p.ts.T;
    if (static_cast<int>(box.size()) != T + 1)
        throw std::invalid_argument("check_A2_sampled: need one box per t in [1, T+1]");

    A2Verdict verdict;
    verdict.passed = true;

    auto lattice = [&](double lo, double hi, int k) {
        if (k == 0) return lo;
        if (k == samples - 1) return hi;
        return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    };

    std::vector<double> ys(static_cast<size_t>(samples));
    std::vector<double> hv(static_cast<size_t>(samples));
    for (int t = 1; t <= T + 1; ++t) {
        const BoxRect& b = box[static_cast<size_t>(t - 1)];
        if (b.x_lo > b.x_hi || b.y_lo > b.y_hi)
            throw std::invalid_argument("check_A2_sampled: degenerate box at t=" +
                                        std::to_string(t));
        for (int j = 0; j < samples; ++j) ys[static_cast<size_t>(j)] = lattice(b.y_lo, b.y_hi, j);
        for (int i = 0; i < samples; ++i) {
            double x = lattice(b.x_lo, b.x_hi, i);
            for (int j = 0; j < samples; ++j)
                hv[static_cast<size_t>(j)] = p.h(t, x, ys[static_cast<size_t>(j)]);
            for (int j = 0; j < samples; ++j) {
                for (int k = j + 1; k < samples; ++k) {
                    if (ys[static_cast<size_t>(k)] <= ys[static_cast<size_t>(j)])
                        continue;  // collapsed y-range
                    double amount = hv[static_cast<size_t>(k)] - hv[static_cast<size_t>(j)];
                    if (amount > tol) {  // rise along increasing y violates non-increasing
                        verdict.passed = false;
                        if (!verdict.worst || amount > verdict.worst->amount)
                            verdict.worst = A2Verdict::Violation{
                                t, x, ys[static_cast<size_t>(j)], ys[static_cast<size_t>(k)],
                                amount};
                    }
                }
            }
        }
    }
    return verdict;
}

}  // namespace dbvp
