#include "dbvp/grid.hpp"

#include <cmath>

namespace dbvp {

GridFunction delta(const GridFunction& u) {
    if (u.size() < 2) throw std::invalid_argument("delta: need at least 2 points");
    std::vector<double> d(static_cast<size_t>(u.size() - 1));
    const auto& v = u.values();
    for (size_t i = 0; i + 1 < v.size(); ++i) d[i] = v[i + 1] - v[i];
    return GridFunction(u.start(), std::move(d));
}

GridFunction delta_delta(const GridFunction& u) {
    if (u.size() < 3) throw std::invalid_argument("delta_delta: need at least 3 points");
    std::vector<double> d(static_cast<size_t>(u.size() - 2));
    const auto& v = u.values();
    // nested differences, bit-identical to delta(delta(u))
    for (size_t i = 0; i + 2 < v.size(); ++i)
        d[i] = (v[i + 2] - v[i + 1]) - (v[i + 1] - v[i]);
    return GridFunction(u.start(), std::move(d));
}

double sup_norm(const GridFunction& u) {
    if (u.empty()) throw std::invalid_argument("sup_norm: empty grid function");
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

namespace {
void require_same_domain(const GridFunction& a, const GridFunction& b, const char* op) {
    if (!a.same_domain(b))
        throw std::invalid_argument(std::string(op) + ": domain mismatch");
}
}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require_same_domain(a, b, "GridFunction +");
    std::vector<double> v(a.values());
    for (size_t i = 0; i < v.size(); ++i) v[i] += b.values()[i];
    return GridFunction(a.start(), std::move(v));
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require_same_domain(a, b, "GridFunction -");
    std::vector<double> v(a.values());
    for (size_t i = 0; i < v.size(); ++i) v[i] -= b.values()[i];
    return GridFunction(a.start(), std::move(v));
}

GridFunction operator*(double s, const GridFunction& u) {
    std::vector<double> v(u.values());
    for (double& x : v) x *= s;
    return GridFunction(u.start(), std::move(v));
}

}  // namespace dbvp
