#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dbvp {

/// Discrete interval [0, T+2] with interior points [1, T+1].
struct TimeScale {
    int T;

    explicit TimeScale(int T_) : T(T_) {
        if (T < 1) throw std::invalid_argument("TimeScale: T must be >= 1");
    }

    int first() const noexcept { return 0; }
    int last() const noexcept { return T + 2; }
    int interior_first() const noexcept { return 1; }
    int interior_last() const noexcept { return T + 1; }
    int size() const noexcept { return T + 3; }
};

/// Real-valued function on the consecutive integers [start, start+size-1].
/// Immutable after construction; evaluation outside the domain throws,
/// it never extrapolates.
class GridFunction {
public:
    GridFunction(int start, std::vector<double> values)
        : start_(start), values_(std::move(values)) {}

    static GridFunction constant(int start, int count, double value) {
        return GridFunction(start, std::vector<double>(static_cast<size_t>(count), value));
    }

    template <typename F>
    static GridFunction sample(int start, int count, F&& f) {
        std::vector<double> v;
        v.reserve(static_cast<size_t>(count));
        for (int t = start; t < start + count; ++t) v.push_back(f(t));
        return GridFunction(start, std::move(v));
    }

    int start() const noexcept { return start_; }
    /// Last index of the domain (inclusive).
    int end() const noexcept { return start_ + size() - 1; }
    int size() const noexcept { return static_cast<int>(values_.size()); }
    bool empty() const noexcept { return values_.empty(); }

    bool covers(int t) const noexcept { return t >= start_ && t < start_ + size(); }

    double operator()(int t) const {
        if (!covers(t))
            throw std::out_of_range("GridFunction: index " + std::to_string(t) +
                                    " outside domain [" + std::to_string(start_) + ", " +
                                    std::to_string(end()) + "]");
        return values_[static_cast<size_t>(t - start_)];
    }

    const std::vector<double>& values() const noexcept { return values_; }

    bool same_domain(const GridFunction& o) const noexcept {
        return start_ == o.start_ && size() == o.size();
    }

private:
    int start_;
    std::vector<double> values_;
};

/// Forward difference u(t+1) - u(t), defined on [start, start+len-2].
GridFunction delta(const GridFunction& u);

/// Second forward difference u(t+2) - 2u(t+1) + u(t); equals delta(delta(u)).
GridFunction delta_delta(const GridFunction& u);

/// max |u(t)| over the full domain.
double sup_norm(const GridFunction& u);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& u);

}  // namespace dbvp
