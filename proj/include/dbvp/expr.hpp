#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dbvp::expr {

/// Raised on malformed input; carries the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(size_t offset, std::string expected, std::string found);

    size_t offset;
    std::string expected;
    std::string found;
};

/// Raised when evaluation leaves the real domain (log/sqrt of a negative,
/// division by zero, unbound variable) or produces a non-finite value.
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Variable bindings for evaluation; only the variables an expression
/// actually uses need to be bound.
struct Env {
    std::optional<double> t;
    std::optional<double> x;
    std::optional<double> y;
};

struct VarSet {
    bool t = false;
    bool x = false;
    bool y = false;
    bool operator==(const VarSet&) const = default;
};

namespace detail {
struct Node;
}

/// Immutable arithmetic expression over variables t, x, y.
///
/// Grammar: + - * / ^ (right-assoc), unary minus, parenthesised calls to
/// sin cos tan exp log sqrt abs min max tanh pow, constants pi and e.
/// Unary minus binds looser than ^, so "-x^2" means -(x^2).
class Expr {
public:
    /// Parse source text; throws ParseError with position on malformed input.
    static Expr parse(std::string_view src);

    /// IEEE double evaluation; throws EvalError rather than returning NaN/inf.
    double eval(const Env& env) const;

    /// Exact set of variables occurring in the tree.
    VarSet free_vars() const;

    /// Round-trippable text form: parse(to_string()) is structurally identical.
    std::string to_string() const;

    /// Structural equality (literals compared bitwise).
    bool operator==(const Expr& other) const;

private:
    explicit Expr(std::shared_ptr<const detail::Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const detail::Node> root_;
};

}  // namespace dbvp::expr
