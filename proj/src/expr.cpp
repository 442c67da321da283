#include "dbvp/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

namespace dbvp::expr {

ParseError::ParseError(size_t offset_, std::string expected_, std::string found_)
    : std::runtime_error("parse error at offset " + std::to_string(offset_) + ": expected " +
                         expected_ + ", found " + found_),
      offset(offset_),
      expected(std::move(expected_)),
      found(std::move(found_)) {}

namespace detail {

enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Min, Max, Tanh, Pow };

struct FnInfo {
    const char* name;
    Fn fn;
    int arity;
};

constexpr std::array<FnInfo, 11> kFunctions = {{
    {"sin", Fn::Sin, 1},
    {"cos", Fn::Cos, 1},
    {"tan", Fn::Tan, 1},
    {"exp", Fn::Exp, 1},
    {"log", Fn::Log, 1},
    {"sqrt", Fn::Sqrt, 1},
    {"abs", Fn::Abs, 1},
    {"min", Fn::Min, 2},
    {"max", Fn::Max, 2},
    {"tanh", Fn::Tanh, 1},
    {"pow", Fn::Pow, 2},
}};

struct Node {
    Kind kind;
    double number = 0.0;  // Kind::Number
    char var = 0;         // Kind::Variable: 't' | 'x' | 'y'
    Fn fn = Fn::Sin;      // Kind::Call
    std::vector<std::shared_ptr<const Node>> children;
};

using NodePtr = std::shared_ptr<const Node>;

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    size_t offset;
    std::string_view text;
    double value = 0.0;  // Tok::Number
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ >= src_.size()) return {Tok::End, pos_, "<end of input>"};
        size_t start = pos_;
        char c = src_[pos_];
        switch (c) {
            case '+': ++pos_; return {Tok::Plus, start, src_.substr(start, 1)};
            case '-': ++pos_; return {Tok::Minus, start, src_.substr(start, 1)};
            case '*': ++pos_; return {Tok::Star, start, src_.substr(start, 1)};
            case '/': ++pos_; return {Tok::Slash, start, src_.substr(start, 1)};
            case '^': ++pos_; return {Tok::Caret, start, src_.substr(start, 1)};
            case '(': ++pos_; return {Tok::LParen, start, src_.substr(start, 1)};
            case ')': ++pos_; return {Tok::RParen, start, src_.substr(start, 1)};
            case ',': ++pos_; return {Tok::Comma, start, src_.substr(start, 1)};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            return lex_number(start);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                          src_[pos_] == '_'))
                ++pos_;
            return {Tok::Ident, start, src_.substr(start, pos_ - start)};
        }
        throw ParseError(start, "a token", "'" + std::string(1, c) + "'");
    }

private:
    Token lex_number(size_t start) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // "2e+" is "2" followed by 'e' identifier
            }
        }
        std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc::result_out_of_range)
            throw ParseError(start, "a representable number", std::string(text));
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ParseError(start, "a number", std::string(text));
        return {Tok::Number, start, text, value};
    }

    std::string_view src_;
    size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Recursive-descent parser. Precedence (loose to tight):
//   additive < multiplicative < unary minus < ^ < primary

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    NodePtr parse() {
        NodePtr e = additive();
        expect(Tok::End, "end of input");
        return e;
    }

private:
    static constexpr int kMaxDepth = 256;

    void advance() { tok_ = lexer_.next(); }

    void expect(Tok kind, const char* what) {
        if (tok_.kind != kind)
            throw ParseError(tok_.offset, what, "'" + std::string(tok_.text) + "'");
        advance();
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p_(p) {
            if (++p_.depth_ > kMaxDepth)
                throw ParseError(p_.tok_.offset, "a shallower expression (nesting limit)",
                                 "'" + std::string(p_.tok_.text) + "'");
        }
        ~DepthGuard() { --p_.depth_; }
        Parser& p_;
    };

    static NodePtr make(Kind kind, NodePtr a, NodePtr b = nullptr) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->children.push_back(std::move(a));
        if (b) n->children.push_back(std::move(b));
        return n;
    }

    NodePtr additive() {
        DepthGuard g(*this);
        NodePtr lhs = multiplicative();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            Kind k = tok_.kind == Tok::Plus ? Kind::Add : Kind::Sub;
            advance();
            lhs = make(k, std::move(lhs), multiplicative());
        }
        return lhs;
    }

    NodePtr multiplicative() {
        DepthGuard g(*this);
        NodePtr lhs = unary();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            Kind k = tok_.kind == Tok::Star ? Kind::Mul : Kind::Div;
            advance();
            lhs = make(k, std::move(lhs), unary());
        }
        return lhs;
    }

    NodePtr unary() {
        DepthGuard g(*this);
        if (tok_.kind == Tok::Minus) {
            advance();
            return make(Kind::Neg, unary());
        }
        return power();
    }

    NodePtr power() {
        DepthGuard g(*this);
        NodePtr base = primary();
        if (tok_.kind == Tok::Caret) {
            advance();
            // Right-associative; the exponent slot accepts unary minus (x^-2).
            return make(Kind::Pow, std::move(base), unary());
        }
        return base;
    }

    NodePtr primary() {
        DepthGuard g(*this);
        switch (tok_.kind) {
            case Tok::Number: {
                auto n = std::make_shared<Node>();
                n->kind = Kind::Number;
                n->number = tok_.value;
                advance();
                return n;
            }
            case Tok::LParen: {
                advance();
                NodePtr e = additive();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident:
                return identifier();
            default:
                throw ParseError(tok_.offset, "a number, variable, function call or '('",
                                 "'" + std::string(tok_.text) + "'");
        }
    }

    NodePtr identifier() {
        Token id = tok_;
        advance();
        if (tok_.kind == Tok::LParen) return call(id);
        if (id.text == "t" || id.text == "x" || id.text == "y") {
            auto n = std::make_shared<Node>();
            n->kind = Kind::Variable;
            n->var = id.text[0];
            return n;
        }
        if (id.text == "pi" || id.text == "e") {
            auto n = std::make_shared<Node>();
            n->kind = Kind::Number;
            n->number = id.text == "pi" ? 3.141592653589793 : 2.718281828459045;
            return n;
        }
        // Bare function name without arguments is also an unknown identifier here.
        throw ParseError(id.offset, "one of t, x, y, pi, e or a function call",
                         "'" + std::string(id.text) + "'");
    }

    NodePtr call(const Token& id) {
        const FnInfo* info = nullptr;
        for (const auto& f : kFunctions)
            if (id.text == f.name) info = &f;
        if (!info)
            throw ParseError(id.offset, "a known function name",
                             "'" + std::string(id.text) + "'");
        expect(Tok::LParen, "'('");
        std::vector<NodePtr> args;
        args.push_back(additive());
        while (tok_.kind == Tok::Comma) {
            advance();
            args.push_back(additive());
        }
        if (static_cast<int>(args.size()) != info->arity)
            throw ParseError(id.offset,
                             std::string(info->name) + " with " + std::to_string(info->arity) +
                                 " argument(s)",
                             std::to_string(args.size()) + " argument(s)");
        expect(Tok::RParen, "')'");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Call;
        n->fn = info->fn;
        n->children = std::move(args);
        return n;
    }

    Lexer lexer_;
    Token tok_{Tok::End, 0, ""};
    int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

double check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string(what) + " produced a non-finite value");
    return v;
}

double eval_node(const Node& n, const Env& env) {
    switch (n.kind) {
        case Kind::Number:
            return n.number;
        case Kind::Variable: {
            const std::optional<double>& slot =
                n.var == 't' ? env.t : (n.var == 'x' ? env.x : env.y);
            if (!slot) throw EvalError(std::string("unbound variable '") + n.var + "'");
            return *slot;
        }
        case Kind::Neg:
            return -eval_node(*n.children[0], env);
        case Kind::Add:
            return check_finite(eval_node(*n.children[0], env) + eval_node(*n.children[1], env),
                                "addition");
        case Kind::Sub:
            return check_finite(eval_node(*n.children[0], env) - eval_node(*n.children[1], env),
                                "subtraction");
        case Kind::Mul:
            return check_finite(eval_node(*n.children[0], env) * eval_node(*n.children[1], env),
                                "multiplication");
        case Kind::Div: {
            double a = eval_node(*n.children[0], env);
            double b = eval_node(*n.children[1], env);
            if (b == 0.0) throw EvalError("division by zero");
            return check_finite(a / b, "division");
        }
        case Kind::Pow: {
            double a = eval_node(*n.children[0], env);
            double b = eval_node(*n.children[1], env);
            return check_finite(std::pow(a, b), "power");
        }
        case Kind::Call: {
            double a = eval_node(*n.children[0], env);
            switch (n.fn) {
                case Fn::Sin: return check_finite(std::sin(a), "sin");
                case Fn::Cos: return check_finite(std::cos(a), "cos");
                case Fn::Tan: return check_finite(std::tan(a), "tan");
                case Fn::Exp: return check_finite(std::exp(a), "exp");
                case Fn::Log:
                    if (a <= 0.0) throw EvalError("log of a non-positive argument");
                    return check_finite(std::log(a), "log");
                case Fn::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of a negative argument");
                    return check_finite(std::sqrt(a), "sqrt");
                case Fn::Abs: return std::abs(a);
                case Fn::Tanh: return check_finite(std::tanh(a), "tanh");
                case Fn::Min:
                    return std::min(a, eval_node(*n.children[1], env));
                case Fn::Max:
                    return std::max(a, eval_node(*n.children[1], env));
                case Fn::Pow:
                    return check_finite(std::pow(a, eval_node(*n.children[1], env)), "pow");
            }
            throw EvalError("unknown function");
        }
    }
    throw EvalError("malformed expression tree");
}

void collect_vars(const Node& n, VarSet& vs) {
    if (n.kind == Kind::Variable) {
        if (n.var == 't') vs.t = true;
        if (n.var == 'x') vs.x = true;
        if (n.var == 'y') vs.y = true;
    }
    for (const auto& c : n.children) collect_vars(*c, vs);
}

// Printing with minimal parentheses. Precedence levels as in the parser.
int node_prec(const Node& n) {
    switch (n.kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
    bool parens = node_prec(child) < min_prec;
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

const char* fn_name(Fn fn) {
    for (const auto& f : kFunctions)
        if (f.fn == fn) return f.name;
    return "?";
}

void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", n.number);
            out += buf;
            return;
        }
        case Kind::Variable:
            out += n.var;
            return;
        case Kind::Neg:
            out += '-';
            print_child(*n.children[0], 3, out);
            return;
        case Kind::Add:
        case Kind::Sub:
            print_child(*n.children[0], 1, out);
            out += n.kind == Kind::Add ? " + " : " - ";
            print_child(*n.children[1], 2, out);  // rhs one level tighter: a - (b + c)
            return;
        case Kind::Mul:
        case Kind::Div:
            print_child(*n.children[0], 2, out);
            out += n.kind == Kind::Mul ? "*" : "/";
            print_child(*n.children[1], 3, out);
            return;
        case Kind::Pow:
            print_child(*n.children[0], 5, out);  // (-x)^2 and (a^b)^c need parens
            out += '^';
            print_child(*n.children[1], 3, out);  // exponent slot accepts unary minus
            return;
        case Kind::Call: {
            out += fn_name(n.fn);
            out += '(';
            for (size_t i = 0; i < n.children.size(); ++i) {
                if (i) out += ", ";
                print_node(*n.children[i], out);
            }
            out += ')';
            return;
        }
    }
}

bool node_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Kind::Number: {
            // bitwise comparison so -0.0 and 0.0 stay distinct
            return std::memcmp(&a.number, &b.number, sizeof(double)) == 0;
        }
        case Kind::Variable:
            if (a.var != b.var) return false;
            break;
        case Kind::Call:
            if (a.fn != b.fn) return false;
            break;
        default:
            break;
    }
    if (a.children.size() != b.children.size()) return false;
    for (size_t i = 0; i < a.children.size(); ++i)
        if (!node_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

}  // namespace detail

Expr Expr::parse(std::string_view src) {
    detail::Parser p(src);
    return Expr(p.parse());
}

double Expr::eval(const Env& env) const { return detail::eval_node(*root_, env); }

VarSet Expr::free_vars() const {
    VarSet vs;
    detail::collect_vars(*root_, vs);
    return vs;
}

std::string Expr::to_string() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
}

bool Expr::operator==(const Expr& other) const { return detail::node_equal(*root_, *other.root_); }

}  // namespace dbvp::expr
