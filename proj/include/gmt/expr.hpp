#pragma once

/// Scalar expression language: parse, evaluate, differentiate.
///
/// Grammar (standard precedence, `^` right-associative and tightest):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-')? power
///   power  := atom ('^' factor)?
///   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Identifiers are coordinate names (prefix + 1-based index), the
/// constants `pi` and `e`, and the functions sin, cos, exp, log, sqrt,
/// abs. Derivatives are exact forward-mode dual numbers, one partial
/// per coordinate.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmt/errors.hpp"

namespace gmt {

enum class NodeKind : std::uint8_t { Number, Coord, Constant, Unary, Binary, Call };
enum class UnaryOp : std::uint8_t { Neg };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };
enum class FuncId : std::uint8_t { Sin, Cos, Exp, Log, Sqrt, Abs };
enum class NamedConst : std::uint8_t { Pi, E };

/// Value of an expression together with all first partials at a point.
struct DualValue {
    double value = 0.0;
    std::vector<double> partials;  // partials[k] = d(expr)/d(coord k)
};

namespace detail {

// Integer exponents with magnitude up to this bound are evaluated by
// repeated multiplication; larger ones fall back to the pow/exp path.
inline constexpr long long kMaxRepeatedMultExponent = 64;

struct AstNode {
    NodeKind kind{};
    double number = 0.0;       // Number
    int coord = 0;             // Coord, zero-based
    NamedConst constant{};     // Constant
    UnaryOp unary{};           // Unary
    BinaryOp binary{};         // Binary
    FuncId func{};             // Call
    int lhs = -1;              // child indices into the postorder node list
    int rhs = -1;
    bool integer_exponent = false;  // Pow with a coordinate-free integral rhs
    long long exponent = 0;

    bool operator==(const AstNode&) const = default;
};

inline const char* func_name(FuncId f) {
    switch (f) {
        case FuncId::Sin: return "sin";
        case FuncId::Cos: return "cos";
        case FuncId::Exp: return "exp";
        case FuncId::Log: return "log";
        case FuncId::Sqrt: return "sqrt";
        case FuncId::Abs: return "abs";
    }
    return "?";
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Immutable arithmetic AST over named coordinates. Nodes are stored in
/// postorder (children before parents, root last), so evaluation is a
/// single forward pass over the node list. Evaluation is pure; the same
/// Expression may be evaluated concurrently from many threads.
class Expression {
public:
    Expression() = default;

    bool valid() const noexcept { return !nodes_.empty(); }
    int arity() const noexcept { return arity_; }
    const std::string& coord_prefix() const noexcept { return prefix_; }

    /// Number of coordinate-reference nodes in the AST.
    int coord_reference_count() const {
        int n = 0;
        for (const auto& node : nodes_)
            if (node.kind == NodeKind::Coord) ++n;
        return n;
    }

    bool uses_function(FuncId f) const {
        for (const auto& node : nodes_)
            if (node.kind == NodeKind::Call && node.func == f) return true;
        return false;
    }

    /// Canonical printed form; reparsing it yields an equal AST.
    std::string str() const {
        if (!valid()) return "";
        return print(static_cast<int>(nodes_.size()) - 1);
    }

    std::string print(int node) const;

    bool operator==(const Expression& o) const {
        return arity_ == o.arity_ && prefix_ == o.prefix_ && nodes_ == o.nodes_;
    }

    const std::vector<detail::AstNode>& nodes() const noexcept { return nodes_; }

private:
    friend class Parser;
    friend double eval(const Expression&, std::span<const double>);
    friend void eval_dual_into(const Expression&, std::span<const double>,
                               double&, double*);

    std::vector<detail::AstNode> nodes_;
    int arity_ = 0;
    std::string prefix_;
};

namespace detail {

struct Token {
    enum class Type : std::uint8_t {
        Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End
    };
    Type type{};
    double number = 0.0;
    std::string_view text;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Token::Type::End, 0.0, {}, start};
        const char c = src_[pos_];
        switch (c) {
            case '+': ++pos_; return {Token::Type::Plus, 0.0, src_.substr(start, 1), start};
            case '-': ++pos_; return {Token::Type::Minus, 0.0, src_.substr(start, 1), start};
            case '*': ++pos_; return {Token::Type::Star, 0.0, src_.substr(start, 1), start};
            case '/': ++pos_; return {Token::Type::Slash, 0.0, src_.substr(start, 1), start};
            case '^': ++pos_; return {Token::Type::Caret, 0.0, src_.substr(start, 1), start};
            case '(': ++pos_; return {Token::Type::LParen, 0.0, src_.substr(start, 1), start};
            case ')': ++pos_; return {Token::Type::RParen, 0.0, src_.substr(start, 1), start};
            case ',': ++pos_; return {Token::Type::Comma, 0.0, src_.substr(start, 1), start};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            return {Token::Type::Ident, 0.0, src_.substr(start, pos_ - start), start};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

private:
    Token lex_number(std::size_t start) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        // Exponent part only if it is unambiguously one; "2e" lexes as
        // the number 2 followed by the identifier e.
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{})
            throw ParseError("malformed number literal", start);
        return {Token::Type::Number, value, text, start};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace detail

class Parser {
public:
    Parser(std::string_view source, int arity, std::string_view coord_prefix)
        : lexer_(source), arity_(arity), prefix_(coord_prefix) {
        if (source.empty()) throw ParseError("empty expression", 0);
        if (arity < 1) throw InvariantError("expression arity must be >= 1");
        advance();
    }

    Expression run() {
        Expression e;
        e.arity_ = arity_;
        e.prefix_ = prefix_;
        nodes_ = &e.nodes_;
        parse_expr();
        expect_end();
        return e;
    }

private:
    using TT = detail::Token::Type;

    void advance() { tok_ = lexer_.next(); }

    void expect_end() {
        if (tok_.type != TT::End)
            throw ParseError("expected operator or end of input", tok_.offset);
    }

    int push(detail::AstNode n) {
        nodes_->push_back(n);
        return static_cast<int>(nodes_->size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        while (tok_.type == TT::Plus || tok_.type == TT::Minus) {
            const BinaryOp op = tok_.type == TT::Plus ? BinaryOp::Add : BinaryOp::Sub;
            advance();
            const int rhs = parse_term();
            detail::AstNode n;
            n.kind = NodeKind::Binary;
            n.binary = op;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = push(n);
        }
        return lhs;
    }

    int parse_term() {
        int lhs = parse_factor();
        while (tok_.type == TT::Star || tok_.type == TT::Slash) {
            const BinaryOp op = tok_.type == TT::Star ? BinaryOp::Mul : BinaryOp::Div;
            advance();
            const int rhs = parse_factor();
            detail::AstNode n;
            n.kind = NodeKind::Binary;
            n.binary = op;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = push(n);
        }
        return lhs;
    }

    int parse_factor() {
        if (tok_.type == TT::Minus) {
            advance();
            const int child = parse_power();
            detail::AstNode n;
            n.kind = NodeKind::Unary;
            n.unary = UnaryOp::Neg;
            n.lhs = child;
            return push(n);
        }
        return parse_power();
    }

    int parse_power() {
        const int base = parse_atom();
        if (tok_.type != TT::Caret) return base;
        advance();
        const int mark = static_cast<int>(nodes_->size());
        const int exp = parse_factor();
        detail::AstNode n;
        n.kind = NodeKind::Binary;
        n.binary = BinaryOp::Pow;
        n.lhs = base;
        n.rhs = exp;
        detect_integer_exponent(n, mark);
        return push(n);
    }

    // The exponent subtree occupies the contiguous postorder range
    // [mark, end). If it is coordinate-free, fold it; integral values of
    // small magnitude select the repeated-multiplication path.
    void detect_integer_exponent(detail::AstNode& pow_node, int mark) {
        const auto& nodes = *nodes_;
        for (int i = mark; i < static_cast<int>(nodes.size()); ++i)
            if (nodes[i].kind == NodeKind::Coord) return;
        double folded = 0.0;
        try {
            folded = fold_range(mark, static_cast<int>(nodes.size()));
        } catch (const Error&) {
            return;  // constant subtree that errors; leave it to runtime
        }
        if (std::isfinite(folded) && folded == std::floor(folded) &&
            std::fabs(folded) <= static_cast<double>(detail::kMaxRepeatedMultExponent)) {
            pow_node.integer_exponent = true;
            pow_node.exponent = static_cast<long long>(folded);
        }
    }

    double fold_range(int first, int last) const;

    int parse_atom() {
        switch (tok_.type) {
            case TT::Number: {
                detail::AstNode n;
                n.kind = NodeKind::Number;
                n.number = tok_.number;
                advance();
                return push(n);
            }
            case TT::Ident:
                return parse_ident();
            case TT::LParen: {
                advance();
                const int inner = parse_expr();
                if (tok_.type != TT::RParen)
                    throw ParseError("expected ')'", tok_.offset);
                advance();
                return inner;
            }
            default:
                throw ParseError("expected number, identifier, or '('", tok_.offset);
        }
    }

    int parse_ident() {
        const std::string_view name = tok_.text;
        const std::size_t offset = tok_.offset;
        advance();

        if (tok_.type != TT::LParen) {
            if (name == "pi" || name == "e") {
                detail::AstNode n;
                n.kind = NodeKind::Constant;
                n.constant = name == "pi" ? NamedConst::Pi : NamedConst::E;
                return push(n);
            }
            if (auto coord = match_coordinate(name)) {
                if (*coord < 1 || *coord > arity_)
                    throw ParseError("coordinate index out of range: '" + std::string(name) +
                                         "' with arity " + std::to_string(arity_),
                                     offset);
                detail::AstNode n;
                n.kind = NodeKind::Coord;
                n.coord = static_cast<int>(*coord) - 1;
                return push(n);
            }
            throw ParseError("unknown identifier '" + std::string(name) + "'", offset);
        }

        const FuncId func = lookup_function(name, offset);
        advance();  // consume '('
        const int arg = parse_expr();
        if (tok_.type == TT::Comma)
            throw ParseError(std::string(name) + " expects 1 argument", tok_.offset);
        if (tok_.type != TT::RParen)
            throw ParseError("expected ')'", tok_.offset);
        advance();
        detail::AstNode n;
        n.kind = NodeKind::Call;
        n.func = func;
        n.lhs = arg;
        return push(n);
    }

    std::optional<long long> match_coordinate(std::string_view name) const {
        if (name.size() <= prefix_.size() || name.substr(0, prefix_.size()) != prefix_)
            return std::nullopt;
        const std::string_view digits = name.substr(prefix_.size());
        long long index = 0;
        for (char c : digits) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            index = index * 10 + (c - '0');
            if (index > 1'000'000) return index;  // out of range either way
        }
        return index;
    }

    FuncId lookup_function(std::string_view name, std::size_t offset) const {
        if (name == "sin") return FuncId::Sin;
        if (name == "cos") return FuncId::Cos;
        if (name == "exp") return FuncId::Exp;
        if (name == "log") return FuncId::Log;
        if (name == "sqrt") return FuncId::Sqrt;
        if (name == "abs") return FuncId::Abs;
        throw ParseError("'" + std::string(name) + "' is not a function", offset);
    }

    detail::Lexer lexer_;
    detail::Token tok_;
    int arity_;
    std::string prefix_;
    std::vector<detail::AstNode>* nodes_ = nullptr;
};

/// Parse `source` into an Expression over coordinates
/// `coord_prefix`1 .. `coord_prefix`<arity>.
inline Expression parse(std::string_view source, int arity, std::string_view coord_prefix) {
    return Parser(source, arity, coord_prefix).run();
}

namespace detail {

inline double scalar_pow_int(double base, long long e, const Expression& expr, int node) {
    if (e == 0) return 1.0;
    const bool negative = e < 0;
    const long long k = negative ? -e : e;
    double r = base;
    for (long long i = 1; i < k; ++i) r = r * base;
    if (negative) {
        if (r == 0.0)
            throw EvalError("division by zero", expr.print(node));
        r = 1.0 / r;
    }
    return r;
}

} // namespace detail

/// Evaluate at a point (length must equal the arity). Deterministic and
/// side-effect free; domain violations raise EvalError naming the
/// offending subexpression.
inline double eval(const Expression& e, std::span<const double> point) {
    if (!e.valid()) throw InvariantError("eval of empty expression");
    if (static_cast<int>(point.size()) != e.arity())
        throw InvariantError("point length " + std::to_string(point.size()) +
                             " does not match expression arity " + std::to_string(e.arity()));
    thread_local std::vector<double> stack;
    stack.clear();
    const auto& nodes = e.nodes_;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        const auto& n = nodes[i];
        switch (n.kind) {
            case NodeKind::Number:
                stack.push_back(n.number);
                break;
            case NodeKind::Coord:
                stack.push_back(point[static_cast<std::size_t>(n.coord)]);
                break;
            case NodeKind::Constant:
                stack.push_back(n.constant == NamedConst::Pi ? M_PI : M_E);
                break;
            case NodeKind::Unary:
                stack.back() = -stack.back();
                break;
            case NodeKind::Binary: {
                const double b = stack.back();
                stack.pop_back();
                const double a = stack.back();
                double r = 0.0;
                switch (n.binary) {
                    case BinaryOp::Add: r = a + b; break;
                    case BinaryOp::Sub: r = a - b; break;
                    case BinaryOp::Mul: r = a * b; break;
                    case BinaryOp::Div:
                        if (b == 0.0) throw EvalError("division by zero", e.print(i));
                        r = a / b;
                        break;
                    case BinaryOp::Pow:
                        if (n.integer_exponent) {
                            r = detail::scalar_pow_int(a, n.exponent, e, i);
                        } else if (a > 0.0) {
                            r = std::pow(a, b);
                        } else if (a == 0.0) {
                            if (b < 0.0)
                                throw EvalError("zero base with negative exponent", e.print(i));
                            r = std::pow(a, b);
                        } else {
                            throw EvalError("negative base with non-integer exponent", e.print(i));
                        }
                        break;
                }
                stack.back() = r;
                break;
            }
            case NodeKind::Call: {
                const double a = stack.back();
                double r = 0.0;
                switch (n.func) {
                    case FuncId::Sin: r = std::sin(a); break;
                    case FuncId::Cos: r = std::cos(a); break;
                    case FuncId::Exp: r = std::exp(a); break;
                    case FuncId::Log:
                        if (a <= 0.0) throw EvalError("log of non-positive value", e.print(i));
                        r = std::log(a);
                        break;
                    case FuncId::Sqrt:
                        if (a < 0.0) throw EvalError("sqrt of negative value", e.print(i));
                        r = std::sqrt(a);
                        break;
                    case FuncId::Abs: r = std::fabs(a); break;
                }
                stack.back() = r;
                break;
            }
        }
    }
    return stack.back();
}

namespace detail {
inline void dual_pow_int(double* sa, long long e, int width,
                         const Expression& expr, int node);
} // namespace detail

/// Forward-mode evaluation writing value and `arity` partials into
/// caller storage. The value lane performs exactly the operations of
/// eval(), so values agree bit for bit.
inline void eval_dual_into(const Expression& e, std::span<const double> point,
                           double& out_value, double* out_partials) {
    if (!e.valid()) throw InvariantError("eval_dual of empty expression");
    const int arity = e.arity();
    if (static_cast<int>(point.size()) != arity)
        throw InvariantError("point length " + std::to_string(point.size()) +
                             " does not match expression arity " + std::to_string(arity));

    // Slots of width (1 + arity): value followed by partials.
    const int width = 1 + arity;
    thread_local std::vector<double> arena;
    arena.clear();
    int top = 0;  // slot count

    const auto slot = [&](int s) { return arena.data() + static_cast<std::size_t>(s) * width; };
    const auto push_slot = [&]() {
        arena.resize(static_cast<std::size_t>(top + 1) * width);
        return arena.data() + static_cast<std::size_t>(top++) * width;
    };
    const auto any_partial = [&](const double* s) {
        for (int k = 1; k < width; ++k)
            if (s[k] != 0.0) return true;
        return false;
    };

    const auto& nodes = e.nodes_;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        const auto& n = nodes[i];
        switch (n.kind) {
            case NodeKind::Number:
            case NodeKind::Constant: {
                double* s = push_slot();
                s[0] = n.kind == NodeKind::Number ? n.number
                                                  : (n.constant == NamedConst::Pi ? M_PI : M_E);
                for (int k = 1; k < width; ++k) s[k] = 0.0;
                break;
            }
            case NodeKind::Coord: {
                double* s = push_slot();
                s[0] = point[static_cast<std::size_t>(n.coord)];
                for (int k = 1; k < width; ++k) s[k] = 0.0;
                s[1 + n.coord] = 1.0;
                break;
            }
            case NodeKind::Unary: {
                double* s = slot(top - 1);
                for (int k = 0; k < width; ++k) s[k] = -s[k];
                break;
            }
            case NodeKind::Binary: {
                double* sb = slot(top - 1);
                double* sa = slot(top - 2);
                --top;
                const double a = sa[0];
                const double b = sb[0];
                switch (n.binary) {
                    case BinaryOp::Add:
                        for (int k = 0; k < width; ++k) sa[k] = sa[k] + sb[k];
                        break;
                    case BinaryOp::Sub:
                        for (int k = 0; k < width; ++k) sa[k] = sa[k] - sb[k];
                        break;
                    case BinaryOp::Mul:
                        for (int k = 1; k < width; ++k) sa[k] = sa[k] * b + a * sb[k];
                        sa[0] = a * b;
                        break;
                    case BinaryOp::Div:
                        if (b == 0.0) throw EvalError("division by zero", e.print(i));
                        for (int k = 1; k < width; ++k) sa[k] = (sa[k] * b - a * sb[k]) / (b * b);
                        sa[0] = a / b;
                        break;
                    case BinaryOp::Pow:
                        if (n.integer_exponent) {
                            detail::dual_pow_int(sa, n.exponent, width, e, i);
                        } else if (a > 0.0) {
                            const double v = std::pow(a, b);
                            const double log_a = std::log(a);
                            for (int k = 1; k < width; ++k)
                                sa[k] = v * (sb[k] * log_a + b * sa[k] / a);
                            sa[0] = v;
                        } else if (a == 0.0 && b >= 0.0 && !any_partial(sa) && !any_partial(sb)) {
                            sa[0] = std::pow(a, b);
                        } else if (a == 0.0 && b < 0.0) {
                            throw EvalError("zero base with negative exponent", e.print(i));
                        } else {
                            throw EvalError(a == 0.0
                                                ? "pow not differentiable at zero base"
                                                : "negative base with non-integer exponent",
                                            e.print(i));
                        }
                        break;
                }
                break;
            }
            case NodeKind::Call: {
                double* s = slot(top - 1);
                const double a = s[0];
                switch (n.func) {
                    case FuncId::Sin: {
                        const double c = std::cos(a);
                        for (int k = 1; k < width; ++k) s[k] = s[k] * c;
                        s[0] = std::sin(a);
                        break;
                    }
                    case FuncId::Cos: {
                        const double m = -std::sin(a);
                        for (int k = 1; k < width; ++k) s[k] = s[k] * m;
                        s[0] = std::cos(a);
                        break;
                    }
                    case FuncId::Exp: {
                        const double v = std::exp(a);
                        for (int k = 1; k < width; ++k) s[k] = s[k] * v;
                        s[0] = v;
                        break;
                    }
                    case FuncId::Log:
                        if (a <= 0.0) throw EvalError("log of non-positive value", e.print(i));
                        for (int k = 1; k < width; ++k) s[k] = s[k] / a;
                        s[0] = std::log(a);
                        break;
                    case FuncId::Sqrt: {
                        if (a < 0.0) throw EvalError("sqrt of negative value", e.print(i));
                        if (a == 0.0) {
                            if (any_partial(s))
                                throw EvalError("sqrt not differentiable at 0", e.print(i));
                            s[0] = 0.0;
                            break;
                        }
                        const double v = std::sqrt(a);
                        for (int k = 1; k < width; ++k) s[k] = s[k] / (2.0 * v);
                        s[0] = v;
                        break;
                    }
                    case FuncId::Abs:
                        if (a == 0.0 && any_partial(s))
                            throw EvalError("abs not differentiable at 0", e.print(i));
                        if (a < 0.0)
                            for (int k = 0; k < width; ++k) s[k] = -s[k];
                        else
                            s[0] = std::fabs(a);
                        break;
                }
                break;
            }
        }
    }
    const double* s = slot(0);
    out_value = s[0];
    for (int k = 0; k < arity; ++k) out_partials[k] = s[1 + k];
}

/// Value and exact first partials at a point.
inline DualValue eval_dual(const Expression& e, std::span<const double> point) {
    DualValue out;
    out.partials.resize(static_cast<std::size_t>(e.arity()));
    eval_dual_into(e, point, out.value, out.partials.data());
    return out;
}

namespace detail {

// Repeated multiplication with the same left-to-right product order as
// scalar_pow_int, so the dual value lane matches eval() bit for bit.
// sa holds the base on entry and the result on exit.
inline void dual_pow_int(double* sa, long long e, int width,
                         const Expression& expr, int node) {
    if (e == 0) {
        sa[0] = 1.0;
        for (int k = 1; k < width; ++k) sa[k] = 0.0;
        return;
    }
    thread_local std::vector<double> base;
    base.assign(sa, sa + width);
    thread_local std::vector<double> acc;
    acc.assign(base.begin(), base.end());
    const bool negative = e < 0;
    const long long count = negative ? -e : e;
    for (long long i = 1; i < count; ++i) {
        const double a = acc[0];
        for (int k = 1; k < width; ++k) acc[k] = acc[k] * base[0] + a * base[k];
        acc[0] = a * base[0];
    }
    if (negative) {
        if (acc[0] == 0.0) throw EvalError("division by zero", expr.print(node));
        sa[0] = 1.0 / acc[0];
        for (int k = 1; k < width; ++k) sa[k] = -acc[k] / (acc[0] * acc[0]);
        return;
    }
    for (int k = 0; k < width; ++k) sa[k] = acc[k];
}

} // namespace detail

inline std::string Expression::print(int node) const {
    using detail::AstNode;
    const AstNode& n = nodes_[static_cast<std::size_t>(node)];
    // Precedence levels: add 1, mul 2, neg 3, pow 4, atom 5.
    const auto prec = [this](int idx) {
        const AstNode& m = nodes_[static_cast<std::size_t>(idx)];
        switch (m.kind) {
            case NodeKind::Binary:
                switch (m.binary) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub: return 1;
                    case BinaryOp::Mul:
                    case BinaryOp::Div: return 2;
                    case BinaryOp::Pow: return 4;
                }
                return 1;
            case NodeKind::Unary: return 3;
            default: return 5;
        }
    };
    const auto wrap = [this](int idx, bool parens) {
        const std::string s = print(idx);
        return parens ? "(" + s + ")" : s;
    };
    switch (n.kind) {
        case NodeKind::Number:
            return detail::format_double(n.number);
        case NodeKind::Coord:
            return prefix_ + std::to_string(n.coord + 1);
        case NodeKind::Constant:
            return n.constant == NamedConst::Pi ? "pi" : "e";
        case NodeKind::Unary:
            // factor := '-' power; anything below pow precedence needs parens
            return "-" + wrap(n.lhs, prec(n.lhs) < 4);
        case NodeKind::Call:
            return std::string(detail::func_name(n.func)) + "(" + print(n.lhs) + ")";
        case NodeKind::Binary: {
            if (n.binary == BinaryOp::Pow) {
                // power := atom ('^' factor)?; base must print as an atom
                const bool lhs_parens = prec(n.lhs) != 5;
                const bool rhs_parens = prec(n.rhs) < 3;
                const std::string op = "^";
                return wrap(n.lhs, lhs_parens) + op + wrap(n.rhs, rhs_parens);
            }
            const int p = prec(node);
            const bool left_parens = prec(n.lhs) < p;
            // left-associative: an equal-precedence rhs must be parenthesized
            const bool right_parens = prec(n.rhs) <= p;
            const char* op = "";
            switch (n.binary) {
                case BinaryOp::Add: op = "+"; break;
                case BinaryOp::Sub: op = "-"; break;
                case BinaryOp::Mul: op = "*"; break;
                case BinaryOp::Div: op = "/"; break;
                case BinaryOp::Pow: break;
            }
            return wrap(n.lhs, left_parens) + op + wrap(n.rhs, right_parens);
        }
    }
    return "";
}

inline double Parser::fold_range(int first, int last) const {
    Expression sub;
    sub.arity_ = arity_;
    sub.prefix_ = prefix_;
    sub.nodes_.assign(nodes_->begin() + first, nodes_->begin() + last);
    for (auto& n : sub.nodes_) {
        if (n.lhs >= 0) n.lhs -= first;
        if (n.rhs >= 0) n.rhs -= first;
    }
    std::vector<double> dummy(static_cast<std::size_t>(arity_), 0.0);
    return eval(sub, dummy);
}

} // namespace gmt
