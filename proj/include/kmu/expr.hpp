#pragma once

#include "kmu/jet.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kmu {

using Point = std::array<double, 3>;

enum class Func { sin, cos, tan, exp, log, sqrt, abs };
enum class BinaryOp { add, sub, mul, div, pow };

/// Immutable expression tree over the chart coordinates x, y, z.
///
/// Nodes are shared, so copying an Expr is cheap and sub-trees may be reused
/// by several parents.
class Expr {
public:
    enum class Kind { literal, variable, negate, binary, call };

    Expr();  // the literal 0

    static Expr literal(double value);
    static Expr variable(int index);
    static Expr negate(Expr operand);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    static Expr call(Func f, Expr arg);

    Kind kind() const;
    double literal_value() const;
    int variable_index() const;
    BinaryOp binary_op() const;
    Func func() const;
    const Expr& lhs() const;  // binary lhs, or the operand of negate/call
    const Expr& rhs() const;

    bool is_constant() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    const Node& node() const;
    std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Raised by eval_jet when the point leaves the domain of a subexpression.
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& reason, std::string subexpression);
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

/// Standard precedence: ^ binds tighter than unary minus, which binds tighter
/// than * and /, then + and -. Binary operators associate left except ^.
Expr parse_expr(std::string_view text);

/// Canonical text form; parse_expr(unparse(e)) == e.
std::string unparse(const Expr& e);

/// Truncated Taylor expansion of `e` at `p` up to `order` (0..3).
Jet3 eval_jet(const Expr& e, const Point& p, int order);

/// Plain evaluation at a point (order-0 jet).
double eval(const Expr& e, const Point& p);

/// Replaces every occurrence of variable `var` by `replacement`.
Expr substitute(const Expr& e, int var, const Expr& replacement);

std::string_view func_name(Func f);

} // namespace kmu
