#include "kmu/expr.hpp"

#include <charconv>
#include <cmath>
#include <utility>
#include <vector>

namespace kmu {

struct Expr::Node {
    Kind kind = Kind::literal;
    double value = 0.0;
    int var = 0;
    BinaryOp op = BinaryOp::add;
    Func func = Func::sin;
    Expr a;
    Expr b;
    bool constant = true;
};

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 7> func_table = {{
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"tan", Func::tan},
    {"exp", Func::exp},
    {"log", Func::log},
    {"sqrt", Func::sqrt},
    {"abs", Func::abs},
}};

} // namespace

Expr::Expr() = default;
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::literal(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::literal;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(int index) {
    if (index < 0 || index > 2) throw std::out_of_range("variable index");
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->var = index;
    n->constant = false;
    return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::negate;
    n->constant = operand.is_constant();
    n->a = std::move(operand);
    return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::binary;
    n->op = op;
    n->constant = lhs.is_constant() && rhs.is_constant();
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return Expr(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::call;
    n->func = f;
    n->constant = arg.is_constant();
    n->a = std::move(arg);
    return Expr(std::move(n));
}

const Expr::Node& Expr::node() const {
    // a default-constructed Expr has no node and stands for the literal 0
    static const Node zero;
    return node_ ? *node_ : zero;
}

Expr::Kind Expr::kind() const { return node().kind; }
double Expr::literal_value() const { return node().value; }
int Expr::variable_index() const { return node().var; }
BinaryOp Expr::binary_op() const { return node().op; }
Func Expr::func() const { return node().func; }
const Expr& Expr::lhs() const { return node().a; }
const Expr& Expr::rhs() const { return node().b; }
bool Expr::is_constant() const { return node().constant; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ && a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Expr::Kind::literal: return a.literal_value() == b.literal_value();
    case Expr::Kind::variable: return a.variable_index() == b.variable_index();
    case Expr::Kind::negate: return a.lhs() == b.lhs();
    case Expr::Kind::binary: return a.binary_op() == b.binary_op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Expr::Kind::call: return a.func() == b.func() && a.lhs() == b.lhs();
    }
    return false;
}

std::string_view func_name(Func f) {
    for (const auto& [name, fn] : func_table)
        if (fn == f) return name;
    return "?";
}

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

DomainError::DomainError(const std::string& reason, std::string subexpression)
    : std::runtime_error(reason + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Type { number, ident, op, lparen, rparen, comma, end } type = Type::end;
    std::string_view text;
    double number = 0.0;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) return number(t);
        if (is_alpha(c)) {
            std::size_t end = pos_;
            while (end < src_.size() && (is_alpha(src_[end]) || is_digit(src_[end]))) ++end;
            t.type = Token::Type::ident;
            t.text = src_.substr(pos_, end - pos_);
            pos_ = end;
            return t;
        }
        t.text = src_.substr(pos_, 1);
        ++pos_;
        switch (c) {
        case '+': case '-': case '*': case '/': case '^': t.type = Token::Type::op; return t;
        case '(': t.type = Token::Type::lparen; return t;
        case ')': t.type = Token::Type::rparen; return t;
        case ',': t.type = Token::Type::comma; return t;
        default: throw ParseError(std::string("unexpected character '") + c + "'", t.offset);
        }
    }

private:
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

    Token number(Token t) {
        std::size_t end = pos_;
        while (end < src_.size() && is_digit(src_[end])) ++end;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            while (end < src_.size() && is_digit(src_[end])) ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && is_digit(src_[e])) {
                while (e < src_.size() && is_digit(src_[e])) ++e;
                end = e;
            }
        }
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + end;
        auto [ptr, ec] = std::from_chars(first, last, t.number);
        if (ec != std::errc() || ptr != last) throw ParseError("malformed number", pos_);
        t.type = Token::Type::number;
        t.text = src_.substr(pos_, end - pos_);
        pos_ = end;
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src), src_(src) { advance(); }

    Expr parse() {
        if (cur_.type == Token::Type::end) throw ParseError("empty expression", 0);
        Expr e = sum();
        if (cur_.type != Token::Type::end) throw ParseError("unexpected '" + std::string(cur_.text) + "'", cur_.offset);
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }
    bool at_op(char c) const { return cur_.type == Token::Type::op && cur_.text[0] == c; }

    Expr sum() {
        Expr lhs = product();
        while (at_op('+') || at_op('-')) {
            const BinaryOp op = at_op('+') ? BinaryOp::add : BinaryOp::sub;
            advance();
            lhs = Expr::binary(op, std::move(lhs), product());
        }
        return lhs;
    }

    Expr product() {
        Expr lhs = unary();
        while (at_op('*') || at_op('/')) {
            const BinaryOp op = at_op('*') ? BinaryOp::mul : BinaryOp::div;
            advance();
            lhs = Expr::binary(op, std::move(lhs), unary());
        }
        return lhs;
    }

    Expr unary() {
        if (at_op('-')) {
            advance();
            return Expr::negate(unary());
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (at_op('^')) {
            advance();
            return Expr::binary(BinaryOp::pow, std::move(base), unary());
        }
        return base;
    }

    Expr primary() {
        const Token t = cur_;
        switch (t.type) {
        case Token::Type::number:
            advance();
            return Expr::literal(t.number);
        case Token::Type::lparen: {
            advance();
            Expr inner = sum();
            expect_rparen(t.offset);
            return inner;
        }
        case Token::Type::ident: return identifier(t);
        case Token::Type::end: throw ParseError("unexpected end of expression", t.offset);
        default: throw ParseError("unexpected '" + std::string(t.text) + "'", t.offset);
        }
    }

    Expr identifier(const Token& t) {
        advance();
        if (t.text.size() == 1 && t.text[0] >= 'x' && t.text[0] <= 'z') {
            if (cur_.type == Token::Type::lparen) throw ParseError("'" + std::string(t.text) + "' is not a function", t.offset);
            return Expr::variable(t.text[0] - 'x');
        }
        for (const auto& [name, fn] : func_table) {
            if (name != t.text) continue;
            if (cur_.type != Token::Type::lparen)
                throw ParseError("function '" + std::string(name) + "' expects an argument list", cur_.offset);
            const std::size_t open = cur_.offset;
            advance();
            if (cur_.type == Token::Type::rparen)
                throw ParseError("arity mismatch: '" + std::string(name) + "' takes 1 argument, got 0", cur_.offset);
            Expr arg = sum();
            if (cur_.type == Token::Type::comma) {
                std::size_t count = 1;
                const std::size_t where = cur_.offset;
                while (cur_.type == Token::Type::comma) {
                    advance();
                    (void)sum();
                    ++count;
                }
                throw ParseError("arity mismatch: '" + std::string(name) + "' takes 1 argument, got " +
                                     std::to_string(count),
                                 where);
            }
            expect_rparen(open);
            return Expr::call(fn, std::move(arg));
        }
        throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.offset);
    }

    void expect_rparen(std::size_t open) {
        if (cur_.type != Token::Type::rparen) {
            if (cur_.type == Token::Type::end)
                throw ParseError("unbalanced '(' opened at offset " + std::to_string(open), cur_.offset);
            throw ParseError("expected ')' but found '" + std::string(cur_.text) + "'", cur_.offset);
        }
        advance();
    }

    Lexer lex_;
    std::string_view src_;
    Token cur_;
};

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

char op_char(BinaryOp op) {
    switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
    }
    return '?';
}

bool is_integer(double v) { return std::isfinite(v) && v == std::round(v) && std::abs(v) <= 64.0; }

Jet3 integer_power(Jet3 base, long n) {
    Jet3 result = Jet3::constant(1.0, base.order());
    while (n > 0) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n) base *= base;
    }
    return result;
}

Jet3 eval_rec(const Expr& e, const Point& p, int order) {
    switch (e.kind()) {
    case Expr::Kind::literal: return Jet3::constant(e.literal_value(), Jet3::max_order);
    case Expr::Kind::variable: {
        const int v = e.variable_index();
        return Jet3::variable(v, p[static_cast<std::size_t>(v)], order);
    }
    case Expr::Kind::negate: return -eval_rec(e.lhs(), p, order);
    case Expr::Kind::binary: {
        const Jet3 a = eval_rec(e.lhs(), p, order);
        switch (e.binary_op()) {
        case BinaryOp::add: return a + eval_rec(e.rhs(), p, order);
        case BinaryOp::sub: return a - eval_rec(e.rhs(), p, order);
        case BinaryOp::mul: return a * eval_rec(e.rhs(), p, order);
        case BinaryOp::div: {
            const Jet3 b = eval_rec(e.rhs(), p, order);
            if (b.value() == 0.0) throw DomainError("division by zero", unparse(e));
            return a * reciprocal(b);
        }
        case BinaryOp::pow: {
            if (e.rhs().is_constant()) {
                const double n = eval_rec(e.rhs(), p, 0).value();
                if (is_integer(n)) {
                    if (n >= 0) return integer_power(a, static_cast<long>(n));
                    if (a.value() == 0.0) throw DomainError("negative power of zero", unparse(e));
                    return reciprocal(integer_power(a, static_cast<long>(-n)));
                }
                const double u = a.value();
                if (!(u > 0.0)) throw DomainError("real power of a nonpositive base", unparse(e));
                return compose_univariate(a, {std::pow(u, n), n * std::pow(u, n - 1), n * (n - 1) * std::pow(u, n - 2),
                                              n * (n - 1) * (n - 2) * std::pow(u, n - 3)});
            }
            if (!(a.value() > 0.0)) throw DomainError("variable power of a nonpositive base", unparse(e));
            const Jet3 b = eval_rec(e.rhs(), p, order);
            const double u = a.value();
            const double r = 1.0 / u;
            const Jet3 log_a = compose_univariate(a, {std::log(u), r, -r * r, 2.0 * r * r * r});
            const Jet3 t = b * log_a;
            const double et = std::exp(t.value());
            return compose_univariate(t, {et, et, et, et});
        }
        }
        break;
    }
    case Expr::Kind::call: {
        const Jet3 a = eval_rec(e.lhs(), p, order);
        const double u = a.value();
        const bool differentiated = a.order() > 0;
        switch (e.func()) {
        case Func::sin: {
            const double s = std::sin(u), c = std::cos(u);
            return compose_univariate(a, {s, c, -s, -c});
        }
        case Func::cos: {
            const double s = std::sin(u), c = std::cos(u);
            return compose_univariate(a, {c, -s, -c, s});
        }
        case Func::tan: {
            if (std::cos(u) == 0.0) throw DomainError("tan at a pole", unparse(e));
            const double t = std::tan(u), s2 = 1.0 + t * t;
            return compose_univariate(a, {t, s2, 2.0 * t * s2, 2.0 * s2 * (1.0 + 3.0 * t * t)});
        }
        case Func::exp: {
            const double v = std::exp(u);
            return compose_univariate(a, {v, v, v, v});
        }
        case Func::log: {
            if (!(u > 0.0)) throw DomainError("log of a nonpositive value", unparse(e));
            const double r = 1.0 / u;
            return compose_univariate(a, {std::log(u), r, -r * r, 2.0 * r * r * r});
        }
        case Func::sqrt: {
            if (u < 0.0) throw DomainError("sqrt of a negative value", unparse(e));
            if (u == 0.0 && differentiated) throw DomainError("sqrt is not differentiable at 0", unparse(e));
            const double s = std::sqrt(u);
            if (!differentiated) return Jet3::constant(s, 0);
            return compose_univariate(a, {s, 0.5 / s, -0.25 / (s * u), 0.375 / (s * u * u)});
        }
        case Func::abs: {
            if (u == 0.0 && differentiated) throw DomainError("abs is not differentiable at 0", unparse(e));
            return u < 0.0 ? -a : a;
        }
        }
        break;
    }
    }
    throw std::logic_error("corrupt expression node");
}

} // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string unparse(const Expr& e) {
    switch (e.kind()) {
    case Expr::Kind::literal: return format_double(e.literal_value());
    case Expr::Kind::variable: return std::string(1, static_cast<char>('x' + e.variable_index()));
    case Expr::Kind::negate: return "(-" + unparse(e.lhs()) + ")";
    case Expr::Kind::binary:
        return "(" + unparse(e.lhs()) + " " + op_char(e.binary_op()) + " " + unparse(e.rhs()) + ")";
    case Expr::Kind::call: return std::string(func_name(e.func())) + "(" + unparse(e.lhs()) + ")";
    }
    return {};
}

Jet3 eval_jet(const Expr& e, const Point& p, int order) {
    if (order < 0 || order > Jet3::max_order) throw std::invalid_argument("jet order must be in 0..3");
    return eval_rec(e, p, order).truncated(order);
}

double eval(const Expr& e, const Point& p) { return eval_rec(e, p, 0).value(); }

Expr substitute(const Expr& e, int var, const Expr& replacement) {
    switch (e.kind()) {
    case Expr::Kind::literal: return e;
    case Expr::Kind::variable: return e.variable_index() == var ? replacement : e;
    case Expr::Kind::negate: return Expr::negate(substitute(e.lhs(), var, replacement));
    case Expr::Kind::binary:
        return Expr::binary(e.binary_op(), substitute(e.lhs(), var, replacement), substitute(e.rhs(), var, replacement));
    case Expr::Kind::call: return Expr::call(e.func(), substitute(e.lhs(), var, replacement));
    }
    return e;
}

} // namespace kmu
