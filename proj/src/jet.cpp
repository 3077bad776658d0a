#include "kmu/jet.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kmu {

namespace {

constexpr std::array<int, 4> degree_offset = {0, 1, 4, 10};

struct Tables {
    std::array<MultiIndex, Jet3::size> monomials{};
    std::array<int, Jet3::size> degree{};
    // (a, b, slot of a*b) for every pair with deg(a) + deg(b) <= 3
    struct Term {
        std::uint8_t a, b, c, deg;
    };
    std::vector<Term> products;

    Tables() {
        std::size_t s = 0;
        for (int d = 0; d <= Jet3::max_order; ++d)
            for (int i = d; i >= 0; --i)
                for (int j = d - i; j >= 0; --j) {
                    monomials[s] = {i, j, d - i - j};
                    degree[s] = d;
                    ++s;
                }
        for (std::size_t a = 0; a < Jet3::size; ++a)
            for (std::size_t b = 0; b < Jet3::size; ++b) {
                const auto& ma = monomials[a];
                const auto& mb = monomials[b];
                MultiIndex m{ma.i + mb.i, ma.j + mb.j, ma.k + mb.k};
                if (m.degree() > Jet3::max_order) continue;
                products.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                    static_cast<std::uint8_t>(jet_slot(m)),
                                    static_cast<std::uint8_t>(m.degree())});
            }
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

int factorial(int n) {
    int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

std::size_t jet_slot(MultiIndex m) {
    const int d = m.degree();
    if (m.i < 0 || m.j < 0 || m.k < 0 || d > Jet3::max_order)
        throw std::out_of_range("jet monomial out of range");
    // position inside the degree block, graded lexicographic
    std::size_t pos = 0;
    for (int i = d; i > m.i; --i) pos += static_cast<std::size_t>(d - i + 1);
    pos += static_cast<std::size_t>(d - m.i - m.j);
    return static_cast<std::size_t>(degree_offset[static_cast<std::size_t>(d)]) + pos;
}

MultiIndex jet_monomial(std::size_t slot) { return tables().monomials.at(slot); }

Jet3 Jet3::variable(int var, double value, int order) {
    if (var < 0 || var > 2) throw std::out_of_range("jet variable index");
    Jet3 j = constant(value, order);
    if (order >= 1) j.c_[1 + static_cast<std::size_t>(var)] = 1.0;
    return j;
}

Jet3 Jet3::constant(double value, int order) {
    Jet3 j(value);
    j.order_ = std::clamp(order, 0, max_order);
    return j;
}

Jet3 Jet3::truncated(int order) const {
    Jet3 out = *this;
    out.order_ = std::clamp(std::min(order, order_), 0, max_order);
    const auto& t = tables();
    for (std::size_t s = 0; s < size; ++s)
        if (t.degree[s] > out.order_) out.c_[s] = 0.0;
    return out;
}

Jet3& Jet3::operator+=(const Jet3& o) {
    for (std::size_t s = 0; s < size; ++s) c_[s] += o.c_[s];
    if (o.order_ < order_) *this = truncated(o.order_);
    return *this;
}

Jet3& Jet3::operator-=(const Jet3& o) {
    for (std::size_t s = 0; s < size; ++s) c_[s] -= o.c_[s];
    if (o.order_ < order_) *this = truncated(o.order_);
    return *this;
}

Jet3& Jet3::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Jet3& Jet3::operator*=(const Jet3& o) {
    const int order = std::min(order_, o.order_);
    std::array<double, size> out{};
    for (const auto& t : tables().products) {
        if (t.deg > order) continue;
        out[t.c] += c_[t.a] * o.c_[t.b];
    }
    c_ = out;
    order_ = order;
    return *this;
}

Jet3& Jet3::operator/=(const Jet3& o) { return *this *= reciprocal(o); }

Jet3 operator-(Jet3 a) {
    for (auto& v : a.c_) v = -v;
    return a;
}

double partial(const Jet3& jet, MultiIndex m) {
    if (m.degree() > jet.order())
        throw OrderError("jet of order " + std::to_string(jet.order()) + " cannot supply a derivative of order " +
                         std::to_string(m.degree()));
    return jet.coeff(jet_slot(m)) * factorial(m.i) * factorial(m.j) * factorial(m.k);
}

Jet3 differentiate(const Jet3& jet, int var) {
    if (jet.order() == 0) throw OrderError("cannot differentiate a jet of order 0");
    Jet3 out = Jet3::constant(0.0, jet.order() - 1);
    const auto& t = tables();
    for (std::size_t s = 0; s < Jet3::size; ++s) {
        if (t.degree[s] > out.order()) continue;
        MultiIndex m = t.monomials[s];
        int* e = var == 0 ? &m.i : var == 1 ? &m.j : &m.k;
        ++*e;
        out.coeff(s) = *e * jet.coeff(jet_slot(m));
    }
    return out;
}

Jet3 compose_univariate(const Jet3& u, const std::array<double, 4>& derivs) {
    Jet3 d = u;
    d.coeff(0) = 0.0;
    Jet3 out = Jet3::constant(derivs[0], u.order());
    Jet3 power = d;
    double inv_fact = 1.0;
    for (int k = 1; k <= u.order(); ++k) {
        inv_fact /= k;
        out += power * (derivs[static_cast<std::size_t>(k)] * inv_fact);
        if (k < u.order()) power *= d;
    }
    return out;
}

Jet3 reciprocal(const Jet3& u) {
    const double v = u.value();
    if (v == 0.0) throw std::domain_error("reciprocal of a jet with zero value");
    const double r = 1.0 / v;
    return compose_univariate(u, {r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r});
}

Jet3 compose(const Jet3& outer, const std::array<Jet3, 3>& inner) {
    int order = outer.order();
    for (const auto& j : inner) order = std::min(order, j.order());

    // powers[v][e] = (u_v - u_v(p0))^e
    std::array<std::array<Jet3, 4>, 3> powers;
    for (std::size_t v = 0; v < 3; ++v) {
        Jet3 d = inner[v].truncated(order);
        d.coeff(0) = 0.0;
        powers[v][0] = Jet3::constant(1.0, order);
        for (std::size_t e = 1; e <= 3; ++e) powers[v][e] = powers[v][e - 1] * d;
    }

    Jet3 out = Jet3::constant(0.0, order);
    const auto& t = tables();
    for (std::size_t s = 0; s < Jet3::size; ++s) {
        const double c = outer.coeff(s);
        if (c == 0.0 || t.degree[s] > order) continue;
        const MultiIndex m = t.monomials[s];
        Jet3 term = powers[0][static_cast<std::size_t>(m.i)] * powers[1][static_cast<std::size_t>(m.j)] *
                    powers[2][static_cast<std::size_t>(m.k)];
        out += term * c;
    }
    return out;
}

} // namespace kmu
