#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmu {

/// Truncated Taylor polynomial of total degree <= 3 in the three chart
/// coordinates, centred at the evaluation point.
///
/// Coefficients are stored in graded lexicographic order:
///   1 | x y z | xx xy xz yy yz zz | xxx xxy xxz xyy xyz xzz yyy yyz yzz zzz
/// `order` records the degree up to which the coefficients are valid; every
/// coefficient above it is zero.
class Jet3 {
public:
    static constexpr int max_order = 3;
    static constexpr std::size_t size = 20;

    constexpr Jet3() = default;
    constexpr Jet3(double value) { c_[0] = value; }

    /// The independent variable `var` (0, 1, 2) taking `value` at the centre.
    static Jet3 variable(int var, double value, int order = max_order);
    static Jet3 constant(double value, int order = max_order);

    double value() const { return c_[0]; }
    int order() const { return order_; }
    double coeff(std::size_t i) const { return c_[i]; }
    double& coeff(std::size_t i) { return c_[i]; }
    const std::array<double, size>& coeffs() const { return c_; }

    /// Drops every coefficient of degree greater than `order`.
    Jet3 truncated(int order) const;

    Jet3& operator+=(const Jet3& o);
    Jet3& operator-=(const Jet3& o);
    Jet3& operator*=(const Jet3& o);
    Jet3& operator/=(const Jet3& o);
    Jet3& operator*=(double s);

    friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
    friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
    friend Jet3 operator*(Jet3 a, const Jet3& b) { return a *= b; }
    friend Jet3 operator/(Jet3 a, const Jet3& b) { return a /= b; }
    friend Jet3 operator*(Jet3 a, double s) { return a *= s; }
    friend Jet3 operator*(double s, Jet3 a) { return a *= s; }
    friend Jet3 operator-(Jet3 a);

private:
    std::array<double, size> c_{};
    int order_ = max_order;
};

/// Multi-index (i, j, k) of a monomial x^i y^j z^k.
struct MultiIndex {
    int i = 0;
    int j = 0;
    int k = 0;
    constexpr int degree() const { return i + j + k; }
    friend constexpr bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Storage slot of a monomial; requires degree <= 3.
std::size_t jet_slot(MultiIndex m);
MultiIndex jet_monomial(std::size_t slot);

class OrderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mixed partial derivative d^{i+j+k} / dx^i dy^j dz^k at the centre.
/// Throws OrderError when the jet was truncated below i+j+k.
double partial(const Jet3& jet, MultiIndex m);

/// d/d(var) of the jet; the result is valid to one degree less.
Jet3 differentiate(const Jet3& jet, int var);

/// f(u) for a scalar function given by its value and first three derivatives
/// at u.value(). This is the single composition rule behind every elementary
/// function on jets.
Jet3 compose_univariate(const Jet3& u, const std::array<double, 4>& derivs);

/// Substitutes jets for the three variables of `outer`: the result is the jet
/// of p -> F(u(p)) where `outer` is the jet of F centred at u(p0).
Jet3 compose(const Jet3& outer, const std::array<Jet3, 3>& inner);

Jet3 reciprocal(const Jet3& u);

} // namespace kmu
