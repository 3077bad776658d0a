#pragma once

#include "kmu/expr.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmu {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

enum class Slot : char { up, down };
using Signature = std::vector<Slot>;

std::string signature_string(const Signature& sig);

class VarianceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Components of a tensor at one point in the coordinate basis, 3^rank reals.
/// The first slot varies slowest.
class TensorValue {
public:
    TensorValue() = default;
    TensorValue(const Point& p, Signature sig);
    TensorValue(const Point& p, Signature sig, std::vector<double> comps);

    static TensorValue from_matrix(const Point& p, Signature sig, const Mat3& m);
    static TensorValue from_vector(const Point& p, Slot slot, const Vec3& v);

    const Point& point() const { return point_; }
    const Signature& signature() const { return sig_; }
    std::size_t rank() const { return sig_.size(); }
    std::size_t size() const { return c_.size(); }

    const std::vector<double>& comps() const { return c_; }
    std::vector<double>& comps() { return c_; }
    double operator[](std::size_t flat) const { return c_[flat]; }
    double& operator[](std::size_t flat) { return c_[flat]; }

    template <class... I>
    double operator()(I... idx) const {
        return c_[flat_index({static_cast<std::size_t>(idx)...})];
    }
    template <class... I>
    double& operator()(I... idx) {
        return c_[flat_index({static_cast<std::size_t>(idx)...})];
    }

    std::size_t flat_index(std::initializer_list<std::size_t> idx) const;
    std::size_t stride(std::size_t slot) const;

    Mat3 to_matrix() const;
    Vec3 to_vector() const;
    double max_abs() const;

    TensorValue& operator+=(const TensorValue& o);
    TensorValue& operator-=(const TensorValue& o);
    TensorValue& operator*=(double s);
    friend TensorValue operator+(TensorValue a, const TensorValue& b) { return a += b; }
    friend TensorValue operator-(TensorValue a, const TensorValue& b) { return a -= b; }
    friend TensorValue operator*(TensorValue a, double s) { return a *= s; }
    friend TensorValue operator*(double s, TensorValue a) { return a *= s; }

private:
    void require_same_shape(const TensorValue& o) const;

    Point point_{};
    Signature sig_;
    std::vector<double> c_;
};

/// Contracts an up slot against a down slot; the two slots are removed.
TensorValue contract(const TensorValue& t, std::size_t slot_a, std::size_t slot_b);

/// Raises a down slot with g^{-1}.
TensorValue raise(const TensorValue& t, std::size_t slot, const Mat3& g_inv);

/// Lowers an up slot with g.
TensorValue lower(const TensorValue& t, std::size_t slot, const Mat3& g);

double max_abs_diff(const TensorValue& a, const TensorValue& b);

} // namespace kmu
