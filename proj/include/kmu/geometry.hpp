#pragma once

#include "kmu/expr.hpp"
#include "kmu/jet.hpp"
#include "kmu/tensor.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmu {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

class DomainValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Coordinate box with optional excluded loci {f = 0}.
class Chart {
public:
    Chart() = default;
    Chart(std::string name, std::array<Interval, 3> box, std::vector<Expr> excluded = {});

    const std::string& name() const { return name_; }
    const std::array<Interval, 3>& box() const { return box_; }
    const std::vector<Expr>& excluded() const { return excluded_; }

    bool in_box(const Point& p) const;
    /// In the box and at least `margin` away (in |f|) from every excluded locus.
    bool admits(const Point& p, double margin = 1e-3) const;

private:
    std::string name_;
    std::array<Interval, 3> box_{};
    std::vector<Expr> excluded_;
};

class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMetricError : public MetricError {
public:
    using MetricError::MetricError;
};

/// Row-major 3x3 matrix of jets.
using JetMatrix = std::array<Jet3, 9>;

/// Inverse of a 3x3 matrix by the adjugate formula.
Mat3 inverse3(const Mat3& m);
JetMatrix inverse3(const JetMatrix& m);

/// g_ij as expressions in the chart coordinates.
class MetricField {
public:
    MetricField() = default;
    /// Upper triangle in the order xx, xy, xz, yy, yz, zz.
    static MetricField from_upper(const std::array<Expr, 6>& upper);
    /// Full matrix; off-diagonal pairs are checked numerically wherever the metric is evaluated.
    static MetricField from_full(const std::array<Expr, 9>& full);

    const Expr& entry(int i, int j) const { return g_[static_cast<std::size_t>(3 * i + j)]; }

    JetMatrix jets(const Point& p, int order) const;
    Mat3 at(const Point& p) const;

    /// Throws MetricError unless g is symmetric within 1e-12 and all leading
    /// principal minors are positive at p.
    void validate_at(const Point& p) const;

private:
    std::array<Expr, 9> g_{};
    bool structurally_symmetric_ = true;
};

/// Everything the curvature pipeline produces at one point.
struct CurvatureData {
    Point point{};
    Mat3 g;
    Mat3 g_inv;
    TensorValue christoffel;      // Γ^k_ij, signature ^__
    TensorValue riemann;          // R^l_ijk with R(e_i,e_j)e_k = R^l_ijk e_l, signature ^___
    TensorValue riemann_lowered;  // R_ijkl = g(R(e_i,e_j)e_k, e_l)
    TensorValue ricci;            // S_jk = R^i_ijk
    double scalar = 0.0;          // r = g^jk S_jk
};

CurvatureData curvature(const MetricField& m, const Point& p);

/// T(X,Y)Z for a (1,3) tensor with T(e_i,e_j)e_k = T^l_ijk e_l.
Vec3 apply(const TensorValue& t, const Vec3& x, const Vec3& y, const Vec3& z);

/// Ricci operator Q with S(U,V) = g(QU,V).
Mat3 ricci_operator(const CurvatureData& c);

TensorValue christoffel(const MetricField& m, const Point& p);

struct RiemannForms {
    TensorValue mixed;    // (1,3)
    TensorValue lowered;  // (0,4)
};
RiemannForms riemann(const MetricField& m, const Point& p);

struct RicciScalar {
    TensorValue ricci;
    double scalar = 0.0;
};
RicciScalar ricci_scalar(const MetricField& m, const Point& p);

using TensorField = std::function<TensorValue(const Point&)>;

class FieldEvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// ∇T at p, with the derivative slot placed first (down). Partial derivatives
/// of the field come from central differences, so `field` may be any pipeline.
TensorValue covariant_derivative(const TensorField& field, const Signature& sig, const Point& p, const MetricField& m,
                                 double step = 1e-4);

/// Same, with the connection supplied directly.
TensorValue covariant_derivative(const TensorField& field, const Signature& sig, const Point& p,
                                 const TensorValue& christoffel, double step = 1e-4);

} // namespace kmu
