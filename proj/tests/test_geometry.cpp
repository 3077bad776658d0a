#include "kmu/curvzoo.hpp"
#include "kmu/geometry.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace kmu;
using kmu::testing::Rng;

namespace {

MetricField metric(const std::array<const char*, 6>& upper) {
    std::array<Expr, 6> e;
    for (std::size_t i = 0; i < 6; ++i) e[i] = parse_expr(upper[i]);
    return MetricField::from_upper(e);
}

const std::array<Interval, 3> unit_box{Interval{-1, 1}, Interval{-1, 1}, Interval{-1, 1}};

} // namespace

TEST_CASE("chart validation and excluded loci") {
    CHECK_THROWS_AS(Chart("c", {Interval{0, 0}, Interval{-1, 1}, Interval{-1, 1}}), DomainValidationError);
    CHECK_THROWS_AS(Chart("c", {Interval{1, -1}, Interval{-1, 1}, Interval{-1, 1}}), DomainValidationError);
    const Chart c("c", unit_box, {parse_expr("z")});
    CHECK(c.in_box({0.5, 0.5, 0.0}));
    CHECK_FALSE(c.admits({0.5, 0.5, 0.0}));
    CHECK_FALSE(c.admits({0.5, 0.5, 5e-4}));
    CHECK(c.admits({0.5, 0.5, 2e-3}));
    CHECK_FALSE(c.admits({1.5, 0.0, 0.5}));
    const Chart log_chart("l", unit_box, {parse_expr("log(x)")});
    CHECK_FALSE(log_chart.admits({-0.5, 0.0, 0.0}));
}

TEST_CASE("Christoffel symbols of simple metrics") {
    const MetricField id = metric({"1", "0", "0", "1", "0", "1"});
    CHECK(christoffel(id, {0.3, -0.2, 0.7}).max_abs() == 0.0);

    const MetricField scaled = metric({"2.5", "0", "0", "2.5", "0", "2.5"});
    CHECK(christoffel(scaled, {0.3, -0.2, 0.7}).max_abs() == 0.0);

    // g = diag(1, 1, z^2): only Γ^z_zz = 1/z
    const MetricField cone = metric({"1", "0", "0", "1", "0", "z^2"});
    const TensorValue gamma = christoffel(cone, {0, 0, 2});
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double expected = (k == 2 && i == 2 && j == 2) ? 0.5 : 0.0;
                CHECK(gamma(k, i, j) == doctest::Approx(expected).epsilon(1e-14));
            }
}

TEST_CASE("flat metrics have zero curvature") {
    for (const auto* zz : {"1", "z^2"}) {
        const MetricField m = metric({"1", "0", "0", "1", "0", zz});
        const Point p{0.1, 0.2, 1.3};
        const auto forms = riemann(m, p);
        CHECK(forms.mixed.max_abs() < 1e-14);
        CHECK(forms.lowered.max_abs() < 1e-14);
        const auto rs = ricci_scalar(m, p);
        CHECK(rs.ricci.max_abs() < 1e-14);
        CHECK(std::abs(rs.scalar) < 1e-14);
    }
}

TEST_CASE("hyperbolic half-space has constant sectional curvature -1") {
    // g = I / z^2: R_ijkl = K (g_jk g_il − g_ik g_jl), S = 2K g, r = 6K with K = −1
    const MetricField m = metric({"1/z^2", "0", "0", "1/z^2", "0", "1/z^2"});
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Point p{rng.uniform(), rng.uniform(), rng.uniform(1.0, 2.0)};
        const CurvatureData c = curvature(m, p);
        const Mat3& g = c.g;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const double expected = -(g(j, k) * g(i, l) - g(i, k) * g(j, l));
                        CHECK(c.riemann_lowered(i, j, k, l) == doctest::Approx(expected).epsilon(1e-10).scale(1));
                    }
        CHECK(max_abs_diff(c.ricci, TensorValue::from_matrix(p, {Slot::down, Slot::down}, -2.0 * g)) < 1e-10);
        CHECK(c.scalar == doctest::Approx(-6.0).epsilon(1e-10));
    }
}

TEST_CASE("singular and indefinite metrics are rejected") {
    const MetricField singular = metric({"1", "0", "0", "1", "0", "z"});
    CHECK_THROWS_AS(christoffel(singular, {0.1, 0.1, 0.0}), MetricError);
    CHECK_THROWS_AS(singular.validate_at({0.1, 0.1, -0.5}), MetricError);
    CHECK_THROWS_AS(inverse3(Mat3::Zero()), SingularMetricError);
    const MetricField ok = metric({"2", "1", "0", "2", "0", "1"});
    CHECK_NOTHROW(ok.validate_at({0, 0, 0}));
}

TEST_CASE("numerically checked symmetry of a full metric") {
    std::array<Expr, 9> full;
    const std::array<const char*, 9> text{"1", "x", "0", "x", "2", "0", "0", "0", "1"};
    for (std::size_t i = 0; i < 9; ++i) full[i] = parse_expr(text[i]);
    CHECK_NOTHROW(MetricField::from_full(full).validate_at({0.2, 0, 0}));
    full[3] = parse_expr("x + 1e-9");
    CHECK_THROWS_AS(MetricField::from_full(full).validate_at({0.2, 0, 0}), MetricError);
}

TEST_CASE("curvature symmetries, Bianchi and skew-adjointness on the gallery") {
    Rng rng(22);
    for (const auto& name : testing::gallery_names()) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        for (const auto& p : testing::points_of(m, 20)) {
            const CurvatureData c = curvature(m.metric, p);
            const TensorValue& r = c.riemann_lowered;
            double sym = 0.0, bianchi = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l) {
                            const double v = r(i, j, k, l);
                            sym = std::max({sym, std::abs(v + r(j, i, k, l)), std::abs(v + r(i, j, l, k)),
                                            std::abs(v - r(k, l, i, j))});
                            bianchi = std::max(bianchi, std::abs(c.riemann(l, i, j, k) + c.riemann(l, j, k, i) +
                                                                 c.riemann(l, k, i, j)));
                        }
            CHECK(sym < 1e-9);
            CHECK(bianchi < 1e-9);

            const Mat3 s = c.ricci.to_matrix();
            CHECK(testing::max_abs(Mat3(s - s.transpose())) < 1e-9);
            CHECK(c.scalar == doctest::Approx((c.g_inv * s).trace()).epsilon(1e-9));

            for (int trial = 0; trial < 5; ++trial) {
                const Vec3 x = rng.vec(), y = rng.vec(), u = rng.vec(), v = rng.vec();
                const double skew = apply(c.riemann, x, y, u).dot(c.g * v) + u.dot(c.g * apply(c.riemann, x, y, v));
                CHECK(std::abs(skew) < 1e-9);
            }
        }
    }
}

TEST_CASE("the metric is parallel on every gallery entry") {
    for (const auto& name : testing::gallery_names()) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        const TensorField g = [&](const Point& q) {
            return TensorValue::from_matrix(q, {Slot::down, Slot::down}, m.metric.at(q));
        };
        for (const auto& p : testing::points_of(m, 20)) {
            const TensorValue dg = covariant_derivative(g, {Slot::down, Slot::down}, p, m.metric);
            CHECK(dg.rank() == 3);
            CHECK(dg.max_abs() < 1e-5);
        }
    }
}

TEST_CASE("covariant derivative of fields on the flat metric") {
    const MetricField flat = metric({"1", "0", "0", "1", "0", "1"});
    const TensorField constant = [](const Point& q) {
        return TensorValue::from_vector(q, Slot::up, Vec3(1.0, -2.0, 0.5));
    };
    CHECK(covariant_derivative(constant, {Slot::up}, {0.1, 0.2, 0.3}, flat).max_abs() == 0.0);

    // ∇ of the vector field (x y, z, 0) is its Jacobian with the derivative slot first
    const TensorField linear = [](const Point& q) {
        return TensorValue::from_vector(q, Slot::up, Vec3(q[0] * q[1], q[2], 0.0));
    };
    const TensorValue d = covariant_derivative(linear, {Slot::up}, {0.3, 0.7, -0.2}, flat);
    CHECK(d.signature() == Signature{Slot::down, Slot::up});
    CHECK(d(0, 0) == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(d(1, 0) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(d(2, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(d(2, 0)) < 1e-8);

    const TensorField broken = [](const Point& q) -> TensorValue {
        if (q[0] > 0.5) throw std::runtime_error("out of reach");
        return TensorValue::from_vector(q, Slot::up, Vec3::Zero());
    };
    CHECK_THROWS_AS(covariant_derivative(broken, {Slot::up}, {0.5, 0, 0}, flat), FieldEvaluationError);
}

TEST_CASE("conformal tensor vanishes on every gallery entry") {
    for (const auto& name : testing::gallery_names()) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        for (const auto& p : testing::points_of(m, 20)) {
            const CurvatureContext ctx = make_context(curvature(m.metric, p));
            const TensorValue c = w_tilde(ctx, preset_coefficients(PresetName::conformal, 1, ctx.scalar));
            CHECK(c.max_abs() < 1e-6);
        }
    }
}
