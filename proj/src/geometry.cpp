#include "kmu/geometry.hpp"

#include <cmath>

namespace kmu {

namespace {

constexpr double singular_det = 1e-12;

std::size_t slot_of(int i, int j) { return static_cast<std::size_t>(3 * i + j); }

kmu::MultiIndex unit(int i) { return {i == 0, i == 1, i == 2}; }

} // namespace

Chart::Chart(std::string name, std::array<Interval, 3> box, std::vector<Expr> excluded)
    : name_(std::move(name)), box_(box), excluded_(std::move(excluded)) {
    for (std::size_t i = 0; i < 3; ++i)
        if (!(box_[i].hi > box_[i].lo) || !std::isfinite(box_[i].lo) || !std::isfinite(box_[i].hi))
            throw DomainValidationError("degenerate domain interval for coordinate " +
                                        std::string(1, static_cast<char>('x' + i)));
}

bool Chart::in_box(const Point& p) const {
    for (std::size_t i = 0; i < 3; ++i)
        if (p[i] < box_[i].lo || p[i] > box_[i].hi) return false;
    return true;
}

bool Chart::admits(const Point& p, double margin) const {
    if (!in_box(p)) return false;
    for (const Expr& f : excluded_) {
        double v;
        try {
            v = eval(f, p);
        } catch (const DomainError&) {
            return false;
        }
        if (!(std::abs(v) >= margin)) return false;
    }
    return true;
}

Mat3 inverse3(const Mat3& m) {
    Mat3 adj;
    adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
    if (std::abs(det) < singular_det) throw SingularMetricError("singular matrix (|det| < 1e-12)");
    return adj / det;
}

JetMatrix inverse3(const JetMatrix& m) {
    auto e = [&](int i, int j) -> const Jet3& { return m[slot_of(i, j)]; };
    JetMatrix adj;
    adj[slot_of(0, 0)] = e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1);
    adj[slot_of(0, 1)] = e(0, 2) * e(2, 1) - e(0, 1) * e(2, 2);
    adj[slot_of(0, 2)] = e(0, 1) * e(1, 2) - e(0, 2) * e(1, 1);
    adj[slot_of(1, 0)] = e(1, 2) * e(2, 0) - e(1, 0) * e(2, 2);
    adj[slot_of(1, 1)] = e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0);
    adj[slot_of(1, 2)] = e(0, 2) * e(1, 0) - e(0, 0) * e(1, 2);
    adj[slot_of(2, 0)] = e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0);
    adj[slot_of(2, 1)] = e(0, 1) * e(2, 0) - e(0, 0) * e(2, 1);
    adj[slot_of(2, 2)] = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
    const Jet3 det = e(0, 0) * adj[slot_of(0, 0)] + e(0, 1) * adj[slot_of(1, 0)] + e(0, 2) * adj[slot_of(2, 0)];
    if (std::abs(det.value()) < singular_det) throw SingularMetricError("singular matrix (|det| < 1e-12)");
    const Jet3 inv_det = reciprocal(det);
    for (Jet3& a : adj) a *= inv_det;
    return adj;
}

MetricField MetricField::from_upper(const std::array<Expr, 6>& u) {
    MetricField m;
    m.g_ = {u[0], u[1], u[2], u[1], u[3], u[4], u[2], u[4], u[5]};
    return m;
}

MetricField MetricField::from_full(const std::array<Expr, 9>& full) {
    MetricField m;
    m.g_ = full;
    m.structurally_symmetric_ = full[1] == full[3] && full[2] == full[6] && full[5] == full[7];
    return m;
}

JetMatrix MetricField::jets(const Point& p, int order) const {
    JetMatrix out;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            out[slot_of(i, j)] = eval_jet(entry(i, j), p, order);
            if (i != j) out[slot_of(j, i)] = structurally_symmetric_ ? out[slot_of(i, j)] : eval_jet(entry(j, i), p, order);
        }
    return out;
}

Mat3 MetricField::at(const Point& p) const {
    Mat3 g;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g(i, j) = eval(entry(i, j), p);
    return g;
}

void MetricField::validate_at(const Point& p) const {
    const Mat3 g = at(p);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(g(i, j) - g(j, i)) >= 1e-12) throw MetricError("metric is not symmetric");
    const double m1 = g(0, 0);
    const double m2 = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    const double m3 = g.determinant();
    if (!(m1 > 0 && m2 > 0 && m3 > 0)) throw MetricError("metric is not positive definite");
    if (m3 < singular_det) throw SingularMetricError("singular metric (det < 1e-12)");
}

CurvatureData curvature(const MetricField& m, const Point& p) {
    m.validate_at(p);
    const JetMatrix g = m.jets(p, 2);

    JetMatrix g1;
    for (std::size_t i = 0; i < 9; ++i) g1[i] = g[i].truncated(1);
    const JetMatrix gi = inverse3(g1);

    // dg[a][i][j] = ∂_a g_ij, valid to order 1
    std::array<JetMatrix, 3> dg;
    for (int a = 0; a < 3; ++a)
        for (std::size_t s = 0; s < 9; ++s) dg[static_cast<std::size_t>(a)][s] = differentiate(g[s], a);
    auto dG = [&](int a, int i, int j) -> const Jet3& { return dg[static_cast<std::size_t>(a)][slot_of(i, j)]; };

    // Γ^k_ij to order 1
    std::array<Jet3, 27> gamma;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                Jet3 sum = Jet3::constant(0.0, 1);
                for (int l = 0; l < 3; ++l) sum += gi[slot_of(k, l)] * (dG(i, j, l) + dG(j, i, l) - dG(l, i, j));
                sum *= 0.5;
                gamma[static_cast<std::size_t>(9 * k + 3 * i + j)] = sum;
                gamma[static_cast<std::size_t>(9 * k + 3 * j + i)] = sum;
            }
    auto G = [&](int k, int i, int j) { return gamma[static_cast<std::size_t>(9 * k + 3 * i + j)].value(); };
    auto dGamma = [&](int a, int k, int i, int j) {
        return partial(gamma[static_cast<std::size_t>(9 * k + 3 * i + j)], unit(a));
    };

    CurvatureData out;
    out.point = p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            out.g(i, j) = g[slot_of(i, j)].value();
            out.g_inv(i, j) = gi[slot_of(i, j)].value();
        }

    out.christoffel = TensorValue(p, {Slot::up, Slot::down, Slot::down});
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out.christoffel(k, i, j) = G(k, i, j);

    out.riemann = TensorValue(p, {Slot::up, Slot::down, Slot::down, Slot::down});
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double v = dGamma(i, l, j, k) - dGamma(j, l, i, k);
                    for (int q = 0; q < 3; ++q) v += G(l, i, q) * G(q, j, k) - G(l, j, q) * G(q, i, k);
                    out.riemann(l, i, j, k) = v;
                }

    out.riemann_lowered = TensorValue(p, {Slot::down, Slot::down, Slot::down, Slot::down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double v = 0.0;
                    for (int q = 0; q < 3; ++q) v += out.g(l, q) * out.riemann(q, i, j, k);
                    out.riemann_lowered(i, j, k, l) = v;
                }

    out.ricci = contract(out.riemann, 0, 1);
    out.scalar = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) out.scalar += out.g_inv(j, k) * out.ricci(j, k);
    return out;
}

Vec3 apply(const TensorValue& t, const Vec3& x, const Vec3& y, const Vec3& z) {
    Vec3 out = Vec3::Zero();
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) out(l) += t(l, i, j, k) * x(i) * y(j) * z(k);
    return out;
}

Mat3 ricci_operator(const CurvatureData& c) { return c.g_inv * c.ricci.to_matrix(); }

TensorValue christoffel(const MetricField& m, const Point& p) { return curvature(m, p).christoffel; }

RiemannForms riemann(const MetricField& m, const Point& p) {
    CurvatureData c = curvature(m, p);
    return {std::move(c.riemann), std::move(c.riemann_lowered)};
}

RicciScalar ricci_scalar(const MetricField& m, const Point& p) {
    CurvatureData c = curvature(m, p);
    return {std::move(c.ricci), c.scalar};
}

TensorValue covariant_derivative(const TensorField& field, const Signature& sig, const Point& p, const MetricField& m,
                                 double step) {
    return covariant_derivative(field, sig, p, christoffel(m, p), step);
}

TensorValue covariant_derivative(const TensorField& field, const Signature& sig, const Point& p,
                                 const TensorValue& gamma, double step) {
    auto sample = [&](const Point& q) {
        TensorValue t;
        try {
            t = field(q);
        } catch (const std::exception& e) {
            throw FieldEvaluationError(std::string("field evaluation failed near the stencil: ") + e.what());
        }
        if (t.signature() != sig)
            throw VarianceError("field signature " + signature_string(t.signature()) + " does not match " +
                                signature_string(sig));
        return t;
    };

    const TensorValue t0 = sample(p);
    Signature out_sig{Slot::down};
    out_sig.insert(out_sig.end(), sig.begin(), sig.end());
    TensorValue out(p, out_sig);
    const std::size_t block = t0.size();

    for (int a = 0; a < 3; ++a) {
        Point plus = p, minus = p;
        plus[static_cast<std::size_t>(a)] += step;
        minus[static_cast<std::size_t>(a)] -= step;
        const TensorValue tp = sample(plus), tm = sample(minus);
        const std::size_t base = static_cast<std::size_t>(a) * block;
        for (std::size_t f = 0; f < block; ++f) out[base + f] = (tp[f] - tm[f]) / (2 * step);

        for (std::size_t slot = 0; slot < sig.size(); ++slot) {
            const std::size_t st = t0.stride(slot);
            for (std::size_t f = 0; f < block; ++f) {
                const int i = static_cast<int>((f / st) % 3);
                const std::size_t rest = f - static_cast<std::size_t>(i) * st;
                double corr = 0.0;
                for (int c = 0; c < 3; ++c) {
                    const double tc = t0[rest + static_cast<std::size_t>(c) * st];
                    corr += sig[slot] == Slot::up ? gamma(i, a, c) * tc : -gamma(c, a, i) * tc;
                }
                out[base + f] += corr;
            }
        }
    }
    return out;
}

} // namespace kmu
