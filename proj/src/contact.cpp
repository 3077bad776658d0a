#include "kmu/contact.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace kmu {

namespace {

std::size_t slot_of(int i, int j) { return static_cast<std::size_t>(3 * i + j); }

MultiIndex unit(int i) { return {i == 0, i == 1, i == 2}; }

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }
double max_abs(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

Vec3 basis(int i) { return Vec3::Unit(i); }

ContactFrame build_frame(const ContactManifold& m, const Point& p, bool with_curvature) {
    ContactFrame f;
    f.point = p;
    if (with_curvature) {
        f.curv = curvature(m.metric, p);
        f.g = f.curv.g;
        f.g_inv = f.curv.g_inv;
    } else {
        m.metric.validate_at(p);
        f.g = m.metric.at(p);
        f.g_inv = inverse3(f.g);
    }

    std::array<Jet3, 3> eta;
    for (std::size_t i = 0; i < 3; ++i) eta[i] = eval_jet(m.eta[i], p, 2);
    f.eta = {eta[0].value(), eta[1].value(), eta[2].value()};
    if (max_abs(f.eta) < 1e-12) throw ContactStructureError("eta vanishes at the point");

    const JetMatrix g = m.metric.jets(p, 1);
    const JetMatrix gi = inverse3(g);

    JetMatrix deta;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            deta[slot_of(i, j)] = 0.5 * (differentiate(eta[static_cast<std::size_t>(j)], i) -
                                         differentiate(eta[static_cast<std::size_t>(i)], j));

    JetMatrix phi;
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
            Jet3 sum = Jet3::constant(0.0, 1);
            for (int i = 0; i < 3; ++i) sum += gi[slot_of(k, i)] * deta[slot_of(i, j)];
            phi[slot_of(k, j)] = sum;
        }

    std::array<Jet3, 3> u;
    Jet3 norm = Jet3::constant(0.0, 1);
    for (int i = 0; i < 3; ++i) {
        Jet3 sum = Jet3::constant(0.0, 1);
        for (int j = 0; j < 3; ++j) sum += gi[slot_of(i, j)] * eta[static_cast<std::size_t>(j)].truncated(1);
        u[static_cast<std::size_t>(i)] = sum;
        norm += eta[static_cast<std::size_t>(i)].truncated(1) * sum;
    }
    const Jet3 inv_norm = reciprocal(norm);
    std::array<Jet3, 3> xi;
    for (std::size_t i = 0; i < 3; ++i) xi[i] = u[i] * inv_norm;

    for (int i = 0; i < 3; ++i) {
        f.xi(i) = xi[static_cast<std::size_t>(i)].value();
        for (int j = 0; j < 3; ++j) {
            f.deta(i, j) = deta[slot_of(i, j)].value();
            f.phi(i, j) = phi[slot_of(i, j)].value();
        }
    }

    // (L_ξ φ)^a_b = ξ^c ∂_c φ^a_b − φ^c_b ∂_c ξ^a + φ^a_c ∂_b ξ^c
    auto d_phi = [&](int c, int a, int b) { return partial(phi[slot_of(a, b)], unit(c)); };
    auto d_xi = [&](int c, int a) { return partial(xi[static_cast<std::size_t>(a)], unit(c)); };
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double lie = 0.0;
            for (int c = 0; c < 3; ++c)
                lie += f.xi(c) * d_phi(c, a, b) - f.phi(c, b) * d_xi(c, a) + f.phi(a, c) * d_xi(b, c);
            f.h(a, b) = 0.5 * lie;
        }

    f.l.setZero();
    if (with_curvature)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double v = 0.0;
                for (int c = 0; c < 3; ++c)
                    for (int d = 0; d < 3; ++d) v += f.curv.riemann(a, b, c, d) * f.xi(c) * f.xi(d);
                f.l(a, b) = v;
            }
    return f;
}

double dot(const Mat3& g, const Vec3& a, const Vec3& b) { return a.dot(g * b); }

TensorValue as_tensor(const Point& p, const Mat3& m) { return TensorValue::from_matrix(p, {Slot::up, Slot::down}, m); }

} // namespace

double KappaMu::mu_or_zero() const { return kind == Kind::sasakian_like ? 0.0 : mu; }

ContactFrame contact_frame_unchecked(const ContactManifold& m, const Point& p) { return build_frame(m, p, true); }

double phi_squared_residual(const ContactFrame& f) {
    return max_abs(Mat3(f.phi * f.phi + Mat3::Identity() - f.xi * f.eta.transpose()));
}

ContactFrame contact_frame(const ContactManifold& m, const Point& p) {
    ContactFrame f = build_frame(m, p, true);
    const double r = phi_squared_residual(f);
    if (!(r < m.tol.algebraic))
        throw ContactStructureError("phi^2 = -I + eta (x) xi fails with residual " + std::to_string(r));
    return f;
}

AxiomReport check_axioms(const ContactManifold& m, const std::vector<Point>& points, double tol, double tol_fd) {
    CheckAccumulator phi_sq("phi_squared", tol), eta_xi("eta_xi", tol), compat("metric_compatibility", tol),
        deta_phi("deta_equals_g_phi", tol), phi_xi("phi_xi", tol), eta_phi("eta_phi", tol), deta_xi("deta_xi", tol),
        nabla_xi("nabla_xi", tol_fd), trace_h("trace_h", tol), anti("phi_h_anticommute", tol),
        h_xi("h_xi", tol), h_sym("h_self_adjoint", tol), tr_phi_h("trace_phi_h", tol);

    for (const Point& p : points) {
        ContactFrame f;
        try {
            f = build_frame(m, p, false);
        } catch (const std::exception& e) {
            for (auto* acc : {&phi_sq, &eta_xi, &compat, &deta_phi, &phi_xi, &eta_phi, &deta_xi, &nabla_xi, &trace_h,
                              &anti, &h_xi, &h_sym, &tr_phi_h})
                acc->fail(p, e.what());
            continue;
        }
        phi_sq.add(phi_squared_residual(f), p);
        eta_xi.add(std::abs(f.eta.dot(f.xi) - 1.0), p);
        compat.add(max_abs(Mat3(f.phi.transpose() * f.g * f.phi - (f.g - f.eta * f.eta.transpose()))), p);
        deta_phi.add(max_abs(Mat3(f.deta - f.g * f.phi)), p);
        phi_xi.add(max_abs(Vec3(f.phi * f.xi)), p);
        eta_phi.add(max_abs(Vec3(f.phi.transpose() * f.eta)), p);
        deta_xi.add(max_abs(Vec3(f.deta * f.xi)), p);
        trace_h.add(std::abs(f.h.trace()), p);
        anti.add(max_abs(Mat3(f.phi * f.h + f.h * f.phi)), p);
        h_xi.add(max_abs(Vec3(f.h * f.xi)), p);
        const Mat3 gh = f.g * f.h;
        h_sym.add(max_abs(Mat3(gh - gh.transpose())), p);
        tr_phi_h.add(std::abs((f.phi * f.h).trace()), p);

        try {
            const TensorValue dxi = covariant_derivative(
                [&](const Point& q) {
                    return TensorValue::from_vector(q, Slot::up, build_frame(m, q, false).xi);
                },
                {Slot::up}, p, christoffel(m.metric, p));
            Mat3 nabla;
            for (int a = 0; a < 3; ++a)
                for (int i = 0; i < 3; ++i) nabla(i, a) = dxi(a, i);
            nabla_xi.add(max_abs(Mat3(nabla + f.phi + f.phi * f.h)), p);
        } catch (const std::exception& e) {
            nabla_xi.fail(p, e.what());
        }
    }

    AxiomReport report;
    for (const auto* acc : {&phi_sq, &eta_xi, &compat, &deta_phi, &phi_xi, &eta_phi, &deta_xi, &nabla_xi, &trace_h,
                            &anti, &h_xi, &h_sym, &tr_phi_h})
        report.checks.push_back(acc->result());
    report.passed = all_passed(report.checks);
    return report;
}

double defining_relation_residual(const ContactFrame& f, double kappa, double mu) {
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const Mat3 op = kappa * Mat3::Identity() + mu * f.h;
    double worst = 0.0;
    for (int n = 0; n < 10; ++n) {
        const Vec3 x(d(rng), d(rng), d(rng));
        const Vec3 y(d(rng), d(rng), d(rng));
        const Vec3 lhs = apply(f.curv.riemann, x, y, f.xi);
        const Vec3 rhs = op * (f.eta.dot(y) * x - f.eta.dot(x) * y);
        worst = std::max(worst, max_abs(Vec3(lhs - rhs)));
    }
    return worst;
}

KappaMu extract_kappa_mu(const ContactFrame& f, double tol) {
    KappaMu km;
    km.kappa = f.l.trace() / 2.0;
    if (1.0 - km.kappa < sasakian_cutoff) {
        km.kind = KappaMu::Kind::sasakian_like;
        km.mu = std::numeric_limits<double>::quiet_NaN();
        km.theta = 0.0;
        km.certificate_residual = defining_relation_residual(f, km.kappa, 0.0);
        km.certified = km.certificate_residual < tol;
        return km;
    }
    km.kind = KappaMu::Kind::generalized;
    km.theta = std::sqrt(1.0 - km.kappa);

    // h is g-self-adjoint: solve (g h) v = λ g v and take the top eigenvector
    const Mat3 gh = f.g * f.h;
    const Mat3 sym = 0.5 * (gh + gh.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat3> es(sym, f.g);
    Vec3 x = es.eigenvectors().col(2);
    x /= std::sqrt(dot(f.g, x, x));
    for (int i = 0; i < 3; ++i)
        if (std::abs(x(i)) > 1e-12) {
            if (x(i) < 0) x = -x;
            break;
        }
    km.eigenvector = x;

    const Vec3 hx = f.h * x;
    km.mu = dot(f.g, Vec3(f.l * x - km.kappa * x), hx) / dot(f.g, hx, hx);
    km.certificate_residual = defining_relation_residual(f, km.kappa, km.mu);
    km.certified = km.certificate_residual < tol;
    return km;
}

KappaMu extract_kappa_mu(const ContactManifold& m, const Point& p, double tol) {
    return extract_kappa_mu(contact_frame(m, p), tol);
}

TensorValue closed_form_riemann(const Point& p, const Mat3& g, const Vec3& eta, const Vec3& xi, const Mat3& h,
                                double kappa, double mu) {
    const Mat3 gh = g * h;  // g(hV, Z) = gh(Z, V)
    const double a = -(kappa + mu), b = 2 * kappa + mu;
    TensorValue r(p, {Slot::up, Slot::down, Slot::down, Slot::down});
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    const double di = l == i, dj = l == j;
                    double v = a * (g(j, k) * di - g(i, k) * dj);
                    v += b * (g(j, k) * eta(i) * xi(l) - g(i, k) * eta(j) * xi(l) + eta(j) * eta(k) * di -
                              eta(i) * eta(k) * dj);
                    v += mu * (g(j, k) * h(l, i) - g(i, k) * h(l, j) + gh(k, j) * di - gh(k, i) * dj);
                    r(l, i, j, k) = v;
                }
    return r;
}

TensorValue closed_form_ricci(const Point& p, const Mat3& g, const Vec3& eta, const Mat3& h, double kappa, double mu) {
    const Mat3 gh = g * h;
    TensorValue s(p, {Slot::down, Slot::down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s(i, j) = -mu * g(i, j) + mu * gh(j, i) + (2 * kappa + mu) * eta(i) * eta(j);
    return s;
}

IdentityReport verify_structure_identities(const ContactManifold& m, const std::vector<Point>& points, double tol_fd,
                                           double tol, double tol_reconstruction) {
    CheckAccumulator cert("defining_relation", m.tol.certificate), nabla_h("nabla_h", tol_fd),
        nabla_phi("nabla_phi", tol_fd), h_sq("h_squared", tol), xi_kappa("xi_kappa", tol_fd), xi_r("xi_r", tol_fd),
        h_grad("h_grad_mu", tol_fd), q_phi("ricci_commutator", tol), eig("eigenvalue_pairing", tol),
        rec_r("riemann_reconstruction", tol_reconstruction), rec_s("ricci_reconstruction", tol_reconstruction),
        scalar("scalar_curvature", tol), s_xi("ricci_xi", tol);
    const std::array<CheckAccumulator*, 13> all = {&cert,  &nabla_h, &nabla_phi, &h_sq, &xi_kappa, &xi_r, &h_grad,
                                                   &q_phi, &eig,     &rec_r,     &rec_s, &scalar,  &s_xi};
    const double step = 1e-4;
    for (auto* acc : {&h_grad, &rec_r, &rec_s, &scalar}) acc->allow_vacuous("no non-Sasakian points");

    auto kappa_at = [&](const Point& q) { return build_frame(m, q, true).l.trace() / 2.0; };
    auto scalar_at = [&](const Point& q) { return curvature(m.metric, q).scalar; };
    auto shifted = [](const Point& p, const Vec3& dir, double s) {
        return Point{p[0] + s * dir(0), p[1] + s * dir(1), p[2] + s * dir(2)};
    };

    for (const Point& p : points) {
        ContactFrame f;
        KappaMu km;
        try {
            f = build_frame(m, p, true);
            km = extract_kappa_mu(f, m.tol.certificate);
        } catch (const std::exception& e) {
            for (auto* acc : all) acc->fail(p, e.what());
            continue;
        }
        const double kappa = km.kappa, mu = km.mu_or_zero();
        cert.add(km.certificate_residual, p);

        try {
            const TensorValue dh = covariant_derivative(
                [&](const Point& q) { return as_tensor(q, build_frame(m, q, false).h); }, {Slot::up, Slot::down}, p,
                f.curv.christoffel);
            const TensorValue dphi = covariant_derivative(
                [&](const Point& q) { return as_tensor(q, build_frame(m, q, false).phi); }, {Slot::up, Slot::down}, p,
                f.curv.christoffel);
            const Mat3 gphi = f.g * f.phi, gphih = f.g * f.phi * f.h, gh = f.g * f.h, phih = f.phi * f.h;
            double worst_h = 0.0, worst_phi = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int j = 0; j < 3; ++j) {
                    const Vec3 x = basis(a);
                    Vec3 lhs_h, lhs_phi;
                    for (int i = 0; i < 3; ++i) {
                        lhs_h(i) = dh(a, i, j);
                        lhs_phi(i) = dphi(a, i, j);
                    }
                    const Vec3 rhs_h = ((1 - kappa) * gphi(a, j) - gphih(a, j)) * f.xi -
                                       f.eta(j) * ((1 - kappa) * f.phi.col(a) + phih.col(a)) -
                                       mu * f.eta(a) * phih.col(j);
                    const Vec3 rhs_phi = (f.g(a, j) + gh(a, j)) * f.xi - f.eta(j) * (x + f.h.col(a));
                    worst_h = std::max(worst_h, max_abs(Vec3(lhs_h - rhs_h)));
                    worst_phi = std::max(worst_phi, max_abs(Vec3(lhs_phi - rhs_phi)));
                }
            nabla_h.add(worst_h, p);
            nabla_phi.add(worst_phi, p);
        } catch (const std::exception& e) {
            nabla_h.fail(p, e.what());
            nabla_phi.fail(p, e.what());
        }

        h_sq.add(max_abs(Mat3(f.h * f.h - (kappa - 1) * f.phi * f.phi)), p);

        try {
            xi_kappa.add(std::abs((kappa_at(shifted(p, f.xi, step)) - kappa_at(shifted(p, f.xi, -step))) / (2 * step)),
                         p);
            xi_r.add(std::abs((scalar_at(shifted(p, f.xi, step)) - scalar_at(shifted(p, f.xi, -step))) / (2 * step)),
                     p);
        } catch (const std::exception& e) {
            xi_kappa.fail(p, e.what());
            xi_r.fail(p, e.what());
        }

        if (km.kind == KappaMu::Kind::generalized) {
            try {
                Vec3 dk, dmu;
                for (int a = 0; a < 3; ++a) {
                    const Point qp = shifted(p, basis(a), step), qm = shifted(p, basis(a), -step);
                    const KappaMu kp = extract_kappa_mu(build_frame(m, qp, true), m.tol.certificate);
                    const KappaMu kmm = extract_kappa_mu(build_frame(m, qm, true), m.tol.certificate);
                    dk(a) = (kp.kappa - kmm.kappa) / (2 * step);
                    dmu(a) = (kp.mu - kmm.mu) / (2 * step);
                }
                h_grad.add(max_abs(Vec3(f.h * (f.g_inv * dmu) - f.g_inv * dk)), p);
            } catch (const std::exception& e) {
                h_grad.fail(p, e.what());
            }
        }

        const Mat3 q = ricci_operator(f.curv);
        q_phi.add(max_abs(Mat3(q * f.phi - f.phi * q - 2 * mu * f.h * f.phi)), p);

        Eigen::GeneralizedSelfAdjointEigenSolver<Mat3> es(Mat3(0.5 * (f.g * f.h + (f.g * f.h).transpose())), f.g,
                                                          Eigen::EigenvaluesOnly);
        const double theta = std::sqrt(std::max(0.0, 1 - kappa));
        const Vec3 ev = es.eigenvalues();
        eig.add(max_abs(Vec3(ev - Vec3(-theta, 0.0, theta))), p);

        // the closed forms describe non-Sasakian points; at h = 0 the φ-sectional curvature is free
        if (km.kind == KappaMu::Kind::generalized) {
            rec_r.add(max_abs_diff(f.curv.riemann, closed_form_riemann(p, f.g, f.eta, f.xi, f.h, kappa, mu)), p);
            rec_s.add(max_abs_diff(f.curv.ricci, closed_form_ricci(p, f.g, f.eta, f.h, kappa, mu)), p);
            scalar.add(std::abs(f.curv.scalar - 2 * (kappa - mu)), p);
        }
        s_xi.add(max_abs(Vec3(f.curv.ricci.to_matrix() * f.xi - 2 * kappa * f.eta)), p);
    }

    IdentityReport report;
    for (auto* acc : all) report.checks.push_back(acc->result());
    report.passed = all_passed(report.checks);
    return report;
}

} // namespace kmu
