#include "kmu/contact.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace kmu;
using kmu::testing::Rng;

namespace {

ContactManifold fixture(const std::string& file) { return load_manifest(std::string(KMU_FIXTURE_DIR) + "/" + file); }

double worst(const std::vector<CheckResult>& checks, const std::string& name) {
    const CheckResult* c = find_check(checks, name);
    REQUIRE(c != nullptr);
    return c->max_residual;
}

} // namespace

TEST_CASE("frame identities at random vectors on every entry") {
    Rng rng(31);
    for (const auto& name : testing::gallery_names()) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        for (const auto& p : testing::points_of(m, 10)) {
            const ContactFrame f = contact_frame(m, p);
            CHECK(f.eta.dot(f.xi) == doctest::Approx(1.0).epsilon(1e-12));
            for (int trial = 0; trial < 10; ++trial) {
                const Vec3 x = rng.vec();
                const Vec3 r = f.phi * (f.phi * x) + x - f.eta.dot(x) * f.xi;
                CHECK(testing::max_abs(r) < 1e-8);
            }
            CHECK(testing::max_abs(Vec3(f.l * f.xi)) < 1e-8);
        }
    }
}

TEST_CASE("Sasakian entry: h vanishes and kappa is 1") {
    const ContactManifold m = testing::gallery("heisenberg_sasakian");
    for (const auto& p : testing::points_of(m)) {
        const ContactFrame f = contact_frame(m, p);
        CHECK(testing::max_abs(f.h) < 1e-7);
        const KappaMu km = extract_kappa_mu(f);
        CHECK(km.kind == KappaMu::Kind::sasakian_like);
        CHECK(km.kappa == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::isnan(km.mu));
        CHECK(km.mu_or_zero() == 0.0);
    }
}

TEST_CASE("flat entry: l vanishes and kappa = mu = 0") {
    const ContactManifold m = testing::gallery("flat_trig");
    for (const auto& p : testing::points_of(m)) {
        const ContactFrame f = contact_frame(m, p);
        CHECK(testing::max_abs(f.l) < 1e-7);
        const KappaMu km = extract_kappa_mu(f);
        CHECK(km.kind == KappaMu::Kind::generalized);
        CHECK(std::abs(km.kappa) < 1e-6);
        CHECK(std::abs(km.mu) < 1e-6);
        CHECK(km.certified);
    }
}

TEST_CASE("nonconstant entry matches its construction") {
    // w = 2x/y^2 + z/y gives h-eigenvalue λ = 1/y^2, κ = 1 − λ^2, μ = 2(1 − λ)
    const ContactManifold m = testing::gallery("generalized_rational");
    const auto pts = testing::points_of(m);
    std::vector<double> kappas;
    for (const auto& p : pts) {
        const KappaMu km = extract_kappa_mu(m, p);
        const double lambda = 1.0 / (p[1] * p[1]);
        CHECK(km.kind == KappaMu::Kind::generalized);
        CHECK(km.certified);
        CHECK(km.certificate_residual < 1e-6);
        CHECK(km.kappa == doctest::Approx(1 - lambda * lambda).epsilon(1e-9));
        CHECK(km.mu == doctest::Approx(2 * (1 - lambda)).epsilon(1e-9));
        CHECK(km.theta == doctest::Approx(std::sqrt(1 - km.kappa)).epsilon(1e-9));
        kappas.push_back(km.kappa);
    }
    const auto [lo, hi] = std::minmax_element(kappas.begin(), kappas.end());
    CHECK(*hi - *lo > 1e-3);
}

TEST_CASE("eigenvector selection is deterministic") {
    const ContactManifold m = testing::gallery("kmu_constant_e11");
    for (const auto& p : testing::points_of(m, 10)) {
        const ContactFrame f = contact_frame(m, p);
        const KappaMu km = extract_kappa_mu(f);
        const Vec3& x = km.eigenvector;
        CHECK(x.dot(f.g * x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(f.eta.dot(x)) < 1e-10);
        CHECK(testing::max_abs(Vec3(f.h * x - km.theta * x)) < 1e-9);
        int first = 0;
        while (first < 3 && std::abs(x(first)) <= 1e-12) ++first;
        REQUIRE(first < 3);
        CHECK(x(first) > 0.0);
        const KappaMu again = extract_kappa_mu(f);
        CHECK(again.eigenvector == x);
        CHECK(again.mu == km.mu);
    }
}

TEST_CASE("closed forms reproduce the curvature on the (kappa,mu) entries") {
    Rng rng(32);
    for (const auto* name : {"generalized_rational", "kmu_constant_e11", "sl2_mu_zero", "flat_trig"}) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        for (const auto& p : testing::points_of(m)) {
            const ContactFrame f = contact_frame(m, p);
            const KappaMu km = extract_kappa_mu(f);
            const TensorValue r = closed_form_riemann(p, f.g, f.eta, f.xi, f.h, km.kappa, km.mu);
            CHECK(max_abs_diff(r, f.curv.riemann) < 1e-5);
            const TensorValue s = closed_form_ricci(p, f.g, f.eta, f.h, km.kappa, km.mu);
            CHECK(max_abs_diff(s, f.curv.ricci) < 1e-5);
            CHECK(f.curv.scalar == doctest::Approx(2 * (km.kappa - km.mu)).epsilon(1e-6).scale(1));
            const Mat3 ric = f.curv.ricci.to_matrix();
            for (int trial = 0; trial < 10; ++trial) {
                const Vec3 u = rng.vec();
                CHECK(std::abs(u.dot(ric * f.xi) - 2 * km.kappa * f.eta.dot(u)) < 1e-6);
            }
            CHECK(defining_relation_residual(f, km.kappa, km.mu) < 1e-6);
        }
    }
}

TEST_CASE("axiom suite passes on the gallery") {
    for (const auto& name : testing::gallery_names()) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        const AxiomReport rep = check_axioms(m, sample_points(m.chart, 50));
        for (const auto& c : rep.checks) {
            CAPTURE(c.name);
            CHECK(c.passed);
        }
        CHECK(rep.passed);
        CHECK(worst(rep.checks, "nabla_xi") < 1e-4);
        CHECK(worst(rep.checks, "trace_h") < 1e-8);
    }
}

TEST_CASE("constant eta on the Euclidean metric is not a contact metric structure") {
    const ContactManifold m = fixture("euclidean_dz.yaml");
    const AxiomReport rep = check_axioms(m, testing::points_of(m, 5));
    CHECK_FALSE(rep.passed);
    const CheckResult* phi2 = find_check(rep.checks, "phi_squared");
    REQUIRE(phi2 != nullptr);
    CHECK_FALSE(phi2->passed);
    CHECK(phi2->worst_point.has_value());
    CHECK_THROWS_AS(contact_frame(m, {0.1, 0.2, 0.3}), ContactStructureError);
}

TEST_CASE("structure identities on the (kappa,mu) entries") {
    for (const auto* name : {"kmu_constant_e11", "sl2_mu_zero", "flat_trig", "generalized_rational"}) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        const IdentityReport rep = verify_structure_identities(m, testing::points_of(m));
        CHECK(worst(rep.checks, "h_squared") < 1e-6);
        CHECK(worst(rep.checks, "xi_kappa") < 1e-4);
        CHECK(worst(rep.checks, "xi_r") < 1e-4);
        CHECK(worst(rep.checks, "h_grad_mu") < 1e-4);
        CHECK(worst(rep.checks, "ricci_commutator") < 1e-6);
        CHECK(worst(rep.checks, "eigenvalue_pairing") < 1e-6);
        CHECK(worst(rep.checks, "nabla_phi") < 1e-4);
        CHECK(worst(rep.checks, "ricci_xi") < 1e-6);
    }
    for (const auto* name : {"kmu_constant_e11", "sl2_mu_zero", "flat_trig"}) {
        CAPTURE(name);
        const ContactManifold m = testing::gallery(name);
        const IdentityReport rep = verify_structure_identities(m, testing::points_of(m));
        CHECK(worst(rep.checks, "nabla_h") < 1e-4);
        CHECK(rep.passed);
    }
}

TEST_CASE("Sasakian entry: nabla phi reduces to g(X,Y) xi - eta(Y) X") {
    const ContactManifold m = testing::gallery("heisenberg_sasakian");
    const IdentityReport rep = verify_structure_identities(m, testing::points_of(m));
    CHECK(worst(rep.checks, "nabla_phi") < 1e-4);
    const CheckResult* recon = find_check(rep.checks, "riemann_reconstruction");
    REQUIRE(recon != nullptr);
    CHECK(recon->passed);
    CHECK_FALSE(recon->note.empty());
}
