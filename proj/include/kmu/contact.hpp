#pragma once

#include "kmu/check.hpp"
#include "kmu/geometry.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmu {

struct ToleranceProfile {
    double algebraic = 1e-6;
    double finite_difference = 1e-4;
    double reconstruction = 1e-5;
    double certificate = 1e-6;
};

struct ContactManifold {
    std::string name;
    Chart chart;
    MetricField metric;
    std::array<Expr, 3> eta;
    ToleranceProfile tol;
};

/// Contact metric structure at a point. Matrices of (1,1) tensors act on
/// column vectors: (φX)^i = φ(i,j) X^j. `deta` holds dη_ij = dη(e_i, e_j).
struct ContactFrame {
    Point point{};
    Mat3 g;
    Mat3 g_inv;
    Vec3 eta;
    Vec3 xi;
    Mat3 deta;
    Mat3 phi;
    Mat3 h;
    Mat3 l;
    CurvatureData curv;
};

class ContactStructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// dη(X,Y) = ½(Xη(Y) − Yη(X) − η([X,Y])), φ = g⁻¹dη, ξ = g⁻¹η / η(g⁻¹η),
/// h = ½ L_ξ φ, l = R(·,ξ)ξ. Throws if η vanishes or φ² ≠ −I + η⊗ξ.
ContactFrame contact_frame(const ContactManifold& m, const Point& p);

/// As contact_frame, but only fails when the frame cannot be formed at all.
ContactFrame contact_frame_unchecked(const ContactManifold& m, const Point& p);

double phi_squared_residual(const ContactFrame& f);

struct AxiomReport {
    std::vector<CheckResult> checks;
    bool passed = false;
};

/// Residuals of the contact metric axioms over the sample points. Checks that
/// rely on finite differences use `tol_fd`, everything else `tol`.
AxiomReport check_axioms(const ContactManifold& m, const std::vector<Point>& points, double tol = 1e-6,
                         double tol_fd = 1e-4);

struct KappaMu {
    enum class Kind { sasakian_like, generalized };
    Kind kind = Kind::generalized;
    double kappa = 0.0;
    double mu = 0.0;  // NaN when sasakian_like
    double theta = 0.0;
    Vec3 eigenvector = Vec3::Zero();  // unit X ⊥ ξ with hX = θX
    double certificate_residual = 0.0;
    bool certified = false;

    /// μ with the Sasakian case mapped to 0 (h = 0 there, so μ never matters).
    double mu_or_zero() const;
};

inline constexpr double sasakian_cutoff = 1e-8;

KappaMu extract_kappa_mu(const ContactFrame& f, double tol = 1e-6);
KappaMu extract_kappa_mu(const ContactManifold& m, const Point& p, double tol = 1e-6);

/// Residual of R(X,Y)ξ − (κI + μh)(η(Y)X − η(X)Y) over a fixed set of
/// pseudo-random vector pairs.
double defining_relation_residual(const ContactFrame& f, double kappa, double mu);

/// R from (κ, μ, h, η, ξ, g) on a 3-dimensional generalized (κ,μ) manifold.
TensorValue closed_form_riemann(const Point& p, const Mat3& g, const Vec3& eta, const Vec3& xi, const Mat3& h,
                                double kappa, double mu);
/// S from the same data, as a (0,2) tensor.
TensorValue closed_form_ricci(const Point& p, const Mat3& g, const Vec3& eta, const Mat3& h, double kappa, double mu);

struct IdentityReport {
    std::vector<CheckResult> checks;
    bool passed = false;
};

/// Residuals of the structure identities of generalized (κ,μ) manifolds.
IdentityReport verify_structure_identities(const ContactManifold& m, const std::vector<Point>& points,
                                           double tol_fd = 1e-4, double tol = 1e-6, double tol_reconstruction = 1e-5);

} // namespace kmu
