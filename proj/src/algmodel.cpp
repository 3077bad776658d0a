#include "kmu/algmodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

namespace kmu {

double ModelPoint::theta() const {
    if (kappa > 1.0) throw std::domain_error("model point needs kappa <= 1");
    return std::sqrt(1.0 - kappa);
}

ModelFrame model_frame(const ModelPoint& mp) {
    const double t = mp.theta();
    ModelFrame f;
    f.g = Mat3::Identity();
    f.eta = Vec3(1, 0, 0);
    f.xi = f.eta;
    f.phi = Mat3::Zero();
    f.phi(2, 1) = 1.0;
    f.phi(1, 2) = -1.0;
    f.h = Mat3::Zero();
    f.h(1, 1) = t;
    f.h(2, 2) = -t;
    return f;
}

CurvatureContext model_curvature(const ModelPoint& mp) {
    const ModelFrame f = model_frame(mp);
    CurvatureContext ctx;
    ctx.g = f.g;
    ctx.g_inv = f.g;
    ctx.riemann = closed_form_riemann(ctx.point, f.g, f.eta, f.xi, f.h, mp.kappa, mp.mu);
    ctx.ricci = closed_form_ricci(ctx.point, f.g, f.eta, f.h, mp.kappa, mp.mu);
    ctx.q = ctx.g_inv * ctx.ricci.to_matrix();
    ctx.scalar = ctx.q.trace();
    ctx.eta = f.eta;
    ctx.xi = f.xi;
    ctx.h = f.h;
    return ctx;
}

std::string_view condition_name(Condition c) {
    switch (c) {
    case Condition::wr: return "wr";
    case Condition::wh: return "wh";
    case Condition::ws: return "ws";
    }
    return "?";
}

std::optional<Condition> parse_condition(std::string_view name) {
    for (Condition c : all_conditions())
        if (condition_name(c) == name) return c;
    return std::nullopt;
}

const std::vector<Condition>& all_conditions() {
    static const std::vector<Condition> all{Condition::wr, Condition::wh, Condition::ws};
    return all;
}

double printed_target(Condition c, const ModelPoint& mp) {
    const double k = mp.kappa, m = mp.mu, a = mp.alpha, b = mp.beta, g = mp.gamma;
    switch (c) {
    case Condition::wr: return (b + 1) * m * (m - 3 * k);
    case Condition::wh: return m * ((a + b + 2) * m - (a + 3 * b + 4) * k);
    case Condition::ws: return ((2 * b + 1) * m + k - g) * m;
    }
    return 0.0;
}

namespace {

Coefficients conharmonic_at(const CurvatureContext& ctx) {
    return preset_coefficients(PresetName::conharmonic, 1, ctx.scalar);
}

// tr(h∘D) with D^t_y = g^{tw} B(y, w)
double trace_against_h(const CurvatureContext& ctx, const Mat3& b) {
    const Mat3& h = *ctx.h;
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int t = 0; t < 3; ++t)
            for (int w = 0; w < 3; ++w) s += h(a, t) * ctx.g_inv(t, w) * b(a, w);
    return s;
}

} // namespace

double traced_slice(Condition c, const CurvatureContext& ctx, const TensorValue& w) {
    if (!ctx.xi || !ctx.h) throw std::invalid_argument("traced slice needs xi and h in the context");
    const Vec3& xi = *ctx.xi;

    // a[y] = W̃(ξ, e_y) as an endomorphism
    std::array<Mat3, 3> a;
    for (int y = 0; y < 3; ++y) {
        a[y].setZero();
        for (int l = 0; l < 3; ++l)
            for (int m = 0; m < 3; ++m)
                for (int x = 0; x < 3; ++x) a[y](l, m) += xi(x) * w(l, x, y, m);
    }

    Mat3 b = Mat3::Zero();
    if (c == Condition::ws) {
        // −S(W̃(ξ,Y)ξ, V) − S(ξ, W̃(ξ,Y)V)
        const Mat3 s = ctx.ricci.to_matrix();
        for (int y = 0; y < 3; ++y) b.row(y) = -(a[y] * xi).transpose() * s - (s * xi).transpose() * a[y];
        return trace_against_h(ctx, b);
    }

    const TensorValue t = c == Condition::wr ? ctx.riemann : w_tilde(ctx, conharmonic_at(ctx));
    // tx[v](l, z) = T(ξ, e_v) e_z, and T(U, V) for general U, V by linearity
    auto apply_t = [&](const Vec3& u, const Vec3& v) {
        Mat3 m = Mat3::Zero();
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double uv = u(i) * v(j);
                    if (uv == 0.0) continue;
                    for (int z = 0; z < 3; ++z) m(l, z) += uv * t(l, i, j, z);
                }
        return m;
    };
    std::array<Mat3, 3> tx;
    for (int v = 0; v < 3; ++v) tx[v] = apply_t(xi, Vec3::Unit(v));

    for (int y = 0; y < 3; ++y) {
        const Mat3& ay = a[y];
        const Vec3 axi = ay * xi;
        // Σ_{v,z} g^{vz} [(W̃·T)(ξ,Y,ξ,e_v) e_z]
        Vec3 sum = Vec3::Zero();
        for (int v = 0; v < 3; ++v) {
            const Mat3 d = ay * tx[v] - apply_t(axi, Vec3::Unit(v)) - apply_t(xi, ay.col(v)) - tx[v] * ay;
            for (int z = 0; z < 3; ++z) sum += ctx.g_inv(v, z) * d.col(z);
        }
        b.row(y) = (ctx.g * sum).transpose();
    }
    return trace_against_h(ctx, b);
}

double traced_condition(Condition c, const ModelPoint& mp) {
    const CurvatureContext ctx = model_curvature(mp);
    const TensorValue w = w_tilde_kmu_closed_form(ctx, mp.coefficients(), mp.kappa, mp.mu);
    return traced_slice(c, ctx, w);
}

std::vector<ModelPoint> draw_model_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> kappa(-2.0, 0.9), mu(-3.0, 3.0), coef(-2.0, 2.0);
    std::vector<ModelPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ModelPoint mp;
        mp.kappa = kappa(rng);
        mp.mu = mu(rng);
        mp.alpha = coef(rng);
        mp.beta = coef(rng);
        mp.gamma = coef(rng);
        out.push_back(mp);
    }
    return out;
}

ScalarFit fit_scalar_constant(Condition c, std::size_t draws, std::uint64_t seed) {
    if (draws == 0) throw std::invalid_argument("fit needs at least one draw");
    const auto points = draw_model_points(draws, seed);
    std::vector<double> lhs, basis;
    double num = 0.0, den = 0.0;
    for (const auto& mp : points) {
        const double l = traced_condition(c, mp);
        const double t = (1.0 - mp.kappa) * printed_target(c, mp);
        lhs.push_back(l);
        basis.push_back(t);
        num += l * t;
        den += t * t;
    }
    ScalarFit fit;
    fit.condition = c;
    fit.draws = draws;
    fit.seed = seed;
    fit.c = den > 0.0 ? num / den : 0.0;
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        worst = std::max(worst, std::abs(lhs[i] - fit.c * basis[i]));
        scale = std::max(scale, std::abs(lhs[i]));
    }
    fit.residual = scale > 0.0 ? worst / scale : 0.0;
    return fit;
}

const ScalarFit& frozen_fit(Condition c) {
    static std::mutex lock;
    static std::map<Condition, ScalarFit> cache;
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find(c);
    if (it == cache.end()) it = cache.emplace(c, fit_scalar_constant(c)).first;
    return it->second;
}

ScalarPair scalar_condition(Condition c, const ModelPoint& mp) {
    return {traced_condition(c, mp), frozen_fit(c).c * (1.0 - mp.kappa) * printed_target(c, mp)};
}

ScalarPair wr_condition(const ModelPoint& mp) { return scalar_condition(Condition::wr, mp); }
ScalarPair wh_condition(const ModelPoint& mp) { return scalar_condition(Condition::wh, mp); }
ScalarPair ws_condition(const ModelPoint& mp) { return scalar_condition(Condition::ws, mp); }

namespace {

// Moves of a draw onto each factor of the printed target.
std::vector<ModelPoint> onto_target_zeros(Condition c, const ModelPoint& mp) {
    std::vector<ModelPoint> out;
    ModelPoint q = mp;
    q.mu = 0.0;
    out.push_back(q);
    switch (c) {
    case Condition::wr:
        q = mp;
        q.beta = -1.0;
        out.push_back(q);
        q = mp;
        q.mu = 3 * mp.kappa;
        out.push_back(q);
        break;
    case Condition::wh: {
        const double den = mp.alpha + mp.beta + 2;
        if (std::abs(den) > 1e-6) {
            q = mp;
            q.mu = (mp.alpha + 3 * mp.beta + 4) * mp.kappa / den;
            out.push_back(q);
        }
        break;
    }
    case Condition::ws:
        q = mp;
        q.gamma = (2 * mp.beta + 1) * mp.mu + mp.kappa;
        out.push_back(q);
        break;
    }
    return out;
}

double& coefficient(ModelPoint& mp, int which) {
    return which == 0 ? mp.gamma : which == 1 ? mp.alpha : mp.beta;
}

} // namespace

ZeroSetReport compare_zero_sets(Condition c, const std::vector<ModelPoint>& draws, double zero_tol) {
    ZeroSetReport rep;
    for (const auto& mp : draws) {
        const double traced = traced_condition(c, mp);
        const double target = printed_target(c, mp);
        const double scale = std::max({1.0, std::abs(traced), std::abs(target)});
        ++rep.generic_cases;
        if ((std::abs(traced) <= zero_tol * scale) != (std::abs(target) <= zero_tol * scale)) ++rep.generic_mismatches;

        for (const auto& q : onto_target_zeros(c, mp)) {
            ++rep.target_zero_cases;
            if (std::abs(traced_condition(c, q)) > zero_tol * scale) ++rep.target_zero_mismatches;
        }

        // the traced value is affine in each of γ, α, β
        for (int which = 0; which < 3; ++which) {
            ModelPoint q0 = mp, q1 = mp;
            coefficient(q0, which) = 0.0;
            coefficient(q1, which) = 1.0;
            const double a = traced_condition(c, q0);
            const double slope = traced_condition(c, q1) - a;
            if (std::abs(slope) <= 1e-8 * std::max(1.0, std::abs(a))) continue;
            ModelPoint root = mp;
            coefficient(root, which) = -a / slope;
            ++rep.traced_zero_cases;
            if (std::abs(printed_target(c, root)) > zero_tol * scale) ++rep.traced_zero_mismatches;
            break;
        }
    }
    return rep;
}

std::optional<LinearRelation> printed_relation(Condition c, const PresetSpec& preset) {
    constexpr double eps = 1e-12;
    const double a = preset.alpha, b = preset.beta;
    LinearRelation rel;
    switch (c) {
    case Condition::wr:
        if (std::abs(b + 1) <= eps) return std::nullopt;
        rel = {-3.0, 1.0, 0.0};
        break;
    case Condition::wh:
        rel = {-(a + 3 * b + 4), a + b + 2, 0.0};
        break;
    case Condition::ws:
        // γ = γ0 + γr·2(κ − μ)
        rel = {1.0 - 2 * preset.gamma_per_r, 2 * b + 1 + 2 * preset.gamma_per_r, preset.gamma};
        break;
    }
    if (std::abs(rel.pi) <= eps) rel.pi = 0.0;
    if (std::abs(rel.rho) <= eps) rel.rho = 0.0;
    if (std::abs(rel.sigma) <= eps) rel.sigma = 0.0;
    if (rel.identically_zero()) return std::nullopt;
    return rel;
}

std::string_view branch_name(Branch b) {
    switch (b) {
    case Branch::flat: return "flat";
    case Branch::not_satisfied: return "not_satisfied";
    case Branch::qphi_commute: return "qphi_commute";
    case Branch::lemma1: return "lemma1";
    case Branch::vacuous: return "vacuous";
    case Branch::sasakian: return "sasakian";
    case Branch::off_relation: return "off_relation";
    }
    return "?";
}

double relative_spread(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double scale = std::max({1.0, std::abs(*lo), std::abs(*hi)});
    return (*hi - *lo) / scale;
}

ClassificationVerdict dichotomy_check(const std::vector<ModelPoint>& path, const PresetSpec& preset, Condition c,
                                      double spread_tol) {
    if (path.empty()) throw std::invalid_argument("dichotomy check needs at least one point");
    constexpr double zero_tol = 1e-9;

    ClassificationVerdict v;
    std::vector<double> kappas, mus;
    bool flat = true;
    for (const auto& mp : path) {
        kappas.push_back(mp.kappa);
        mus.push_back(mp.mu);
        flat = flat && std::abs(mp.kappa) <= zero_tol && std::abs(mp.mu) <= zero_tol;
    }
    v.kmu_constant = relative_spread(kappas) <= spread_tol && relative_spread(mus) <= spread_tol;

    if (flat) {
        v.branch = Branch::flat;
        v.text = "flat: every condition holds";
        return v;
    }
    const auto rel = printed_relation(c, preset);
    if (!rel) {
        v.branch = Branch::vacuous;
        v.text = "the scalar condition vanishes identically for this preset";
        return v;
    }

    bool any_on_line = false;
    for (const auto& mp : path) {
        const bool mu_zero = std::abs(mp.mu) <= zero_tol;
        const double scale = std::max({1.0, std::abs(rel->pi), std::abs(rel->rho), std::abs(rel->sigma)}) *
                             std::max({1.0, std::abs(mp.kappa), std::abs(mp.mu)});
        const bool on_line = std::abs(rel->pi * mp.kappa + rel->rho * mp.mu - rel->sigma) <= zero_tol * scale;
        if (!mu_zero && !on_line) {
            v.branch = Branch::not_satisfied;
            v.text = "condition not satisfied: mu is neither 0 nor on the linear relation";
            return v;
        }
        any_on_line = any_on_line || !mu_zero;
    }
    if (!any_on_line) {
        v.branch = Branch::qphi_commute;
        v.text = "mu = 0, so Q commutes with phi";
        return v;
    }
    v.branch = Branch::lemma1;
    v.contradiction = !v.kmu_constant;
    v.text = v.contradiction ? "linear relation between kappa and mu with nonconstant kappa, mu (contradicts Lemma 1)"
                             : "linear relation between kappa and mu: kappa, mu constant (Lemma 1)";
    return v;
}

const std::vector<GClass>& g_classes() {
    static const std::vector<GClass> all{
        {"G1", PresetName::riemann, Condition::wh},     {"G2", PresetName::conformal, Condition::wh},
        {"G3", PresetName::concircular, Condition::wh}, {"G4", PresetName::conharmonic, Condition::wh},
        {"G5", PresetName::riemann, Condition::wr},     {"G6", PresetName::conformal, Condition::wr},
        {"G7", PresetName::concircular, Condition::wr}, {"G8", PresetName::conharmonic, Condition::wr},
    };
    return all;
}

double g_class_traced(const GClass& gc, const ModelPoint& mp) {
    const CurvatureContext ctx = model_curvature(mp);
    const TensorValue w = w_tilde(ctx, preset_coefficients(gc.acting, 1, ctx.scalar));
    return traced_slice(gc.condition, ctx, w);
}

double closed_form_discrepancy(const ModelPoint& mp) {
    const CurvatureContext ctx = model_curvature(mp);
    return max_abs_diff(w_tilde(ctx, mp.coefficients()),
                        w_tilde_kmu_closed_form(ctx, mp.coefficients(), mp.kappa, mp.mu));
}

SliceResiduals slice_residuals(const ModelPoint& mp) {
    const CurvatureContext ctx = model_curvature(mp);
    const ModelFrame f = model_frame(mp);
    const double k = mp.kappa, m = mp.mu, a = mp.alpha, b = mp.beta, g = mp.gamma;
    const TensorValue w = w_tilde(ctx, mp.coefficients());
    const TensorValue hc = w_tilde(ctx, preset_coefficients(PresetName::conharmonic, 1, ctx.scalar));
    const Mat3 gh = f.g * f.h;

    // T(ξ,V)Z as a vector, ξ contracted into the first lower slot
    auto slice = [&](const TensorValue& t, int v, const Vec3& z) {
        Vec3 out = Vec3::Zero();
        for (int l = 0; l < 3; ++l)
            for (int x = 0; x < 3; ++x)
                for (int c = 0; c < 3; ++c) out(l) += t(l, x, v, c) * f.xi(x) * z(c);
        return out;
    };

    SliceResiduals r;
    const double c1 = -(a + b + 1) * m - k + g;
    for (int v = 0; v < 3; ++v) {
        const Vec3 ev = Vec3::Unit(v);
        const Vec3 hv = f.h * ev;
        const double eta_v = f.eta.dot(ev);
        for (int zi = 0; zi < 3; ++zi) {
            const Vec3 ez = Vec3::Unit(zi);
            const double gvz = ev.dot(f.g * ez);
            const double eta_z = f.eta.dot(ez);
            const Vec3 printed = c1 * (gvz * f.xi - eta_z * ev) + (a + 1) * m * ez.dot(gh * ev) * f.xi -
                                 (b + 1) * m * eta_z * hv +
                                 (a + 1) * (2 * k + m) * (eta_v * eta_z * f.xi - eta_z * ev) +
                                 (b + 1) * (2 * k + m) * (gvz - eta_z * eta_v) * f.xi;
            r.w_xi_v_z = std::max(r.w_xi_v_z, (slice(w, v, ez) - printed).cwiseAbs().maxCoeff());
            const Vec3 h_printed = (m - k) * (gvz * f.xi - eta_z * ev);
            r.h_xi_v_z = std::max(r.h_xi_v_z, (slice(hc, v, ez) - h_printed).cwiseAbs().maxCoeff());
        }
        const Vec3 printed_xi = ((2 * a + 1) * k - b * m + g) * (eta_v * f.xi - ev) - (b + 1) * m * hv;
        r.w_xi_v_xi = std::max(r.w_xi_v_xi, (slice(w, v, f.xi) - printed_xi).cwiseAbs().maxCoeff());
    }
    return r;
}

bool ConditionRow::passed(double fit_tol) const {
    return fit.c != 0.0 && fit.residual < fit_tol && evaluation_residual < fit_tol && zeros.agrees();
}

ModelSuiteReport run_model_suite(std::size_t draws, std::uint64_t seed) {
    ModelSuiteReport rep;
    rep.draws = draws;
    rep.seed = seed;
    const auto points = draw_model_points(draws, seed);

    for (Condition c : all_conditions()) {
        ConditionRow row;
        row.condition = c;
        row.fit = frozen_fit(c);
        double worst = 0.0, scale = 0.0;
        for (const auto& mp : points) {
            const ScalarPair p = scalar_condition(c, mp);
            worst = std::max(worst, std::abs(p.lhs - p.rhs));
            scale = std::max(scale, std::abs(p.lhs));
        }
        row.evaluation_residual = scale > 0.0 ? worst / scale : (worst > 0.0 ? INFINITY : 0.0);
        row.zeros = compare_zero_sets(c, points);
        rep.conditions.push_back(row);
    }

    for (const auto& mp : points) {
        rep.closed_form_max = std::max(rep.closed_form_max, closed_form_discrepancy(mp));
        const SliceResiduals s = slice_residuals(mp);
        rep.slices.w_xi_v_z = std::max(rep.slices.w_xi_v_z, s.w_xi_v_z);
        rep.slices.w_xi_v_xi = std::max(rep.slices.w_xi_v_xi, s.w_xi_v_xi);
        rep.slices.h_xi_v_z = std::max(rep.slices.h_xi_v_z, s.h_xi_v_z);
    }

    for (const auto& gc : g_classes()) {
        GClassRow row;
        row.label = gc.label;
        for (const auto& mp : points) {
            const double via_zoo = g_class_traced(gc, mp);
            const Coefficients cf = preset_coefficients(gc.acting, 1, 2 * (mp.kappa - mp.mu));
            ModelPoint q = mp;
            q.alpha = cf.alpha;
            q.beta = cf.beta;
            q.gamma = cf.gamma;
            const double via_model = traced_condition(gc.condition, q);
            row.route_residual =
                std::max(row.route_residual, std::abs(via_zoo - via_model) / std::max(1.0, std::abs(via_model)));
            const double target = printed_target(gc.condition, q);
            const double tol = 1e-10 * std::max({1.0, std::abs(via_model), std::abs(target)});
            if ((std::abs(via_model) <= tol) != (std::abs(target) <= tol)) ++row.printed_mismatches;

            // move onto the printed relation πκ + ρμ = σ and require the traced value to vanish there
            const auto rel = printed_relation(gc.condition, preset_spec(gc.acting));
            if (!rel || rel->rho == 0.0) continue;
            ModelPoint on = mp;
            on.mu = (rel->sigma - rel->pi * mp.kappa) / rel->rho;
            const Coefficients co = preset_coefficients(gc.acting, 1, 2 * (on.kappa - on.mu));
            on.alpha = co.alpha;
            on.beta = co.beta;
            on.gamma = co.gamma;
            const double traced_on = traced_condition(gc.condition, on);
            if (std::abs(traced_on) > 1e-10 * std::max(1.0, std::abs(via_model))) ++row.printed_mismatches;
        }
        rep.g_classes.push_back(row);
    }
    return rep;
}

} // namespace kmu
