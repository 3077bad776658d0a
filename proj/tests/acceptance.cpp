#include "kmu/harness.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

using namespace kmu;

namespace {

constexpr std::size_t sample_count = 50;
constexpr double axiom_tol = 1e-6;
constexpr double fd_tol = 1e-4;
constexpr double axiom_seconds = 10.0;
constexpr double conformal_max = 1e-6;
constexpr double reconstruction_tol = 1e-5;
constexpr double identity_tol = 1e-6;
constexpr std::size_t model_draws = 1000;
constexpr double fit_tol = 1e-9;
constexpr double model_seconds = 5.0;
constexpr std::size_t closed_form_draws = 100;
constexpr double closed_form_tol = 1e-12;
constexpr double slice_tol = 1e-9;
constexpr double matrix_seconds = 60.0;

struct Outcome {
    bool passed = true;
    std::vector<std::string> details;

    void require(bool ok, std::string what) {
        if (!ok) {
            passed = false;
            details.push_back(std::move(what));
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Entry {
    std::string name;
    ContactManifold m;
    std::vector<Point> points;
};

std::vector<Entry> load_gallery() {
    std::vector<Entry> out;
    for (const auto& g : builtin_gallery()) {
        ContactManifold m = load_manifest("builtin:" + std::string(g.name));
        auto pts = sample_points(m.chart, sample_count);
        out.push_back({std::string(g.name), std::move(m), std::move(pts)});
    }
    return out;
}

void require_checks(Outcome& o, const std::string& entry, const std::vector<CheckResult>& checks,
                    const std::vector<std::pair<std::string, double>>& wanted) {
    for (const auto& [name, tol] : wanted) {
        const CheckResult* c = find_check(checks, name);
        if (!c) {
            o.require(false, fmt::format("{}: {} missing", entry, name));
            continue;
        }
        o.require(c->max_residual < tol, fmt::format("{}: {} = {:.3g} (tol {:.0e})", entry, name, c->max_residual, tol));
    }
}

Outcome axiom_suite(const std::vector<Entry>& gallery) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& e : gallery) {
        const AxiomReport r = check_axioms(e.m, e.points, axiom_tol, fd_tol);
        for (const auto& c : r.checks)
            o.require(c.passed && c.max_residual < c.tolerance && c.tolerance <= fd_tol,
                      fmt::format("{}: {} = {:.3g}", e.name, c.name, c.max_residual));
    }
    const double t = seconds_since(t0);
    o.details.push_back(fmt::format("{:.2f} s", t));
    o.require(t < axiom_seconds, "runtime");
    return o;
}

Outcome conformal_vanishing(const std::vector<Entry>& gallery) {
    Outcome o;
    double worst = 0.0;
    for (const auto& e : gallery)
        for (const auto& p : e.points) {
            const CurvatureContext ctx = make_context(curvature(e.m.metric, p));
            const double v = w_tilde(ctx, preset_coefficients(PresetName::conformal, 1, ctx.scalar)).max_abs();
            worst = std::max(worst, v);
            if (v >= conformal_max) o.require(false, fmt::format("{}: |C| = {:.3g}", e.name, v));
        }
    o.details.insert(o.details.begin(), fmt::format("max |C| = {:.3g}", worst));
    return o;
}

bool is_generalized(const Entry& e) {
    for (const auto& p : e.points) {
        const KappaMu km = extract_kappa_mu(e.m, p, e.m.tol.certificate);
        if (km.kind != KappaMu::Kind::generalized || !km.certified) return false;
    }
    return true;
}

Outcome closed_form_reconstruction(const std::vector<Entry>& gallery) {
    Outcome o;
    for (const auto& e : gallery) {
        if (!is_generalized(e)) continue;
        const IdentityReport r = verify_structure_identities(e.m, e.points, fd_tol, identity_tol, reconstruction_tol);
        require_checks(o, e.name, r.checks,
                       {{"riemann_reconstruction", reconstruction_tol},
                        {"ricci_reconstruction", reconstruction_tol},
                        {"scalar_curvature", identity_tol},
                        {"ricci_xi", identity_tol}});
    }
    return o;
}

Outcome structure_identities(const std::vector<Entry>& gallery) {
    Outcome o;
    for (const auto& e : gallery) {
        const IdentityReport r = verify_structure_identities(e.m, e.points, fd_tol, identity_tol, reconstruction_tol);
        require_checks(o, e.name, r.checks,
                       {{"h_squared", identity_tol},
                        {"ricci_commutator", identity_tol},
                        {"xi_kappa", fd_tol},
                        {"xi_r", fd_tol},
                        {"h_grad_mu", fd_tol},
                        {"nabla_h", fd_tol},
                        {"nabla_phi", fd_tol}});
    }
    return o;
}

Outcome scalar_collapse() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const ModelSuiteReport r = run_model_suite(model_draws);
    const double t = seconds_since(t0);
    for (const auto& row : r.conditions) {
        const std::string_view n = condition_name(row.condition);
        o.details.push_back(fmt::format("{}: c = {:.6g}, fit residual {:.3g}, eval residual {:.3g}", n, row.fit.c,
                                        row.fit.residual, row.evaluation_residual));
        o.require(row.fit.c != 0.0 && std::isfinite(row.fit.c), fmt::format("{}: zero constant", n));
        o.require(row.fit.residual < fit_tol, fmt::format("{}: fit residual", n));
        o.require(row.evaluation_residual < fit_tol, fmt::format("{}: evaluation residual", n));
        o.require(row.zeros.agrees(),
                  fmt::format("{}: zero sets differ ({} + {} + {} mismatches)", n, row.zeros.target_zero_mismatches,
                              row.zeros.traced_zero_mismatches, row.zeros.generic_mismatches));
    }
    o.details.push_back(fmt::format("{:.2f} s", t));
    o.require(t < model_seconds, "runtime");
    return o;
}

Outcome closed_form_equivalence() {
    Outcome o;
    double closed = 0.0;
    SliceResiduals worst;
    for (const ModelPoint& mp : draw_model_points(closed_form_draws, 0x5EED)) {
        closed = std::max(closed, closed_form_discrepancy(mp));
        const SliceResiduals s = slice_residuals(mp);
        worst.w_xi_v_z = std::max(worst.w_xi_v_z, s.w_xi_v_z);
        worst.w_xi_v_xi = std::max(worst.w_xi_v_xi, s.w_xi_v_xi);
        worst.h_xi_v_z = std::max(worst.h_xi_v_z, s.h_xi_v_z);
    }
    o.details.push_back(fmt::format("closed form {:.3g}, slices {:.3g} / {:.3g} / {:.3g}", closed, worst.w_xi_v_z,
                                    worst.w_xi_v_xi, worst.h_xi_v_z));
    o.require(closed < closed_form_tol, "closed form");
    o.require(std::max({worst.w_xi_v_z, worst.w_xi_v_xi, worst.h_xi_v_z}) < slice_tol, "slices");
    return o;
}

Outcome consistency_matrix(const GalleryReport& report, double seconds) {
    Outcome o;
    for (const auto& e : report.entries) {
        o.require(e.error.empty(), fmt::format("{}: {}", e.name, e.error));
        for (const auto& row : e.matrix) {
            o.require(row.consistent, fmt::format("{}: {} x {} inconsistent ({})", e.name, row.preset,
                                                  condition_name(row.condition), row.verdict));
            if (e.name == "flat_trig")
                o.require(row.satisfied, fmt::format("flat_trig: {} x {} not satisfied", row.preset,
                                                     condition_name(row.condition)));
            if (e.name == "generalized_rational" && row.satisfied)
                o.require(false, fmt::format("generalized_rational: {} x {} satisfied ({})", row.preset,
                                             condition_name(row.condition), branch_name(row.branch)));
        }
    }
    o.details.push_back(fmt::format("{:.2f} s", seconds));
    o.require(seconds < matrix_seconds, "runtime");
    return o;
}

void print(int index, const char* title, const Outcome& o) {
    fmt::print("[{}] criterion {}: {}\n", o.passed ? "PASS" : "FAIL", index, title);
    for (const auto& d : o.details) fmt::print("       {}\n", d);
}

} // namespace

int main() {
    const std::vector<Entry> gallery = load_gallery();

    RunOptions opt;
    opt.points = sample_count;
    const auto t0 = std::chrono::steady_clock::now();
    const GalleryReport first = run_gallery(std::nullopt, opt);
    const double matrix_time = seconds_since(t0);
    const std::string json_a = to_json(first);
    const std::string json_b = to_json(run_gallery(std::nullopt, opt));

    Outcome determinism;
    determinism.require(json_a == json_b, "reports differ");
    determinism.details.push_back(fmt::format("{} bytes", json_a.size()));

    const std::vector<std::pair<const char*, Outcome>> results = {
        {"axiom suite", axiom_suite(gallery)},
        {"conformal vanishing", conformal_vanishing(gallery)},
        {"closed-form reconstruction", closed_form_reconstruction(gallery)},
        {"structure identities", structure_identities(gallery)},
        {"scalar collapse identities", scalar_collapse()},
        {"closed-form W equivalence", closed_form_equivalence()},
        {"consistency matrix", consistency_matrix(first, matrix_time)},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        print(static_cast<int>(i + 1), results[i].first, results[i].second);
        if (!results[i].second.passed) ++failed;
    }
    fmt::print("{} of {} criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}
