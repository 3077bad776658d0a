#include "kmu/harness.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kmu {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Range {
    double lo = nan;
    double hi = nan;
    void add(double v) {
        if (std::isnan(lo) || v < lo) lo = v;
        if (std::isnan(hi) || v > hi) hi = v;
    }
};

double max_abs_matrix(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

TensorValue inner_tensor(const CurvatureContext& ctx, Condition cond) {
    switch (cond) {
    case Condition::wr: return ctx.riemann;
    case Condition::wh: return w_tilde(ctx, preset_coefficients(PresetName::conharmonic, 1, ctx.scalar));
    case Condition::ws: return ctx.ricci;
    }
    return ctx.riemann;
}

} // namespace

std::vector<SampleData> prepare_samples(const ContactManifold& m, const std::vector<Point>& points) {
    std::vector<SampleData> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        SampleData s;
        s.frame = contact_frame(m, p);
        s.km = extract_kappa_mu(s.frame, m.tol.certificate);
        s.ctx = make_context(s.frame);
        out.push_back(std::move(s));
    }
    return out;
}

DerivationResidual derivation_residual(const CurvatureContext& ctx, const Coefficients& c, Condition cond) {
    const TensorValue w = w_tilde(ctx, c);
    const TensorValue t = inner_tensor(ctx, cond);
    const TensorValue d = cond == Condition::ws ? derive_on_ricci(w, t) : derive_on_curvature(w, t, ctx.g);
    const double floor = 1e-8 * std::max(1.0, ctx.riemann.max_abs());
    DerivationResidual r;
    r.residual = d.max_abs();
    r.threshold = satisfied_rel_tol * std::max(w.max_abs(), floor) * std::max(t.max_abs(), floor);
    return r;
}

ClassificationReport classify_samples(const std::string& name, const std::vector<SampleData>& samples,
                                      const PresetSpec& preset, Condition cond) {
    if (samples.empty()) throw std::invalid_argument("classification needs at least one sample");
    ClassificationReport rep;
    rep.manifold = name;
    rep.preset = preset.label;
    rep.condition = cond;
    rep.samples = samples.size();
    rep.coefficients_at_first_point = preset.at(samples.front().ctx.scalar);

    Range kr, mr;
    std::vector<ModelPoint> path;
    std::vector<double> kappas, mus;
    bool satisfied = true;
    for (const auto& s : samples) {
        if (s.km.kind == KappaMu::Kind::sasakian_like) {
            rep.sasakian = true;
        } else if (!s.km.certified) {
            if (rep.certified) rep.worst_point = s.frame.point;
            rep.certified = false;
        } else {
            kr.add(s.km.kappa);
            mr.add(s.km.mu);
            kappas.push_back(s.km.kappa);
            mus.push_back(s.km.mu);
            ModelPoint mp;
            mp.kappa = s.km.kappa;
            mp.mu = s.km.mu;
            path.push_back(mp);
        }
        const DerivationResidual d = derivation_residual(s.ctx, preset.at(s.ctx.scalar), cond);
        const double ratio = d.threshold > 0.0 ? d.residual / d.threshold : (d.residual > 0.0 ? INFINITY : 0.0);
        if (std::isnan(ratio) || ratio > 1.0) satisfied = false;
        const double r = std::isnan(ratio) ? INFINITY : ratio;
        if (rep.certified && (!rep.worst_point || r > rep.max_threshold_ratio)) {
            rep.max_threshold_ratio = r;
            rep.worst_point = s.frame.point;
        }
        rep.max_residual = std::max(rep.max_residual, std::isnan(d.residual) ? INFINITY : d.residual);
    }
    rep.satisfied = satisfied;
    rep.kappa_min = kr.lo;
    rep.kappa_max = kr.hi;
    rep.mu_min = mr.lo;
    rep.mu_max = mr.hi;
    rep.kmu_constant =
        relative_spread(kappas) <= constancy_spread_tol && relative_spread(mus) <= constancy_spread_tol;

    const std::string head = satisfied ? "condition satisfied" : "condition not satisfied";
    if (!rep.certified) {
        rep.branch = Branch::not_satisfied;
        rep.consistent = true;
        rep.verdict = "not a generalized (kappa,mu) manifold: certificate failed";
        return rep;
    }
    if (rep.sasakian) {
        rep.branch = Branch::sasakian;
        rep.consistent = true;
        rep.verdict = head + "; Sasakian, outside the generalized (kappa,mu) theorems";
        return rep;
    }

    const ClassificationVerdict printed = dichotomy_check(path, preset, cond, constancy_spread_tol);
    rep.printed_condition_holds = printed.branch != Branch::not_satisfied;
    if (!satisfied) {
        rep.branch = Branch::not_satisfied;
        rep.consistent = true;
        rep.verdict = head;
        return rep;
    }
    rep.branch = printed.branch == Branch::not_satisfied ? Branch::off_relation : printed.branch;
    // forbidden: satisfied with nonconstant kappa, mu off both branches, or a Lemma-1 contradiction
    rep.consistent = !printed.contradiction && !(rep.branch == Branch::off_relation && !rep.kmu_constant);
    if (printed.branch != Branch::not_satisfied)
        rep.verdict = head + "; " + printed.text;
    else if (rep.kmu_constant)
        rep.verdict = head + "; kappa, mu constant, though mu is neither 0 nor on the printed relation";
    else
        rep.verdict = head + "; nonconstant kappa, mu with mu neither 0 nor on the printed relation";
    return rep;
}

ClassificationReport classify_manifold(const ContactManifold& m, const PresetSpec& preset, Condition cond,
                                       const std::vector<Point>& samples) {
    return classify_samples(m.name, prepare_samples(m, samples), preset, cond);
}

bool EntryReport::checks_passed() const { return all_passed(checks); }

bool EntryReport::matrix_consistent() const {
    return std::all_of(matrix.begin(), matrix.end(), [](const ClassificationReport& c) { return c.consistent; });
}

bool GalleryReport::passed() const {
    return !entries.empty() &&
           std::all_of(entries.begin(), entries.end(), [](const EntryReport& e) { return e.passed(); });
}

namespace {

void expected_checks(const ManifoldManifest& mf, const std::vector<SampleData>& samples, EntryReport& rep) {
    const auto& tol = mf.tol;
    if (mf.expects(Property::sasakian)) {
        CheckAccumulator acc("expected_sasakian", sasakian_cutoff);
        for (const auto& s : samples) acc.add(max_abs_matrix(s.frame.h), s.frame.point);
        rep.checks.push_back(acc.result());
    }
    if (mf.expects(Property::flat)) {
        CheckAccumulator acc("expected_flat", flat_tol);
        for (const auto& s : samples) acc.add(s.ctx.riemann.max_abs(), s.frame.point);
        rep.checks.push_back(acc.result());
    }
    if (mf.expects(Property::generalized_kmu)) {
        CheckAccumulator acc("expected_generalized_kmu", tol.certificate);
        for (const auto& s : samples) {
            if (s.km.kind == KappaMu::Kind::sasakian_like)
                acc.fail(s.frame.point, "h vanishes: Sasakian point");
            else
                acc.add(s.km.certificate_residual, s.frame.point);
        }
        rep.checks.push_back(acc.result());
    }
    std::vector<double> kappas, mus;
    std::vector<const SampleData*> generalized;
    for (const auto& s : samples)
        if (s.km.kind == KappaMu::Kind::generalized) {
            kappas.push_back(s.km.kappa);
            mus.push_back(s.km.mu);
            generalized.push_back(&s);
        }
    if (mf.expects(Property::kmu_constant)) {
        CheckResult r;
        r.name = "expected_kmu_constant";
        r.tolerance = constancy_spread_tol;
        r.max_residual = std::max(relative_spread(kappas), relative_spread(mus));
        r.passed = !kappas.empty() && r.max_residual <= r.tolerance;
        r.note = "relative spread of kappa and mu over the samples";
        rep.checks.push_back(r);
    }
    if (mf.expects(Property::kmu_nonconstant)) {
        CheckResult r;
        r.name = "expected_kmu_nonconstant";
        r.tolerance = nonconstancy_witness;
        r.max_residual = kappas.empty() ? 0.0 : *std::max_element(kappas.begin(), kappas.end()) -
                                                   *std::min_element(kappas.begin(), kappas.end());
        r.passed = r.max_residual > r.tolerance;
        r.note = "witness: largest kappa difference must exceed the tolerance";
        rep.checks.push_back(r);
    }
    if (mf.kappa) {
        CheckAccumulator acc("expected_kappa", tol.algebraic);
        for (const auto& s : samples) acc.add(std::abs(s.km.kappa - *mf.kappa), s.frame.point);
        rep.checks.push_back(acc.result());
    }
    if (mf.mu) {
        CheckAccumulator acc("expected_mu", tol.algebraic);
        for (const auto* s : generalized) acc.add(std::abs(s->km.mu - *mf.mu), s->frame.point);
        rep.checks.push_back(acc.result());
    }
}

} // namespace

EntryReport run_entry(const ManifoldManifest& mf, const RunOptions& opt) {
    EntryReport rep;
    rep.name = mf.name;
    rep.source = mf.source;
    rep.samples = opt.points;
    rep.seed = opt.seed;
    try {
        const ContactManifold m = build_manifold(mf);
        const auto points = sample_points(m.chart, opt.points, opt.seed);

        auto ax = check_axioms(m, points, m.tol.algebraic, m.tol.finite_difference);
        rep.checks.insert(rep.checks.end(), ax.checks.begin(), ax.checks.end());
        auto id = verify_structure_identities(m, points, m.tol.finite_difference, m.tol.algebraic,
                                              m.tol.reconstruction);
        rep.checks.insert(rep.checks.end(), id.checks.begin(), id.checks.end());

        const auto samples = prepare_samples(m, points);
        CheckAccumulator conformal("conformal_vanishing", conformal_tol);
        Range kr, mr;
        for (const auto& s : samples) {
            const auto c = preset_coefficients(PresetName::conformal, 1, s.ctx.scalar);
            conformal.add(w_tilde(s.ctx, c).max_abs(), s.frame.point);
            if (s.km.kind == KappaMu::Kind::generalized) {
                kr.add(s.km.kappa);
                mr.add(s.km.mu);
            }
        }
        rep.checks.push_back(conformal.result());
        rep.kappa_min = kr.lo;
        rep.kappa_max = kr.hi;
        rep.mu_min = mr.lo;
        rep.mu_max = mr.hi;

        expected_checks(mf, samples, rep);

        if (opt.classification)
            for (Condition cond : all_conditions())
                for (PresetName p : all_presets())
                    rep.matrix.push_back(classify_samples(mf.name, samples, preset_spec(p), cond));
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return rep;
}

GalleryReport run_gallery(const std::optional<std::string>& filter, const RunOptions& opt) {
    GalleryReport rep;
    rep.seed = opt.seed;
    rep.points = opt.points;
    bool matched = false;
    for (const auto& src : builtin_gallery()) {
        if (filter && src.name != *filter) continue;
        matched = true;
        const std::string source = "builtin:" + std::string(src.name);
        ManifoldManifest mf;
        try {
            mf = parse_manifest(src.text, source);
        } catch (const std::exception& e) {
            EntryReport bad;
            bad.name = std::string(src.name);
            bad.source = source;
            bad.error = e.what();
            rep.entries.push_back(std::move(bad));
            continue;
        }
        EntryReport e = run_entry(mf, opt);
        CheckResult name_check;
        name_check.name = "name_matches_file";
        name_check.passed = mf.name == src.name;
        name_check.max_residual = name_check.passed ? 0.0 : 1.0;
        name_check.tolerance = 0.5;
        if (!name_check.passed) name_check.note = "manifest name '" + mf.name + "' differs from its file name";
        e.checks.insert(e.checks.begin(), name_check);
        rep.entries.push_back(std::move(e));
    }
    if (filter && !matched) throw ManifestError("no gallery entry named '" + *filter + "'");
    return rep;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson point_json(const std::optional<Point>& p) {
    if (!p) return nullptr;
    return ojson::array({(*p)[0], (*p)[1], (*p)[2]});
}

ojson check_json(const CheckResult& c) {
    ojson j;
    j["name"] = c.name;
    j["max_residual"] = number(c.max_residual);
    j["tolerance"] = c.tolerance;
    j["passed"] = c.passed;
    j["worst_point"] = point_json(c.worst_point);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

ojson classification_json(const ClassificationReport& c) {
    ojson j;
    j["preset"] = c.preset;
    j["condition"] = std::string(condition_name(c.condition));
    j["certified"] = c.certified;
    j["satisfied"] = c.satisfied;
    j["max_residual"] = number(c.max_residual);
    j["max_threshold_ratio"] = number(c.max_threshold_ratio);
    j["worst_point"] = point_json(c.worst_point);
    j["kmu_constant"] = c.kmu_constant;
    j["printed_condition_holds"] = c.printed_condition_holds;
    j["branch"] = std::string(branch_name(c.branch));
    j["consistent"] = c.consistent;
    j["verdict"] = c.verdict;
    return j;
}

ojson entry_json(const EntryReport& e) {
    ojson j;
    j["name"] = e.name;
    j["source"] = e.source;
    j["samples"] = e.samples;
    j["seed"] = e.seed;
    j["passed"] = e.passed();
    if (!e.error.empty()) j["error"] = e.error;
    j["kappa_range"] = ojson::array({number(e.kappa_min), number(e.kappa_max)});
    j["mu_range"] = ojson::array({number(e.mu_min), number(e.mu_max)});
    ojson checks = ojson::array();
    for (const auto& c : e.checks) checks.push_back(check_json(c));
    j["checks"] = std::move(checks);
    ojson matrix = ojson::array();
    for (const auto& c : e.matrix) matrix.push_back(classification_json(c));
    j["classification"] = std::move(matrix);
    return j;
}

std::string fmt_residual(double v) { return std::isfinite(v) ? fmt::format("{:.3e}", v) : std::string("inf"); }

std::string fmt_point(const std::optional<Point>& p) {
    if (!p) return "";
    return fmt::format(" at ({:.6g}, {:.6g}, {:.6g})", (*p)[0], (*p)[1], (*p)[2]);
}

} // namespace

std::string to_json(const GalleryReport& r) {
    ojson j;
    j["schema"] = report_schema;
    j["engine"] = std::string(engine_version);
    j["seed"] = r.seed;
    j["points"] = r.points;
    j["passed"] = r.passed();
    ojson entries = ojson::array();
    for (const auto& e : r.entries) entries.push_back(entry_json(e));
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

std::string to_json(const ClassificationReport& r) {
    ojson j;
    j["schema"] = report_schema;
    j["engine"] = std::string(engine_version);
    j["manifold"] = r.manifold;
    j["samples"] = r.samples;
    j["classification"] = classification_json(r);
    return j.dump(2) + "\n";
}

std::string to_text(const ClassificationReport& r) {
    return fmt::format("{:<14} {:<3} {:<13} ratio {:>10}  {}{}\n", r.preset, condition_name(r.condition),
                       r.consistent ? "consistent" : "INCONSISTENT", fmt_residual(r.max_threshold_ratio), r.verdict,
                       r.consistent ? "" : fmt_point(r.worst_point));
}

std::string to_text(const EntryReport& e) {
    std::string out = fmt::format("== {} ({}) {} points, seed {:#x}: {}\n", e.name, e.source, e.samples, e.seed,
                                  e.passed() ? "PASS" : "FAIL");
    if (!e.error.empty()) out += fmt::format("   error: {}\n", e.error);
    if (std::isfinite(e.kappa_min))
        out += fmt::format("   kappa in [{:.6g}, {:.6g}], mu in [{:.6g}, {:.6g}]\n", e.kappa_min, e.kappa_max, e.mu_min,
                           e.mu_max);
    for (const auto& c : e.checks) {
        out += fmt::format("   {:<4} {:<28} {:>10} < {:.0e}", c.passed ? "ok" : "FAIL", c.name,
                           fmt_residual(c.max_residual), c.tolerance);
        if (!c.passed) out += fmt_point(c.worst_point);
        if (!c.note.empty()) out += "  (" + c.note + ")";
        out += "\n";
    }
    if (!e.matrix.empty()) {
        out += "   classification:\n";
        for (const auto& c : e.matrix) out += "     " + to_text(c);
    }
    return out;
}

std::string to_text(const GalleryReport& r) {
    std::string out = fmt::format("{} report, schema {}\n", engine_version, report_schema);
    for (const auto& e : r.entries) out += to_text(e);
    out += fmt::format("gallery: {}\n", r.passed() ? "PASS" : "FAIL");
    return out;
}

} // namespace kmu
