#include "kmu/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int exit_pass = 0;
constexpr int exit_check_failure = 1;
constexpr int exit_input_error = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplingArgs {
    std::size_t points = kmu::default_sample_count;
    std::string seed = "0x5EED";

    kmu::RunOptions options() const {
        kmu::RunOptions o;
        o.points = points;
        try {
            std::size_t used = 0;
            o.seed = std::stoull(seed, &used, 0);
            if (used != seed.size()) throw std::invalid_argument(seed);
        } catch (const std::exception&) {
            throw InputError("invalid seed '" + seed + "'");
        }
        return o;
    }
};

void add_sampling(CLI::App* cmd, SamplingArgs& s) {
    cmd->add_option("--points", s.points, "number of sample points")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", s.seed, "sampling seed (decimal or 0x hex)");
}

// Everything that can go wrong with the input surfaces here, before any check runs.
kmu::ManifoldManifest load_checked(const std::string& path, const kmu::RunOptions& opt) {
    try {
        kmu::ManifoldManifest mf = kmu::read_manifest(path);
        const kmu::ContactManifold m = kmu::build_manifold(mf);
        (void)kmu::sample_points(m.chart, opt.points, opt.seed);
        return mf;
    } catch (const kmu::ManifestError& e) {
        throw InputError(e.what());
    } catch (const kmu::DomainValidationError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_out(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

int run_check(const std::string& path, const SamplingArgs& s, std::optional<double> tol) {
    const kmu::RunOptions base = s.options();
    kmu::ManifoldManifest mf = load_checked(path, base);
    if (tol) mf.tol.algebraic = *tol;
    kmu::RunOptions opt = base;
    opt.classification = false;
    const kmu::EntryReport rep = kmu::run_entry(mf, opt);
    std::fputs(kmu::to_text(rep).c_str(), stdout);
    return rep.passed() ? exit_pass : exit_check_failure;
}

int run_classify(const std::string& path, const SamplingArgs& s, const std::string& preset,
                 const std::vector<double>& abc, const std::string& condition, const std::string& format) {
    const auto cond = kmu::parse_condition(condition);
    if (!cond) throw InputError("unknown condition '" + condition + "' (expected wr, wh or ws)");
    kmu::PresetSpec spec;
    if (!preset.empty()) {
        const auto name = kmu::parse_preset_name(preset);
        if (!name) throw InputError("unknown preset '" + preset + "'");
        spec = kmu::preset_spec(*name);
    } else {
        if (abc.size() != 3) throw InputError("--abc takes exactly three values alpha,beta,gamma");
        spec = kmu::PresetSpec::explicit_abc(abc[0], abc[1], abc[2]);
    }
    const kmu::RunOptions opt = s.options();
    const kmu::ManifoldManifest mf = load_checked(path, opt);
    const kmu::ContactManifold m = kmu::build_manifold(mf);
    const auto points = kmu::sample_points(m.chart, opt.points, opt.seed);
    const kmu::ClassificationReport rep = kmu::classify_manifold(m, spec, *cond, points);
    if (format == "json")
        std::fputs(kmu::to_json(rep).c_str(), stdout);
    else
        std::fputs(fmt::format("{}: {}", rep.manifold, kmu::to_text(rep)).c_str(), stdout);
    return rep.certified && rep.consistent ? exit_pass : exit_check_failure;
}

int run_model(std::size_t draws, const SamplingArgs& s) {
    const kmu::ModelSuiteReport r = kmu::run_model_suite(draws, s.options().seed);
    bool ok = true;
    std::string out = fmt::format("algebraic model: {} draws, seed {:#x}\n", r.draws, r.seed);
    for (const auto& c : r.conditions) {
        const bool pass = c.passed();
        ok = ok && pass;
        out += fmt::format(
            "  {:<4} {}  c = {:.12g}  fit residual {:.3e}  evaluation residual {:.3e}  zero sets: "
            "target->traced {}/{}, traced->target {}/{}, generic {}/{} mismatches\n",
            pass ? "ok" : "FAIL", kmu::condition_name(c.condition), c.fit.c, c.fit.residual, c.evaluation_residual,
            c.zeros.target_zero_mismatches, c.zeros.target_zero_cases, c.zeros.traced_zero_mismatches,
            c.zeros.traced_zero_cases, c.zeros.generic_mismatches, c.zeros.generic_cases);
    }
    const bool cf = r.closed_form_max < 1e-12;
    const bool sl = r.slices.w_xi_v_z < 1e-9 && r.slices.w_xi_v_xi < 1e-9 && r.slices.h_xi_v_z < 1e-9;
    ok = ok && cf && sl;
    out += fmt::format("  {:<4} closed form vs generic W: {:.3e}\n", cf ? "ok" : "FAIL", r.closed_form_max);
    out += fmt::format("  {:<4} xi-slices: W(xi,V)Z {:.3e}, W(xi,V)xi {:.3e}, H(xi,V)Z {:.3e}\n", sl ? "ok" : "FAIL",
                       r.slices.w_xi_v_z, r.slices.w_xi_v_xi, r.slices.h_xi_v_z);
    for (const auto& g : r.g_classes) {
        const bool pass = g.route_residual < 1e-9;
        ok = ok && pass;
        out += fmt::format("  {:<4} {} route residual {:.3e}, printed-target mismatches {}\n", pass ? "ok" : "FAIL",
                           g.label, g.route_residual, g.printed_mismatches);
    }
    out += fmt::format("model: {}\n", ok ? "PASS" : "FAIL");
    std::fputs(out.c_str(), stdout);
    return ok ? exit_pass : exit_check_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for generalized (kappa,mu) contact metric 3-manifolds", "kmucheck"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kmu::engine_version));

    SamplingArgs sampling;
    std::string manifest;

    auto* check = app.add_subcommand("check", "contact axioms and structure identities for one manifest");
    check->add_option("manifest", manifest, "manifest file or builtin:NAME")->required();
    add_sampling(check, sampling);
    std::optional<double> tol;
    check->add_option("--tol", tol, "tolerance for algebraic checks")->check(CLI::PositiveNumber);

    auto* classify = app.add_subcommand("classify", "classify one manifest under one preset and condition");
    classify->add_option("manifest", manifest, "manifest file or builtin:NAME")->required();
    std::string preset, condition, format = "text";
    std::vector<double> abc;
    auto* preset_opt = classify->add_option("--preset", preset, "preset name");
    auto* abc_opt = classify->add_option("--abc", abc, "explicit alpha,beta,gamma")->delimiter(',')->expected(3);
    preset_opt->excludes(abc_opt);
    classify->add_option("--condition", condition, "wr, wh or ws")->required();
    classify->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    add_sampling(classify, sampling);

    auto* gallery = app.add_subcommand("gallery", "run the built-in gallery");
    std::string filter;
    gallery->add_option("--filter", filter, "only the entry with this name");
    add_sampling(gallery, sampling);

    auto* model = app.add_subcommand("model", "algebraic model suites");
    std::size_t draws = 1000;
    model->add_option("--draws", draws, "number of seeded draws")->check(CLI::PositiveNumber);
    model->add_option("--seed", sampling.seed, "draw seed (decimal or 0x hex)");

    auto* report = app.add_subcommand("report", "full gallery report");
    std::string output;
    report->add_option("--format", format, "json or text")->check(CLI::IsMember({"text", "json"}));
    report->add_option("--filter", filter, "only the entry with this name");
    report->add_option("--output,-o", output, "write to a file instead of stdout");
    add_sampling(report, sampling);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_input_error;
    }

    try {
        if (*check) return run_check(manifest, sampling, tol);
        if (*classify) {
            if (preset.empty() && abc.empty()) throw InputError("classify needs --preset or --abc");
            return run_classify(manifest, sampling, preset, abc, condition, format);
        }
        if (*model) return run_model(draws, sampling);
        const std::optional<std::string> f = filter.empty() ? std::nullopt : std::optional<std::string>(filter);
        const kmu::RunOptions opt = sampling.options();
        kmu::GalleryReport rep;
        try {
            rep = kmu::run_gallery(f, opt);
        } catch (const kmu::ManifestError& e) {
            throw InputError(e.what());
        }
        if (*gallery) {
            std::fputs(kmu::to_text(rep).c_str(), stdout);
        } else {
            write_out(format == "json" ? kmu::to_json(rep) : kmu::to_text(rep), output);
        }
        return rep.passed() ? exit_pass : exit_check_failure;
    } catch (const InputError& e) {
        std::cerr << "kmucheck: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        std::cerr << "kmucheck: " << e.what() << "\n";
        return exit_check_failure;
    }
}
