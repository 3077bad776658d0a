#pragma once

#include "kmu/algmodel.hpp"
#include "kmu/manifest.hpp"
#include "kmu/sampling.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kmu {

inline constexpr std::string_view engine_version = "kmu 1.0.0";
inline constexpr int report_schema = 1;

inline constexpr double satisfied_rel_tol = 1e-5;
inline constexpr double constancy_spread_tol = 1e-5;
inline constexpr double nonconstancy_witness = 1e-3;
inline constexpr double conformal_tol = 1e-6;
inline constexpr double flat_tol = 1e-8;

struct ClassificationReport {
    std::string manifold;
    std::string preset;
    Coefficients coefficients_at_first_point;
    Condition condition = Condition::wr;
    std::size_t samples = 0;

    bool certified = true;
    bool sasakian = false;
    bool satisfied = false;
    double max_residual = 0.0;
    double max_threshold_ratio = 0.0;  // max over points of residual / threshold
    std::optional<Point> worst_point;

    double kappa_min = 0.0, kappa_max = 0.0;
    double mu_min = 0.0, mu_max = 0.0;
    bool kmu_constant = true;

    Branch branch = Branch::not_satisfied;
    bool printed_condition_holds = false;  // the printed scalar condition holds at every sample
    bool consistent = true;
    std::string verdict;
};

/// Frame, (κ, μ) certificate and curvature at one sample point.
struct SampleData {
    ContactFrame frame;
    KappaMu km;
    CurvatureContext ctx;
};

std::vector<SampleData> prepare_samples(const ContactManifold& m, const std::vector<Point>& points);

/// Residual of W̃·T at one point (T = R, the conharmonic tensor, or S) and the
/// threshold it is judged against: 1e-5 · max|W̃| · max|T|, each factor floored
/// at 1e-8 · max(1, max|R|) so a tensor that vanishes analytically is judged
/// against the size of the curvature rather than its own rounding noise.
struct DerivationResidual {
    double residual = 0.0;
    double threshold = 0.0;
};
DerivationResidual derivation_residual(const CurvatureContext& ctx, const Coefficients& c, Condition cond);

ClassificationReport classify_samples(const std::string& name, const std::vector<SampleData>& samples,
                                      const PresetSpec& preset, Condition cond);

ClassificationReport classify_manifold(const ContactManifold& m, const PresetSpec& preset, Condition cond,
                                       const std::vector<Point>& samples);

struct RunOptions {
    std::size_t points = default_sample_count;
    std::uint64_t seed = default_seed;
    bool classification = true;
};

struct EntryReport {
    std::string name;
    std::string source;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    std::vector<ClassificationReport> matrix;
    double kappa_min = std::numeric_limits<double>::quiet_NaN();
    double kappa_max = std::numeric_limits<double>::quiet_NaN();
    double mu_min = std::numeric_limits<double>::quiet_NaN();
    double mu_max = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // set when the entry could not be evaluated at all

    bool checks_passed() const;
    bool matrix_consistent() const;
    bool passed() const { return error.empty() && checks_passed() && matrix_consistent(); }
};

/// Axioms, structure identities, conformal vanishing, the declared properties
/// and (optionally) the 9 presets × 3 conditions classification matrix.
EntryReport run_entry(const ManifoldManifest& manifest, const RunOptions& opt);

struct GalleryReport {
    std::uint64_t seed = 0;
    std::size_t points = 0;
    std::vector<EntryReport> entries;
    bool passed() const;
};

/// Every built-in manifest, or only `filter`; an unknown filter throws ManifestError.
GalleryReport run_gallery(const std::optional<std::string>& filter, const RunOptions& opt);

std::string to_json(const GalleryReport& r);
std::string to_json(const ClassificationReport& r);
std::string to_text(const GalleryReport& r);
std::string to_text(const EntryReport& r);
std::string to_text(const ClassificationReport& r);

} // namespace kmu
