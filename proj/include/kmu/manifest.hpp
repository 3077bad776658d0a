#pragma once

#include "kmu/contact.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kmu {

enum class Property { sasakian, flat, generalized_kmu, kmu_constant, kmu_nonconstant };

std::string_view property_name(Property p);
std::optional<Property> parse_property(std::string_view name);

/// Raised for anything wrong with manifest input: unreadable file, bad YAML,
/// missing field, unparsable expression, degenerate domain.
class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ManifoldManifest {
    std::string name;
    std::string source;
    std::array<std::string, 9> metric;  // row-major; lower triangle mirrors the upper unless given
    bool metric_full = false;
    std::array<std::string, 3> eta;
    std::array<Interval, 3> box{};
    std::vector<std::string> exclude;
    std::vector<Property> expected;
    std::optional<double> kappa;
    std::optional<double> mu;
    ToleranceProfile tol;

    bool expects(Property p) const;
};

ManifoldManifest parse_manifest(std::string_view yaml_text, const std::string& source);

/// `path` may be a file or `builtin:NAME` for a gallery entry.
ManifoldManifest read_manifest(const std::string& path);

ContactManifold build_manifold(const ManifoldManifest& m);

ContactManifold load_manifest(const std::string& path);

struct GallerySource {
    std::string_view name;
    std::string_view text;
};

/// Gallery manifests compiled into the binary, sorted by name.
const std::vector<GallerySource>& builtin_gallery();

} // namespace kmu
