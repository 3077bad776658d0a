#include "kmu/manifest.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace kmu {

namespace {

constexpr std::array<std::pair<std::string_view, Property>, 5> property_table = {{
    {"sasakian", Property::sasakian},
    {"flat", Property::flat},
    {"generalized_kmu", Property::generalized_kmu},
    {"kmu_constant", Property::kmu_constant},
    {"kmu_nonconstant", Property::kmu_nonconstant},
}};

constexpr std::array<std::string_view, 9> metric_keys = {"xx", "xy", "xz", "yx", "yy", "yz", "zx", "zy", "zz"};

std::string where(const std::string& source, const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    if (mark.line < 0) return source;
    return source + ":" + std::to_string(mark.line + 1);
}

YAML::Node require(const YAML::Node& parent, const char* key, const std::string& source, const std::string& path) {
    const YAML::Node n = parent[key];
    if (!n) throw ManifestError(source + ": missing field '" + path + "'");
    return n;
}

std::string scalar(const YAML::Node& n, const std::string& source, const std::string& path) {
    if (!n.IsScalar()) throw ManifestError(where(source, n) + ": field '" + path + "' must be a scalar");
    return n.as<std::string>();
}

double number(const YAML::Node& n, const std::string& source, const std::string& path) {
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        throw ManifestError(where(source, n) + ": field '" + path + "' must be a number");
    }
}

Expr parse_field(const std::string& text, const std::string& source, const std::string& path) {
    try {
        return parse_expr(text);
    } catch (const ParseError& e) {
        throw ManifestError(source + ": " + path + ": " + e.what());
    }
}

} // namespace

std::string_view property_name(Property p) {
    for (const auto& [name, value] : property_table)
        if (value == p) return name;
    return "?";
}

std::optional<Property> parse_property(std::string_view name) {
    for (const auto& [n, value] : property_table)
        if (n == name) return value;
    return std::nullopt;
}

bool ManifoldManifest::expects(Property p) const {
    for (Property q : expected)
        if (q == p) return true;
    return false;
}

ManifoldManifest parse_manifest(std::string_view yaml_text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ManifestError(source + ": " + e.what());
    }
    if (!root.IsMap()) throw ManifestError(source + ": manifest must be a mapping");

    ManifoldManifest m;
    m.source = source;
    m.name = scalar(require(root, "name", source, "name"), source, "name");

    if (const YAML::Node coords = root["coordinates"]) {
        if (!coords.IsSequence() || coords.size() != 3 || coords[0].as<std::string>() != "x" ||
            coords[1].as<std::string>() != "y" || coords[2].as<std::string>() != "z")
            throw ManifestError(where(source, coords) + ": coordinates must be [x, y, z]");
    }

    const YAML::Node metric = require(root, "metric", source, "metric");
    if (!metric.IsMap()) throw ManifestError(where(source, metric) + ": metric must be a mapping");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const std::string key(metric_keys[3 * i + j]);
            if (j >= i) {
                m.metric[3 * i + j] = scalar(require(metric, key.c_str(), source, "metric." + key), source, "metric." + key);
            } else if (const YAML::Node lower = metric[key]) {
                m.metric[3 * i + j] = scalar(lower, source, "metric." + key);
                m.metric_full = true;
            }
        }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (m.metric[3 * i + j].empty()) m.metric[3 * i + j] = m.metric[3 * j + i];

    const YAML::Node eta = require(root, "eta", source, "eta");
    if (!eta.IsSequence() || eta.size() != 3) throw ManifestError(where(source, eta) + ": eta must list 3 components");
    for (std::size_t i = 0; i < 3; ++i) m.eta[i] = scalar(eta[i], source, "eta[" + std::to_string(i) + "]");

    const YAML::Node domain = require(root, "domain", source, "domain");
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string key(1, static_cast<char>('x' + i));
        const YAML::Node iv = require(domain, key.c_str(), source, "domain." + key);
        if (!iv.IsSequence() || iv.size() != 2)
            throw ManifestError(where(source, iv) + ": domain." + key + " must be [lo, hi]");
        m.box[i] = {number(iv[0], source, "domain." + key), number(iv[1], source, "domain." + key)};
    }
    if (const YAML::Node ex = domain["exclude"]) {
        if (!ex.IsSequence()) throw ManifestError(where(source, ex) + ": domain.exclude must be a list");
        for (std::size_t i = 0; i < ex.size(); ++i)
            m.exclude.push_back(scalar(ex[i], source, "domain.exclude[" + std::to_string(i) + "]"));
    }

    if (const YAML::Node ex = root["expected"]) {
        if (!ex.IsSequence()) throw ManifestError(where(source, ex) + ": expected must be a list");
        for (const auto& item : ex) {
            const std::string name = scalar(item, source, "expected");
            const auto p = parse_property(name);
            if (!p) throw ManifestError(where(source, item) + ": unknown expected property '" + name + "'");
            m.expected.push_back(*p);
        }
    }

    if (const YAML::Node values = root["values"]) {
        if (values["kappa"]) m.kappa = number(values["kappa"], source, "values.kappa");
        if (values["mu"]) m.mu = number(values["mu"], source, "values.mu");
    }

    if (const YAML::Node tol = root["tolerances"]) {
        if (tol["algebraic"]) m.tol.algebraic = number(tol["algebraic"], source, "tolerances.algebraic");
        if (tol["finite_difference"])
            m.tol.finite_difference = number(tol["finite_difference"], source, "tolerances.finite_difference");
        if (tol["reconstruction"])
            m.tol.reconstruction = number(tol["reconstruction"], source, "tolerances.reconstruction");
        if (tol["certificate"]) m.tol.certificate = number(tol["certificate"], source, "tolerances.certificate");
    }

    // every expression parses before anything is evaluated
    for (std::size_t i = 0; i < 9; ++i)
        if (!m.metric[i].empty()) (void)parse_field(m.metric[i], source, "metric." + std::string(metric_keys[i]));
    for (std::size_t i = 0; i < 3; ++i) (void)parse_field(m.eta[i], source, "eta[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < m.exclude.size(); ++i)
        (void)parse_field(m.exclude[i], source, "domain.exclude[" + std::to_string(i) + "]");
    (void)build_manifold(m);
    return m;
}

ManifoldManifest read_manifest(const std::string& path) {
    constexpr std::string_view prefix = "builtin:";
    if (path.rfind(prefix, 0) == 0) {
        const std::string_view name = std::string_view(path).substr(prefix.size());
        for (const auto& entry : builtin_gallery())
            if (entry.name == name) return parse_manifest(entry.text, path);
        throw ManifestError("no built-in manifest named '" + std::string(name) + "'");
    }
    std::ifstream in(path);
    if (!in) throw ManifestError(path + ": cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_manifest(text.str(), path);
}

ContactManifold build_manifold(const ManifoldManifest& m) {
    ContactManifold out;
    out.name = m.name;
    std::vector<Expr> exclude;
    for (std::size_t i = 0; i < m.exclude.size(); ++i)
        exclude.push_back(parse_field(m.exclude[i], m.source, "domain.exclude[" + std::to_string(i) + "]"));
    try {
        out.chart = Chart(m.name, m.box, std::move(exclude));
    } catch (const DomainValidationError& e) {
        throw ManifestError(m.source + ": " + e.what());
    }
    if (m.metric_full) {
        std::array<Expr, 9> full;
        for (std::size_t i = 0; i < 9; ++i) full[i] = parse_field(m.metric[i], m.source, "metric");
        out.metric = MetricField::from_full(full);
    } else {
        std::array<Expr, 6> upper;
        std::size_t k = 0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) upper[k++] = parse_field(m.metric[3 * i + j], m.source, "metric");
        out.metric = MetricField::from_upper(upper);
    }
    for (std::size_t i = 0; i < 3; ++i) out.eta[i] = parse_field(m.eta[i], m.source, "eta");
    out.tol = m.tol;
    return out;
}

ContactManifold load_manifest(const std::string& path) { return build_manifold(read_manifest(path)); }

} // namespace kmu
