#include "kmu/curvzoo.hpp"

#include <array>
#include <stdexcept>

namespace kmu {

namespace {

constexpr std::array<std::pair<std::string_view, PresetName>, 9> preset_table = {{
    {"riemann", PresetName::riemann},
    {"conharmonic", PresetName::conharmonic},
    {"conformal", PresetName::conformal},
    {"concircular", PresetName::concircular},
    {"projective", PresetName::projective},
    {"m_projective", PresetName::m_projective},
    {"w1", PresetName::w1},
    {"w2", PresetName::w2},
    {"w4", PresetName::w4},
}};

const Signature& mixed4_sig() {
    static const Signature s = {Slot::up, Slot::down, Slot::down, Slot::down};
    return s;
}

double inverse_dim_term(int n, DimensionReading reading) {
    if (reading == DimensionReading::total_dimension) return 1.0 / (2.0 * n);  // 1/(m−1), m = 2n+1
    if (n == 1) throw std::domain_error("1/(n-1) is undefined for n = 1 under the literal reading");
    return 1.0 / (n - 1.0);
}

} // namespace

std::string_view preset_name(PresetName p) {
    for (const auto& [name, value] : preset_table)
        if (value == p) return name;
    return "?";
}

std::optional<PresetName> parse_preset_name(std::string_view name) {
    for (const auto& [n, value] : preset_table)
        if (n == name) return value;
    return std::nullopt;
}

const std::vector<PresetName>& all_presets() {
    static const std::vector<PresetName> all = [] {
        std::vector<PresetName> v;
        for (const auto& entry : preset_table) v.push_back(entry.second);
        return v;
    }();
    return all;
}

PresetSpec PresetSpec::explicit_abc(double a, double b, double c) {
    PresetSpec s;
    s.alpha = a;
    s.beta = b;
    s.gamma = c;
    s.label = "explicit";
    return s;
}

PresetSpec preset_spec(PresetName name, int n, DimensionReading reading) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    const double nn = n;
    PresetSpec s;
    s.label = std::string(preset_name(name));
    switch (name) {
    case PresetName::riemann: break;
    case PresetName::conharmonic: s.alpha = s.beta = -1.0 / (2 * nn - 1); break;
    case PresetName::conformal:
        s.alpha = s.beta = -1.0 / (2 * nn - 1);
        s.gamma_per_r = 1.0 / (2 * nn * (2 * nn - 1));
        break;
    case PresetName::concircular: s.gamma_per_r = -1.0 / (2 * nn * (2 * nn + 1)); break;
    case PresetName::projective: s.alpha = -1.0 / (2 * nn); break;
    case PresetName::m_projective: s.alpha = s.beta = -1.0 / (4 * nn); break;
    case PresetName::w1: s.alpha = inverse_dim_term(n, reading); break;
    case PresetName::w2: s.beta = -inverse_dim_term(n, reading); break;
    case PresetName::w4: s.gamma = -inverse_dim_term(n, reading); break;
    }
    return s;
}

Coefficients preset_coefficients(PresetName name, int n, double r, DimensionReading reading) {
    return preset_spec(name, n, reading).at(r);
}

CurvatureContext make_context(const CurvatureData& c) {
    CurvatureContext ctx;
    ctx.point = c.point;
    ctx.g = c.g;
    ctx.g_inv = c.g_inv;
    ctx.riemann = c.riemann;
    ctx.ricci = c.ricci;
    ctx.q = ricci_operator(c);
    ctx.scalar = c.scalar;
    return ctx;
}

CurvatureContext make_context(const ContactFrame& f) {
    CurvatureContext ctx = make_context(f.curv);
    ctx.eta = f.eta;
    ctx.xi = f.xi;
    ctx.h = f.h;
    return ctx;
}

TensorValue w_tilde(const CurvatureContext& ctx, const Coefficients& c) {
    const Mat3& g = ctx.g;
    const TensorValue& s = ctx.ricci;
    // lowered correction C_ijkl = g(corr(e_i,e_j)e_k, e_l)
    TensorValue low(ctx.point, {Slot::down, Slot::down, Slot::down, Slot::down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    low(i, j, k, l) = c.alpha * (s(j, k) * g(i, l) - s(i, k) * g(j, l)) +
                                      c.beta * (g(j, k) * s(i, l) - g(i, k) * s(j, l)) +
                                      c.gamma * (g(j, k) * g(i, l) - g(i, k) * g(j, l));
    const TensorValue raised = raise(low, 3, ctx.g_inv);

    TensorValue w = ctx.riemann;
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) w(l, i, j, k) += raised(i, j, k, l);
    return w;
}

TensorValue w_tilde_kmu_closed_form(const CurvatureContext& ctx, const Coefficients& c, double kappa, double mu) {
    if (!ctx.eta || !ctx.xi || !ctx.h) throw std::invalid_argument("closed form needs eta, xi and h in the context");
    const Mat3& g = ctx.g;
    const Vec3& eta = *ctx.eta;
    const Vec3& xi = *ctx.xi;
    const Mat3& h = *ctx.h;
    const Mat3 gh = g * h;

    const double c1 = -(c.alpha + c.beta + 1) * mu - kappa + c.gamma;
    const double c2 = (c.alpha + 1) * mu;
    const double c3 = (c.beta + 1) * mu;
    const double c4 = (c.alpha + 1) * (2 * kappa + mu);
    const double c5 = (c.beta + 1) * (2 * kappa + mu);

    TensorValue w(ctx.point, mixed4_sig());
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    const double di = l == i, dj = l == j;
                    w(l, i, j, k) = c1 * (g(j, k) * di - g(i, k) * dj) + c2 * (gh(k, j) * di - gh(k, i) * dj) +
                                    c3 * (g(j, k) * h(l, i) - g(i, k) * h(l, j)) +
                                    c4 * (eta(j) * eta(k) * di - eta(i) * eta(k) * dj) +
                                    c5 * (g(j, k) * eta(i) - g(i, k) * eta(j)) * xi(l);
                }
    return w;
}

TensorValue derive_on_curvature(const TensorValue& t1, const TensorValue& t2, const Mat3& g) {
    if (t1.signature() != mixed4_sig() || t2.signature() != mixed4_sig())
        throw VarianceError("derive_on_curvature needs two (1,3) tensors");
    TensorValue out(t1.point(), Signature(6, Slot::down));
    std::array<double, 3> v{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d)
                    for (int e = 0; e < 3; ++e) {
                        for (int l = 0; l < 3; ++l) {
                            double s = 0.0;
                            for (int m = 0; m < 3; ++m)
                                s += t1(l, a, b, m) * t2(m, c, d, e) - t1(m, a, b, c) * t2(l, m, d, e) -
                                     t1(m, a, b, d) * t2(l, c, m, e) - t1(m, a, b, e) * t2(l, c, d, m);
                            v[static_cast<std::size_t>(l)] = s;
                        }
                        for (int w = 0; w < 3; ++w)
                            out(a, b, c, d, e, w) = g(w, 0) * v[0] + g(w, 1) * v[1] + g(w, 2) * v[2];
                    }
    return out;
}

TensorValue derive_on_ricci(const TensorValue& t1, const TensorValue& s) {
    if (t1.signature() != mixed4_sig()) throw VarianceError("derive_on_ricci needs a (1,3) tensor");
    if (s.signature() != Signature{Slot::down, Slot::down}) throw VarianceError("derive_on_ricci needs a (0,2) tensor");
    TensorValue out(t1.point(), Signature(4, Slot::down));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) {
                    double v = 0.0;
                    for (int m = 0; m < 3; ++m) v -= t1(m, a, b, c) * s(m, d) + t1(m, a, b, d) * s(c, m);
                    out(a, b, c, d) = v;
                }
    return out;
}

} // namespace kmu
