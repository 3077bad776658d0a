#pragma once

#include "kmu/contact.hpp"
#include "kmu/geometry.hpp"
#include "kmu/tensor.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kmu {

enum class PresetName { riemann, conharmonic, conformal, concircular, projective, m_projective, w1, w2, w4 };

std::string_view preset_name(PresetName p);
std::optional<PresetName> parse_preset_name(std::string_view name);
const std::vector<PresetName>& all_presets();

/// How "n" is read in the W1, W2, W4 items: as the total dimension m = 2n+1
/// (coefficients ±1/(m−1)) or literally as n (undefined for n = 1).
enum class DimensionReading { total_dimension, literal_n };

struct Coefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

/// (α, β, γ) with γ affine in the scalar curvature: γ = gamma + gamma_per_r · r.
struct PresetSpec {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double gamma_per_r = 0.0;
    std::string label;

    Coefficients at(double r) const { return {alpha, beta, gamma + gamma_per_r * r}; }
    static PresetSpec explicit_abc(double a, double b, double c);
};

PresetSpec preset_spec(PresetName name, int n = 1, DimensionReading reading = DimensionReading::total_dimension);
Coefficients preset_coefficients(PresetName name, int n, double r,
                                 DimensionReading reading = DimensionReading::total_dimension);

struct CurvatureContext {
    Point point{};
    Mat3 g = Mat3::Identity();
    Mat3 g_inv = Mat3::Identity();
    TensorValue riemann;  // (1,3)
    TensorValue ricci;    // (0,2)
    Mat3 q = Mat3::Zero();
    double scalar = 0.0;
    std::optional<Vec3> eta;
    std::optional<Vec3> xi;
    std::optional<Mat3> h;
};

CurvatureContext make_context(const CurvatureData& c);
CurvatureContext make_context(const ContactFrame& f);

/// W̃(X,Y)Z = R(X,Y)Z + α[S(Y,Z)X − S(X,Z)Y] + β[g(Y,Z)QX − g(X,Z)QY] + γ[g(Y,Z)X − g(X,Z)Y].
/// The correction is built lowered and raised once, so (0,0,0) returns R unchanged.
TensorValue w_tilde(const CurvatureContext& ctx, const Coefficients& c);

/// The same tensor on a generalized (κ,μ) context, from (κ, μ, h, η, ξ, g) alone.
TensorValue w_tilde_kmu_closed_form(const CurvatureContext& ctx, const Coefficients& c, double kappa, double mu);

/// (T1·T2)(X,Y,U,V,Z,W) = g(T1(X,Y)T2(U,V)Z − T2(T1(X,Y)U,V)Z − T2(U,T1(X,Y)V)Z − T2(U,V)T1(X,Y)Z, W),
/// a (0,6) tensor with slots in the order X, Y, U, V, Z, W.
TensorValue derive_on_curvature(const TensorValue& t1, const TensorValue& t2, const Mat3& g);

/// (T1·S)(X,Y,U,V) = −S(T1(X,Y)U, V) − S(U, T1(X,Y)V).
TensorValue derive_on_ricci(const TensorValue& t1, const TensorValue& s);

} // namespace kmu
