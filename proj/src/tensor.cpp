#include "kmu/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace kmu {

namespace {

std::size_t pow3(std::size_t n) {
    std::size_t r = 1;
    while (n--) r *= 3;
    return r;
}

} // namespace

std::string signature_string(const Signature& sig) {
    std::string s;
    for (Slot v : sig) s += v == Slot::up ? '^' : '_';
    return s;
}

TensorValue::TensorValue(const Point& p, Signature sig)
    : point_(p), sig_(std::move(sig)), c_(pow3(sig_.size()), 0.0) {}

TensorValue::TensorValue(const Point& p, Signature sig, std::vector<double> comps)
    : point_(p), sig_(std::move(sig)), c_(std::move(comps)) {
    if (c_.size() != pow3(sig_.size())) throw std::invalid_argument("component count does not match rank");
}

TensorValue TensorValue::from_matrix(const Point& p, Signature sig, const Mat3& m) {
    if (sig.size() != 2) throw std::invalid_argument("from_matrix needs a rank-2 signature");
    TensorValue t(p, std::move(sig));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = m(i, j);
    return t;
}

TensorValue TensorValue::from_vector(const Point& p, Slot slot, const Vec3& v) {
    TensorValue t(p, {slot});
    for (int i = 0; i < 3; ++i) t(i) = v(i);
    return t;
}

std::size_t TensorValue::stride(std::size_t slot) const { return pow3(sig_.size() - 1 - slot); }

std::size_t TensorValue::flat_index(std::initializer_list<std::size_t> idx) const {
    if (idx.size() != sig_.size()) throw std::out_of_range("index count does not match rank");
    std::size_t flat = 0;
    for (std::size_t i : idx) {
        if (i > 2) throw std::out_of_range("tensor index out of range");
        flat = flat * 3 + i;
    }
    return flat;
}

Mat3 TensorValue::to_matrix() const {
    if (rank() != 2) throw std::invalid_argument("to_matrix needs a rank-2 tensor");
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
    return m;
}

Vec3 TensorValue::to_vector() const {
    if (rank() != 1) throw std::invalid_argument("to_vector needs a rank-1 tensor");
    return {c_[0], c_[1], c_[2]};
}

double TensorValue::max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

void TensorValue::require_same_shape(const TensorValue& o) const {
    if (sig_ != o.sig_)
        throw VarianceError("signature mismatch: " + signature_string(sig_) + " vs " + signature_string(o.sig_));
}

TensorValue& TensorValue::operator+=(const TensorValue& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

TensorValue& TensorValue::operator-=(const TensorValue& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

TensorValue& TensorValue::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

TensorValue contract(const TensorValue& t, std::size_t slot_a, std::size_t slot_b) {
    const auto& sig = t.signature();
    if (slot_a >= sig.size() || slot_b >= sig.size() || slot_a == slot_b)
        throw std::out_of_range("contraction slots out of range");
    if (sig[slot_a] == sig[slot_b]) throw VarianceError("contraction needs one up and one down slot");

    Signature out_sig;
    for (std::size_t s = 0; s < sig.size(); ++s)
        if (s != slot_a && s != slot_b) out_sig.push_back(sig[s]);
    TensorValue out(t.point(), out_sig);

    const std::size_t sa = t.stride(slot_a), sb = t.stride(slot_b);
    const std::size_t rank = sig.size();
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        // scatter the output multi-index into the input, leaving the two slots at 0
        std::size_t base = 0, rest = flat;
        for (std::size_t s = rank; s-- > 0;) {
            if (s == slot_a || s == slot_b) continue;
            base += (rest % 3) * t.stride(s);
            rest /= 3;
        }
        double sum = 0.0;
        for (std::size_t m = 0; m < 3; ++m) sum += t[base + m * (sa + sb)];
        out[flat] = sum;
    }
    return out;
}

namespace {

TensorValue change_slot(const TensorValue& t, std::size_t slot, const Mat3& m, Slot from, Slot to) {
    if (slot >= t.rank()) throw std::out_of_range("slot out of range");
    if (t.signature()[slot] != from)
        throw VarianceError(std::string("slot ") + std::to_string(slot) + " is not " + (from == Slot::up ? "up" : "down"));
    Signature sig = t.signature();
    sig[slot] = to;
    TensorValue out(t.point(), sig);
    const std::size_t st = t.stride(slot);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        const std::size_t i = (flat / st) % 3;
        const std::size_t base = flat - i * st;
        double sum = 0.0;
        for (std::size_t k = 0; k < 3; ++k) sum += m(static_cast<int>(i), static_cast<int>(k)) * t[base + k * st];
        out[flat] = sum;
    }
    return out;
}

} // namespace

TensorValue raise(const TensorValue& t, std::size_t slot, const Mat3& g_inv) {
    return change_slot(t, slot, g_inv, Slot::down, Slot::up);
}

TensorValue lower(const TensorValue& t, std::size_t slot, const Mat3& g) {
    return change_slot(t, slot, g, Slot::up, Slot::down);
}

double max_abs_diff(const TensorValue& a, const TensorValue& b) { return (a - b).max_abs(); }

} // namespace kmu
