#include "kmu/tensor.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace kmu;
using kmu::testing::Rng;

namespace {

TensorValue random_tensor(Rng& rng, Signature sig) {
    TensorValue t({0.1, 0.2, 0.3}, std::move(sig));
    for (auto& c : t.comps()) c = rng.uniform();
    return t;
}

} // namespace

TEST_CASE("component layout puts the first slot slowest") {
    TensorValue t({}, {Slot::up, Slot::down, Slot::down});
    CHECK(t.size() == 27);
    CHECK(t.flat_index({1, 0, 0}) == 9);
    CHECK(t.flat_index({0, 1, 0}) == 3);
    CHECK(t.flat_index({0, 0, 1}) == 1);
    CHECK(t.stride(0) == 9);
    t(2, 1, 0) = 5.0;
    CHECK(t[21] == 5.0);
    CHECK_THROWS_AS(t.flat_index({0, 0}), std::out_of_range);
    CHECK_THROWS_AS(t.flat_index({0, 0, 3}), std::out_of_range);
}

TEST_CASE("trace of the identity is 3") {
    const auto id = TensorValue::from_matrix({}, {Slot::up, Slot::down}, Mat3::Identity());
    const TensorValue tr = contract(id, 0, 1);
    CHECK(tr.rank() == 0);
    CHECK(tr[0] == doctest::Approx(3.0));
}

TEST_CASE("contraction reduces the rank by two and matches explicit sums") {
    Rng rng(11);
    const TensorValue t = random_tensor(rng, {Slot::down, Slot::up, Slot::down, Slot::down});
    const TensorValue c = contract(t, 1, 2);
    CHECK(c.rank() == 2);
    CHECK(c.signature() == Signature{Slot::down, Slot::down});
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0.0;
            for (int m = 0; m < 3; ++m) s += t(a, m, m, b);
            CHECK(c(a, b) == doctest::Approx(s).epsilon(1e-14));
        }
}

TEST_CASE("variance mismatches are rejected") {
    Rng rng(12);
    const TensorValue dd = random_tensor(rng, {Slot::down, Slot::down});
    const TensorValue ud = random_tensor(rng, {Slot::up, Slot::down});
    CHECK_THROWS_AS(contract(dd, 0, 1), VarianceError);
    CHECK_THROWS_AS(raise(ud, 0, Mat3::Identity()), VarianceError);
    CHECK_THROWS_AS(lower(dd, 0, Mat3::Identity()), VarianceError);
    TensorValue a = dd;
    CHECK_THROWS_AS(a += ud, VarianceError);
}

TEST_CASE("raising then lowering a slot is the identity") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat3 g = rng.spd();
        const Mat3 g_inv = g.inverse();
        const TensorValue t = random_tensor(rng, {Slot::down, Slot::up, Slot::down});
        for (std::size_t slot : {0u, 2u}) {
            const TensorValue back = lower(raise(t, slot, g_inv), slot, g);
            CHECK(back.signature() == t.signature());
            CHECK(max_abs_diff(back, t) < 1e-12);
        }
        const TensorValue back = raise(lower(t, 1, g), 1, g_inv);
        CHECK(max_abs_diff(back, t) < 1e-12);
    }
}

TEST_CASE("metric trace through raise and contract") {
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat3 g = rng.spd();
        const Mat3 g_inv = g.inverse();
        const Mat3 s = rng.mat();
        const auto t = TensorValue::from_matrix({}, {Slot::down, Slot::down}, s);
        const double via_contract = contract(raise(t, 0, g_inv), 0, 1)[0];
        CHECK(via_contract == doctest::Approx((g_inv * s).trace()).epsilon(1e-12));
    }
}

TEST_CASE("arithmetic keeps the signature") {
    Rng rng(15);
    const TensorValue a = random_tensor(rng, {Slot::up, Slot::down});
    const TensorValue b = random_tensor(rng, {Slot::up, Slot::down});
    const TensorValue c = 2.0 * a - b;
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(2 * a[i] - b[i]));
    CHECK(c.to_matrix()(1, 2) == c(1, 2));
    CHECK(signature_string(c.signature()) == "^_");
}
