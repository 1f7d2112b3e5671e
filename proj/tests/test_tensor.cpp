#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pstaic/tensor.hpp"

using namespace pstaic;

namespace {

VectorField single(std::initializer_list<double> comps) {
    VectorField v(Shape{1, 1, 1}, comps.size());
    std::size_t c = 0;
    for (double x : comps) v.at(c++, 0) = x;
    return v;
}

const MixedNormKind kAllKinds[] = {MixedNormKind::sum_of_euclid(), MixedNormKind::sum_of_kappa(2.5),
                                   MixedNormKind::sum_of_inv_kappa(0.3)};

}  // namespace

TEST_CASE("mixed_norm on hand-checked vectors") {
    CHECK(mixed_norm(single({3, 4}), MixedNormKind::sum_of_euclid()) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(mixed_norm(single({1, 0, 0}), MixedNormKind::sum_of_kappa(2.0)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mixed_norm(single({0, 0, 1}), MixedNormKind::sum_of_inv_kappa(3.0)) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(mixed_norm(single({0, 0, 1}), MixedNormKind::sum_of_kappa(3.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mixed_norm(single({1, 2, 2}), MixedNormKind::frobenius_sq()) == doctest::Approx(9.0).epsilon(1e-15));

    VectorField two(Shape{2, 1, 1}, 2);
    two.at(0, 0) = 1.0;
    two.at(1, 1) = 1.0;
    CHECK(mixed_norm(two, MixedNormKind::sum_of_euclid()) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("mixed_norm is exactly zero on the zero field") {
    VectorField z(Shape{4, 3, 2}, 3);
    for (const auto& k : kAllKinds) CHECK(mixed_norm(z, k) == 0.0);
    CHECK(mixed_norm(z, MixedNormKind::frobenius_sq()) == 0.0);
}

TEST_CASE("kappa norms need three channels") {
    VectorField v(Shape{2, 2, 1}, 2, 1.0);
    CHECK_THROWS_AS(mixed_norm(v, MixedNormKind::sum_of_kappa(2.0)), DimensionError);
    CHECK_THROWS_AS(mixed_norm(v, MixedNormKind::sum_of_inv_kappa(2.0)), DimensionError);
    CHECK_THROWS_AS(mixed_norm(VectorField(Shape{2, 2, 1}, 3), MixedNormKind::sum_of_kappa(0.0)),
                    std::invalid_argument);
}

TEST_CASE("mixed_norm: homogeneity, triangle inequality, kappa = 1") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Shape s{1 + rng.index(5), 1 + rng.index(5), 1 + rng.index(3)};
        const VectorField a = rng.stack(s, 3);
        const VectorField b = rng.stack(s, 3);
        const double c = rng.normal(3.0);
        for (const auto& k : kAllKinds) {
            const double na = mixed_norm(a, k);
            CHECK(mixed_norm(c * a, k) == doctest::Approx(std::abs(c) * na).epsilon(1e-12));
            CHECK(mixed_norm(a + b, k) <= na + mixed_norm(b, k) + 1e-12);
        }
        CHECK(mixed_norm(a, MixedNormKind::sum_of_kappa(1.0)) ==
              doctest::Approx(mixed_norm(a, MixedNormKind::sum_of_euclid())).epsilon(1e-14));
        CHECK(mixed_norm(a, MixedNormKind::sum_of_inv_kappa(1.0)) ==
              doctest::Approx(mixed_norm(a, MixedNormKind::sum_of_euclid())).epsilon(1e-14));
    }
}

TEST_CASE("frame extraction") {
    const Volume2DT seven(4, 3, 5, 7.0);
    for (std::size_t i = 0; i < 5; ++i) {
        const Frame2D f = frame(seven, i);
        CHECK(f.width() == 4);
        CHECK(f.height() == 3);
        for (double x : f.values()) CHECK(x == 7.0);
    }

    Volume2DT v(3, 3, 4);
    Frame2D eye(3, 3);
    for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
    v.set_frame(2, eye);
    CHECK(frame(v, 2) == eye);
    CHECK(frame(v, 1) == Frame2D(3, 3));

    CHECK_THROWS_AS(frame(v, 4), DimensionError);
    CHECK_THROWS_AS(frame(v, 100), DimensionError);
}

TEST_CASE("containers reject bad construction and mismatched arithmetic") {
    CHECK_THROWS(Volume2DT(Shape{2, 2, 1}, std::vector<double>(3)));
    CHECK_THROWS(Volume2DT(Shape{0, 2, 1}));
    Volume2DT a(2, 2, 1, 1.0);
    const Volume2DT b(2, 3, 1, 1.0);
    CHECK_THROWS_AS(a += b, DimensionError);
    VectorField p(Shape{2, 2, 1}, 2);
    CHECK_THROWS_AS(p += VectorField(Shape{2, 2, 1}, 3), DimensionError);

    Volume2DT nan(2, 2, 1, 0.0);
    nan(1, 1, 0) = std::nan("");
    CHECK_FALSE(nan.all_finite());
    CHECK(a.all_finite());
}

TEST_CASE("replicate_frames and frame round-trip") {
    Frame2D f(3, 2);
    for (std::size_t i = 0; i < f.size(); ++i) f.values()[i] = static_cast<double>(i);
    const Volume2DT v = replicate_frames(f, 4);
    CHECK(v.n_frames() == 4);
    for (std::size_t t = 0; t < 4; ++t) CHECK(frame(v, t) == f);
}

TEST_CASE("pairwise_sum is deterministic and accurate") {
    std::vector<double> x(100000);
    oracle::Rng rng(3);
    for (auto& v : x) v = rng.uniform();
    const double a = pairwise_sum(0, x.size(), [&](std::size_t i) { return x[i]; });
    const double b = pairwise_sum(0, x.size(), [&](std::size_t i) { return x[i]; });
    CHECK(a == b);
    long double ref = 0.0L;
    for (double v : x) ref += v;
    CHECK(std::abs(a - static_cast<double>(ref)) < 1e-9);
}
