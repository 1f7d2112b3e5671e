#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pstaic/linops.hpp"
#include "pstaic/prox.hpp"

using namespace pstaic;

namespace {

std::vector<double> to_vec(std::span<const double> a) { return {a.begin(), a.end()}; }

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double data_obj(double z, double x, double m, double rho) { return 0.5 * rho * (x - z) * (x - z) + 0.5 * (z - m) * (z - m); }

}  // namespace

TEST_CASE("prox_data closed form") {
    CHECK(prox_data(1.25, 1.25, 3.0) == 1.25);
    CHECK(prox_data(2.0, 4.0, 1.0) == 3.0);

    oracle::Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.normal(5.0);
        const double m = rng.normal(5.0);
        const double rho = rng.log_uniform(1e-2, 1e2);
        // f(a) - f(b) factored so the comparison does not round away the difference
        const double ref = oracle::golden_section(
            [&](double a, double b) { return (a - b) * (0.5 * rho * (a + b - 2 * x) + 0.5 * (a + b - 2 * m)) < 0.0; },
            -60.0, 60.0, 1e-13);
        CHECK(data_obj(prox_data(x, m, rho), x, m, rho) <= data_obj(ref, x, m, rho) + 1e-12);
        CHECK(std::abs(prox_data(x, m, rho) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("prox_box clips and is idempotent") {
    const BoxSet unit(0.0, 1.0);
    CHECK(prox_box(0.3, unit) == 0.3);
    CHECK(prox_box(-3.0, unit) == 0.0);
    CHECK(prox_box(2.5, unit) == 1.0);
    CHECK(prox_box(-1e300, BoxSet::unbounded()) == -1e300);
    CHECK_THROWS(BoxSet(1.0, 0.0));

    oracle::Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        const double a = rng.normal(2.0);
        const BoxSet b(a, a + rng.uniform(0.0, 3.0));
        const double x = rng.normal(4.0);
        const double p = prox_box(x, b);
        CHECK(prox_box(p, b) == p);
        CHECK(b.contains(p));
    }
}

TEST_CASE("group shrinkage examples") {
    std::array<double, 9> x{};
    x[0] = 0.3;
    x[4] = 0.4;  // norm 0.5
    for (double v : prox_group_l2(x, 1.0)) CHECK(v == 0.0);
    CHECK(prox_group_l2(x, 0.0) == x);
    for (double v : prox_group_l2(x, 0.5)) CHECK(v == 0.0);  // tie goes to zero

    std::array<double, 9> y{};
    y[0] = 3.0;
    y[1] = 4.0;
    const auto out = prox_group_l2(y, 2.5);
    CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-15));
    const auto ref = oracle::dual_prox(to_vec(y), oracle::identity_matrix(9), 9, 2.5, 1.0);
    CHECK(oracle::max_abs_diff(out, ref) < 1e-9);

    std::array<double, 9> zero{};
    for (double v : prox_group_l2(zero, 1.0)) CHECK(v == 0.0);
    for (double v : prox_group_l2(zero, 0.0)) CHECK(v == 0.0);
}

TEST_CASE("group shrinkage against the dual solver") {
    oracle::Rng rng(3);
    const auto I = oracle::identity_matrix(9);
    for (int i = 0; i < 500; ++i) {
        const auto x = rng.vec<9>(rng.log_uniform(0.1, 10.0));
        const double th = rng.uniform(0.0, 2.0) * oracle::norm2(x);
        const auto z = prox_group_l2(x, th);
        const auto ref = oracle::dual_prox(to_vec(x), I, 9, th, 1.0, 200);
        const double gap = oracle::prox_objective(to_vec(x), to_vec(z), I, 9, th, 1.0) -
                           oracle::prox_objective(to_vec(x), ref, I, 9, th, 1.0);
        CHECK(gap <= 1e-6);
    }
}

TEST_CASE("prox_As examples") {
    oracle::Rng rng(4);
    std::array<double, 10> sym{};
    for (std::size_t i = 0; i < 5; ++i) sym[i] = sym[i + 5] = rng.normal();
    const auto a = prox_As(sym, 3.0, 0.7, 1.0);
    CHECK(oracle::max_abs_diff(a, sym) < 1e-14);

    const auto y = rng.vec<10>();
    CHECK(oracle::max_abs_diff(prox_As(y, 0.0, 0.5, 2.0), y) < 1e-14);

    std::array<double, 10> z{};
    for (double v : prox_As(z, 1.0, 0.5, 1.0)) CHECK(v == 0.0);
}

TEST_CASE("prox_As against the dual solver") {
    oracle::Rng rng(5);
    const auto A = oracle::as_matrix();
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        const auto y = rng.vec<10>(rng.log_uniform(0.1, 10.0));
        const double rho = rng.log_uniform(0.1, 10.0);
        const double alpha = rng.uniform(0.0, 1.0);
        // half the instances at lambda sqrt(2) alpha / rho = 0.3
        const double lambda = i % 2 == 0 ? 0.3 * rho / (std::sqrt(2.0) * alpha) : rng.log_uniform(1e-3, 10.0);
        const double c = std::sqrt(2.0) * lambda * alpha;
        const auto z = prox_As(y, lambda, alpha, rho);
        const auto ref = oracle::dual_prox(to_vec(y), A, 5, c, rho, 400);
        const double gap = oracle::prox_objective(to_vec(y), to_vec(z), A, 5, c, rho) -
                           oracle::prox_objective(to_vec(y), ref, A, 5, c, rho);
        CHECK(gap <= 1e-6);
        if (i % 2 == 0) CHECK(oracle::max_abs_diff(z, ref) <= 1e-7);
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("prox_As is group shrinkage of the half-difference") {
    oracle::Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const auto y = rng.vec<10>();
        const double lambda = rng.uniform(0.0, 2.0);
        const double alpha = rng.uniform(0.0, 1.0);
        const double rho = rng.uniform(0.2, 3.0);
        std::array<double, 9> d{};
        std::array<double, 5> s{};
        for (std::size_t k = 0; k < 5; ++k) {
            d[k] = (y[k] - y[k + 5]) / std::sqrt(2.0);
            s[k] = (y[k] + y[k + 5]) / std::sqrt(2.0);
        }
        // the penalty sqrt(2) lambda alpha ||A_s z|| = sqrt(2) lambda alpha ||d(z)||
        const auto ds = prox_group_l2(d, std::sqrt(2.0) * lambda * alpha / rho);
        const auto z = prox_As(y, lambda, alpha, rho);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(std::abs(z[k] - (s[k] + ds[k]) / std::sqrt(2.0)) < 1e-13);
            CHECK(std::abs(z[k + 5] - (s[k] - ds[k]) / std::sqrt(2.0)) < 1e-13);
        }
    }
}

TEST_CASE("coupled difference shrinkage against the dual solver") {
    oracle::Rng rng(7);
    std::vector<double> A(3 * 6, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        A[i * 6 + i] = 1.0;
        A[i * 6 + i + 3] = -1.0;
    }
    for (int i = 0; i < 200; ++i) {
        std::vector<double> y(6);
        for (auto& v : y) v = rng.normal();
        const double th = rng.uniform(0.0, 2.0);
        std::vector<double> z = y;
        prox_coupled_difference(z, th);
        const auto ref = oracle::dual_prox(y, A, 3, th, 1.0, 400);
        CHECK(oracle::prox_objective(y, z, A, 3, th, 1.0) - oracle::prox_objective(y, ref, A, 3, th, 1.0) <= 1e-9);
    }
}

TEST_CASE("prox maps are non-expansive") {
    oracle::Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        const double th = rng.uniform(0.0, 3.0);
        const auto a = rng.vec<9>(2.0);
        const auto b = rng.vec<9>(2.0);
        CHECK(dist(prox_group_l2(a, th), prox_group_l2(b, th)) <= dist(a, b) + 1e-12);

        const auto p = rng.vec<10>(2.0);
        const auto q = rng.vec<10>(2.0);
        const double lam = rng.uniform(0.0, 2.0);
        const double al = rng.uniform(0.0, 1.0);
        const double rho = rng.uniform(0.1, 4.0);
        CHECK(dist(prox_As(p, lam, al, rho), prox_As(q, lam, al, rho)) <= dist(p, q) + 1e-12);

        const double x1 = rng.normal(3.0);
        const double x2 = rng.normal(3.0);
        const double m = rng.normal();
        CHECK(std::abs(prox_data(x1, m, rho) - prox_data(x2, m, rho)) <= std::abs(x1 - x2) + 1e-12);
        const BoxSet box(-1.0, 1.0);
        CHECK(std::abs(prox_box(x1, box) - prox_box(x2, box)) <= std::abs(x1 - x2));
    }
}

TEST_CASE("prox outputs beat random perturbations") {
    oracle::Rng rng(9);
    const auto A = oracle::as_matrix();
    const auto I = oracle::identity_matrix(9);
    for (int i = 0; i < 100; ++i) {
        const auto y = rng.vec<10>();
        const double lam = rng.uniform(0.0, 2.0);
        const double al = rng.uniform(0.0, 1.0);
        const double rho = rng.uniform(0.2, 3.0);
        const double c = std::sqrt(2.0) * lam * al;
        const auto z = to_vec(prox_As(y, lam, al, rho));
        const double fz = oracle::prox_objective(to_vec(y), z, A, 5, c, rho);
        CHECK(fz <= oracle::prox_objective(to_vec(y), to_vec(y), A, 5, c, rho) + 1e-12);

        const auto x = rng.vec<9>();
        const double th = rng.uniform(0.0, 2.0);
        const auto g = to_vec(prox_group_l2(x, th));
        const double fg = oracle::prox_objective(to_vec(x), g, I, 9, th, 1.0);
        CHECK(fg <= oracle::prox_objective(to_vec(x), to_vec(x), I, 9, th, 1.0) + 1e-12);

        for (int k = 0; k < 20; ++k) {
            auto zp = z;
            for (auto& v : zp) v += rng.normal(0.05);
            CHECK(fz <= oracle::prox_objective(to_vec(y), zp, A, 5, c, rho) + 1e-12);
            auto gp = g;
            for (auto& v : gp) v += rng.normal(0.05);
            CHECK(fg <= oracle::prox_objective(to_vec(x), gp, I, 9, th, 1.0) + 1e-12);
        }
    }
}

TEST_CASE("shrinkage is positively homogeneous") {
    oracle::Rng rng(10);
    for (int i = 0; i < 100; ++i) {
        const double c = rng.log_uniform(0.01, 100.0);
        const auto x = rng.vec<9>();
        const double th = rng.uniform(0.0, 3.0);
        auto cx = x;
        for (auto& v : cx) v *= c;
        const auto lhs = prox_group_l2(cx, c * th);
        const auto rhs = prox_group_l2(x, th);
        for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(lhs[k] - c * rhs[k]) <= 1e-12 * c);

        const auto y = rng.vec<10>();
        auto cy = y;
        for (auto& v : cy) v *= c;
        const double lam = rng.uniform(0.0, 2.0);
        const double al = rng.uniform(0.0, 1.0);
        const auto a = prox_As(cy, c * lam, al, 1.3);
        const auto b = prox_As(y, lam, al, 1.3);
        for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(a[k] - c * b[k]) <= 1e-12 * c);
    }
}
