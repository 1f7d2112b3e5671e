#pragma once

#include <array>
#include <limits>
#include <span>

namespace pstaic {

/// Pixel-value bounds defining the feasible set C.
struct BoxSet {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();

    BoxSet() = default;
    BoxSet(double lo, double hi);

    static BoxSet unbounded() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    [[nodiscard]] bool contains(double x) const { return x >= lower && x <= upper; }
};

/// argmin_z (rho/2)(x - z)^2 + (1/2)(z - m)^2
double prox_data(double x, double m, double rho);

/// Projection onto [lower, upper].
double prox_box(double x, const BoxSet& box);

/// Group soft-thresholding in place: argmin_z (1/2)||x - z||^2 + threshold ||z||_2.
/// Returns exactly zero when ||x|| <= threshold.
void prox_group_l2(std::span<double> x, double threshold);
std::array<double, 9> prox_group_l2(const std::array<double, 9>& x, double threshold);

/// Coupled-difference shrinkage in place on y = (a, b), a and b of equal length n:
/// argmin_z (1/2)||y - z||^2 + threshold ||z_a - z_b||_2.
/// Works in the orthonormal basis ((a - b), (a + b)) / sqrt(2), where only the
/// difference block is shrunk.
void prox_coupled_difference(std::span<double> y, double threshold);

/// argmin_z (rho/2)||y - z||^2 + sqrt(2) lambda alpha_s ||A_s z||_2 for the 5x10 A_s.
std::array<double, 10> prox_As(const std::array<double, 10>& y, double lambda, double alpha_s, double rho);

}  // namespace pstaic
