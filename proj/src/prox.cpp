#include "pstaic/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pstaic {

BoxSet::BoxSet(double lo, double hi) : lower(lo), upper(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("BoxSet: lower bound exceeds upper bound");
}

double prox_data(double x, double m, double rho) { return (rho * x + m) / (rho + 1.0); }

double prox_box(double x, const BoxSet& box) { return std::clamp(x, box.lower, box.upper); }

void prox_group_l2(std::span<double> x, double threshold) {
    double n2 = 0.0;
    for (double v : x) n2 += v * v;
    const double norm = std::sqrt(n2);
    if (norm <= threshold || norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return;
    }
    const double scale = 1.0 - threshold / norm;
    for (double& v : x) v *= scale;
}

std::array<double, 9> prox_group_l2(const std::array<double, 9>& x, double threshold) {
    std::array<double, 9> out = x;
    prox_group_l2(std::span<double>(out), threshold);
    return out;
}

void prox_coupled_difference(std::span<double> y, double threshold) {
    const std::size_t n = y.size() / 2;
    if (y.size() != 2 * n) throw std::invalid_argument("prox_coupled_difference: odd length");
    const double r = 1.0 / std::sqrt(2.0);
    // ||z_a - z_b|| = sqrt(2) ||c1|| with c1 = (z_a - z_b)/sqrt2, so c1 is shrunk by sqrt(2)*threshold.
    double n2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double c1 = r * (y[j] - y[j + n]);
        n2 += c1 * c1;
    }
    const double norm = std::sqrt(n2);
    const double t = std::sqrt(2.0) * threshold;
    const double gamma = (norm <= t || norm == 0.0) ? 0.0 : 1.0 - t / norm;
    for (std::size_t j = 0; j < n; ++j) {
        const double c1 = gamma * r * (y[j] - y[j + n]);
        const double c2 = r * (y[j] + y[j + n]);
        y[j] = r * (c1 + c2);
        y[j + n] = r * (c2 - c1);
    }
}

std::array<double, 10> prox_As(const std::array<double, 10>& y, double lambda, double alpha_s, double rho) {
    std::array<double, 10> z = y;
    // sqrt(2) lambda alpha ||A_s z|| = lambda alpha ||z_a - z_b||
    prox_coupled_difference(std::span<double>(z), lambda * alpha_s / rho);
    return z;
}

}  // namespace pstaic
