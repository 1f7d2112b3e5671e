#include "pstaic/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pstaic {

double WeightCostCoeffs::zeta() const {
    const double m = std::abs(mu());
    return m == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * tau / m;
}

double barrier(double alpha, double tau) {
    if (!(alpha > 0.0 && alpha < 1.0)) return std::numeric_limits<double>::infinity();
    return -tau * (std::log(alpha) + std::log1p(-alpha));
}

double weight_cost(double alpha, const WeightCostCoeffs& c) {
    const double b = barrier(alpha, c.tau);
    if (std::isinf(b)) return b;
    return alpha * c.c1 + (1.0 - alpha) * c.c2 + b;
}

double weight_cost_derivative(double alpha, const WeightCostCoeffs& c) {
    return c.mu() - c.tau / alpha + c.tau / (1.0 - alpha);
}

double solve_weight(const WeightCostCoeffs& c) {
    if (!(c.tau > 0.0)) throw std::invalid_argument("solve_weight: tau must be > 0");
    const double mu = c.mu();
    if (!std::isfinite(mu)) throw std::invalid_argument("solve_weight: non-finite coefficients");
    const double two_tau = 2.0 * c.tau;
    const double a = std::abs(mu);
    // hypot avoids overflow of mu^2 for very large coefficients.
    const double h = std::hypot(two_tau, a);
    // The weight on the smaller side, (1 - |mu| / (h + 2 tau)) / 2, rewritten with
    // h - |mu| = 4 tau^2 / (h + |mu|) so it keeps full precision when |mu| >> tau.
    double small = c.tau * (1.0 + two_tau / (h + a)) / (h + two_tau);
    small = std::max(small, std::numeric_limits<double>::denorm_min());
    if (mu <= 0.0) return std::min(1.0 - small, std::nextafter(1.0, 0.0));
    return std::min(small, 0.5);
}

WeightCostCoeffs compute_coeffs(const PairField& f, double lambda, double tau, const SplitModel& model,
                                BoundaryPolicy boundary) {
    const BankOperator op(model.bank(), f.shape(), boundary);
    const auto reg = model.regularizer_values(op.apply(f));
    return {lambda * reg.spatial, lambda * reg.temporal, tau};
}

double motion_factor(const PairField& f) {
    const double peak = max_abs(f.g.values());
    Volume2DT g = f.g;
    if (peak > 0.0) g *= 1.0 / peak;
    const Volume2DT d = convolve(g, stencils::dtt(), BoundaryPolicy::Periodic);
    const auto dv = d.values();
    const double s = pairwise_sum(0, dv.size(), [&](std::size_t i) { return std::exp(-dv[i] * dv[i]); });
    return s / static_cast<double>(dv.size());
}

double resolve_tau(const TauPolicy& policy, const PairField& f_current, double reference) {
    if (!(policy.tau0 > 0.0)) throw std::invalid_argument("TauPolicy: tau0 must be > 0");
    double tau = policy.tau0 * reference;
    if (policy.kind == TauPolicy::Kind::MotionAdaptive) tau *= motion_factor(f_current);
    // exp(-x^2) underflows for very large second differences; keep the closed form defined.
    const double floor = std::numeric_limits<double>::min();
    return tau > floor ? tau : floor;
}

}  // namespace pstaic
