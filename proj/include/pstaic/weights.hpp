#pragma once

#include "pstaic/model.hpp"
#include "pstaic/tensor.hpp"

namespace pstaic {

/// Coefficients of the reduced weight cost alpha*C1 + (1 - alpha)*C2 + barrier(alpha, tau).
struct WeightCostCoeffs {
    double c1 = 0.0;   ///< lambda-weighted spatial regularizer value
    double c2 = 0.0;   ///< lambda-weighted temporal regularizer value
    double tau = 1.0;  ///< barrier strength

    [[nodiscard]] double mu() const { return c1 - c2; }
    /// 2 tau / |mu|; +inf at mu = 0.
    [[nodiscard]] double zeta() const;
};

/// -tau log(alpha (1 - alpha)); +inf outside the open interval (0, 1).
double barrier(double alpha, double tau);

double weight_cost(double alpha, const WeightCostCoeffs& c);
/// d/dalpha of weight_cost: (C1 - C2) - tau/alpha + tau/(1 - alpha).
double weight_cost_derivative(double alpha, const WeightCostCoeffs& c);

/// Closed-form minimizer of weight_cost over (0, 1).
///
/// The textbook form (1 - sign(mu)(sqrt(4 tau^2/mu^2 + 1) - 2 tau/|mu|)) / 2 cancels
/// catastrophically for |mu| << tau; it is evaluated here as
/// (1 - mu / (sqrt(4 tau^2 + mu^2) + 2 tau)) / 2, which is exact at mu = 0.
double solve_weight(const WeightCostCoeffs& c);

/// C1 = lambda * spatial term, C2 = lambda * temporal term, both evaluated at T*f.
WeightCostCoeffs compute_coeffs(const PairField& f, double lambda, double tau, const SplitModel& model,
                                BoundaryPolicy boundary = BoundaryPolicy::Periodic);

/// Barrier strength policy for the outer loop.
struct TauPolicy {
    enum class Kind {
        Constant,        ///< tau = tau0
        MotionAdaptive,  ///< tau = tau0 * mean_r exp(-(d_tt * g_hat)(r)^2), g_hat = g / max|g|
    };
    enum class Scale {
        Absolute,            ///< tau0 is used as given
        InitialRegularizer,  ///< tau0 is multiplied by C1 + C2 at the initial iterate, then frozen
    };

    Kind kind = Kind::Constant;
    double tau0 = 1.0;
    Scale scale = Scale::Absolute;

    static TauPolicy constant(double t, Scale s = Scale::Absolute) { return {Kind::Constant, t, s}; }
    static TauPolicy motion_adaptive(double t, Scale s = Scale::Absolute) { return {Kind::MotionAdaptive, t, s}; }
};

/// Spatio-temporal mean of exp(-(d_tt * g_hat)^2) over the g component of f.
double motion_factor(const PairField& f);

/// tau for the current outer step. `reference` is the scale factor fixed at the
/// first outer iteration (1 for Scale::Absolute).
double resolve_tau(const TauPolicy& policy, const PairField& f_current, double reference);

}  // namespace pstaic
