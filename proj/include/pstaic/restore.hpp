#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pstaic/admm.hpp"
#include "pstaic/weights.hpp"

namespace pstaic {

enum class Algorithm {
    Pstaic,      ///< joint (f, alpha_s) estimation with the STAIC regularizer
    Pictv,       ///< the same weight estimation around a first-order ICTV regularizer
    StaicFixed,  ///< STAIC with alpha_s held at RestoreConfig::fixed_alpha
};

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct RestoreConfig {
    double lambda = 1.0;
    TauPolicy tau = TauPolicy::constant(0.3, TauPolicy::Scale::InitialRegularizer);
    AdmmConfig admm{};
    std::size_t outer_iterations = 10;
    BoxSet box{};
    Algorithm algorithm = Algorithm::Pstaic;
    double fixed_alpha = 0.5;
    double kappa1 = 1.0;
    double kappa2 = 1.0;

    void validate() const;
};

/// One pass of the outer alternation: alpha from f^(l), then f^(l+1) at that alpha.
struct OuterStep {
    double alpha = 0.5;
    double c1 = 0.0;    ///< at f^(l), the iterate alpha was computed from
    double c2 = 0.0;
    double tau = 0.0;
    double cost = 0.0;  ///< H(f^(l+1), alpha^(l+1))
    double cost_before = 0.0;  ///< H(f^(l), alpha^(l+1))
    /// max(0, cost - cost_before): how far the inexact inner solve fell short of descent.
    double slack = 0.0;
    std::vector<double> residuals;
};

struct RestoreReport {
    PairField f;
    std::vector<OuterStep> steps;
    double seconds = 0.0;

    [[nodiscard]] std::vector<double> alpha_trajectory() const;
    [[nodiscard]] std::vector<double> cost_trajectory() const;
    [[nodiscard]] double final_alpha() const { return steps.empty() ? 0.5 : steps.back().alpha; }
};

/// Replaces the closed-form weight step; used by tests and the fixed-weight mode.
using WeightUpdate = std::function<double(const WeightCostCoeffs&)>;

/// The split model an algorithm restores with.
SplitModel make_model(const Kernel& h, const RestoreConfig& cfg);

/// Outer alternation on an arbitrary split model:
/// f^(0) = (P_C(m), 0); alpha^(l+1) = update(coeffs(f^(l))); f^(l+1) = ADMM warm-started from step l.
/// Each f^(l+1) is the ADMM image projected onto C.
RestoreReport run_alternation(const Volume2DT& m, const SplitModel& model, const RestoreConfig& cfg,
                              const WeightUpdate& update);

RestoreReport pstaic_restore(const Volume2DT& m, const Kernel& h, const RestoreConfig& cfg);
RestoreReport pictv_restore(const Volume2DT& m, const Kernel& h, const RestoreConfig& cfg);
/// Dispatches on cfg.algorithm.
RestoreReport restore(const Volume2DT& m, const Kernel& h, const RestoreConfig& cfg);

/// H(f, alpha) for a split model: data term + lambda (alpha S + (1 - alpha) T) + box indicator + barrier.
double evaluate_cost(const SplitModel& model, const PairField& f, double alpha, double lambda, const Volume2DT& m,
                     double tau);
/// The PSTAIC objective built from the PSF and the box.
double evaluate_cost(const PairField& f, double alpha, double lambda, const Volume2DT& m, const Kernel& h,
                     const BoxSet& box, double tau);

}  // namespace pstaic
