#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

#include "pstaic/model.hpp"
#include "pstaic/spectral.hpp"

namespace pstaic {

/// Raised when an ADMM iterate stops being finite (usually a badly scaled rho).
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AdmmConfig {
    double rho = 1.0;
    std::size_t max_iterations = 50;
    /// Stop once ||T*f - w||_2 falls to this value. Non-positive selects 1e-4 * sqrt(pixel count).
    double primal_tolerance = 0.0;
    BoundaryPolicy boundary = BoundaryPolicy::Periodic;

    [[nodiscard]] double tolerance_for(const Shape& shape) const;
    void validate() const;
};

/// ADMM iterate: f, the splitting variable w, the multiplier beta and the cached T*f.
struct SplitState {
    PairField f;
    StackField w;
    StackField beta;
    StackField tf;
    std::size_t iteration = 0;
};

/// Exact minimizer of (1/2)||T*f - y||^2 under periodic boundaries. T never couples
/// g and v, so each component has its own diagonal normal system in the Fourier
/// domain: frame-wise 2D transforms when all its rows are planar, 3D otherwise.
class NormalSolver {
public:
    explicit NormalSolver(const BankOperator& op);

    [[nodiscard]] PairField solve(const StackField& y) const;
    /// T^T T f, evaluated in the spatial domain.
    [[nodiscard]] PairField normal(const PairField& f) const;
    /// Smallest value of the Fourier symbol of T^T T restricted to a component.
    [[nodiscard]] double min_symbol(Component c) const;

private:
    const BankOperator* op_;
    std::array<std::unique_ptr<SpectralGrid>, 2> grids_;
    std::array<std::vector<double>, 2> symbols_;
};

struct InnerReport {
    std::vector<double> residuals;
    bool converged = false;
};

/// The image sub-problem argmin_f H(f, alpha) for fixed alpha, solved by ADMM on
/// the split T*f = w.
class ImageSubproblem {
public:
    ImageSubproblem(SplitModel model, Volume2DT measurement, AdmmConfig cfg = {});
    ImageSubproblem(const ImageSubproblem&) = delete;
    ImageSubproblem& operator=(const ImageSubproblem&) = delete;

    [[nodiscard]] const SplitModel& model() const { return model_; }
    [[nodiscard]] const BankOperator& op() const { return op_; }
    [[nodiscard]] const NormalSolver& normal_solver() const { return solver_; }
    [[nodiscard]] const Volume2DT& measurement() const { return m_; }
    [[nodiscard]] const AdmmConfig& config() const { return cfg_; }

    /// w = T*f0, beta = 0.
    [[nodiscard]] SplitState initial_state(PairField f0) const;

    /// Per-slice prox of R at x = T*f + beta/rho.
    [[nodiscard]] StackField w_step(const SplitState& s, double alpha, double lambda) const;
    /// argmin_f (1/2)||T*f - (w - beta/rho)||^2
    [[nodiscard]] PairField f_step(const StackField& w, const StackField& beta) const;
    /// beta + rho (T*f - w)
    [[nodiscard]] StackField beta_step(const StackField& beta, const StackField& tf, const StackField& w) const;

    [[nodiscard]] double augmented_lagrangian(const SplitState& s, double alpha, double lambda) const;
    [[nodiscard]] static double primal_residual(const SplitState& s);

    /// Runs ADMM sweeps on `s` until the primal residual reaches tolerance or the
    /// iteration budget is spent. Throws DivergenceError on non-finite iterates.
    InnerReport iterate(SplitState& s, double alpha, double lambda) const;

private:
    SplitModel model_;
    Volume2DT m_;
    AdmmConfig cfg_;
    BankOperator op_;
    NormalSolver solver_;
};

/// Cold-started solve from f_init (w = T*f_init, beta = 0).
PairField solve_image_subproblem(const PairField& f_init, double alpha, double lambda, const Volume2DT& m,
                                 const SplitModel& model, const AdmmConfig& cfg,
                                 std::vector<double>* residual_history = nullptr);

}  // namespace pstaic
