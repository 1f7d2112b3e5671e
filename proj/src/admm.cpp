#include "pstaic/admm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace pstaic {

double AdmmConfig::tolerance_for(const Shape& shape) const {
    if (primal_tolerance > 0.0) return primal_tolerance;
    return 1e-4 * std::sqrt(static_cast<double>(shape.size()));
}

void AdmmConfig::validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("AdmmConfig: rho must be > 0");
    if (boundary != BoundaryPolicy::Periodic) {
        throw std::invalid_argument("AdmmConfig: the Fourier f-step requires periodic boundaries");
    }
}

// ---------------------------------------------------------------------------

NormalSolver::NormalSolver(const BankOperator& op) : op_(&op) {
    if (op.boundary() != BoundaryPolicy::Periodic) {
        throw std::invalid_argument("NormalSolver: periodic boundary required");
    }
    const FilterBank& bank = op.bank();
    for (std::size_t c = 0; c < 2; ++c) {
        const auto comp = static_cast<Component>(c);
        grids_[c] = std::make_unique<SpectralGrid>(op.shape(), bank.per_frame(comp));
        std::vector<double> sym(grids_[c]->spectrum_size(), 0.0);
        for (const auto& row : bank.rows()) {
            if (row.input != comp) continue;
            const auto k = grids_[c]->symbol(row.kernel);
            for (std::size_t i = 0; i < sym.size(); ++i) sym[i] += std::norm(k[i]);
        }
        if (*std::min_element(sym.begin(), sym.end()) <= 1e-12) {
            throw std::invalid_argument("NormalSolver: singular normal operator for component " +
                                        std::string(c == 0 ? "g" : "v"));
        }
        symbols_[c] = std::move(sym);
    }
}

double NormalSolver::min_symbol(Component c) const {
    const auto& s = symbols_[static_cast<std::size_t>(c)];
    return *std::min_element(s.begin(), s.end());
}

PairField NormalSolver::solve(const StackField& y) const {
    PairField rhs = op_->adjoint(y);
    for (std::size_t c = 0; c < 2; ++c) {
        const SpectralGrid& grid = *grids_[c];
        std::vector<std::complex<double>> spec(grid.spectrum_size());
        auto vals = rhs.component(c).values();
        grid.forward(vals, spec);
        const auto& sym = symbols_[c];
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] /= sym[i];
        grid.inverse(spec, vals);
    }
    return rhs;
}

PairField NormalSolver::normal(const PairField& f) const { return op_->adjoint(op_->apply(f)); }

// ---------------------------------------------------------------------------

ImageSubproblem::ImageSubproblem(SplitModel model, Volume2DT measurement, AdmmConfig cfg)
    : model_(std::move(model)),
      m_(std::move(measurement)),
      cfg_((cfg.validate(), cfg)),
      op_(model_.bank(), m_.shape(), cfg_.boundary),
      solver_(op_) {
    if (!m_.all_finite()) throw std::invalid_argument("ImageSubproblem: non-finite measurement");
}

SplitState ImageSubproblem::initial_state(PairField f0) const {
    if (!(f0.shape() == m_.shape())) throw DimensionError("initial_state: f0 does not match the measurement");
    SplitState s;
    s.tf = op_.apply(f0);
    s.w = s.tf;
    s.beta = StackField(m_.shape(), model_.channels());
    s.f = std::move(f0);
    return s;
}

StackField ImageSubproblem::w_step(const SplitState& s, double alpha, double lambda) const {
    StackField x = s.tf;
    x.add_scaled(1.0 / cfg_.rho, s.beta);
    model_.prox(x, alpha, lambda, cfg_.rho, m_);
    return x;
}

PairField ImageSubproblem::f_step(const StackField& w, const StackField& beta) const {
    StackField y = w;
    y.add_scaled(-1.0 / cfg_.rho, beta);
    return solver_.solve(y);
}

StackField ImageSubproblem::beta_step(const StackField& beta, const StackField& tf, const StackField& w) const {
    StackField out = tf;
    out -= w;
    out *= cfg_.rho;
    out += beta;
    return out;
}

double ImageSubproblem::augmented_lagrangian(const SplitState& s, double alpha, double lambda) const {
    StackField r = s.tf - s.w;
    return model_.penalty(s.w, alpha, lambda, m_) + dot(s.beta.values(), r.values()) +
           0.5 * cfg_.rho * squared_norm(r.values());
}

double ImageSubproblem::primal_residual(const SplitState& s) {
    const auto a = s.tf.values();
    const auto b = s.w.values();
    return std::sqrt(pairwise_sum(0, a.size(), [&](std::size_t i) {
        const double d = a[i] - b[i];
        return d * d;
    }));
}

InnerReport ImageSubproblem::iterate(SplitState& s, double alpha, double lambda) const {
    InnerReport report;
    const double tol = cfg_.tolerance_for(m_.shape());
    const double inv_rho = 1.0 / cfg_.rho;
    const double rho = cfg_.rho;
    StackField y(m_.shape(), model_.channels());
    // Same arithmetic as w_step / f_step / beta_step, without the temporaries.
    for (std::size_t k = 0; k < cfg_.max_iterations; ++k) {
        {
            auto w = s.w.values();
            const auto tf = s.tf.values();
            const auto beta = s.beta.values();
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = tf[i] + inv_rho * beta[i];
        }
        model_.prox(s.w, alpha, lambda, rho, m_);
        {
            auto yv = y.values();
            const auto w = s.w.values();
            const auto beta = s.beta.values();
            for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = w[i] + -inv_rho * beta[i];
        }
        s.f = solver_.solve(y);
        op_.apply_into(s.f, s.tf);
        double res2 = 0.0;
        {
            auto beta = s.beta.values();
            const auto tf = s.tf.values();
            const auto w = s.w.values();
            // one pass: block sums of the residual, reduced pairwise afterwards
            constexpr std::size_t kBlock = 128;
            std::vector<double> blocks((beta.size() + kBlock - 1) / kBlock);
            for (std::size_t j = 0; j < blocks.size(); ++j) {
                const std::size_t end = std::min(beta.size(), (j + 1) * kBlock);
                double acc = 0.0;
                for (std::size_t i = j * kBlock; i < end; ++i) {
                    const double d = tf[i] - w[i];
                    acc += d * d;
                    beta[i] = rho * d + beta[i];
                }
                blocks[j] = acc;
            }
            res2 = pairwise_sum(0, blocks.size(), [&](std::size_t j) { return blocks[j]; });
        }
        ++s.iteration;
        const double res = std::sqrt(res2);
        report.residuals.push_back(res);
        if (!std::isfinite(res)) {
            throw DivergenceError("ADMM diverged at iteration " + std::to_string(s.iteration) +
                                  " (non-finite primal residual); try a different rho");
        }
        if (res <= tol) {
            report.converged = true;
            break;
        }
    }
    return report;
}

PairField solve_image_subproblem(const PairField& f_init, double alpha, double lambda, const Volume2DT& m,
                                 const SplitModel& model, const AdmmConfig& cfg,
                                 std::vector<double>* residual_history) {
    ImageSubproblem problem(model, m, cfg);
    SplitState s = problem.initial_state(f_init);
    InnerReport report = problem.iterate(s, alpha, lambda);
    if (residual_history != nullptr) *residual_history = std::move(report.residuals);
    return std::move(s.f);
}

}  // namespace pstaic
