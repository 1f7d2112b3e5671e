#include "pstaic/restore.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace pstaic {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Pstaic: return "pstaic";
        case Algorithm::Pictv: return "pictv";
        case Algorithm::StaicFixed: return "staic";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "pstaic") return Algorithm::Pstaic;
    if (name == "pictv") return Algorithm::Pictv;
    if (name == "staic") return Algorithm::StaicFixed;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected pstaic, pictv or staic)");
}

void RestoreConfig::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("RestoreConfig: lambda must be > 0");
    if (outer_iterations < 1) throw std::invalid_argument("RestoreConfig: at least one outer iteration");
    if (!(tau.tau0 > 0.0)) throw std::invalid_argument("RestoreConfig: tau must be > 0");
    if (algorithm == Algorithm::StaicFixed && !(fixed_alpha >= 0.0 && fixed_alpha <= 1.0)) {
        throw std::invalid_argument("RestoreConfig: fixed alpha must lie in [0, 1]");
    }
    if (algorithm == Algorithm::Pictv && !(kappa1 > 0.0 && kappa2 > 0.0)) {
        throw std::invalid_argument("RestoreConfig: kappa must be > 0");
    }
    admm.validate();
}

std::vector<double> RestoreReport::alpha_trajectory() const {
    std::vector<double> out;
    for (const auto& s : steps) out.push_back(s.alpha);
    return out;
}

std::vector<double> RestoreReport::cost_trajectory() const {
    std::vector<double> out;
    for (const auto& s : steps) out.push_back(s.cost);
    return out;
}

SplitModel make_model(const Kernel& h, const RestoreConfig& cfg) {
    if (cfg.algorithm == Algorithm::Pictv) return SplitModel::ictv(h, cfg.kappa1, cfg.kappa2, cfg.box);
    return SplitModel::staic(h, cfg.box);
}

namespace {

PairField project(const PairField& f, const BoxSet& box) {
    PairField out = f;
    for (std::size_t c = 0; c < 2; ++c) {
        for (double& x : out.component(c).values()) x = prox_box(x, box);
    }
    return out;
}

double cost_from_tf(const SplitModel& model, const StackField& tf, double alpha, double lambda, const Volume2DT& m,
                    double tau) {
    const double b = barrier(alpha, tau);
    const double r = model.penalty(tf, alpha, lambda, m);
    return r + b;
}

}  // namespace

RestoreReport run_alternation(const Volume2DT& m, const SplitModel& model, const RestoreConfig& cfg,
                              const WeightUpdate& update) {
    cfg.validate();
    if (!m.all_finite()) throw std::invalid_argument("restore: measurement contains non-finite values");
    const auto start = std::chrono::steady_clock::now();

    ImageSubproblem problem(model, m, cfg.admm);
    const BankOperator& op = problem.op();

    PairField f = project(PairField(m, Volume2DT(m.shape())), model.box());
    SplitState state = problem.initial_state(f);
    StackField tf = state.tf;

    double reference = 1.0;
    if (cfg.tau.scale == TauPolicy::Scale::InitialRegularizer) {
        const auto reg = model.regularizer_values(tf);
        reference = cfg.lambda * (reg.spatial + reg.temporal);
    }

    RestoreReport report;
    for (std::size_t l = 0; l < cfg.outer_iterations; ++l) {
        OuterStep step;
        step.tau = resolve_tau(cfg.tau, f, reference);
        const auto reg = model.regularizer_values(tf);
        const WeightCostCoeffs coeffs{cfg.lambda * reg.spatial, cfg.lambda * reg.temporal, step.tau};
        step.c1 = coeffs.c1;
        step.c2 = coeffs.c2;
        step.alpha = update(coeffs);
        step.cost_before = cost_from_tf(model, tf, step.alpha, cfg.lambda, m, step.tau);

        InnerReport inner;
        try {
            inner = problem.iterate(state, step.alpha, cfg.lambda);
        } catch (const DivergenceError& e) {
            throw DivergenceError("outer iteration " + std::to_string(l + 1) + ": " + e.what());
        }
        step.residuals = std::move(inner.residuals);

        f = project(state.f, model.box());
        tf = op.apply(f);
        step.cost = cost_from_tf(model, tf, step.alpha, cfg.lambda, m, step.tau);
        step.slack = std::max(0.0, step.cost - step.cost_before);
        report.steps.push_back(std::move(step));
    }
    report.f = std::move(f);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

RestoreReport pstaic_restore(const Volume2DT& m, const Kernel& h, const RestoreConfig& cfg) {
    if (cfg.algorithm != Algorithm::Pstaic) throw std::invalid_argument("pstaic_restore: algorithm must be pstaic");
    return run_alternation(m, SplitModel::staic(h, cfg.box), cfg, solve_weight);
}

RestoreReport pictv_restore(const Volume2DT& m, const Kernel& h, const RestoreConfig& cfg) {
    if (cfg.algorithm != Algorithm::Pictv) throw std::invalid_argument("pictv_restore: algorithm must be pictv");
    return run_alternation(m, SplitModel::ictv(h, cfg.kappa1, cfg.kappa2, cfg.box), cfg, solve_weight);
}

RestoreReport restore(const Volume2DT& m, const Kernel& h, const RestoreConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::Pstaic: return pstaic_restore(m, h, cfg);
        case Algorithm::Pictv: return pictv_restore(m, h, cfg);
        case Algorithm::StaicFixed: {
            const double a = cfg.fixed_alpha;
            return run_alternation(m, SplitModel::staic(h, cfg.box), cfg, [a](const WeightCostCoeffs&) { return a; });
        }
    }
    throw std::invalid_argument("restore: unknown algorithm");
}

double evaluate_cost(const SplitModel& model, const PairField& f, double alpha, double lambda, const Volume2DT& m,
                     double tau) {
    const BankOperator op(model.bank(), f.shape(), BoundaryPolicy::Periodic);
    return cost_from_tf(model, op.apply(f), alpha, lambda, m, tau);
}

double evaluate_cost(const PairField& f, double alpha, double lambda, const Volume2DT& m, const Kernel& h,
                     const BoxSet& box, double tau) {
    return evaluate_cost(SplitModel::staic(h, box), f, alpha, lambda, m, tau);
}

}  // namespace pstaic
