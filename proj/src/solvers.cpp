#include "sparsemoo/solvers.hpp"

#include <cassert>
#include <cmath>
#include <iostream>

namespace sparsemoo {

SolverConfig SolverConfig::quadratic_defaults() {
    SolverConfig cfg;
    cfg.penalty.tau_growth = 1.5;
    cfg.penalty.eps0 = 1e-2;
    cfg.penalty.eps_shrink = 0.9;
    return cfg;
}

SolverConfig SolverConfig::logistic_defaults() {
    SolverConfig cfg;
    cfg.penalty.tau0 = 1.0;
    cfg.penalty.tau_growth = 1.3;
    cfg.penalty.eps0 = 1e-5;
    cfg.penalty.eps_shrink = 0.9;
    return cfg;
}

void SolverConfig::validate() const {
    if (!(armijo.alpha0 > 0.0)) {
        throw UsageError("armijo alpha0 must be positive");
    }
    if (!(armijo.delta > 0.0 && armijo.delta < 1.0) || !(armijo.gamma > 0.0 && armijo.gamma < 1.0)) {
        throw UsageError("armijo delta and gamma must lie in (0, 1)");
    }
    if (!(penalty.tau0 > 0.0) || !(penalty.tau_growth > 1.0)) {
        throw UsageError("penalty tau0 must be positive and tau_growth > 1");
    }
    if (!(penalty.eps0 > 0.0) || !(penalty.eps_shrink > 0.0 && penalty.eps_shrink < 1.0)) {
        throw UsageError("penalty eps0 must be positive and eps_shrink in (0, 1)");
    }
    if (!(eps > 0.0) || max_iter < 0 || L < 0.0) {
        throw UsageError("eps must be positive, max_iter and L nonnegative");
    }
}

double SolverConfig::curvature_for(const MultiObjectiveProblem& problem) const {
    return L > 0.0 ? L : 1.1 * problem.lipschitz().maxCoeff();
}

PenalizedProblem::PenalizedProblem(const MultiObjectiveProblem& base, Vector anchor, double tau)
    : base_(base), anchor_(std::move(anchor)), tau_(tau) {}

Vector PenalizedProblem::evaluate(const Eigen::Ref<const Vector>& x) const {
    return base_.evaluate(x).array() + 0.5 * tau_ * (x - anchor_).squaredNorm();
}

Matrix PenalizedProblem::gradients(const Eigen::Ref<const Vector>& x) const {
    Matrix g = base_.gradients(x);
    g.colwise() += tau_ * (x - anchor_);
    return g;
}

Vector PenalizedProblem::lipschitz() const { return base_.lipschitz().array() + tau_; }

WeightedSumProblem::WeightedSumProblem(const MultiObjectiveProblem& base, Vector weights)
    : base_(base), weights_(std::move(weights)) {
    if (weights_.size() != base_.num_objectives() || (weights_.array() < 0.0).any()) {
        throw UsageError("WeightedSumProblem: one nonnegative weight per objective required");
    }
}

Vector WeightedSumProblem::evaluate(const Eigen::Ref<const Vector>& x) const {
    Vector out(1);
    out(0) = base_.evaluate(x).dot(weights_);
    return out;
}

Matrix WeightedSumProblem::gradients(const Eigen::Ref<const Vector>& x) const { return base_.gradients(x) * weights_; }

Vector WeightedSumProblem::lipschitz() const {
    Vector out(1);
    out(0) = std::max(base_.lipschitz().dot(weights_), 1e-300);
    return out;
}

SolverResult moiht(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0,
                   const SparseBudget& budget, const SolverConfig& cfg) {
    cfg.validate();
    if (!is_feasible(x0, budget)) {
        throw DomainError("moiht: starting point violates the sparsity budget");
    }
    const double L = cfg.curvature_for(problem);
    const Vector lip = problem.lipschitz();
    if (!(L > lip.maxCoeff())) {
        std::cerr << "warning: moiht curvature " << L << " does not exceed max Lipschitz constant " << lip.maxCoeff()
                  << "; descent is not guaranteed\n";
    }

    SolverResult result;
    result.trace.curvature = L;
    Vector x = x0;
    Vector fx = problem.evaluate(x);
    for (int k = 0;; ++k) {
        const SparseDirectionSolution sol = theta_L(problem, x, budget, L, cfg.enumeration_cap);
        result.trace.iterates.push_back({x, fx, sol.theta});
        if (sol.theta > -cfg.eps) {
            result.trace.status = SolverStatus::converged;
            break;
        }
        if (k >= cfg.max_iter) {
            result.trace.status = SolverStatus::budget_exhausted;
            break;
        }
        Vector next = x + sol.direction;
        Vector f_next = problem.evaluate(next);
#ifndef NDEBUG
        if (L > lip.maxCoeff()) {
            const double step_sq = sol.direction.squaredNorm();
            for (Eigen::Index j = 0; j < fx.size(); ++j) {
                assert(fx(j) - f_next(j) >= 0.5 * step_sq * (L - lip(j)) - 1e-9 * (1.0 + std::abs(fx(j))));
            }
        }
#endif
        x = std::move(next);
        fx = std::move(f_next);
    }
    result.point = x;
    return result;
}

double armijo_common(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& d, double theta, const ObjectiveSet& objectives,
                     const ArmijoParams& params, const Vector* fx) {
    if (!(theta < 0.0)) {
        throw UsageError("armijo_common: theta must be negative");
    }
    const Vector f0 = fx ? *fx : problem.evaluate(x);
    double alpha = params.alpha0;
    for (int h = 0; h <= params.max_backtracks; ++h, alpha *= params.delta) {
        const Vector f = problem.evaluate(x + alpha * d);
        bool accepted = f.allFinite();
        for (int j : objectives) {
            if (!accepted) {
                break;
            }
            accepted = f(j) <= f0(j) + params.gamma * alpha * theta;
        }
        if (accepted) {
            return alpha;
        }
    }
    return 0.0;
}

MosdResult mosd(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0, const SupportSet& J,
                double eps, const SolverConfig& cfg) {
    if (!J.includes(SupportSet::of(x0))) {
        throw DomainError("mosd: starting point has nonzeros outside the fixed support");
    }
    const ObjectiveSet all = all_objectives(problem.num_objectives());
    MosdResult out;
    Vector x = x0;
    for (int k = 0;; ++k) {
        const DirectionSolution sol = theta_subspace(problem, x, J, all);
        out.theta = sol.theta;
        if (sol.theta > -eps) {
            out.status = SolverStatus::converged;
            break;
        }
        if (k >= cfg.max_iter) {
            out.status = SolverStatus::budget_exhausted;
            break;
        }
        const double alpha = armijo_common(problem, x, sol.direction, sol.theta, all, cfg.armijo);
        if (alpha == 0.0) {
            out.status = SolverStatus::budget_exhausted;
            break;
        }
        // sol.direction is exactly zero off J, so those coordinates never move.
        x += alpha * sol.direction;
        out.iterations = k + 1;
    }
    out.point = x;
    return out;
}

Vector mospd(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0, const SparseBudget& budget,
             const SolverConfig& cfg) {
    cfg.validate();
    if (!is_feasible(x0, budget)) {
        throw DomainError("mospd: starting point violates the sparsity budget");
    }
    const SupportSet everything = SupportSet::full(budget.dimension());
    const PenaltyParams& pp = cfg.penalty;
    Vector x = x0;
    Vector y = project_sparse(x0, budget);
    double tau = pp.tau0;
    double eps = pp.eps0;
    for (int outer = 0; outer < pp.max_outer; ++outer) {
        for (int inner = 0; inner < pp.max_inner; ++inner) {
            const Vector previous = x;
            const PenalizedProblem penalized(problem, y, tau);
            x = mosd(penalized, x, everything, eps, cfg).point;
            y = project_sparse(x, budget);
            if ((x - previous).norm() < eps) {
                break;
            }
        }
        if ((x - y).norm() <= pp.xy_tol) {
            break;
        }
        tau *= pp.tau_growth;
        eps *= pp.eps_shrink;
    }
    return project_sparse(x, budget);
}

SolverResult mohyb(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0,
                   const SparseBudget& budget, const SolverConfig& cfg) {
    const Vector start = mospd(problem, x0, budget, cfg);
    return moiht(problem, start, budget, cfg);
}

std::vector<double> scalarization_grid(int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * n));
    for (int i = -n; i < n; ++i) {
        out.push_back(std::pow(2.0, static_cast<double>(i) + 0.5));
    }
    return out;
}

std::vector<Vector> scalarized_iht(const MultiObjectiveProblem& problem, const SparseBudget& budget,
                                   const std::vector<double>& lambdas, const Eigen::Ref<const Vector>& x0,
                                   const SolverConfig& cfg) {
    if (problem.num_objectives() != 2) {
        throw UsageError("scalarized_iht: requires exactly two objectives");
    }
    const Vector lip = problem.lipschitz();
    std::vector<Vector> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        if (!(lambda >= 0.0)) {
            throw UsageError("scalarized_iht: weights must be nonnegative");
        }
        Vector weights(2);
        weights << 1.0, lambda;
        const WeightedSumProblem combined(problem, weights);
        SolverConfig local = cfg;
        local.L = 1.1 * (lip(0) + lambda * lip(1));
        out.push_back(moiht(combined, x0, budget, local).point);
    }
    return out;
}

}  // namespace sparsemoo
