#pragma once

// Single-point solvers for min F(x) s.t. ||x||_0 <= s:
//   moiht           multi-objective iterative hard thresholding
//   mosd            steepest common descent restricted to a fixed subspace
//   mospd           penalty decomposition (alternating penalized descent / projection)
//   mohyb           mospd followed by moiht
//   scalarized_iht  iterative hard thresholding on f1 + lambda f2

#include <chrono>
#include <optional>
#include <vector>

#include "sparsemoo/core.hpp"
#include "sparsemoo/directions.hpp"

namespace sparsemoo {

struct ArmijoParams {
    double alpha0 = 1.0;
    double delta = 0.5;
    double gamma = 1e-4;
    int max_backtracks = 50;
};

struct PenaltyParams {
    double tau0 = 1.0;
    double tau_growth = 1.5;
    double eps0 = 1e-2;
    double eps_shrink = 0.9;
    double xy_tol = 1e-3;
    int max_outer = 500;
    int max_inner = 100;
};

struct SolverConfig {
    double L = 0.0;  ///< curvature for theta_L; 0 means 1.1 * max_j L(f_j)
    double eps = kDefaultStationarityTol;
    int max_iter = 10000;
    ArmijoParams armijo;
    PenaltyParams penalty;
    unsigned long long enumeration_cap = kDefaultEnumerationCap;

    /// Defaults for the quadratic benchmark.
    static SolverConfig quadratic_defaults();
    /// Defaults for sparse logistic regression.
    static SolverConfig logistic_defaults();

    void validate() const;
    double curvature_for(const MultiObjectiveProblem& problem) const;
};

enum class SolverStatus { converged, budget_exhausted };

struct TraceStep {
    Vector point;
    Vector objectives;
    double theta = 0.0;
};

struct SolverTrace {
    std::vector<TraceStep> iterates;
    SolverStatus status = SolverStatus::budget_exhausted;
    double curvature = 0.0;

    std::size_t steps() const { return iterates.empty() ? 0 : iterates.size() - 1; }
};

struct SolverResult {
    Vector point;
    SolverTrace trace;
};

struct MosdResult {
    Vector point;
    int iterations = 0;
    SolverStatus status = SolverStatus::budget_exhausted;
    double theta = 0.0;
};

SolverResult moiht(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0,
                   const SparseBudget& budget, const SolverConfig& cfg);

/// Largest alpha = alpha0 delta^h (h <= max_backtracks) with
/// f_j(x + alpha d) <= f_j(x) + gamma alpha theta for every j in the subset;
/// 0 when no such h exists.
double armijo_common(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& d, double theta, const ObjectiveSet& objectives,
                     const ArmijoParams& params, const Vector* fx = nullptr);

MosdResult mosd(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0, const SupportSet& J,
                double eps, const SolverConfig& cfg);

Vector mospd(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0, const SparseBudget& budget,
             const SolverConfig& cfg);

SolverResult mohyb(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x0,
                   const SparseBudget& budget, const SolverConfig& cfg);

/// {2^(i + 1/2) : i = -n, ..., n - 1}.
std::vector<double> scalarization_grid(int n);

/// One point per weight: iterative hard thresholding on f1 + lambda f2 from x0,
/// with curvature 1.1 (L(f1) + lambda L(f2)). Requires m = 2.
std::vector<Vector> scalarized_iht(const MultiObjectiveProblem& problem, const SparseBudget& budget,
                                   const std::vector<double>& lambdas, const Eigen::Ref<const Vector>& x0,
                                   const SolverConfig& cfg);

/// F(x) + tau/2 ||x - anchor||^2 on every objective.
class PenalizedProblem final : public MultiObjectiveProblem {
public:
    PenalizedProblem(const MultiObjectiveProblem& base, Vector anchor, double tau);
    int dimension() const override { return base_.dimension(); }
    int num_objectives() const override { return base_.num_objectives(); }
    Vector evaluate(const Eigen::Ref<const Vector>& x) const override;
    Matrix gradients(const Eigen::Ref<const Vector>& x) const override;
    Vector lipschitz() const override;

private:
    const MultiObjectiveProblem& base_;
    Vector anchor_;
    double tau_;
};

/// Single objective sum_j w_j f_j.
class WeightedSumProblem final : public MultiObjectiveProblem {
public:
    WeightedSumProblem(const MultiObjectiveProblem& base, Vector weights);
    int dimension() const override { return base_.dimension(); }
    int num_objectives() const override { return 1; }
    Vector evaluate(const Eigen::Ref<const Vector>& x) const override;
    Matrix gradients(const Eigen::Ref<const Vector>& x) const override;
    Vector lipschitz() const override;

private:
    const MultiObjectiveProblem& base_;
    Vector weights_;
};

}  // namespace sparsemoo
