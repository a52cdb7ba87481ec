#pragma once

// Stationarity measures for cardinality-constrained multi-objective problems.
//
//   theta_subspace : min_d max_{j in I} grad f_j(x)^T d + 1/2 ||d||^2, d = 0 off J
//   theta_feasible : same over the feasible directions at x (Pareto-stationarity)
//   theta_L        : min over x + d sparse of max_j grad f_j(x)^T d + L/2 ||d||^2
//
// All values are <= 0 and vanish exactly at the corresponding stationary points.

#include <vector>

#include "sparsemoo/core.hpp"
#include "sparsemoo/simplex_qp.hpp"

namespace sparsemoo {

struct SparseDirectionSolution {
    Vector direction;  ///< full length n
    SupportSet support;
    double theta = 0.0;
    Vector lambda;
};

inline constexpr double kDefaultStationarityTol = 1e-7;
inline constexpr unsigned long long kDefaultEnumerationCap = 2'000'000;

/// Objective subset as sorted 0-based indices.
using ObjectiveSet = std::vector<int>;

ObjectiveSet all_objectives(int m);

/// Direction restricted to the subspace J for the objectives in I. The
/// returned lambda has length m with zeros outside I.
DirectionSolution theta_subspace(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                                 const SupportSet& J, const ObjectiveSet& objectives);
DirectionSolution theta_subspace(const Eigen::Ref<const Matrix>& gradients, const SupportSet& J,
                                 const ObjectiveSet& objectives);

SparseDirectionSolution theta_feasible(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                                       const SparseBudget& budget);

SparseDirectionSolution theta_L(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                                const SparseBudget& budget, double L,
                                unsigned long long enumeration_cap = kDefaultEnumerationCap);

bool is_L_stationary(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                     const SparseBudget& budget, double L, double eps = kDefaultStationarityTol,
                     unsigned long long enumeration_cap = kDefaultEnumerationCap);

bool is_pareto_stationary(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                          const SparseBudget& budget, double eps = kDefaultStationarityTol);

}  // namespace sparsemoo
