#include "sparsemoo/directions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparsemoo {

namespace {

void require_finite_point(const Eigen::Ref<const Vector>& x) {
    if (!x.allFinite()) {
        throw DomainError("non-finite point");
    }
}

Vector scatter(const Vector& values, const SupportSet& J) {
    Vector out = Vector::Zero(J.dimension());
    for (std::size_t k = 0; k < J.size(); ++k) {
        out(J.indices()[k]) = values(static_cast<Eigen::Index>(k));
    }
    return out;
}

}  // namespace

ObjectiveSet all_objectives(int m) {
    ObjectiveSet out(static_cast<std::size_t>(m));
    std::iota(out.begin(), out.end(), 0);
    return out;
}

DirectionSolution theta_subspace(const Eigen::Ref<const Matrix>& gradients, const SupportSet& J,
                                 const ObjectiveSet& objectives) {
    if (objectives.empty()) {
        throw UsageError("theta_subspace: empty objective subset");
    }
    const int m = static_cast<int>(gradients.cols());
    for (int j : objectives) {
        if (j < 0 || j >= m) {
            throw UsageError("theta_subspace: objective index out of range");
        }
    }
    if (J.dimension() != gradients.rows()) {
        throw UsageError("theta_subspace: support dimension mismatch");
    }
    DualInstance inst;
    inst.gradients.resize(static_cast<Eigen::Index>(J.size()), static_cast<Eigen::Index>(objectives.size()));
    for (std::size_t r = 0; r < J.size(); ++r) {
        for (std::size_t c = 0; c < objectives.size(); ++c) {
            inst.gradients(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                gradients(J.indices()[r], objectives[c]);
        }
    }
    inst.offsets = Vector::Zero(static_cast<Eigen::Index>(objectives.size()));
    inst.curvature = 1.0;
    const DirectionSolution reduced = solve_simplex_qp(inst);

    DirectionSolution out;
    out.direction = scatter(reduced.direction, J);
    out.lambda = Vector::Zero(m);
    for (std::size_t c = 0; c < objectives.size(); ++c) {
        out.lambda(objectives[c]) = reduced.lambda(static_cast<Eigen::Index>(c));
    }
    out.theta = reduced.theta;
    out.duality_gap = reduced.duality_gap;
    return out;
}

DirectionSolution theta_subspace(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                                 const SupportSet& J, const ObjectiveSet& objectives) {
    require_finite_point(x);
    return theta_subspace(problem.gradients(x), J, objectives);
}

SparseDirectionSolution theta_feasible(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                                       const SparseBudget& budget) {
    require_finite_point(x);
    if (!is_feasible(x, budget)) {
        throw DomainError("theta_feasible: point violates the sparsity budget");
    }
    // A direction v is feasible at x iff v has at most s - ||x||_0 nonzeros
    // outside supp(x), i.e. supp(v) lies inside some super support J of x.
    // The feasible cone is therefore the union of the subspaces {v_{J^c} = 0}
    // and theta(x) is the minimum of theta_J(x) over the super supports.
    const Matrix grads = problem.gradients(x);
    const ObjectiveSet all = all_objectives(problem.num_objectives());
    SparseDirectionSolution best;
    best.theta = std::numeric_limits<double>::infinity();
    for (const SupportSet& J : super_supports(x, budget)) {
        DirectionSolution sol = theta_subspace(grads, J, all);
        if (sol.theta < best.theta) {
            best.direction = std::move(sol.direction);
            best.lambda = std::move(sol.lambda);
            best.theta = sol.theta;
            best.support = J;
        }
    }
    return best;
}

SparseDirectionSolution theta_L(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                                const SparseBudget& budget, double L, unsigned long long enumeration_cap) {
    require_finite_point(x);
    if (!(L > 0.0)) {
        throw UsageError("theta_L: L must be positive");
    }
    if (!is_feasible(x, budget)) {
        throw DomainError("theta_L: point violates the sparsity budget");
    }
    const int n = budget.dimension();
    const int s = budget.s();
    const bool single = problem.num_objectives() == 1;
    const unsigned long long count = binomial(n, s);
    // One objective needs no enumeration: the best support holds the s largest
    // entries of the gradient step.
    if (!single && count > enumeration_cap) {
        throw CapacityError("theta_L: " + std::to_string(count) + " candidate supports exceed the cap of " +
                            std::to_string(enumeration_cap) + "; reduce n or s");
    }
    const Matrix grads = problem.gradients(x);
    const int m = static_cast<int>(grads.cols());

    // For a support K of size s, x + d lies in the subspace of K, so
    // d_{K^c} = -x_{K^c} is fixed and contributes the offsets
    //   b_j = -grad_{K^c} f_j^T x_{K^c} + L/2 ||x_{K^c}||^2,
    // while d_K is the free part of a min-max problem with curvature L.
    // Per-coordinate pieces make each candidate a pair of small sums.
    std::vector<Matrix> outer(static_cast<std::size_t>(n));
    Matrix offset_part(m, n);
    for (int i = 0; i < n; ++i) {
        const Vector g = grads.row(i).transpose();
        outer[static_cast<std::size_t>(i)] = g * g.transpose();
        offset_part.col(i) = -g * x(i) + Vector::Constant(m, 0.5 * L * x(i) * x(i));
    }

    // Only coordinates in supp(x) carry offset terms.
    const std::vector<int> nonzero = SupportSet::of(x).indices();
    std::vector<char> in_support(static_cast<std::size_t>(n), 0);
    Matrix gram(m, m);
    Vector offsets(m);
    const auto assemble = [&](const std::vector<int>& K) {
        gram.setZero();
        offsets.setZero();
        for (int i : K) {
            in_support[static_cast<std::size_t>(i)] = 1;
            gram += outer[static_cast<std::size_t>(i)];
        }
        for (int i : nonzero) {
            if (!in_support[static_cast<std::size_t>(i)]) {
                offsets += offset_part.col(i);
            }
        }
        for (int i : K) {
            in_support[static_cast<std::size_t>(i)] = 0;
        }
    };
    // Every simplex vertex is dual feasible, so theta_K >= max_j (b_j - K_jj / 2L).
    const auto vertex_bound = [&] {
        double bound = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            bound = std::max(bound, offsets(j) - gram(j, j) / (2.0 * L));
        }
        return bound;
    };

    // Incumbent from thresholding the averaged gradient step. It only tightens
    // the pruning threshold; the lexicographic tie-break still decides.
    std::vector<int> seed_support;
    {
        const Vector step = x - grads.rowwise().mean() / L;
        seed_support = SupportSet::of(project_sparse(step, budget)).indices();
        for (int i = 0; static_cast<int>(seed_support.size()) < s; ++i) {
            if (std::find(seed_support.begin(), seed_support.end(), i) == seed_support.end()) {
                seed_support.push_back(i);
            }
        }
    }
    assemble(seed_support);
    double threshold = solve_simplex_qp_gram(gram, offsets, L).theta;
    const auto slack = [](double t) { return 1e-12 * (1.0 + std::abs(t)); };

    std::vector<int> best_support;
    double best_theta = std::numeric_limits<double>::infinity();
    Vector best_lambda;
    if (single) {
        const Vector step = (x - grads.col(0) / L).cwiseAbs();
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        // Ties favor smaller indices, matching the lexicographic rule below.
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return step(a) > step(b); });
        best_support.assign(order.begin(), order.begin() + s);
        std::sort(best_support.begin(), best_support.end());
        assemble(best_support);
        const SimplexQpWeights w = solve_simplex_qp_gram(gram, offsets, L);
        best_theta = w.theta;
        best_lambda = w.lambda;
    }
    for_each_combination(single ? 0 : n, single ? 1 : s, [&](const std::vector<int>& K) {
        assemble(K);
        if (vertex_bound() > threshold + slack(threshold)) {
            return true;
        }
        const SimplexQpWeights w = solve_simplex_qp_gram(gram, offsets, L);
        if (w.theta < best_theta) {
            best_theta = w.theta;
            best_support = K;
            best_lambda = w.lambda;
            threshold = std::min(threshold, best_theta);
        }
        return true;
    });

    SparseDirectionSolution out;
    out.support = SupportSet(best_support, n);
    out.theta = best_theta;
    out.lambda = best_lambda;
    out.direction = -x;
    Matrix G_K(s, m);
    for (int r = 0; r < s; ++r) {
        G_K.row(r) = grads.row(best_support[static_cast<std::size_t>(r)]);
    }
    Vector free_part = Vector::Zero(s);
    if ((G_K.transpose() * G_K).cwiseAbs().maxCoeff() != 0.0) {
        free_part = -(G_K * best_lambda) / L;
    }
    for (int r = 0; r < s; ++r) {
        out.direction(best_support[static_cast<std::size_t>(r)]) = free_part(r);
    }
    return out;
}

bool is_L_stationary(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                     const SparseBudget& budget, double L, double eps, unsigned long long enumeration_cap) {
    if (!(eps > 0.0)) {
        throw UsageError("is_L_stationary: eps must be positive");
    }
    return theta_L(problem, x, budget, L, enumeration_cap).theta > -eps;
}

bool is_pareto_stationary(const MultiObjectiveProblem& problem, const Eigen::Ref<const Vector>& x,
                          const SparseBudget& budget, double eps) {
    if (!(eps > 0.0)) {
        throw UsageError("is_pareto_stationary: eps must be positive");
    }
    return theta_feasible(problem, x, budget).theta > -eps;
}

}  // namespace sparsemoo
