#pragma once

// Min-max direction subproblem
//
//     min_d  max_j (g_j^T d + b_j) + (L/2) ||d||^2
//
// solved through its dual over the unit simplex
//
//     max_{lambda in simplex}  b^T lambda - ||G lambda||^2 / (2L),
//
// with primal recovery d = -(1/L) G lambda.

#include "sparsemoo/core.hpp"

namespace sparsemoo {

struct DualInstance {
    Matrix gradients;  ///< |J| x m, one column per objective
    Vector offsets;    ///< m affine terms b
    double curvature = 1.0;
};

struct DirectionSolution {
    Vector direction;  ///< over the rows of DualInstance::gradients
    Vector lambda;     ///< simplex weights, one per objective
    double theta = 0.0;
    double duality_gap = 0.0;
};

/// Result of the Gram-level solve; direction recovery is left to the caller.
struct SimplexQpWeights {
    Vector lambda;
    double theta = 0.0;  ///< dual objective value at lambda
    double duality_gap = 0.0;
};

/// Maximizes b^T lambda - lambda^T K lambda / (2L) over the simplex where K =
/// G^T G. Exact for m <= 4 (closed form for m <= 2, face enumeration for 3
/// and 4); accelerated projected gradient otherwise.
SimplexQpWeights solve_simplex_qp_gram(const Eigen::Ref<const Matrix>& gram,
                                       const Eigen::Ref<const Vector>& offsets, double curvature);

DirectionSolution solve_simplex_qp(const DualInstance& instance);

/// Euclidean projection onto {lambda >= 0, sum lambda = 1}.
Vector project_simplex(const Eigen::Ref<const Vector>& v);

}  // namespace sparsemoo
