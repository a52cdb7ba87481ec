#include "sparsemoo/simplex_qp.hpp"

#include <cmath>
#include <limits>

namespace sparsemoo {

namespace {

constexpr double kGapTol = 1e-9;
constexpr int kMaxExactObjectives = 4;
constexpr int kMaxGradientIterations = 200000;

double dual_value(const Eigen::Ref<const Matrix>& gram, const Eigen::Ref<const Vector>& b, double L,
                  const Vector& lambda) {
    return b.dot(lambda) - lambda.dot(gram * lambda) / (2.0 * L);
}

// Frank-Wolfe gap of the concave dual; equals primal(d(lambda)) - dual(lambda).
double duality_gap(const Eigen::Ref<const Matrix>& gram, const Eigen::Ref<const Vector>& b, double L,
                   const Vector& lambda) {
    const Vector grad = b - gram * lambda / L;
    return std::max(0.0, grad.maxCoeff() - grad.dot(lambda));
}

SimplexQpWeights solve_two(const Eigen::Ref<const Matrix>& K, const Eigen::Ref<const Vector>& b, double L) {
    // lambda = (t, 1 - t); the dual is a concave quadratic in t.
    const double curv = K(0, 0) - 2.0 * K(0, 1) + K(1, 1);
    const double lin = (b(0) - b(1)) - (K(0, 1) - K(1, 1)) / L;
    double t;
    if (curv > 1e-14 * (K(0, 0) + K(1, 1))) {
        t = std::clamp(L * lin / curv, 0.0, 1.0);
    } else if (lin > 0.0) {
        t = 1.0;
    } else if (lin < 0.0) {
        t = 0.0;
    } else {
        t = 0.5;
    }
    Vector lambda(2);
    lambda << t, 1.0 - t;
    return {lambda, dual_value(K, b, L, lambda), duality_gap(K, b, L, lambda)};
}

// Each face of the simplex is tried with the equality-constrained KKT system;
// the best feasible face optimum is the global one.
SimplexQpWeights solve_faces(const Eigen::Ref<const Matrix>& K, const Eigen::Ref<const Vector>& b, double L) {
    const int m = static_cast<int>(b.size());
    SimplexQpWeights best;
    best.theta = -std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> face;
        for (int j = 0; j < m; ++j) {
            if (mask & (1u << j)) {
                face.push_back(j);
            }
        }
        const int k = static_cast<int>(face.size());
        Matrix kkt = Matrix::Zero(k + 1, k + 1);
        Vector rhs(k + 1);
        for (int a = 0; a < k; ++a) {
            for (int c = 0; c < k; ++c) {
                kkt(a, c) = K(face[a], face[c]) / L;
            }
            kkt(a, k) = 1.0;
            kkt(k, a) = 1.0;
            rhs(a) = b(face[a]);
        }
        rhs(k) = 1.0;
        const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
        if (!sol.allFinite() || (kkt * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
            continue;
        }
        Vector lambda = Vector::Zero(m);
        bool feasible = true;
        for (int a = 0; a < k; ++a) {
            if (sol(a) < -1e-12) {
                feasible = false;
                break;
            }
            lambda(face[a]) = std::max(0.0, sol(a));
        }
        if (!feasible || lambda.sum() <= 0.0) {
            continue;
        }
        lambda /= lambda.sum();
        const double value = dual_value(K, b, L, lambda);
        if (value > best.theta) {
            best.lambda = lambda;
            best.theta = value;
        }
    }
    best.duality_gap = duality_gap(K, b, L, best.lambda);
    return best;
}

// FISTA on the negated dual, terminated by the duality-gap certificate.
SimplexQpWeights solve_iterative(const Eigen::Ref<const Matrix>& K, const Eigen::Ref<const Vector>& b, double L,
                                 Vector start) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(K, Eigen::EigenvaluesOnly);
    const double lip = std::max(eig.eigenvalues().maxCoeff() / L, 1e-300);
    Vector lambda = project_simplex(start);
    Vector y = lambda;
    double t = 1.0;
    SimplexQpWeights best{lambda, dual_value(K, b, L, lambda), duality_gap(K, b, L, lambda)};
    for (int it = 0; it < kMaxGradientIterations; ++it) {
        const Vector grad = b - K * y / L;
        const Vector next = project_simplex(y + grad / lip);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = next + ((t - 1.0) / t_next) * (next - lambda);
        lambda = next;
        t = t_next;
        const double gap = duality_gap(K, b, L, lambda);
        if (gap < best.duality_gap) {
            best = {lambda, dual_value(K, b, L, lambda), gap};
        }
        if (best.duality_gap <= kGapTol * std::max(1.0, std::abs(best.theta))) {
            break;
        }
    }
    return best;
}

void require_finite(const Eigen::Ref<const Matrix>& K, const Eigen::Ref<const Vector>& b, double L) {
    if (!std::isfinite(L) || !K.allFinite() || !b.allFinite()) {
        throw DomainError("solve_simplex_qp: non-finite input");
    }
    if (L <= 0.0) {
        throw UsageError("solve_simplex_qp: curvature must be positive");
    }
    if (b.size() < 1 || K.rows() != b.size() || K.cols() != b.size()) {
        throw UsageError("solve_simplex_qp: inconsistent dimensions");
    }
}

}  // namespace

Vector project_simplex(const Eigen::Ref<const Vector>& v) {
    const Eigen::Index m = v.size();
    std::vector<double> sorted(v.data(), v.data() + m);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double shift = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
        cumulative += sorted[static_cast<std::size_t>(k)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) {
            shift = candidate;
        }
    }
    return (v.array() - shift).max(0.0).matrix();
}

SimplexQpWeights solve_simplex_qp_gram(const Eigen::Ref<const Matrix>& gram,
                                       const Eigen::Ref<const Vector>& offsets, double curvature) {
    require_finite(gram, offsets, curvature);
    const int m = static_cast<int>(offsets.size());
    if (m == 1) {
        Vector lambda = Vector::Ones(1);
        return {lambda, dual_value(gram, offsets, curvature, lambda), 0.0};
    }
    if (gram.cwiseAbs().maxCoeff() == 0.0) {
        return {Vector::Constant(m, 1.0 / m), offsets.maxCoeff(), 0.0};
    }
    SimplexQpWeights result;
    if (m == 2) {
        result = solve_two(gram, offsets, curvature);
    } else if (m <= kMaxExactObjectives) {
        result = solve_faces(gram, offsets, curvature);
    } else {
        result = solve_iterative(gram, offsets, curvature, Vector::Constant(m, 1.0 / m));
    }
    if (result.duality_gap > kGapTol * std::max(1.0, std::abs(result.theta))) {
        SimplexQpWeights polished = solve_iterative(gram, offsets, curvature, result.lambda);
        if (polished.duality_gap < result.duality_gap) {
            result = polished;
        }
    }
    return result;
}

DirectionSolution solve_simplex_qp(const DualInstance& instance) {
    const Matrix& G = instance.gradients;
    if (!G.allFinite()) {
        throw DomainError("solve_simplex_qp: non-finite gradient");
    }
    if (G.cols() != instance.offsets.size()) {
        throw UsageError("solve_simplex_qp: gradient columns must match offsets");
    }
    const Matrix gram = G.transpose() * G;
    const SimplexQpWeights w = solve_simplex_qp_gram(gram, instance.offsets, instance.curvature);
    DirectionSolution out;
    out.lambda = w.lambda;
    out.theta = w.theta;
    out.duality_gap = w.duality_gap;
    if (gram.cwiseAbs().maxCoeff() == 0.0) {
        out.direction = Vector::Zero(G.rows());
    } else {
        out.direction = -(G * w.lambda) / instance.curvature;
    }
    return out;
}

}  // namespace sparsemoo
