#pragma once

// Benchmark problems: random bi-objective quadratics with a prescribed
// condition number, and the bi-objective sparse logistic regression
// (mean logistic loss, half squared norm).

#include <cstdint>
#include <string>
#include <vector>

#include "sparsemoo/core.hpp"

namespace sparsemoo {

/// f_j(x) = 1/2 x^T Q_j x - c_j^T x + r_j for j = 1..m.
class QuadraticProblem final : public MultiObjectiveProblem {
public:
    /// Lipschitz constants default to the largest eigenvalue of each Q_j.
    QuadraticProblem(std::vector<Matrix> Q, std::vector<Vector> c, Vector constants = {}, Vector lipschitz = {});

    int dimension() const override { return static_cast<int>(c_.front().size()); }
    int num_objectives() const override { return static_cast<int>(c_.size()); }
    Vector evaluate(const Eigen::Ref<const Vector>& x) const override;
    Matrix gradients(const Eigen::Ref<const Vector>& x) const override;
    Vector lipschitz() const override { return lipschitz_; }

    const std::vector<Matrix>& hessians() const { return Q_; }
    const std::vector<Vector>& linear_terms() const { return c_; }
    const Vector& constants() const { return r_; }

private:
    std::vector<Matrix> Q_;
    std::vector<Vector> c_;
    Vector r_;
    Vector lipschitz_;
};

struct QuadraticInstance {
    int n = 0;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    int s = 0;  ///< 0 when unspecified
    Matrix Q1, Q2;
    Vector c1, c2;
    Vector constants = Vector::Zero(2);

    QuadraticProblem problem() const;
};

/// Q_j = R D R^T with R orthogonal (QR of a seeded Gaussian matrix, sign
/// fixed so diag(R-factor) > 0) and D geometric from 1 to kappa; c_j uniform
/// on [-1, 1). kappa == 1 yields Q_j = I exactly.
QuadraticInstance generate_quadratic(int n, double kappa, std::uint64_t seed, int s = 0);

/// The two-dimensional illustrative problem
///   min 1/2 ((x1-3)^2 + (x2-2.5)^2, (x1-1)^2 + (x2-0.5)^2)  s.t. ||x||_0 <= 1.
QuadraticInstance example_problem();

/// Bi-objective logistic regression on samples R (N x n) and labels t in {-1, 1}.
class LogisticProblem final : public MultiObjectiveProblem {
public:
    LogisticProblem(Matrix samples, Vector labels);

    int dimension() const override { return static_cast<int>(R_.cols()); }
    int num_objectives() const override { return 2; }
    Vector evaluate(const Eigen::Ref<const Vector>& w) const override;
    Matrix gradients(const Eigen::Ref<const Vector>& w) const override;
    Vector lipschitz() const override { return lipschitz_; }

    const Matrix& samples() const { return R_; }
    const Vector& labels() const { return t_; }

private:
    Matrix R_;
    Vector t_;
    Vector lipschitz_;
};

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double spectral_norm_psd(const Eigen::Ref<const Matrix>& A, double rel_tol = 1e-8, int max_iter = 100000);

struct Dataset {
    Matrix samples;  ///< standardized features
    Vector labels;   ///< in {-1, +1}
    std::vector<std::string> feature_names;
    std::size_t dropped_rows = 0;
    std::vector<std::string> warnings;
};

/// Reads a headed numeric CSV; rows with an empty cell are dropped, features
/// are standardized with the population standard deviation, labels {0,1}
/// map to {-1,+1}.
Dataset load_dataset(const std::string& path, const std::string& label_column);

}  // namespace sparsemoo
