#pragma once

// Shared vocabulary for cardinality-constrained multi-objective problems:
// dense vector aliases, support sets, the sparsity budget, dominance and the
// Euclidean projection onto {x : ||x||_0 <= s}.

#include <Eigen/Dense>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "sparsemoo/errors.hpp"

namespace sparsemoo {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Entries with magnitude at or below this are treated as structural zeros.
inline constexpr double kZeroTol = 1e-12;

/// Sorted, duplicate-free set of 0-based coordinate indices inside [0, n).
/// Serialized forms are 1-based.
class SupportSet {
public:
    SupportSet() = default;
    SupportSet(std::vector<int> indices, int n);

    static SupportSet full(int n);
    /// Indices whose magnitude exceeds kZeroTol.
    static SupportSet of(const Eigen::Ref<const Vector>& x);

    const std::vector<int>& indices() const { return indices_; }
    int dimension() const { return n_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(int i) const;
    bool includes(const SupportSet& other) const;
    SupportSet complement() const;

    /// "1;3;4" (1-based, semicolon separated); empty set gives "".
    std::string to_string() const;
    static SupportSet parse(const std::string& text, int n);

    friend bool operator==(const SupportSet&, const SupportSet&) = default;
    friend auto operator<=>(const SupportSet& a, const SupportSet& b) {
        return a.indices_ <=> b.indices_;
    }

private:
    std::vector<int> indices_;
    int n_ = 0;
};

/// Cardinality bound s with 1 <= s < n.
class SparseBudget {
public:
    SparseBudget(int s, int n);
    int s() const { return s_; }
    int dimension() const { return n_; }

private:
    int s_;
    int n_;
};

/// Smooth vector-valued objective F : R^n -> R^m with Lipschitz gradients.
/// Implementations must be safe to call concurrently.
class MultiObjectiveProblem {
public:
    virtual ~MultiObjectiveProblem() = default;

    virtual int dimension() const = 0;
    virtual int num_objectives() const = 0;
    virtual Vector evaluate(const Eigen::Ref<const Vector>& x) const = 0;
    /// n x m matrix; column j is the gradient of objective j.
    virtual Matrix gradients(const Eigen::Ref<const Vector>& x) const = 0;
    /// Per-objective gradient Lipschitz constants, all positive.
    virtual Vector lipschitz() const = 0;
};

template <typename Derived>
int l0_norm(const Eigen::MatrixBase<Derived>& x) {
    int count = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x(i)) > kZeroTol) {
            ++count;
        }
    }
    return count;
}

template <typename Derived>
bool is_feasible(const Eigen::MatrixBase<Derived>& x, const SparseBudget& budget) {
    return x.size() == budget.dimension() && l0_norm(x) <= budget.s();
}

/// u dominates v: u <= v componentwise and u != v.
template <typename DerivedA, typename DerivedB>
bool dominates(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
    if (u.size() != v.size()) {
        throw UsageError("dominates: objective vectors of different length");
    }
    bool strict = false;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (u(j) > v(j)) {
            return false;
        }
        if (u(j) < v(j)) {
            strict = true;
        }
    }
    return strict;
}

/// Keeps the s largest-magnitude entries of x, zeroing the rest. Equal
/// magnitudes keep the smaller index.
template <typename Derived>
VectorX<typename Derived::Scalar> project_sparse(const Eigen::MatrixBase<Derived>& x,
                                                  const SparseBudget& budget) {
    using Scalar = typename Derived::Scalar;
    const auto n = x.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(x(a)) > std::abs(x(b));
    });
    VectorX<Scalar> out = VectorX<Scalar>::Zero(n);
    const auto keep = std::min<Eigen::Index>(budget.s(), n);
    for (Eigen::Index k = 0; k < keep; ++k) {
        out(order[static_cast<std::size_t>(k)]) = x(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

/// All J with supp(x) contained in J and |J| = s, in lexicographic order.
std::vector<SupportSet> super_supports(const Eigen::Ref<const Vector>& x, const SparseBudget& budget);

/// Binomial coefficient, saturating at the largest representable value.
unsigned long long binomial(int n, int k);

/// Calls visit(indices) for every k-subset of {0..n-1} in lexicographic
/// order. Stops early if visit returns false.
template <typename Visitor>
void for_each_combination(int n, int k, Visitor&& visit) {
    if (k < 0 || k > n) {
        return;
    }
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (!visit(static_cast<const std::vector<int>&>(idx))) {
            return;
        }
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) {
            --i;
        }
        if (i < 0) {
            return;
        }
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

/// Sub-vector of x on the given indices.
Vector gather(const Eigen::Ref<const Vector>& x, const std::vector<int>& indices);

}  // namespace sparsemoo
