#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the simplex solver, the support enumeration or the projection
// of the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct GridResult {
    double theta;
    double t;  // weight on the first objective
};

/// Two-objective min-max value via a uniform grid over the dual weight:
///   max_t  t b1 + (1-t) b2 - ||t g1 + (1-t) g2||^2 / (2L).
inline GridResult lambda_grid(const Vec& g1, const Vec& g2, double b1, double b2, double L, double step = 1e-4) {
    GridResult best{-std::numeric_limits<double>::infinity(), 0.0};
    const int count = static_cast<int>(std::lround(1.0 / step));
    for (int k = 0; k <= count; ++k) {
        const double t = static_cast<double>(k) / count;
        double sq = 0.0;
        for (Eigen::Index i = 0; i < g1.size(); ++i) {
            const double v = t * g1(i) + (1.0 - t) * g2(i);
            sq += v * v;
        }
        const double value = t * b1 + (1.0 - t) * b2 - sq / (2.0 * L);
        if (value > best.theta) {
            best = {value, t};
        }
    }
    return best;
}

/// Subspace value theta_J for two objectives (curvature 1, no offsets).
inline double theta_subspace_grid(const Mat& grads, const std::vector<int>& J) {
    Vec g1(J.size()), g2(J.size());
    for (std::size_t k = 0; k < J.size(); ++k) {
        g1(static_cast<Eigen::Index>(k)) = grads(J[k], 0);
        g2(static_cast<Eigen::Index>(k)) = grads(J[k], 1);
    }
    return lambda_grid(g1, g2, 0.0, 0.0, 1.0).theta;
}

/// All index subsets of {0..n-1} of size k via bitmasks.
inline std::vector<std::vector<int>> subsets_of_size(int n, int k) {
    std::vector<std::vector<int>> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) {
            continue;
        }
        std::vector<int> s;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                s.push_back(i);
            }
        }
        out.push_back(s);
    }
    return out;
}

/// theta_L for two objectives by enumerating supports of size s with a
/// lambda grid inside each support.
inline double theta_L_grid(const Mat& grads, const Vec& x, int s, double L, double step = 1e-4) {
    const int n = static_cast<int>(x.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& K : subsets_of_size(n, s)) {
        std::vector<bool> in(static_cast<std::size_t>(n), false);
        for (int i : K) in[static_cast<std::size_t>(i)] = true;
        double b1 = 0.0, b2 = 0.0, fixed_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!in[static_cast<std::size_t>(i)]) {
                b1 += -grads(i, 0) * x(i);
                b2 += -grads(i, 1) * x(i);
                fixed_sq += x(i) * x(i);
            }
        }
        b1 += 0.5 * L * fixed_sq;
        b2 += 0.5 * L * fixed_sq;
        Vec g1(K.size()), g2(K.size());
        for (std::size_t k = 0; k < K.size(); ++k) {
            g1(static_cast<Eigen::Index>(k)) = grads(K[k], 0);
            g2(static_cast<Eigen::Index>(k)) = grads(K[k], 1);
        }
        best = std::min(best, lambda_grid(g1, g2, b1, b2, L, step).theta);
    }
    return best;
}

/// Keeps the s entries of largest magnitude (smaller index on ties).
inline Vec hard_threshold(const Vec& v, int s) {
    std::vector<int> idx(static_cast<std::size_t>(v.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double ma = std::abs(v(a)), mb = std::abs(v(b));
        return ma > mb || (ma == mb && a < b);
    });
    Vec out = Vec::Zero(v.size());
    for (int k = 0; k < s && k < v.size(); ++k) out(idx[static_cast<std::size_t>(k)]) = v(idx[static_cast<std::size_t>(k)]);
    return out;
}

/// Central finite differences of a scalar function.
inline Vec finite_difference(const std::function<double(const Vec&)>& f, const Vec& x) {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x(i)));
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

inline double relative_error(const Vec& a, const Vec& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

struct MonteCarloEstimate {
    double mean;
    double stderr_;
};

/// Area dominated by the points inside the box [lo, ref] by uniform sampling.
inline MonteCarloEstimate hypervolume_mc(const std::vector<Vec>& pts, const Vec& lo, const Vec& ref, long samples,
                                         unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u0(lo(0), ref(0)), u1(lo(1), ref(1));
    long hits = 0;
    for (long k = 0; k < samples; ++k) {
        const double a = u0(gen), b = u1(gen);
        for (const Vec& p : pts) {
            if (p(0) <= a && p(1) <= b) {
                ++hits;
                break;
            }
        }
    }
    const double area = (ref(0) - lo(0)) * (ref(1) - lo(1));
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {area * p, area * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

}  // namespace oracle
