#include "doctest.h"
#include "oracles.hpp"
#include "sparsemoo/directions.hpp"
#include "sparsemoo/problems.hpp"
#include "sparsemoo/rng.hpp"

using namespace sparsemoo;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

// Zero gradients at the origin.
QuadraticProblem flat_at_origin(int n) {
    return QuadraticProblem({Matrix::Identity(n, n), 2.0 * Matrix::Identity(n, n)}, {Vector::Zero(n), Vector::Zero(n)});
}

Vector random_feasible(Rng& rng, int n, int s) {
    Vector x = Vector::Zero(n);
    const int nnz = static_cast<int>(rng.uniform() * (s + 1));
    for (int k = 0; k < nnz; ++k) {
        const int i = static_cast<int>(rng.uniform() * n);
        x(i) = rng.uniform(-2.0, 2.0);
    }
    return project_sparse(x, SparseBudget(s, n));
}

}  // namespace

TEST_CASE("theta_subspace examples") {
    const auto p = example_problem().problem();
    const auto a = theta_subspace(p, vec({0, 0.5}), SupportSet::full(2), {0, 1});
    CHECK(a.lambda(0) == doctest::Approx(0.0));
    CHECK(a.lambda(1) == doctest::Approx(1.0));
    CHECK(a.direction(0) == doctest::Approx(1.0));
    CHECK(a.direction(1) == doctest::Approx(0.0));
    CHECK(a.theta == doctest::Approx(-0.5));

    const auto b = theta_subspace(p, vec({2, 0}), SupportSet({0}, 2), {0, 1});
    CHECK(b.lambda(0) == doctest::Approx(0.5));
    CHECK(b.lambda(1) == doctest::Approx(0.5));
    CHECK(b.direction.norm() <= 1e-12);
    CHECK(b.theta == doctest::Approx(0.0));

    const auto flat = flat_at_origin(3);
    const auto c = theta_subspace(flat, Vector::Zero(3), SupportSet({0, 2}, 3), {0, 1});
    CHECK(c.direction.isZero(0.0));
    CHECK(c.theta == 0.0);

    CHECK_THROWS_AS(theta_subspace(p, vec({0, 0}), SupportSet::full(2), {}), UsageError);
}

TEST_CASE("theta_subspace with a single objective is the projected negative gradient") {
    const auto p = example_problem().problem();
    const auto r = theta_subspace(p, vec({0, 0}), SupportSet({1}, 2), {1});
    CHECK(r.direction(0) == 0.0);
    CHECK(r.direction(1) == doctest::Approx(0.5));
    CHECK(r.theta == doctest::Approx(-0.125));
    CHECK(r.lambda(0) == 0.0);
    CHECK(r.lambda(1) == 1.0);
}

TEST_CASE("theta_feasible examples") {
    const auto p = example_problem().problem();
    const auto a = theta_feasible(p, vec({2, 0}), SparseBudget(1, 2));
    CHECK(a.theta == doctest::Approx(0.0));
    CHECK(a.support.to_string() == "1");

    const auto b = theta_feasible(p, vec({0, 0}), SparseBudget(1, 2));
    CHECK(b.theta == doctest::Approx(-0.5));
    CHECK(b.support.to_string() == "1");
    CHECK(b.direction(1) == 0.0);

    const auto flat = flat_at_origin(4);
    CHECK(theta_feasible(flat, Vector::Zero(4), SparseBudget(2, 4)).theta == 0.0);
    CHECK_THROWS_AS(theta_feasible(p, vec({1, 1}), SparseBudget(1, 2)), DomainError);
}

TEST_CASE("theta_L examples") {
    const auto p = example_problem().problem();
    const SparseBudget budget(1, 2);
    CHECK(theta_L(p, vec({2, 0}), budget, 1.01).theta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(theta_L(p, vec({0, 0.5}), budget, 2.0).theta == doctest::Approx(0.0).epsilon(1e-12));

    const auto neg = theta_L(p, vec({0, 0.5}), budget, 0.75);
    CHECK(neg.theta < -1e-3);
    CHECK(neg.support.to_string() == "1");
    CHECK(neg.direction(1) == doctest::Approx(-0.5));
    // Enumeration oracle with a lambda grid inside each support.
    const Matrix G = p.gradients(vec({0, 0.5}));
    CHECK(neg.theta == doctest::Approx(oracle::theta_L_grid(G, vec({0, 0.5}), 1, 0.75)).epsilon(1e-6));
}

TEST_CASE("stationarity tests") {
    const auto p = example_problem().problem();
    const SparseBudget budget(1, 2);
    CHECK(is_L_stationary(p, vec({2, 0}), budget, 1.01));
    CHECK_FALSE(is_L_stationary(p, vec({0, 0.5}), budget, 0.75));
    CHECK(is_pareto_stationary(p, vec({2, 0}), budget));
    CHECK_FALSE(is_pareto_stationary(p, vec({0, 0}), budget));

    const auto flat = flat_at_origin(4);
    for (double L : {0.1, 1.0, 10.0}) CHECK(is_L_stationary(flat, Vector::Zero(4), SparseBudget(2, 4), L));
    CHECK(is_pareto_stationary(flat, Vector::Zero(4), SparseBudget(2, 4)));
}

TEST_CASE("theta_L enumeration cap") {
    const auto flat = flat_at_origin(30);
    CHECK_THROWS_AS(theta_L(flat, Vector::Zero(30), SparseBudget(15, 30), 1.0), CapacityError);
    CHECK_NOTHROW(theta_L(flat, Vector::Zero(30), SparseBudget(2, 30), 1.0, 1000));
    CHECK_THROWS_AS(theta_L(flat, Vector::Zero(30), SparseBudget(3, 30), 1.0, 1000), CapacityError);
}

TEST_CASE("theta_L against the enumeration grid oracle on random quadratics") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + trial % 4;
        const int s = 1 + trial % (n - 1);
        const auto inst = generate_quadratic(n, trial % 2 ? 10.0 : 1.0, static_cast<std::uint64_t>(trial));
        const auto p = inst.problem();
        const Vector x = random_feasible(rng, n, s);
        const double L = 1.1 * p.lipschitz().maxCoeff();
        const auto sol = theta_L(p, x, SparseBudget(s, n), L);
        const double grid = oracle::theta_L_grid(p.gradients(x), x, s, L, 1e-3);
        // The grid is a lower bound for the inner max so theta is never below it.
        CHECK(sol.theta >= grid - 1e-9);
        CHECK(sol.theta <= grid + 1e-4 * (1.0 + std::abs(grid)));
        CHECK(l0_norm(Vector(x + sol.direction)) <= s);
        CHECK(sol.theta <= 1e-12);
    }
}

TEST_CASE("theta_feasible is the minimum over super supports") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + trial % 3;
        const int s = 2;
        const auto p = generate_quadratic(n, 10.0, static_cast<std::uint64_t>(100 + trial)).problem();
        const Vector x = random_feasible(rng, n, s);
        const auto sol = theta_feasible(p, x, SparseBudget(s, n));
        double best = std::numeric_limits<double>::infinity();
        for (const auto& J : super_supports(x, SparseBudget(s, n))) {
            const double tj = theta_subspace(p, x, J, all_objectives(2)).theta;
            CHECK(sol.theta <= tj + 1e-12);
            best = std::min(best, tj);
        }
        CHECK(sol.theta == doctest::Approx(best).epsilon(1e-12));
        CHECK(sol.support.includes(SupportSet::of(x)));
    }
}

TEST_CASE("implication chain from L-stationarity to subspace stationarity") {
    Rng rng(17);
    int l_stationary = 0;
    for (int inst_id = 0; inst_id < 10; ++inst_id) {
        const int n = 4 + inst_id % 5;
        const int s = 1 + inst_id % std::min(4, n - 1);
        const auto p = generate_quadratic(n, inst_id % 2 ? 10.0 : 1.0, 500 + static_cast<std::uint64_t>(inst_id)).problem();
        const SparseBudget budget(s, n);
        const double L = 1.1 * p.lipschitz().maxCoeff();
        for (int k = 0; k < 20; ++k) {
            Vector x = random_feasible(rng, n, s);
            // Half the points are pushed to L-stationarity with hard-thresholding steps.
            if (k % 2 == 0) {
                for (int it = 0; it < 500; ++it) {
                    const auto d = theta_L(p, x, budget, L);
                    if (d.theta > -1e-12) break;
                    x += d.direction;
                }
            }
            const double tl = theta_L(p, x, budget, L).theta;
            const auto tf = theta_feasible(p, x, budget);
            if (tl >= -1e-9) {
                ++l_stationary;
                CHECK(tf.theta >= -1e-6);
            }
            if (tf.theta >= -1e-9) {
                CHECK(theta_subspace(p, x, tf.support, all_objectives(2)).theta >= -1e-6);
            }
        }
    }
    CHECK(l_stationary >= 50);
}

TEST_CASE("single objective theta_L minimizer is a projected gradient step") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + trial % 6;
        const int s = 1 + trial % (n - 1);
        const auto inst = generate_quadratic(n, 10.0, 900 + static_cast<std::uint64_t>(trial));
        const QuadraticProblem p({inst.Q1}, {inst.c1});
        const Vector x = random_feasible(rng, n, s);
        const double L = 1.1 * p.lipschitz()(0);
        const auto sol = theta_L(p, x, SparseBudget(s, n), L);
        const Vector step = x - p.gradients(x).col(0) / L;
        CHECK((x + sol.direction - project_sparse(step, SparseBudget(s, n))).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
}

TEST_CASE("single objective theta_L matches brute force without enumerating") {
    Rng rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + trial % 5, s = 1 + trial % (n - 1);
        const auto inst = generate_quadratic(n, 10.0, 1200 + static_cast<std::uint64_t>(trial));
        const QuadraticProblem p({inst.Q1}, {inst.c1});
        const Vector x = random_feasible(rng, n, s);
        const double L = 11.0;
        const Vector g = p.gradients(x).col(0);
        // theta_K = L/2 sum_{i not in K} v_i^2 - ||g||^2 / 2L with v the gradient step.
        const Vector v = x - g / L;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& K : oracle::subsets_of_size(n, s)) {
            double out = v.squaredNorm();
            for (int i : K) out -= v(i) * v(i);
            best = std::min(best, 0.5 * L * out - g.squaredNorm() / (2.0 * L));
        }
        CHECK(theta_L(p, x, SparseBudget(s, n), L).theta == doctest::Approx(best).epsilon(1e-10));
    }
    // Ties on |v| resolve to the smallest indices.
    const QuadraticProblem tie({Matrix::Identity(4, 4)}, {Vector::Ones(4)});
    CHECK(theta_L(tie, Vector::Zero(4), SparseBudget(2, 4), 1.0).support.indices() == std::vector<int>{0, 1});
    const QuadraticProblem big({Matrix::Identity(30, 30)}, {Vector::Ones(30)});
    CHECK_NOTHROW(theta_L(big, Vector::Zero(30), SparseBudget(15, 30), 1.0));
}

TEST_CASE("theta_L is continuous along perturbations inside a support") {
    const auto p = generate_quadratic(6, 10.0, 77).problem();
    const SparseBudget budget(3, 6);
    Vector x = Vector::Zero(6);
    x << 0.7, 0, -1.2, 0, 0.4, 0;
    Vector h = Vector::Zero(6);
    h << 0.3, 0, 0.2, 0, -0.25, 0;
    const double base = theta_L(p, x, budget, 11.0).theta;
    std::vector<double> gaps;
    for (int k = 0; k < 16; ++k) {
        gaps.push_back(std::abs(theta_L(p, Vector(x + h), budget, 11.0).theta - base));
        h /= 2.0;
    }
    // Far out the optimal support may switch; close in the gap shrinks at least linearly.
    for (std::size_t k = 8; k < gaps.size(); ++k) CHECK(gaps[k] <= 0.55 * gaps[k - 1] + 1e-13);
    CHECK(gaps.back() <= 1e-4);
}
