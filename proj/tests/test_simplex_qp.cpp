#include "doctest.h"
#include "oracles.hpp"
#include "sparsemoo/rng.hpp"
#include "sparsemoo/simplex_qp.hpp"

using namespace sparsemoo;

namespace {

DualInstance make(const Matrix& G, const Vector& b, double L) {
    DualInstance inst;
    inst.gradients = G;
    inst.offsets = b;
    inst.curvature = L;
    return inst;
}

double primal_value(const DualInstance& inst, const Vector& d) {
    return (inst.gradients.transpose() * d + inst.offsets).maxCoeff() + 0.5 * inst.curvature * d.squaredNorm();
}

double dual_value(const DualInstance& inst, const Vector& lambda) {
    return inst.offsets.dot(lambda) - (inst.gradients * lambda).squaredNorm() / (2.0 * inst.curvature);
}

DualInstance random_instance(Rng& rng, int rows, int m, bool offsets) {
    Matrix G(rows, m);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < m; ++j) G(i, j) = rng.normal();
    Vector b = Vector::Zero(m);
    if (offsets)
        for (int j = 0; j < m; ++j) b(j) = rng.normal();
    return make(G, b, 0.5 + 2.0 * rng.uniform());
}

void check_solution_invariants(const DualInstance& inst, const DirectionSolution& sol) {
    CHECK((sol.lambda.array() >= 0.0).all());
    CHECK(sol.lambda.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((sol.direction + inst.gradients * sol.lambda / inst.curvature).norm() <= 1e-9);
    CHECK(std::abs(sol.theta - primal_value(inst, sol.direction)) <= 1e-8);
}

}  // namespace

TEST_CASE("symmetric unit gradients") {
    Matrix G(2, 2);
    G << 1, 0, 0, 1;
    const auto sol = solve_simplex_qp(make(G, Vector::Zero(2), 1.0));
    CHECK(sol.lambda(0) == doctest::Approx(0.5));
    CHECK(sol.lambda(1) == doctest::Approx(0.5));
    CHECK(sol.direction(0) == doctest::Approx(-0.5));
    CHECK(sol.direction(1) == doctest::Approx(-0.5));
    CHECK(sol.theta == doctest::Approx(-0.25));
}

TEST_CASE("single objective gives the scaled negative gradient") {
    Matrix G(2, 1);
    G << 2, 0;
    const auto sol = solve_simplex_qp(make(G, Vector::Zero(1), 1.0));
    CHECK(sol.direction(0) == doctest::Approx(-2.0));
    CHECK(sol.direction(1) == doctest::Approx(0.0));
    CHECK(sol.theta == doctest::Approx(-2.0));
}

TEST_CASE("two objectives against the lambda grid") {
    Matrix G(2, 2);
    G << 2, -1, 0, 1;
    const auto grid = oracle::lambda_grid(G.col(0), G.col(1), 0, 0, 1.0);
    CHECK(grid.t == doctest::Approx(0.4));
    CHECK(grid.theta == doctest::Approx(-0.2));

    const auto sol = solve_simplex_qp(make(G, Vector::Zero(2), 1.0));
    CHECK(sol.lambda(0) == doctest::Approx(0.4));
    CHECK(sol.lambda(1) == doctest::Approx(0.6));
    CHECK(sol.direction(0) == doctest::Approx(-0.2));
    CHECK(sol.direction(1) == doctest::Approx(-0.6));
    CHECK(sol.theta == doctest::Approx(-0.2));
}

TEST_CASE("degenerate zero gradients") {
    Vector b(3);
    b << 0.5, -1.0, 2.0;
    const auto sol = solve_simplex_qp(make(Matrix::Zero(4, 3), b, 1.0));
    CHECK(sol.direction.isZero(0.0));
    CHECK(sol.theta == 2.0);
    CHECK(sol.lambda.isApproxToConstant(1.0 / 3.0));
    const auto empty = solve_simplex_qp(make(Matrix::Zero(0, 2), Vector::Zero(2), 1.0));
    CHECK(empty.direction.size() == 0);
    CHECK(empty.theta == 0.0);
}

TEST_CASE("invalid inputs") {
    Matrix G(1, 2);
    G << std::nan(""), 1.0;
    CHECK_THROWS_AS(solve_simplex_qp(make(G, Vector::Zero(2), 1.0)), DomainError);
    G << 1.0, 1.0;
    CHECK_THROWS_AS(solve_simplex_qp(make(G, Vector::Zero(2), 0.0)), UsageError);
    CHECK_THROWS_AS(solve_simplex_qp(make(G, Vector::Zero(3), 1.0)), UsageError);
}

TEST_CASE("value bounds from feasible primal and dual points") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 1 + trial % 6;
        const auto inst = random_instance(rng, 1 + trial % 5, m, trial % 2 == 0);
        const auto sol = solve_simplex_qp(inst);
        check_solution_invariants(inst, sol);
        // d = 0 is primal feasible.
        CHECK(sol.theta <= inst.offsets.maxCoeff() + 1e-12);
        // Every simplex vertex is dual feasible.
        for (int j = 0; j < m; ++j) {
            const double vertex = inst.offsets(j) - inst.gradients.col(j).squaredNorm() / (2.0 * inst.curvature);
            CHECK(sol.theta >= vertex - 1e-12);
        }
        // Independent duality gap: primal at d minus dual at lambda.
        const double gap = primal_value(inst, sol.direction) - dual_value(inst, sol.lambda);
        CHECK(gap >= -1e-12);
        CHECK(gap <= 1e-9 * std::max(1.0, std::abs(sol.theta)));
    }
}

TEST_CASE("curvature scaling with zero offsets") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_instance(rng, 3, 2 + trial % 3, false);
        const auto base = solve_simplex_qp(inst);
        const double c = 0.25 + 4.0 * rng.uniform();
        inst.curvature *= c;
        const auto scaled = solve_simplex_qp(inst);
        CHECK((scaled.direction - base.direction / c).norm() <= 1e-8);
        CHECK(std::abs(scaled.theta - base.theta / c) <= 1e-8);
    }
}

TEST_CASE("two objective agreement with grid brute force") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = random_instance(rng, 1 + trial % 4, 2, trial % 2 == 1);
        const auto sol = solve_simplex_qp(inst);
        const auto grid = oracle::lambda_grid(inst.gradients.col(0), inst.gradients.col(1), inst.offsets(0),
                                              inst.offsets(1), inst.curvature);
        CHECK(std::abs(sol.theta - grid.theta) <= 1e-6);
    }
}

TEST_CASE("project_simplex") {
    Vector v(3);
    v << 0.2, 0.3, 0.5;
    CHECK(project_simplex(v).isApprox(v));
    v << 2.0, 0.0, 0.0;
    CHECK(project_simplex(v).isApprox(Vector::Unit(3, 0)));
    v << -1.0, 0.5, 0.5;
    const Vector p = project_simplex(v);
    CHECK(p(0) == 0.0);
    CHECK(p.sum() == doctest::Approx(1.0));
}
