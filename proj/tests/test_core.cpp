#include "doctest.h"
#include "oracles.hpp"
#include "sparsemoo/core.hpp"
#include "sparsemoo/rng.hpp"

using namespace sparsemoo;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("dominates") {
    CHECK(dominates(vec({1, 2}), vec({1, 3})));
    CHECK_FALSE(dominates(vec({1, 2}), vec({1, 2})));
    CHECK_FALSE(dominates(vec({1, 3}), vec({2, 2})));
    CHECK_FALSE(dominates(vec({2, 2}), vec({1, 3})));
    CHECK_THROWS_AS(dominates(vec({1, 2}), vec({1, 2, 3})), UsageError);
}

TEST_CASE("dominates is a strict partial order on random triples") {
    Rng rng(7);
    int transitive_checks = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        Vector a(3), b(3), c(3);
        for (int j = 0; j < 3; ++j) {
            // Small integer grid so that comparable chains actually occur.
            a(j) = std::floor(rng.uniform(0, 3));
            b(j) = std::floor(rng.uniform(0, 3));
            c(j) = std::floor(rng.uniform(0, 3));
        }
        CHECK_FALSE(dominates(a, a));
        if (dominates(a, b) && dominates(b, c)) {
            ++transitive_checks;
            CHECK(dominates(a, c));
        }
        if (dominates(a, b)) {
            CHECK_FALSE(dominates(b, a));
        }
    }
    CHECK(transitive_checks > 100);
}

TEST_CASE("project_sparse examples") {
    CHECK(project_sparse(vec({3, 1, 2}), SparseBudget(2, 3)) == vec({3, 0, 2}));
    CHECK(project_sparse(vec({1, -1, 0}), SparseBudget(1, 3)) == vec({1, 0, 0}));
    CHECK(project_sparse(vec({0, 0}), SparseBudget(1, 2)) == vec({0, 0}));
    CHECK(project_sparse(vec({-5, 4, 0.5}), SparseBudget(1, 3)) == vec({-5, 0, 0}));
}

TEST_CASE("project_sparse is an idempotent nearest sparse point") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 7);
        const int s = 1 + static_cast<int>(rng.uniform() * (n - 1));
        const SparseBudget budget(s, n);
        Vector x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.normal();
        const Vector p = project_sparse(x, budget);
        CHECK(l0_norm(p) <= s);
        CHECK(project_sparse(p, budget) == p);
        CHECK(p.norm() <= x.norm());
        CHECK(p == oracle::hard_threshold(x, s));
        // Compare against every way of keeping exactly s coordinates.
        for (const auto& keep : oracle::subsets_of_size(n, s)) {
            Vector z = Vector::Zero(n);
            for (int i : keep) z(i) = x(i);
            CHECK((x - p).norm() <= (x - z).norm() + 1e-15);
        }
    }
}

TEST_CASE("super_supports") {
    const auto a = super_supports(vec({1, 0, 0}), SparseBudget(2, 3));
    REQUIRE(a.size() == 2);
    CHECK(a[0].to_string() == "1;2");
    CHECK(a[1].to_string() == "1;3");

    const auto b = super_supports(vec({1, 2, 0}), SparseBudget(2, 3));
    REQUIRE(b.size() == 1);
    CHECK(b[0].to_string() == "1;2");

    const auto c = super_supports(vec({0, 0}), SparseBudget(1, 2));
    REQUIRE(c.size() == 2);
    CHECK(c[0].to_string() == "1");
    CHECK(c[1].to_string() == "2");

    CHECK_THROWS_AS(super_supports(vec({1, 2, 3}), SparseBudget(2, 3)), DomainError);
}

TEST_CASE("super_supports count matches the binomial formula") {
    Vector x = Vector::Zero(8);
    x(2) = 1.0;
    x(5) = -3.0;
    for (int s = 2; s < 8; ++s) {
        const auto list = super_supports(x, SparseBudget(s, 8));
        CHECK(list.size() == binomial(6, s - 2));
        CHECK(std::is_sorted(list.begin(), list.end()));
        for (const auto& J : list) {
            CHECK(J.contains(2));
            CHECK(J.contains(5));
            CHECK(static_cast<int>(J.size()) == s);
        }
    }
}

TEST_CASE("sparse budget and support validation") {
    CHECK_THROWS_AS(SparseBudget(0, 3), UsageError);
    CHECK_THROWS_AS(SparseBudget(3, 3), UsageError);
    CHECK_THROWS_AS(SupportSet({0, 0}, 3), UsageError);
    CHECK_THROWS_AS(SupportSet({3}, 3), UsageError);
    const SupportSet J({2, 0}, 4);
    CHECK(J.indices() == std::vector<int>{0, 2});
    CHECK(J.complement().indices() == std::vector<int>{1, 3});
    CHECK(SupportSet::parse("1;3", 4) == J);
    CHECK(SupportSet::of(vec({0, 1e-13, 2})).indices() == std::vector<int>{2});
}

TEST_CASE("binomial and combinations") {
    CHECK(binomial(10, 5) == 252);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(3, 4) == 0);
    std::vector<std::vector<int>> seen;
    for_each_combination(4, 2, [&](const std::vector<int>& c) {
        seen.push_back(c);
        return true;
    });
    CHECK(seen == std::vector<std::vector<int>>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c = Rng(42).split(1), d = Rng(42).split(2);
    CHECK(c.next_u64() != d.next_u64());
    Rng e(3);
    for (int i = 0; i < 1000; ++i) {
        const double u = e.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
