#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "recurlab/concentration.hpp"

using namespace recurlab;

namespace {

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

} // namespace

TEST_CASE("d0 examples") {
    CHECK(d0(0, 1, 2) == Real(1L));
    CHECK(d0(2, 2, 5).is_zero());
    CHECK(abs(d0(0, 1, 4) - sqrt(Real(2L)) / Real(2L)) < Real(1e-12));
    CHECK_THROWS_AS(d0(0, 4, 4), Error);
}

TEST_CASE("distance examples") {
    auto x = RootsVector::identity(2, 4);
    CHECK(distance(x, x).is_zero());
    RootsVector y = x;
    y.exps[0] = 1;
    y.exps[1] = 1;
    CHECK(distance(x, y) == Real(2L));  // exact Hamming for k=2

    RootsVector a = RootsVector::identity(4, 2);
    RootsVector b = a;
    b.exps[0] = 1;
    b.exps[1] = 2;
    CHECK(abs(distance(a, b) - (sqrt(Real(2L)) / Real(2L) + Real(1L))) < Real(1e-12));

    CHECK_THROWS_AS(distance(x, a), Error);
}

TEST_CASE("distance is translation invariant (exhaustive k=3, r=2)") {
    const int k = 3, r = 2;
    const std::uint64_t n = 9;
    for (std::uint64_t xi = 0; xi < n; ++xi)
        for (std::uint64_t yi = 0; yi < n; ++yi)
            for (std::uint64_t zi = 0; zi < n; ++zi) {
                auto x = RootsVector::from_index(k, r, xi);
                auto y = RootsVector::from_index(k, r, yi);
                auto z = RootsVector::from_index(k, r, zi);
                Real d1 = distance(x, y);
                Real d2 = distance(x.product(z), y.product(z));
                CHECK(abs(d1 - d2) < Real(1e-25));
            }
}

TEST_CASE("index round trip") {
    for (std::uint64_t i = 0; i < 27; ++i)
        CHECK(RootsVector::from_index(3, 3, i).index() == i);
}

TEST_CASE("ball sizes: k=2 gives Hamming balls") {
    auto center = RootsVector::identity(2, 4);
    CHECK(ball({center, 0.0}).count() == 1);
    CHECK(ball({center, 1.0}).count() == 5);
    CHECK(ball({center, 2.0}).count() == 11);
    CHECK(ball({center, 3.0}).count() == 15);
    CHECK(ball({center, 4.0}).count() == 16);
    for (int t = 0; t <= 4; ++t) {
        long expect = 0;
        for (int i = 0; i <= t; ++i) expect += binom(4, i);
        CHECK(ball({center, static_cast<double>(t)}).count() ==
              static_cast<std::uint64_t>(expect));
    }
}

TEST_CASE("ball guard") {
    CHECK_THROWS_AS(SubsetOfGroup(2, 25), Error);
}

TEST_CASE("product_growth examples") {
    // Whole group.
    {
        SubsetOfGroup A(2, 2);
        for (std::uint64_t i = 0; i < 4; ++i) A.set(i);
        auto rec = product_growth(A, 1.0);
        CHECK(rec.product_card == 4);
        CHECK(rec.pass);
        CHECK(rec.bound <= Real(1L));
    }
    // Singleton at k=2, r=2, t=1: |A U_1| = 3, bound ~ -2.115.
    {
        SubsetOfGroup A(2, 2);
        A.set(0);
        auto rec = product_growth(A, 1.0);
        CHECK(rec.product_card == 3);
        CHECK(rec.pass);
        CHECK(std::abs(rec.bound.to_double() - (1.0 - 4.0 * std::exp(-0.25))) < 1e-9);
    }
    // A = U_1(0) inside k=2, r=4: the product is U_2(0) with 11 elements.
    {
        SubsetOfGroup A = ball({RootsVector::identity(2, 4), 1.0});
        REQUIRE(A.count() == 5);
        auto rec = product_growth(A, 1.0);
        CHECK(rec.product_card == 11);
        CHECK(rec.pass);
        CHECK(std::abs(rec.bound.to_double() - (1.0 - 3.2 * std::exp(-0.125))) < 1e-9);
    }
    SubsetOfGroup empty(2, 2);
    CHECK_THROWS_AS(product_growth(empty, 1.0), Error);
}

TEST_CASE("product_growth agrees with a brute-force product oracle") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 30; ++iter) {
        SubsetOfGroup A(2, 3);
        for (std::uint64_t i = 0; i < 8; ++i)
            if (rng() & 1) A.set(i);
        if (A.count() == 0) A.set(rng() % 8);
        double t = 1.0;
        auto rec = product_growth(A, t);
        // Oracle: XOR products for k=2 computed from scratch.
        SubsetOfGroup U = ball({RootsVector::identity(2, 3), t});
        std::vector<bool> prod(8, false);
        for (auto a : A.elements())
            for (auto u : U.elements()) prod[a ^ u] = true;
        std::uint64_t cnt = 0;
        for (bool b : prod) cnt += b;
        CHECK(rec.product_card == cnt);
        CHECK(rec.pass);
    }
}

TEST_CASE("avoidance_bound_check examples") {
    // Coordinate-slice subgroup at k=2, r=4.
    {
        SubsetOfGroup A(2, 4);
        for (std::uint64_t i = 0; i < 16; ++i)
            if ((i & 1) == 0) A.set(i);  // first coordinate exponent 0
        auto x = RootsVector::from_index(2, 4, 1);  // one-coordinate flip
        auto rec = avoidance_bound_check(A, x, 0.5);
        CHECK(rec.disjoint);
        CHECK(rec.pass);
        CHECK(rec.alpha == rat(1, 2));
        CHECK(std::abs(rec.bound.to_double() - std::exp(-1.0 / 64.0)) < 1e-12);
    }
    // Whole group: hypothesis vacuous.
    {
        SubsetOfGroup A(2, 4);
        for (std::uint64_t i = 0; i < 16; ++i) A.set(i);
        auto rec = avoidance_bound_check(A, RootsVector::identity(2, 4), 0.5);
        CHECK(rec.vacuous);
        CHECK(rec.pass);
    }
}

TEST_CASE("exhaustive audits find zero violations on small groups") {
    auto rep2 = concentration_exhaustive_audit(2, 3, {0.5, 1.5, 2.5}, {0, 1}, 2);
    CHECK(rep2.subsets_checked == 255);
    CHECK(rep2.violations == 0);
    // Non-boolean group too.
    auto rep3 = concentration_exhaustive_audit(3, 2, {0.5, 1.5}, {0, 1}, 2);
    CHECK(rep3.subsets_checked == 511);
    CHECK(rep3.violations == 0);
}

TEST_CASE("fast audit path agrees with the record-level checks") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 25; ++iter) {
        SubsetOfGroup A(2, 3);
        for (std::uint64_t i = 0; i < 8; ++i)
            if (rng() & 1) A.set(i);
        if (A.count() == 0) A.set(rng() % 8);
        for (double t : {0.5, 1.5}) {
            CHECK(product_growth(A, t).pass);
            CHECK(avoidance_bound_check(A, RootsVector::identity(2, 3), t).pass);
            CHECK(avoidance_bound_check(A, RootsVector::from_index(2, 3, 1), t).pass);
        }
    }
}

TEST_CASE("sampled audit runs deterministically") {
    auto a = concentration_sampled_audit(3, 3, {0.7, 1.7}, {0, 1}, 200, 42, 2);
    auto b = concentration_sampled_audit(3, 3, {0.7, 1.7}, {0, 1}, 200, 42, 1);
    CHECK(a.violations == 0);
    CHECK(b.violations == 0);
    CHECK(a.subsets_checked == 200);
}

TEST_CASE("min_r_for examples") {
    CHECK(min_r_for(0.5, 1.0) == 3);
    CHECK(min_r_for(std::exp(-1.0), 2.0) == 2);  // 4 ln(1/delta)/eps^2 hits 1 exactly
    CHECK(min_r_for(0.9, 100.0) == 1);
    CHECK_THROWS_AS(min_r_for(0.0, 1.0), Error);
    CHECK_THROWS_AS(min_r_for(1.5, 1.0), Error);
    CHECK_THROWS_AS(min_r_for(0.5, 0.0), Error);
}

TEST_CASE("min_r_for guarantee holds at the returned N") {
    for (double delta : {0.05, 0.2, 0.5, 0.8}) {
        for (double eps : {0.3, 1.0, 2.0}) {
            long N = min_r_for(delta, eps);
            CHECK(std::exp(-eps * eps * static_cast<double>(N) / 4.0) < delta);
            if (N > 1)
                CHECK_FALSE(std::exp(-eps * eps * static_cast<double>(N - 1) / 4.0) < delta);
        }
    }
}

TEST_CASE("bridge identity examples") {
    // r=2, k=2, psi differing on one cell.
    {
        auto sigma = AtomicMeasure::uniform({TorusPoint{rat(0)}, TorusPoint{rat(1, 2)}});
        auto P = equal_partition(sigma, 2);
        auto chk = l1_bridge_check(sigma, P, {0, 0}, {1, 0}, 2);
        CHECK(chk.l1 == Real(1L));
        CHECK(chk.scaled_distance == Real(1L));
        CHECK(chk.pass);
    }
    // r=4, k=4, quarter-turn difference on two cells.
    {
        auto sigma = AtomicMeasure::uniform({TorusPoint{rat(0)}, TorusPoint{rat(1, 4)},
                                             TorusPoint{rat(1, 2)}, TorusPoint{rat(3, 4)}});
        auto P = equal_partition(sigma, 4);
        auto chk = l1_bridge_check(sigma, P, {0, 0, 0, 0}, {1, 1, 0, 0}, 4);
        CHECK(abs(chk.l1 - sqrt(Real(2L)) / Real(2L)) < Real(1e-12));
        CHECK(abs(chk.scaled_distance - sqrt(Real(2L)) / Real(2L)) < Real(1e-12));
        CHECK(chk.pass);
    }
    // Identical assignments.
    {
        auto sigma = AtomicMeasure::uniform({TorusPoint{rat(0)}, TorusPoint{rat(1, 2)}});
        auto P = equal_partition(sigma, 2);
        auto chk = l1_bridge_check(sigma, P, {1, 1}, {1, 1}, 2);
        CHECK(chk.l1.is_zero());
        CHECK(chk.scaled_distance.is_zero());
        CHECK(chk.pass);
    }
}

TEST_CASE("bridge identity holds for random assignments") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        int k = 2 + static_cast<int>(rng() % 7);
        int r = 1 + static_cast<int>(rng() % 16);
        std::vector<TorusPoint> pts;
        for (int j = 0; j < r; ++j) pts.push_back(TorusPoint{Rat(j, r)});
        auto sigma = AtomicMeasure::uniform(std::move(pts));
        auto P = equal_partition(sigma, r);
        std::vector<int> psi1, psi2;
        for (int j = 0; j < r; ++j) {
            psi1.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(k)));
            psi2.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(k)));
        }
        auto chk = l1_bridge_check(sigma, P, psi1, psi2, k);
        CHECK(chk.pass);
    }
}

TEST_CASE("bridge round trip") {
    auto sigma = AtomicMeasure::uniform({TorusPoint{rat(0)}, TorusPoint{rat(1, 3)},
                                         TorusPoint{rat(2, 3)}});
    auto P = equal_partition(sigma, 3);
    std::vector<int> psi{2, 0, 1};
    RootsVector v = bridge_to_group(P, psi, 3);
    CHECK(bridge_from_group(v) == psi);
    CHECK_THROWS_AS(bridge_to_group(P, {0, 1}, 3), Error);
    CHECK_THROWS_AS(bridge_to_group(P, {0, 1, 5}, 3), Error);
}
