#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "recurlab/integer_sets.hpp"

using namespace recurlab;

namespace {

PeriodicSet random_periodic(std::mt19937_64& rng, long max_n = 64) {
    long N = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(max_n));
    std::vector<long> res;
    for (long i = 0; i < N; ++i)
        if (rng() & 1) res.push_back(i);
    if (res.empty()) res.push_back(static_cast<long>(rng() % static_cast<std::uint64_t>(N)));
    return PeriodicSet::make(N, std::move(res));
}

} // namespace

TEST_CASE("density examples") {
    CHECK(PeriodicSet::make(2, {0}).density() == rat(1, 2));
    CHECK(PeriodicSet::make(3, {0, 1}).density() == rat(2, 3));
    CHECK(PeriodicSet::integers().density() == 1);
}

TEST_CASE("canonical minimal modulus") {
    auto a = PeriodicSet::make(4, {0, 2});
    CHECK(a.modulus() == 2);
    CHECK(a.residues() == std::vector<long>{0});
    auto b = PeriodicSet::make(6, {0, 2, 4});
    CHECK(b.modulus() == 2);
    auto c = PeriodicSet::make(4, {0, 1});
    CHECK(c.modulus() == 4);
    auto full = PeriodicSet::make(5, {0, 1, 2, 3, 4});
    CHECK(full.modulus() == 1);
    CHECK(full.density() == 1);
}

TEST_CASE("density is monotone and unions fill the period") {
    auto evens = PeriodicSet::make(2, {0});
    auto all = PeriodicSet::make(2, {0, 1});
    CHECK(evens.density() < all.density());
    CHECK(all.density() == 1);
}

TEST_CASE("translate_hitting examples") {
    auto evens = PeriodicSet::make(2, {0});
    std::vector<long long> F{0, 1, 2, 3};
    auto hit = translate_hitting(evens, F);
    CHECK(hit.n == 0);
    CHECK(hit.count == 2);
    CHECK(Rat(hit.count) >= hit.bound);

    std::vector<long long> F1{1};
    auto hit1 = translate_hitting(evens, F1);
    CHECK(hit1.n == 1);
    CHECK(hit1.count == 1);

    std::vector<long long> F2{7, 9, 10};
    auto hitz = translate_hitting(PeriodicSet::integers(), F2);
    CHECK(hitz.n == 0);
    CHECK(hitz.count == 3);
}

TEST_CASE("translate_hitting satisfies the pigeonhole bound (property)") {
    std::mt19937_64 rng(71);
    for (int iter = 0; iter < 100; ++iter) {
        PeriodicSet A = random_periodic(rng);
        std::size_t f_size = 1 + (rng() % 16);
        std::vector<long long> F;
        for (std::size_t i = 0; i < f_size; ++i)
            F.push_back(static_cast<long long>(rng() % 200) - 100);
        auto hit = translate_hitting(A, F);
        CHECK(Rat(hit.count) >= A.density() * Rat(static_cast<long>(F.size())));
        // Oracle: recompute the max count over one period from scratch.
        long best = 0;
        for (long n = 0; n < A.modulus(); ++n) {
            long cnt = 0;
            for (long long f : F)
                if (A.contains(f + n)) ++cnt;
            best = std::max(best, cnt);
        }
        CHECK(hit.count == best);
    }
}

TEST_CASE("largest_delta_audit examples") {
    auto evens = PeriodicSet::make(2, {0});
    auto audit = largest_delta_audit(evens, {{0, 1}, {0, 1, 2, 3}});
    CHECK(audit.delta_star == rat(1, 2));
    CHECK(audit.delta_prime == rat(5, 8));
    CHECK(audit.ok);
    CHECK(audit.failure_family == "input family #1");
    CHECK(audit.failure_max_count == 2);

    auto audit_z = largest_delta_audit(PeriodicSet::integers(), {{0, 1}});
    CHECK(audit_z.ok);
    CHECK(audit_z.delta_star == 1);

    auto quarter = PeriodicSet::make(4, {0});
    auto audit_q = largest_delta_audit(quarter, {{0, 1, 2, 3}});
    CHECK(audit_q.delta_star == rat(1, 4));
    CHECK(audit_q.passes.size() == 1);
    CHECK(audit_q.passes[0].count == 1);
    CHECK(audit_q.ok);
}

TEST_CASE("difference_set examples (periodic)") {
    auto single = PeriodicSet::make(5, {0});
    auto d1 = difference_set(single);
    CHECK(d1.modulus() == 5);
    CHECK(d1.residues() == std::vector<long>{0});

    auto two = PeriodicSet::make(5, {0, 1});
    auto d2 = difference_set(two);
    CHECK(d2.residues() == std::vector<long>{0, 1, 4});

    auto evens = PeriodicSet::make(2, {0});
    auto d3 = difference_set(evens);
    CHECK(d3.modulus() == 2);
    CHECK(d3.residues() == std::vector<long>{0});
}

TEST_CASE("difference sets contain zero and are symmetric (property)") {
    std::mt19937_64 rng(83);
    for (int iter = 0; iter < 50; ++iter) {
        PeriodicSet A = random_periodic(rng, 32);
        PeriodicSet D = difference_set(A);
        CHECK(D.contains(0));
        for (long g = 0; g < D.modulus(); ++g)
            CHECK(D.contains(g) == D.contains(-g));
    }
}

TEST_CASE("difference_set of a window set") {
    std::vector<long long> el{0, 3, 7};
    auto S = WindowSet::from_elements(el);
    auto D = difference_set(S);
    for (long long d : {0, 3, 4, 7, -3, -4, -7}) CHECK(D.contains(d));
    CHECK_FALSE(D.contains(1));
    CHECK(D.count() == 7);
}

TEST_CASE("weyl_sum examples") {
    std::vector<long long> S;
    for (long long n = 0; n < 10; ++n) S.push_back(n);
    CHECK(weyl_sum(S, rat(1, 2)).is_zero());  // alternating sum, exact

    std::vector<long long> single{0};
    CHECK(weyl_sum(single, rat(3, 7)) == Real(1L));

    std::vector<long long> S7;
    for (long long n = 0; n < 7; ++n) S7.push_back(n);
    CHECK(weyl_sum(S7, rat(1, 7)) < Real(1e-12));  // full geometric sum
}

TEST_CASE("weyl_sum over a full period vanishes unless alpha is integral") {
    std::mt19937_64 rng(91);
    for (int iter = 0; iter < 30; ++iter) {
        long q = 2 + static_cast<long>(rng() % 11);
        long p = static_cast<long>(rng() % static_cast<std::uint64_t>(q));
        long long start = static_cast<long long>(rng() % 100) - 50;
        std::vector<long long> S;
        for (long long n = start; n < start + q; ++n) S.push_back(n);
        Rat alpha = rat(p, q);
        Real mag = weyl_sum(S, alpha);
        if (is_integer(alpha))
            CHECK(mag == Real(1L));
        else
            CHECK(mag < Real(1e-12));
    }
}

TEST_CASE("weyl_sum with an irrational frequency") {
    std::vector<long long> S;
    for (long long n = 0; n <= 500; ++n) S.push_back(n);
    Real mag = weyl_sum(S, sqrt(Real(2L)));
    CHECK(mag < Real(0.01));
    CHECK(mag >= Real(0L));
}

TEST_CASE("bohr_hit_test examples") {
    // Arcs around 0 must wrap: (0.9, 0.1) contains the point 0.
    BohrProxy around0;
    around0.freqs.push_back(BohrFrequency::rational(rat(1, 2), 0.9, 0.1));
    around0.freqs.push_back(BohrFrequency::rational(rat(1, 3), 0.9, 0.1));
    std::vector<long long> zero{0};
    auto hit0 = bohr_hit_test(WindowSet::from_elements(zero), around0);
    CHECK(hit0.hit);
    CHECK(hit0.witness == 0);

    // Evens against alpha = 1/2 and the arc (0.4, 0.6): n/2 mod 1 = 0.
    std::vector<long long> evens;
    for (long long n = 0; n <= 100; n += 2) evens.push_back(n);
    BohrProxy mid;
    mid.freqs.push_back(BohrFrequency::rational(rat(1, 2), 0.4, 0.6));
    CHECK_FALSE(bohr_hit_test(WindowSet::from_elements(evens), mid).hit);

    // Irrational alpha close to sqrt(2): the three-distance theorem
    // guarantees a hit in a narrow arc within ~1/0.02 steps.
    std::vector<long long> interval;
    for (long long n = 0; n <= 100; ++n) interval.push_back(n);
    BohrProxy narrow;
    narrow.freqs.push_back(BohrFrequency::irrational(sqrt(Real(2L)), 0.49, 0.51));
    auto hit = bohr_hit_test(WindowSet::from_elements(interval), narrow);
    CHECK(hit.hit);
    // Verify the witness directly.
    Real frac = detail::frac_times(sqrt(Real(2L)), hit.witness);
    CHECK(frac > Real(0.49));
    CHECK(frac < Real(0.51));
}

TEST_CASE("window set operations") {
    auto w = WindowSet::empty_at(-5);
    w.insert(-5);
    w.insert(3);
    w.insert(0);
    CHECK(w.contains(-5));
    CHECK(w.contains(0));
    CHECK(w.contains(3));
    CHECK_FALSE(w.contains(1));
    CHECK(w.count() == 3);
    auto s = w.shifted(2);
    CHECK(s.contains(-3));
    CHECK(s.contains(5));
    CHECK_FALSE(s.contains(0));
    CHECK(WindowSet::interval(0, 4).count() == 5);
    CHECK_THROWS_AS(WindowSet::interval(3, 1), Error);
}
