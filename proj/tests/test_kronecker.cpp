#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "recurlab/kronecker.hpp"

using namespace recurlab;

namespace {

/// Test-side oracle: smallest achievable sup chordal error over all
/// characters n in [0, b^r), scanning atoms directly.
Real exhaustive_min_sup(const DigitStage& stage, const StepFunction& target) {
    long long span = checked_ipow(stage.b, static_cast<unsigned>(stage.r));
    bool have = false;
    Real best;
    for (long long n = 0; n < span; ++n) {
        Real sup;
        for (std::size_t i = 0; i < stage.atoms.size(); ++i) {
            Real e = chord_turns(character_eval(n, stage.atoms[i]).turn, target.turns[i].turn);
            if (e > sup) sup = e;
        }
        if (!have || sup < best) {
            have = true;
            best = sup;
        }
    }
    return best;
}

StepFunction target_from_level_digits(const DigitStage& stage, const std::vector<long>& digits) {
    StepFunction f;
    f.turns.resize(stage.atoms.size(), UnimodularValue{rat(0)});
    for (std::size_t idx = 0; idx < stage.atoms.size(); ++idx) {
        int level = stage.level_of[idx];
        f.turns[idx] = UnimodularValue::reduce(Rat(digits[static_cast<std::size_t>(level - 1)],
                                                   stage.b));
    }
    return f;
}

} // namespace

TEST_CASE("build_stage examples") {
    auto s1 = build_stage(4, 1, 0);
    REQUIRE(s1.atoms.size() == 1);
    CHECK(s1.atoms[0].value == rat(1, 4));

    auto s2 = build_stage(4, 2, 0);
    REQUIRE(s2.atoms.size() == 2);
    CHECK(s2.atoms[0].value == rat(1, 16));
    CHECK(s2.atoms[1].value == rat(1, 4));
    CHECK(s2.level_of[0] == 2);
    CHECK(s2.level_of[1] == 1);

    auto s3 = build_stage(10, 1, 0);
    CHECK(s3.atoms[0].value == rat(1, 10));
}

TEST_CASE("build_stage guards") {
    CHECK_THROWS_AS(build_stage(3, 1, 0), Error);
    CHECK_THROWS_AS(build_stage(4, 0, 0), Error);
    CHECK_THROWS_AS(build_stage(10, 40, 0), Error);  // b^r overflow
}

TEST_CASE("seeded perturbations stay within budget and are deterministic") {
    auto a = build_stage(8, 3, 99);
    auto b = build_stage(8, 3, 99);
    REQUIRE(a.atoms.size() == b.atoms.size());
    for (std::size_t i = 0; i < a.atoms.size(); ++i) CHECK(a.atoms[i].value == b.atoms[i].value);
    Rat bound = 1 / rat_pow(8, 5);
    for (const auto& d : a.deltas) CHECK(abs(d) < bound);
    auto c = build_stage(8, 3, 100);
    bool same = true;
    for (std::size_t i = 0; i < a.atoms.size(); ++i)
        if (a.atoms[i].value != c.atoms[i].value) same = false;
    CHECK_FALSE(same);
}

TEST_CASE("constructive_approximant examples") {
    auto s1 = build_stage(4, 1, 0);
    auto cert = constructive_approximant(s1, target_from_level_digits(s1, {1}));
    CHECK(cert.n == 1);
    CHECK(cert.sup_error.is_zero());

    auto cert0 = constructive_approximant(s1, target_from_level_digits(s1, {0}));
    CHECK(cert0.n == 0);
    CHECK(cert0.sup_error.is_zero());

    auto s2 = build_stage(4, 2, 0);
    // Level-1 target 1/2 (digit 2) at atom 1/4; level-2 target 1/4
    // (digit 1) at atom 1/16.
    auto cert2 = constructive_approximant(s2, target_from_level_digits(s2, {2, 1}));
    CHECK(cert2.n == 6);
    CHECK(abs(cert2.sup_error - chord_turns(rat(1, 8), rat(0))) < Real(1e-12));
    CHECK(cert2.sup_error <= chord_turns(rat(1, 4), rat(0)) + Real(1e-12));
}

TEST_CASE("approximant rejects non-quantized targets") {
    auto s1 = build_stage(4, 1, 0);
    StepFunction f;
    f.turns = {UnimodularValue{rat(1, 3)}};
    CHECK_THROWS_AS(constructive_approximant(s1, f), Error);
}

TEST_CASE("approximant is sup-optimal for b=4, r<=2 (exhaustive)") {
    for (int r = 1; r <= 2; ++r) {
        auto stage = build_stage(4, r, 0);
        long targets = 1;
        for (int i = 0; i < r; ++i) targets *= 4;
        for (long code = 0; code < targets; ++code) {
            std::vector<long> digits;
            long c = code;
            for (int i = 0; i < r; ++i) {
                digits.push_back(c % 4);
                c /= 4;
            }
            StepFunction f = target_from_level_digits(stage, digits);
            auto cert = constructive_approximant(stage, f);
            Real oracle = exhaustive_min_sup(stage, f);
            CHECK(abs(cert.sup_error - oracle) < Real(1e-12));
            CHECK(cert.sup_error < cert.bound + Real(1e-9));
        }
    }
}

TEST_CASE("best_character_scan examples and tie-breaks") {
    auto dirac0 = AtomicMeasure::dirac(TorusPoint{rat(0)});
    auto one1 = StepFunction::constant(1, UnimodularValue{rat(0)});
    auto [n0, e0] = best_character_scan(dirac0, one1, -5, 5);
    CHECK(n0 == 0);
    CHECK(e0.is_zero());

    auto dirac_half = AtomicMeasure::dirac(TorusPoint{rat(1, 2)});
    StepFunction half_target = StepFunction::constant(1, UnimodularValue{rat(1, 2)});
    auto [n1, e1] = best_character_scan(dirac_half, half_target, 0, 4);
    CHECK(n1 == 1);  // n=3 ties at zero error; smaller |n| wins
    CHECK(e1.is_zero());

    auto hh = AtomicMeasure::make(
        {{TorusPoint{rat(0)}, rat(1, 2)}, {TorusPoint{rat(1, 2)}, rat(1, 2)}});
    auto one2 = StepFunction::constant(2, UnimodularValue{rat(0)});
    auto [n2, e2] = best_character_scan(hh, one2, 1, 3);
    CHECK(n2 == 2);
    CHECK(e2.is_zero());

    // Smallest |n| wins ties; negative before positive at equal |n|.
    auto [n3, e3] = best_character_scan(dirac0, one1, -4, 4);
    CHECK(n3 == 0);
    auto [n4, e4] = best_character_scan(hh, one2, 1, 2);
    CHECK(n4 == 2);  // only n=2 achieves zero here
    auto [n5, e5] = best_character_scan(dirac_half, half_target, -1, 1);
    CHECK(n5 == -1);  // +-1 tie at zero error; negative first
    (void)e3;
    (void)e4;
    (void)e5;
}

TEST_CASE("build_family examples") {
    auto f0 = build_family(4, 1, 0, 0);
    CHECK(f0.mixture.size() == 1);
    CHECK(f0.block_weight(0) == 1);
    for (const auto& t : f0.target.turns) CHECK(t.turn == 0);

    auto f1 = build_family(4, 1, 1, 0);
    CHECK(f1.block_weight(-1) == rat(1, 4));
    CHECK(f1.block_weight(0) == rat(1, 2));
    CHECK(f1.block_weight(1) == rat(1, 4));
    // Target on block m is e_m.
    for (std::size_t i = 0; i < f1.mixture.size(); ++i) {
        int m = f1.block_of[i];
        const Rat& x = f1.mixture.atoms()[i].x.value;
        CHECK(f1.target.turns[i].turn == mod1(Rat(m) * x));
    }
    // Mixture weights sum to 1 is enforced by AtomicMeasure::make.
    CHECK(f1.mixture.size() == 3);
}

TEST_CASE("build_family guards") {
    CHECK_THROWS_AS(build_family(4, 2, 2, 0), Error);  // 5 blocks in base 4
    auto fam = build_family(16, 2, 3, 0);
    CHECK(fam.mixture.size() == 7 * 2);
    CHECK_THROWS_AS(fam.block_weight(4), Error);
}

TEST_CASE("family blocks are valid stages supporting approximation") {
    auto fam = build_family(16, 3, 2, 0);
    for (const auto& [m, stage] : fam.blocks) {
        std::vector<long> digits{3, 0, 7};
        auto cert = constructive_approximant(stage, target_from_level_digits(stage, digits));
        CHECK(cert.sup_error < cert.bound + Real(1e-9));
    }
}

TEST_CASE("equal_partition examples") {
    auto u4 = AtomicMeasure::uniform({TorusPoint{rat(0)}, TorusPoint{rat(1, 4)},
                                      TorusPoint{rat(1, 2)}, TorusPoint{rat(3, 4)}});
    auto p2 = equal_partition(u4, 2);
    REQUIRE(p2.cells.size() == 2);
    CHECK(p2.cells[0] == std::vector<std::size_t>{0, 1});
    CHECK(p2.cells[1] == std::vector<std::size_t>{2, 3});

    auto p4 = equal_partition(u4, 4);
    for (std::size_t c = 0; c < 4; ++c) CHECK(p4.cells[c] == std::vector<std::size_t>{c});

    auto skew = AtomicMeasure::make({{TorusPoint{rat(0)}, rat(1, 2)},
                                     {TorusPoint{rat(1, 4)}, rat(1, 4)},
                                     {TorusPoint{rat(1, 2)}, rat(1, 4)}});
    auto ps = equal_partition(skew, 2);
    CHECK(ps.cells[0] == std::vector<std::size_t>{0});
    CHECK(ps.cells[1] == std::vector<std::size_t>{1, 2});

    auto bad = AtomicMeasure::make({{TorusPoint{rat(0)}, rat(3, 5)},
                                    {TorusPoint{rat(1, 2)}, rat(2, 5)}});
    CHECK_THROWS_AS(equal_partition(bad, 2), Error);
}
