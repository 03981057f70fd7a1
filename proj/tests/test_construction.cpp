#include "support.hpp"

#include <dchaos/construction.hpp>
#include <dchaos/oracle.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace dchaos;

namespace {

std::uint64_t gap_naive(const ShiftPair& p, std::uint64_t n) {
    auto g = oracle_detail::first_disagreement(p, n);
    return g ? *g - n : UINT64_MAX;
}

} // namespace

TEST_CASE("witnesses for a three-member block family", "[construction]") {
    auto fam = make_block_family(3, geometric_lengths(4, 8), 3);
    ExtractOptions o;
    o.requested = 10;
    auto w = extract_witnesses(fam.system(), fam.points, DeltaPolicy::fixed(0.5), o);
    REQUIRE(w.size() == 3);
    for (const auto& pw : w.pairs) {
        const auto& p = *pw.pair;
        auto prox = pw.proximal.take(10);
        auto dist = pw.distal.take(10);
        // greedy scan with the independent disagreement walk
        std::vector<std::uint64_t> expect;
        for (std::uint64_t n = 1, k = 1; expect.size() < 10; ++n)
            if (gap_naive(p, n) > k) {
                expect.push_back(n);
                ++k;
            }
        CHECK(prox == expect);
        for (std::size_t k = 1; k <= prox.size(); ++k) CHECK(below_pow2(p.distance_at(prox[k - 1]), k));
        for (auto n : dist) {
            CHECK(gap_naive(p, n) == 0);  // inside a disagree block
            CHECK(p.distance_at(n).to_double() > 0.5);
        }
    }
}

TEST_CASE("diagonal pair exhausts the distal clause", "[construction]") {
    ShiftSystem sys(2);
    ShiftPoint x = ShiftPoint::from_word({1, 0, 1}, 0);
    ShiftPoint y = ShiftPoint::from_word({1, 0, 1, 0}, 0);
    ExtractOptions o;
    o.search_budget = 5000;
    try {
        extract_witnesses(sys, std::vector<ShiftPoint>{x, y}, DeltaPolicy::fixed(0.5), o);
        FAIL("expected budget exhaustion");
    } catch (const BudgetExhausted& e) {
        CHECK(e.clause() == "distal");
        CHECK(e.first() == 0);
        CHECK(e.second() == 1);
    }
    ShiftPoint z = ShiftPoint::from_word({1, 1}, 0);
    CHECK_THROWS_AS(extract_witnesses(sys, std::vector<ShiftPoint>{x, z}, DeltaPolicy::fixed(0.5), o), BudgetExhausted);
}

TEST_CASE("tent map witnesses re-verify", "[construction]") {
    IntervalSystem sys(IntervalMap::tent(2.0), 1'000'000);
    testing::Rng rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ExtractOptions o;
    o.search_budget = 1'000'000;
    o.requested = 5;
    int succeeded = 0;
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> pts{u(rng), u(rng)};
        try {
            auto w = extract_witnesses(sys, pts, DeltaPolicy::fixed(0.3), o);
            ++succeeded;
            const auto& pw = w.pairs.front();
            auto prox = pw.proximal.take(5);
            for (std::size_t k = 1; k <= prox.size(); ++k) CHECK(below_pow2(pw.pair->distance_at(prox[k - 1]), k));
            for (auto n : pw.distal.take(5)) CHECK(pw.pair->distance_at(n) > 0.3);
        } catch (const BudgetExhausted&) {
        }
    }
    SUCCEED("pairs with witnesses: " << succeeded);
}

TEST_CASE("adaptive delta is half the largest observed distance", "[construction]") {
    ShiftPair p(2, {{7, 9}});
    CHECK(detail::adaptive_delta(p, 100) == 0.5);
    auto fam = make_block_family(2, geometric_lengths(4, 6), 2);
    ExtractOptions o;
    o.search_budget = 20000;
    auto w = extract_witnesses(fam.system(), fam.points, DeltaPolicy::adaptive(), o);
    CHECK(w.pairs.front().delta == 0.5);
}

TEST_CASE("synthetic evens and odds witnesses", "[construction]") {
    WitnessSequences<ShiftPair> w;
    PairWitness<ShiftPair> pw;
    pw.delta = 0.5;
    pw.proximal = IndexSequence::progression(2, 2);
    pw.distal = IndexSequence::progression(1, 2);
    w.pairs.push_back(pw);
    auto rep = chaotic_set_to_sequence(w, 100000);
    REQUIRE(rep.pairs.size() == 1);
    CHECK_FALSE(rep.pairs[0].verdict.has_value());
    for (const auto& d : rep.pairs[0].densities) CHECK(d.running_sup >= Rational(99, 100));
    auto direct = merge_density_one({pw.proximal, pw.distal}, 100000);
    CHECK(rep.q.take(100000) == direct.q.take(100000));

    CHECK_THROWS_AS(chaotic_set_to_sequence(WitnessSequences<ShiftPair>{}, 10), InvalidArgument);
}

TEST_CASE("synthetic uniform witness verifies and classifies", "[construction]") {
    auto w = synthetic_uniform_witness();
    REQUIRE_NOTHROW(w.verify());
    CHECK(w.levels.size() == 2);
    CHECK(w.levels[1].size() == 3);
    // nesting
    for (const auto& x : w.levels[0])
        CHECK(std::find(w.levels[1].begin(), w.levels[1].end(), x) != w.levels[1].end());
    auto rep = uniform_chaotic_to_sequence(w, 10200);
    REQUIRE(rep.pairs.size() == 3);
    for (const auto& p : rep.pairs) {
        REQUIRE(p.verdict.has_value());
        CHECK(p.verdict->distributional);
        CHECK(p.rigidity_return == std::optional<bool>(true));
    }
}

TEST_CASE("forged times are rejected with their level", "[construction]") {
    auto w = synthetic_uniform_witness();
    auto forged = w;
    // the first proximal time of level 2 moved onto a position where the points differ
    forged.proximal_times[1][0] = 0;
    CHECK_THROWS_AS(forged.verify(), WitnessInvalid);

    forged = w;
    std::uint64_t bad = forged.proximal_times[1][4] + 1;
    while (forged.system.pair(forged.levels[1][0], forged.levels[1][1]).distance_at(bad).to_double() <
           std::ldexp(1.0, -5))
        ++bad;
    forged.proximal_times[1][4] = bad;
    if (bad >= forged.proximal_times[1][5]) forged.proximal_times[1].resize(5);
    try {
        forged.verify();
        FAIL("expected witness-invalid");
    } catch (const WitnessInvalid& e) {
        CHECK(e.level() == 2);
        CHECK(e.time() == bad);
        CHECK(e.measured() >= std::ldexp(1.0, -5));
    }

    forged = w;
    forged.rigidity_times[0][2] += 1;
    try {
        forged.verify();
        FAIL("expected witness-invalid");
    } catch (const WitnessInvalid& e) {
        CHECK(e.level() == 1);
    }
}

TEST_CASE("single-level two-point witness reduces to the pair pipeline", "[construction]") {
    SyntheticUniformOptions o;
    o.depth = 12;
    o.level_sizes = {2};
    o.proximal_counts = {20};
    o.rigidity_counts = {150};
    auto w = synthetic_uniform_witness(o);
    // stages 1 and 2 only: 20 proximal and 150 rigidity times cannot feed stage 3
    const std::size_t n = 100;
    auto rep = uniform_chaotic_to_sequence(w, n);

    WitnessSequences<ShiftPair> ws;
    PairWitness<ShiftPair> pw;
    pw.delta = rep.pairs[0].delta;
    pw.proximal = IndexSequence::from_terms(w.proximal_times[0]);
    pw.distal = IndexSequence::from_terms(w.rigidity_times[0]);
    pw.pair = std::make_shared<const ShiftPair>(w.system.pair(w.levels[0][0], w.levels[0][1]));
    ws.pairs.push_back(pw);
    auto other = chaotic_set_to_sequence(ws, n);
    CHECK(rep.q.take(n) == other.q.take(n));
    REQUIRE(other.pairs[0].verdict);
    CHECK(rep.pairs[0].verdict->same_flags(*other.pairs[0].verdict));
}

TEST_CASE("witness files round-trip", "[construction]") {
    auto fam = make_block_family(3, geometric_lengths(4, 6), 3);
    ExtractOptions o;
    o.search_budget = 10000;
    o.requested = 5;
    auto w = extract_witnesses(fam.system(), fam.points, DeltaPolicy::fixed(0.5), o);
    std::stringstream ss;
    write_witness_file(ss, w, 5, "demo");
    auto back = read_witness_file<ShiftPair>(ss, "w.txt");
    REQUIRE(back.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(back.pairs[i].i == w.pairs[i].i);
        CHECK(back.pairs[i].j == w.pairs[i].j);
        CHECK(back.pairs[i].delta == w.pairs[i].delta);
        CHECK(back.pairs[i].proximal.take(5) == w.pairs[i].proximal.take(5));
        CHECK(back.pairs[i].distal.take(5) == w.pairs[i].distal.take(5));
        CHECK_FALSE(back.pairs[i].pair);
    }
    std::stringstream bad("[pair 0 1]\nproximal = 3, 2\n");
    try {
        read_witness_file<ShiftPair>(bad, "bad.txt");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}
