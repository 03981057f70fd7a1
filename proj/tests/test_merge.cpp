#include "merge_oracle.hpp"
#include "support.hpp"

#include <dchaos/merge.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace dchaos;

namespace {

Rational running_sup(const IndexSequence& s, const IndexSequence& q, std::size_t n) {
    return upper_density(s, q, n).running_sup;
}

} // namespace

TEST_CASE("evens and odds both reach density 0.99", "[merge]") {
    const std::size_t n = 100000;
    auto ev = IndexSequence::progression(2, 2), od = IndexSequence::progression(1, 2);
    auto res = merge_density_one({ev, od}, n);
    auto terms = res.q.take(n);
    CHECK(std::is_sorted(terms.begin(), terms.end()));
    CHECK(std::adjacent_find(terms.begin(), terms.end()) == terms.end());
    CHECK(running_sup(ev, res.q, n) >= Rational(99, 100));
    CHECK(running_sup(od, res.q, n) >= Rational(99, 100));
}

TEST_CASE("multiples of 3, 5 and 7 each reach density 0.99", "[merge]") {
    const std::size_t n = 100000;
    std::vector<IndexSequence> fam{IndexSequence::progression(3, 3), IndexSequence::progression(5, 5),
                                   IndexSequence::progression(7, 7)};
    auto res = merge_density_one(fam, n);
    for (const auto& s : fam) CHECK(running_sup(s, res.q, n) >= Rational(99, 100));
}

TEST_CASE("a single member merges to itself", "[merge]") {
    auto res = merge_density_one({IndexSequence::naturals()}, 1000);
    auto terms = res.q.take(1000);
    for (std::size_t i = 0; i < terms.size(); ++i) REQUIRE(terms[i] == i + 1);
    auto est = upper_density(IndexSequence::naturals(), res.q, 1000);
    for (const auto& c : est.checkpoints) REQUIRE(c.value() == Rational(1));
}

TEST_CASE("stage ends meet 1 - 1/max(j, D0)", "[merge]") {
    for (std::uint64_t floor : {1, 10, 100}) {
        MergeOptions o;
        o.density_floor = floor;
        auto res = merge_density_one({IndexSequence::progression(2, 2), IndexSequence::progression(1, 2)}, 10, o);
        res.engine->plan_through(12);
        auto st = res.stages();
        REQUIRE(st.size() >= 12);
        for (const auto& s : st) {
            CHECK(s.meets_target());
            CHECK(s.target_denominator == std::max<std::uint64_t>(s.stage, floor));
            // also the plain 1 - 1/j bound
            CHECK(s.member_hits * s.stage >= (s.stage - 1) * s.end_q);
        }
    }
}

TEST_CASE("symbolic planner agrees with the residue recount", "[merge]") {
    std::vector<testing::AP> aps{{3, 3}, {5, 5}, {7, 7}, {2, 4}, {11, 6}};
    std::vector<IndexSequence> fam;
    for (auto a : aps) fam.push_back(IndexSequence::progression(a.first, a.step));
    auto res = merge_density_one(fam, 10);
    res.engine->plan_through(20);
    auto st = res.stages();
    auto oracle = testing::recount_stages(aps, 20, 100);
    REQUIRE(st.size() >= 20);
    for (std::size_t j = 0; j < 20; ++j) {
        INFO("stage " << j + 1);
        CHECK(st[j].member == oracle[j].member);
        CHECK(st[j].length == oracle[j].length);
        CHECK(st[j].end_q == oracle[j].end_q);
        CHECK(st[j].member_hits == oracle[j].hits[oracle[j].member]);
    }
}

TEST_CASE("emitted prefix matches the planned stages", "[merge]") {
    std::vector<IndexSequence> fam{IndexSequence::progression(3, 3), IndexSequence::progression(5, 5)};
    auto res = merge_density_one(fam, 20000);
    auto terms = res.q.take(20000);
    auto st = res.stages();
    std::size_t pos = 0;
    for (const auto& s : st) {
        const auto f = *fam[s.member].progression_form();
        for (BigInt t = 0; t < s.length && pos < terms.size(); ++t, ++pos)
            REQUIRE(BigInt(terms[pos]) == f.term(s.first_index + t));
        if (pos >= terms.size()) break;
    }
    CHECK(pos == terms.size());
}

TEST_CASE("generic and symbolic modes produce the same sequence", "[merge]") {
    const std::size_t n = 30000;
    auto ev = IndexSequence::progression(2, 2), od = IndexSequence::progression(1, 2);
    auto sym = merge_density_one({ev, od}, n);
    // the same members hidden behind generators take the generic path
    auto gen = [](std::uint64_t first, std::uint64_t step) {
        return IndexSequence::generate([v = first, step]() mutable -> std::optional<std::uint64_t> {
            auto out = v;
            v += step;
            return out;
        });
    };
    auto generic = merge_density_one({gen(2, 2), gen(1, 2)}, n);
    CHECK_FALSE(generic.engine->symbolic());
    CHECK(sym.engine->symbolic());
    CHECK(sym.q.take(n) == generic.q.take(n));
}

TEST_CASE("countable families enroll one member per stage", "[merge]") {
    // S_j = multiples of (j+1)
    auto res = merge_density_one(
        [](std::size_t j) -> std::optional<IndexSequence> { return IndexSequence::progression(j + 2, j + 2); }, 1000);
    res.q.take(50000);
    auto st = res.stages();
    for (const auto& s : st) {
        CHECK(s.enrolled == s.stage);
        CHECK(s.member == (s.stage - 1) % s.enrolled);
    }
}

TEST_CASE("a member that runs out stalls the merge", "[merge]") {
    auto res = merge_density_one({IndexSequence::from_terms({1, 2, 3}), IndexSequence::progression(10, 1)}, 2);
    try {
        res.q.take(5000);
        FAIL("expected a stall");
    } catch (const ConstructionStalled& e) {
        CHECK(e.member() == 0);
    }
}

TEST_CASE("merge argument checks", "[merge]") {
    CHECK_THROWS_AS(merge_density_one(std::vector<IndexSequence>{}, 10), InvalidArgument);
    CHECK_THROWS_AS(merge_density_one({IndexSequence::naturals()}, 0), InvalidArgument);
    MergeOptions o;
    o.density_floor = 0;
    CHECK_THROWS_AS(merge_density_one({IndexSequence::naturals()}, 10, o), InvalidArgument);
    auto generic = merge_density_one({IndexSequence::squares()}, 10);
    CHECK_THROWS_AS(generic.engine->plan_through(3), InvalidArgument);
}

TEST_CASE("CRT helper", "[merge]") {
    auto s = detail::crt(2, 4, 3, 6);
    CHECK_FALSE(s.has_value());
    auto t = detail::crt(1, 4, 3, 6);
    REQUIRE(t.has_value());
    CHECK(t->second == 12);
    CHECK(t->first % 4 == 1);
    CHECK(t->first % 6 == 3);
    CHECK(detail::count_congruent(1, 100, 9, 12) == 8);
}
