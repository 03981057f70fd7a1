#include "support.hpp"

#include <dchaos/index_seq.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace dchaos;

TEST_CASE("sequences are strictly increasing and positive", "[index_seq]") {
    CHECK_THROWS_AS(IndexSequence::from_terms({1, 3, 3}), InvalidArgument);
    CHECK_THROWS_AS(IndexSequence::from_terms({0, 2}), InvalidArgument);
    CHECK_THROWS_AS(IndexSequence::progression(0, 2), InvalidArgument);
    CHECK_THROWS_AS(IndexSequence::progression(1, 0), InvalidArgument);

    auto bad = IndexSequence::generate([n = std::uint64_t{5}]() mutable -> std::optional<std::uint64_t> {
        n = n == 5 ? 7 : 6;
        return n;
    });
    CHECK(bad.at(0) == 7);
    CHECK_THROWS_AS(bad.at(1), InvalidArgument);
}

TEST_CASE("lazy extension keeps materialized terms", "[index_seq]") {
    auto sq = IndexSequence::squares();
    auto first = sq.take(10);
    CHECK(first == std::vector<std::uint64_t>{1, 4, 9, 16, 25, 36, 49, 64, 81, 100});
    sq.take(1000);
    CHECK(sq.take(10) == first);
    CHECK(sq.count_le(100) == 10);
    CHECK(sq.contains(49));
    CHECK_FALSE(sq.contains(50));
    CHECK(sq.index_above(50) == std::optional<std::size_t>(7));

    auto ev = IndexSequence::progression(2, 2);
    CHECK(ev.at(4) == 10);
    CHECK(ev.count_le(11) == 5);
    CHECK(ev.contains(1000000000000ULL));
    CHECK_FALSE(ev.contains(7));

    auto fin = IndexSequence::from_terms({2, 5, 9});
    CHECK(fin.reaches(3));
    CHECK_FALSE(fin.reaches(4));
    CHECK(fin.exhausted());
    CHECK_THROWS_AS(fin.at(3), std::out_of_range);
}

TEST_CASE("upper density of evens along the naturals", "[index_seq]") {
    auto est = upper_density(IndexSequence::progression(2, 2), IndexSequence::naturals(), 1000);
    CHECK(est.value_at_horizon == Rational(1, 2));
    CHECK(est.running_sup == Rational(1, 2));
    CHECK(est.running_sup >= est.value_at_horizon);
    CHECK(est.checkpoints.size() == 1000);
    CHECK(est.recurs);
}

TEST_CASE("P equal to Q has density one at every checkpoint", "[index_seq]") {
    testing::Rng rng(7);
    auto q = IndexSequence::from_terms(testing::random_terms(rng, 500, 9));
    DensityOptions o;
    o.checkpoint_stride = 7;
    auto est = upper_density(q, q, 500, o);
    for (const auto& c : est.checkpoints) CHECK(c.value() == Rational(1));
    CHECK(est.checkpoints.back().k == 500);
    CHECK(in_density_class(q, q, Rational(1), 500).member);
}

TEST_CASE("squares have density 1/1000 at 10^6", "[index_seq]") {
    const std::size_t n = 1'000'000;
    auto est = upper_density(IndexSequence::squares(), IndexSequence::naturals(), n);
    std::uint64_t brute = 0;
    for (std::uint64_t k = 1; k * k <= n; ++k) ++brute;
    CHECK(brute == 1000);
    CHECK(est.value_at_horizon == Rational(1, 1000));
    CHECK(est.running_sup == Rational(1));  // k = 1
    CHECK(est.sup_checkpoint == 1);

    DensityOptions late;
    late.window_start = n / 2;
    auto m = in_density_class(IndexSequence::squares(), IndexSequence::naturals(), Rational(1, 2), n, late);
    CHECK_FALSE(m.member);
    CHECK(m.infinite_proxy);
    CHECK(m.estimate.running_sup < Rational(1, 500));
}

TEST_CASE("density class membership", "[index_seq]") {
    auto nat = IndexSequence::naturals();
    auto ev = IndexSequence::progression(2, 2);
    CHECK(in_density_class(ev, nat, Rational(1, 2), 1000).member);
    CHECK_FALSE(in_density_class(ev, nat, Rational(51, 100), 1000).member);
    CHECK_THROWS_AS(in_density_class(ev, nat, Rational(3, 2), 1000), InvalidArgument);
    CHECK_THROWS_AS(in_density_class(ev, nat, Rational(-1, 2), 1000), InvalidArgument);

    // a finite P with all terms early fails the infinite proxy
    auto early = IndexSequence::from_terms({1, 2, 3});
    auto m = in_density_class(early, nat, Rational(0), 100);
    CHECK_FALSE(m.infinite_proxy);
    CHECK_FALSE(m.member);
}

TEST_CASE("upper density argument checks", "[index_seq]") {
    auto nat = IndexSequence::naturals();
    CHECK_THROWS_AS(upper_density(nat, nat, 0), InvalidArgument);
    DensityOptions o;
    o.checkpoint_stride = 0;
    CHECK_THROWS_AS(upper_density(nat, nat, 10, o), InvalidArgument);
    CHECK_THROWS_AS(upper_density(nat, IndexSequence::from_terms({1, 2}), 10), InvalidArgument);
}

TEST_CASE("upper density matches a direct count on random sequences", "[index_seq]") {
    testing::Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        auto qt = testing::random_terms(rng, 400, 5);
        auto pt = testing::random_subset(rng, testing::random_terms(rng, 2000, 2), 0.5);
        if (pt.empty()) continue;
        DensityOptions o;
        o.checkpoint_stride = testing::uniform(rng, 1, 30);
        auto est = upper_density(IndexSequence::from_terms(pt), IndexSequence::from_terms(qt), qt.size(), o);
        Rational best(-1);
        for (const auto& c : est.checkpoints) {
            std::uint64_t cnt = 0;
            for (std::size_t i = 0; i < c.k; ++i) cnt += std::binary_search(pt.begin(), pt.end(), qt[i]);
            REQUIRE(c.count == cnt);
            best = std::max(best, c.value());
        }
        CHECK(est.running_sup == best);
    }
}

TEST_CASE("sequence files round-trip and report line numbers", "[index_seq]") {
    std::stringstream out;
    write_sequence(out, {1, 4, 9}, "squares");
    std::stringstream in(out.str());
    CHECK(parse_sequence_text(in, "mem").take(3) == std::vector<std::uint64_t>{1, 4, 9});

    std::stringstream bad("# header\n3\n5\n5\n");
    try {
        parse_sequence_text(bad, "seq.txt");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(std::string(e.what()).find("seq.txt:4") != std::string::npos);
    }
    std::stringstream junk("1\nx\n");
    CHECK_THROWS_AS(parse_sequence_text(junk, "j"), ParseError);
    CHECK_THROWS_AS(read_sequence_file("/nonexistent/seq.txt"), ParseError);
}
