#include "support.hpp"

#include <dchaos/distribution.hpp>
#include <dchaos/oracle.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace dchaos;

namespace {

Rational count_phi(const ShiftPair& p, const IndexSequence& q, double t, std::size_t n) {
    std::uint64_t c = 0;
    for (auto m : q.take(n)) c += p.distance_at(m).to_double() <= t;
    return make_ratio(c, n);
}

ClassifyConfig quarter_config(std::size_t horizon) {
    ClassifyConfig c;
    c.t_grid = dyadic_grid(1, 20);
    c.eps_one = Rational(1, 4);
    c.horizon = horizon;
    return c;
}

} // namespace

TEST_CASE("phi_n on trivial pairs", "[distribution]") {
    ShiftPair diag(2, {});
    ShiftPair full(2, {{0, 1}}, Periodicity{1, 0});
    auto q = IndexSequence::squares();
    for (std::size_t n : {1, 10, 500}) {
        CHECK(phi_n(diag, q, 1e-9, n) == Rational(1));
        CHECK(phi_n(full, q, 0.5, n) == Rational(0));
        CHECK(phi_n(full, q, Rational(1), n) == Rational(1));
    }
    CHECK_THROWS_AS(phi_n(diag, q, 0.0, 5), InvalidArgument);
    CHECK_THROWS_AS(phi_n(diag, q, -1.0, 5), InvalidArgument);
    CHECK_THROWS_AS(phi_n(diag, q, Rational(0), 5), InvalidArgument);
    CHECK_THROWS_AS(phi_n(diag, q, 0.5, 0), InvalidArgument);
}

TEST_CASE("phi_n at the end of agree block 5", "[distribution]") {
    const auto L = geometric_lengths(4, 6);
    auto fam = make_block_family(2, L, 2);
    auto p = fam.pair(0, 1);
    const std::size_t n = fam.block_end(5);
    auto q = IndexSequence::naturals();
    auto v = phi_n(p, q, 0.5, n);
    CHECK(v == count_phi(p, q, 0.5, n));
    CHECK(v == brute_force_phi(p, q, 0.5, n));
    CHECK(v >= Rational(1) - make_ratio(L[1] + L[3], L[0] + L[1] + L[2] + L[3] + L[4]));
}

TEST_CASE("profile of the diagonal pair", "[distribution]") {
    auto pr = profile(ShiftPair(2, {}), IndexSequence::naturals(), dyadic_grid(1, 10), 500);
    for (std::size_t t = 0; t < pr.t_grid.size(); ++t) {
        CHECK(pr.phi_lower_est[t] == Rational(1));
        CHECK(pr.phi_upper_est[t] == Rational(1));
    }
}

TEST_CASE("profile at block ends matches exact counting", "[distribution]") {
    auto fam = make_block_family(2, geometric_lengths(4, 8), 2);
    auto p = fam.pair(0, 1);
    const std::vector<double> grid{std::ldexp(1.0, -8), 0.5};
    const std::size_t n = fam.block_end(8);
    auto q = IndexSequence::naturals();
    auto pr = profile(p, q, grid, n);
    auto pred = predict_block_profile(2, 2, fam.lengths, 0.5, grid);
    // counting bounds: 1 - 4/3 B^-1 = 2/3 and 4/3 B^-1 = 1/3
    CHECK(pr.phi_upper_est[0] >= Rational(2, 3));
    CHECK(pr.phi_lower_est[1] <= Rational(1, 3));
    // exact: extremes sit on block ends inside the window
    Rational hi(0), lo(1);
    for (const auto* b : pred.window()) {
        hi = std::max(hi, b->phi[0]);
        lo = std::min(lo, b->phi[1]);
    }
    // Phi(1/2) bottoms out exactly at a disagree-block end; Phi(2^-8) peaks a few
    // positions before an agree-block end, so block ends only bound it from below
    CHECK(pr.phi_lower_est[1] == lo);
    CHECK(pr.phi_upper_est[0] >= hi);
    Rational peak(0);
    std::uint64_t hits = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        hits += p.distance_at(k).to_double() <= grid[0];
        if (k >= pr.tail_start) peak = std::max(peak, make_ratio(hits, k));
    }
    CHECK(pr.phi_upper_est[0] == peak);
    CHECK(pr.phi_lower_est[1] == Rational(17476, 87380));
    for (std::size_t c = 0; c < pr.checkpoints.size(); c += 997)
        for (std::size_t t = 0; t < grid.size(); ++t)
            REQUIRE(pr.phi(t, c) == count_phi(p, q, grid[t], pr.checkpoints[c]));
}

TEST_CASE("eventually equal points have phi tending to one", "[distribution]") {
    ShiftPair p(2, {{3, 20}, {40, 90}});
    const std::size_t n = 100000;
    ProfileOptions late;
    late.tail_fraction = Rational(1, 2);
    auto pr = profile(p, IndexSequence::naturals(), {1.0 / 1024, 0.5}, n, late);
    for (std::size_t t = 0; t < 2; ++t) {
        CHECK(pr.phi_at_horizon(t) == brute_force_phi(p, IndexSequence::naturals(), pr.t_grid[t], n));
        // the misses all happen before time 90, so the late window sits within 90/(n/2) of 1
        CHECK(pr.phi_lower_est[t] == Rational(1) - make_ratio(n - pr.horizon_counts[t], n / 2));
        CHECK(pr.phi_upper_est[t] == Rational(1) - make_ratio(n - pr.horizon_counts[t], n));
    }
}

TEST_CASE("profile argument checks", "[distribution]") {
    ShiftPair p(2, {});
    auto q = IndexSequence::naturals();
    CHECK_THROWS_AS(profile(p, q, {}, 10), InvalidArgument);
    CHECK_THROWS_AS(profile(p, q, {0.5, 0.25}, 10), InvalidArgument);
    CHECK_THROWS_AS(profile(p, q, {0.0}, 10), InvalidArgument);
    CHECK_THROWS_AS(profile(p, q, {0.5}, 1), InvalidArgument);
    ProfileOptions o;
    o.tail_fraction = Rational(0);
    CHECK_THROWS_AS(profile(p, q, {0.5}, 10, o), InvalidArgument);
    CHECK_THROWS_AS(profile(p, IndexSequence::from_terms({1, 2}), {0.5}, 10), InvalidArgument);
    IntervalSystem sys(IntervalMap::tent(2.0), 100);
    CHECK_THROWS_AS(profile(sys.pair(0.1, 0.2), q, {0.5}, 200), BudgetExceeded);
}

TEST_CASE("classify trivial pairs", "[distribution]") {
    auto q = IndexSequence::naturals();
    auto c = quarter_config(2000);
    auto diag = classify(ShiftPair(2, {}), q, 0.5, c);
    CHECK_FALSE(diag.li_yorke);
    CHECK_FALSE(diag.li_yorke_delta);
    CHECK_FALSE(diag.distributional);
    CHECK_FALSE(diag.distributional_delta);

    auto full = classify(ShiftPair(2, {{0, 1}}, Periodicity{1, 0}), q, 0.5, c);
    CHECK_FALSE(full.li_yorke);
    CHECK(full.proximal_witnesses.empty());
    CHECK_FALSE(full.distributional);

    c.t_grid.clear();
    CHECK_THROWS_AS(classify(ShiftPair(2, {}), q, 0.5, c), InvalidArgument);
    CHECK_THROWS_AS(classify(ShiftPair(2, {}), q, 0.0, quarter_config(100)), InvalidArgument);
}

TEST_CASE("classify a block family pair along the naturals", "[distribution]") {
    auto fam = make_block_family(2, geometric_lengths(4, 9), 2);
    auto p = fam.pair(0, 1);
    auto q = IndexSequence::naturals();
    // the second half of the horizon straddles the end of disagree block 8
    const std::size_t n = 120000;
    auto v = classify(p, q, 0.5, quarter_config(n));
    CHECK(v.li_yorke);
    CHECK(v.li_yorke_delta);
    CHECK(v.distributional);
    CHECK(v.distributional_delta);
    for (auto m : v.proximal_witnesses) CHECK(p.distance_at(m).to_double() < v.eps_zero);
    for (auto m : v.distal_witnesses) CHECK(p.distance_at(m).to_double() > v.delta);
    CHECK(v.proximal_witnesses.size() <= 8);

    // 2% is out of reach along the naturals: Phi at block ends stays near 4/5 and 1/5
    auto strict = quarter_config(n);
    strict.eps_one = Rational(1, 50);
    auto s = classify(p, q, 0.5, strict);
    CHECK(s.li_yorke_delta);
    CHECK_FALSE(s.distributional_delta);
}

TEST_CASE("membership path agrees with the direct path", "[distribution]") {
    auto fam = make_block_family(3, geometric_lengths(4, 9), 3);
    auto q = IndexSequence::naturals();
    for (std::size_t n : {21845, 60000, 120000}) {
        auto c = quarter_config(n);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j) {
                auto p = fam.pair(i, j);
                auto direct = classify(p, q, 0.5, c);
                auto member = membership_characterization(p, q, 0.5, aligned_eps_grid(c.t_grid), c, c.t_grid);
                INFO("n=" << n);
                CHECK(direct.same_flags(member));
                CHECK(member.method == "membership");
            }
    }
    CHECK_FALSE(membership_characterization(ShiftPair(2, {}), q, 0.5, {0.5}, quarter_config(100)).distributional);
}

TEST_CASE("interval pairs classify without error", "[distribution]") {
    IntervalSystem sys(IntervalMap::tent(2.0));
    auto p = sys.pair(0.1234, 0.5678);
    auto c = quarter_config(5000);
    c.eps_zero = 1e-6;
    c.t_grid = {0.01, 0.1, 0.5};
    auto v = classify(p, IndexSequence::naturals(), 0.3, c);
    CHECK((!v.li_yorke_delta || v.li_yorke));
    CHECK((!v.distributional_delta || v.distributional));
    for (auto m : v.distal_witnesses) CHECK(p.distance_at(m) > 0.3);
    for (auto m : v.proximal_witnesses) CHECK(p.distance_at(m) < 1e-6);
}

TEST_CASE("profile CSV layout", "[distribution]") {
    auto pr = profile(ShiftPair(2, {{1, 2}}), IndexSequence::naturals(), {0.5}, 2);
    std::stringstream ss;
    write_profile_csv(ss, pr, "demo");
    CHECK(ss.str() == "# demo\nk,t,phi_n,phi_n_float\n1,0.5,0/1,0\n2,0.5,1/2,0.5\n");
}
