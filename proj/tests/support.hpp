#pragma once

// Random instance generators shared by the unit, property and acceptance suites.

#include <dchaos/distribution.hpp>
#include <dchaos/shift.hpp>

#include <algorithm>
#include <random>
#include <vector>

namespace dchaos::testing {

using Rng = std::mt19937_64;

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

/// Alternating agree/disagree blocks with random lengths inside [0, span),
/// optionally followed by a periodic tail.
inline ShiftPair random_block_pair(Rng& rng, std::uint64_t span, std::size_t max_blocks = 40, bool periodic = false) {
    std::vector<Block> blocks;
    std::uint64_t pos = uniform(rng, 0, span / 8);
    const std::size_t n = uniform(rng, 0, max_blocks);
    for (std::size_t i = 0; i < n && pos < span; ++i) {
        const std::uint64_t len = uniform(rng, 1, std::max<std::uint64_t>(1, span / (2 * max_blocks) + 1));
        const std::uint64_t end = std::min(span, pos + len);
        blocks.push_back({pos, end});
        pos = end + uniform(rng, 1, std::max<std::uint64_t>(1, span / max_blocks));
    }
    std::optional<Periodicity> per;
    if (periodic) {
        const std::uint64_t offset = blocks.empty() ? 0 : blocks.back().b;
        const std::uint64_t period = uniform(rng, 2, 50);
        const std::uint64_t a = offset + uniform(rng, 0, period - 2);
        blocks.push_back({a, a + uniform(rng, 1, offset + period - a)});
        per = Periodicity{period, offset};
    }
    return ShiftPair(2, std::move(blocks), per);
}

/// Strictly increasing random terms >= 1 with gaps in [1, max_gap].
inline std::vector<std::uint64_t> random_terms(Rng& rng, std::size_t count, std::uint64_t max_gap) {
    std::vector<std::uint64_t> out;
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < count; ++i) out.push_back(v += uniform(rng, 1, max_gap));
    return out;
}

/// Random sub-sequence of `terms` keeping each element with probability keep.
inline std::vector<std::uint64_t> random_subset(Rng& rng, const std::vector<std::uint64_t>& terms, double keep) {
    std::bernoulli_distribution b(keep);
    std::vector<std::uint64_t> out;
    for (auto t : terms)
        if (b(rng)) out.push_back(t);
    return out;
}

inline std::vector<double> random_grid(Rng& rng, std::size_t max_size = 8) {
    std::vector<double> g;
    const std::size_t n = uniform(rng, 1, max_size);
    for (std::size_t i = 0; i < n; ++i) g.push_back(std::ldexp(1.0, -static_cast<int>(uniform(rng, 0, 24))));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

} // namespace dchaos::testing
