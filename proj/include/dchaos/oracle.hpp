#pragma once

// Ground truth for shift pairs: a from-scratch counter for Φⁿ and closed-form
// block counting for block families along the naturals.

#include <dchaos/shift.hpp>

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace dchaos {

namespace oracle_detail {

/// smallest e >= 0 with 2^-e <= t
inline std::uint64_t le_exponent(double t) {
    std::uint64_t e = 0;
    while (std::ldexp(1.0, -static_cast<int>(e)) > t) ++e;
    return e;
}

/// first disagreement >= m by walking the block list (and periods) from the start
inline std::optional<std::uint64_t> first_disagreement(const ShiftPair& pair, std::uint64_t m) {
    for (const auto& b : pair.blocks()) {
        if (b.b <= m) continue;
        return b.a > m ? b.a : m;
    }
    const auto& per = pair.periodicity();
    if (!per) return std::nullopt;
    std::vector<Block> pattern;
    for (const auto& b : pair.blocks())
        if (b.a >= per->offset) pattern.push_back(b);
    if (pattern.empty()) return std::nullopt;
    std::uint64_t shift = m > per->offset ? (m - per->offset) / per->period * per->period : 0;
    for (int round = 0; round < 2; ++round, shift += per->period)
        for (const auto& b : pattern) {
            const std::uint64_t a = b.a + shift, e = b.b + shift;
            if (e <= m) continue;
            return a > m ? a : m;
        }
    return std::nullopt;
}

} // namespace oracle_detail

/// (1/n)·#{1 <= i <= n : d(σ^{m_i} x, σ^{m_i} y) <= t}, each term recomputed from scratch.
inline Rational brute_force_phi(const ShiftPair& pair, const IndexSequence& q, double t, std::size_t n) {
    if (n == 0 || !(t > 0.0)) throw InvalidArgument("brute_force_phi: need n >= 1 and t > 0");
    const std::uint64_t e_t = oracle_detail::le_exponent(t);
    std::uint64_t count = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::uint64_t m = q.at(i - 1);
        const auto g = oracle_detail::first_disagreement(pair, m);
        if (!g || *g - m >= e_t) ++count;
    }
    return make_ratio(count, n);
}

struct BoundaryValues {
    std::size_t block = 0;   // 1-based block index whose last position is n
    std::uint64_t n = 0;
    bool agree_block = true;
    std::vector<Rational> phi;   // per t_grid entry
    Rational phi_delta{0};
};

struct BlockPrediction {
    std::uint32_t alphabet_size = 2;
    std::size_t member_count = 0;
    std::vector<std::uint64_t> lengths;
    std::vector<double> t_grid;
    double delta = 0.5;
    Rational tail_fraction{1, 1000};
    std::vector<BoundaryValues> boundaries;

    /// boundaries inside the tail window [ceil(f·n_K), n_K]
    std::vector<const BoundaryValues*> window() const {
        std::vector<const BoundaryValues*> out;
        if (boundaries.empty()) return out;
        const std::uint64_t nk = boundaries.back().n;
        const auto num = static_cast<std::uint64_t>(tail_fraction.numerator());
        const auto den = static_cast<std::uint64_t>(tail_fraction.denominator());
        const std::uint64_t start = std::max<std::uint64_t>(1, (num * nk + den - 1) / den);
        for (const auto& b : boundaries)
            if (b.n >= start) out.push_back(&b);
        return out;
    }

    /// Smallest ε for which boundary values alone give Φ*(t) >= 1-ε for every
    /// grid t and Φ(δ) <= ε.
    Rational needed_tolerance() const {
        auto w = window();
        if (w.empty()) return Rational(1);
        Rational worst_upper(1);
        for (std::size_t t = 0; t < t_grid.size(); ++t) {
            Rational best(0);
            for (auto* b : w) best = std::max(best, b->phi[t]);
            worst_upper = std::min(worst_upper, best);
        }
        Rational lowest(1);
        for (auto* b : w) lowest = std::min(lowest, b->phi_delta);
        return std::max(Rational(1) - worst_upper, lowest);
    }

    bool holds_for(const Rational& eps_one) const { return needed_tolerance() <= eps_one; }
};

/// Exact Φⁿ along Q = naturals at every block end n = L_1 + … + L_k, by
/// counting positions of agree blocks whose gap to the next disagree block is
/// at least log2(1/t).
inline BlockPrediction predict_block_profile(std::uint32_t alphabet_size, std::size_t member_count,
                                             const std::vector<std::uint64_t>& lengths, double delta,
                                             const std::vector<double>& t_grid,
                                             Rational tail_fraction = Rational(1, 1000)) {
    if (alphabet_size < 2 || member_count > alphabet_size) throw InvalidArgument("invalid block family parameters");
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    BlockPrediction pred;
    pred.alphabet_size = alphabet_size;
    pred.member_count = member_count;
    pred.lengths = lengths;
    pred.t_grid = t_grid;
    pred.delta = delta;
    pred.tail_fraction = tail_fraction;

    // block k occupies [start_k, start_k + L_k), start_1 = 1
    std::vector<std::uint64_t> start(lengths.size() + 1, 1);
    for (std::size_t k = 0; k < lengths.size(); ++k) start[k + 1] = start[k] + lengths[k];
    const bool any_pair = member_count >= 2;

    auto count_upto = [&](std::uint64_t n, double t) {
        const std::uint64_t e = oracle_detail::le_exponent(t);
        std::uint64_t c = 0;
        for (std::size_t k = 0; k < lengths.size(); ++k) {
            const std::uint64_t a = start[k], b = start[k + 1];  // [a, b)
            if (a > n) break;
            const std::uint64_t last = std::min(b - 1, n);
            const bool disagree = any_pair && (k + 1) % 2 == 0;
            if (disagree) {
                if (e == 0) c += last - a + 1;  // distance 1 <= t
                continue;
            }
            const bool next_disagrees = any_pair && k + 1 < lengths.size();
            if (!next_disagrees) {
                c += last - a + 1;
                continue;
            }
            // gap at position i is b - i; need b - i >= e
            if (b < e) continue;
            const std::uint64_t hi = std::min(last, b - e);
            if (hi >= a) c += hi - a + 1;
        }
        if (n >= start.back()) c += n - start.back() + 1;  // past the last block
        return c;
    };

    for (std::size_t k = 1; k <= lengths.size(); ++k) {
        BoundaryValues bv;
        bv.block = k;
        bv.n = start[k] - 1;
        bv.agree_block = k % 2 == 1;
        for (double t : t_grid) bv.phi.push_back(make_ratio(count_upto(bv.n, t), bv.n));
        bv.phi_delta = make_ratio(count_upto(bv.n, delta), bv.n);
        pred.boundaries.push_back(std::move(bv));
    }
    return pred;
}

/// Columns block,n,t,phi_n,phi_n_float; t = "delta" rows carry Φⁿ(δ).
inline void write_prediction_csv(std::ostream& out, const BlockPrediction& p, const std::string& comment = {}) {
    auto real = [](double v) {
        char buf[64];
        auto [e, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, e);
    };
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "block,n,t,phi_n,phi_n_float\n";
    for (const auto& b : p.boundaries) {
        for (std::size_t t = 0; t < p.t_grid.size(); ++t)
            out << b.block << ',' << b.n << ',' << real(p.t_grid[t]) << ',' << to_string(b.phi[t]) << ','
                << real(to_double(b.phi[t])) << '\n';
        out << b.block << ',' << b.n << ",delta," << to_string(b.phi_delta) << ',' << real(to_double(b.phi_delta))
            << '\n';
    }
}

} // namespace dchaos
