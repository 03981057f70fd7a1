#pragma once

// Distribution functions along a sequence Q = {m_i}:
//
//   Φⁿ(t) = #{1 <= i <= n : d(f^{m_i} x, f^{m_i} y) <= t} / n
//
// with liminf/limsup estimated by min/max over a tail window of checkpoints,
// the four pair verdicts, and an independent verdict built only from upper
// densities of hitting sets.

#include <dchaos/index_seq.hpp>
#include <dchaos/systems.hpp>

#include <algorithm>
#include <charconv>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dchaos {

namespace detail {

template <class Pair>
auto sample_distances(const Pair& pair, const IndexSequence& q, std::size_t n) {
    using D = decltype(pair.distance_at(0));
    if (!q.reaches(n)) throw InvalidArgument("Q has fewer than " + std::to_string(n) + " terms");
    std::vector<D> out;
    out.reserve(n);
    for (auto m : q.take(n)) out.push_back(pair.distance_at(m));
    return out;
}

inline std::string format_real(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidArgument("t_grid must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw InvalidArgument("t_grid entries must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("t_grid must be strictly increasing");
    }
}

} // namespace detail

/// 2^-hi, …, 2^-lo in increasing order.
inline std::vector<double> dyadic_grid(int lo = 1, int hi = 20) {
    std::vector<double> g;
    for (int k = hi; k >= lo; --k) g.push_back(std::ldexp(1.0, -k));
    return g;
}

template <class Pair>
Rational phi_n(const Pair& pair, const IndexSequence& q, const Threshold& t, std::size_t n) {
    if (n == 0) throw InvalidArgument("phi_n: n must be positive");
    std::uint64_t count = 0;
    for (auto m : q.take(n))
        if (t.at_most(pair.distance_at(m))) ++count;
    return make_ratio(count, n);
}

template <class Pair>
Rational phi_n(const Pair& pair, const IndexSequence& q, double t, std::size_t n) {
    if (!(t > 0.0)) throw InvalidArgument("phi_n: t must be positive");
    return phi_n(pair, q, Threshold(t), n);
}

template <class Pair>
Rational phi_n(const Pair& pair, const IndexSequence& q, const Rational& t, std::size_t n) {
    if (t <= Rational(0)) throw InvalidArgument("phi_n: t must be positive");
    return phi_n(pair, q, Threshold(t), n);
}

struct ProfileOptions {
    /// tail window is [ceil(tail_fraction * n), n]
    Rational tail_fraction{1, 1000};
    std::size_t checkpoint_stride = 1;
    /// keep the full Φⁿ matrix (otherwise only the window extrema)
    bool record = true;
    /// first index i counted as late recurrence; 0 = ceil(n/2)
    std::size_t recurrence_start = 0;
    /// additional checkpoints besides multiples of the stride (sorted)
    std::vector<std::size_t> extra_checkpoints;
};

struct DistributionProfile {
    IndexSequence q;
    std::vector<double> t_grid;
    std::size_t horizon = 0;
    std::size_t checkpoint_stride = 1;
    std::size_t tail_start = 1;
    std::size_t recurrence_start = 1;

    std::vector<std::size_t> checkpoints;               // recorded k
    std::vector<std::vector<std::uint32_t>> counts;     // [t][checkpoint]
    std::vector<std::uint64_t> horizon_counts;          // per t, at k = horizon

    std::vector<Rational> phi_lower_est;                // per t, min over the tail window
    std::vector<Rational> phi_upper_est;                // per t, max over the tail window
    std::vector<std::size_t> lower_at, upper_at;        // checkpoint k attaining them

    /// last 1-based index i with d(m_i) <= t, resp. > t (0 = none)
    std::vector<std::size_t> last_at_most, last_above;

    Rational phi(std::size_t t_index, std::size_t checkpoint_index) const {
        return make_ratio(counts.at(t_index).at(checkpoint_index), checkpoints.at(checkpoint_index));
    }

    Rational phi_at_horizon(std::size_t t_index) const { return make_ratio(horizon_counts.at(t_index), horizon); }

    /// d <= t at some index in [recurrence_start, horizon]
    bool recurs_at_most(std::size_t t_index) const { return last_at_most[t_index] >= recurrence_start; }
    bool recurs_above(std::size_t t_index) const { return last_above[t_index] >= recurrence_start; }
};

/// Single pass over i = 1..horizon updating every threshold.
template <class Pair>
DistributionProfile profile(const Pair& pair, const IndexSequence& q, const std::vector<double>& t_grid,
                            std::size_t horizon, const ProfileOptions& options = {}) {
    detail::check_grid(t_grid);
    if (horizon < 2) throw InvalidArgument("profile: horizon must be at least 2");
    if (options.checkpoint_stride == 0) throw InvalidArgument("profile: checkpoint stride must be positive");
    if (options.tail_fraction <= Rational(0) || options.tail_fraction > Rational(1))
        throw InvalidArgument("profile: tail_fraction must lie in (0,1]");
    if (!q.reaches(horizon)) throw InvalidArgument("profile: Q has fewer than " + std::to_string(horizon) + " terms");

    DistributionProfile pr;
    pr.q = q;
    pr.t_grid = t_grid;
    pr.horizon = horizon;
    pr.checkpoint_stride = options.checkpoint_stride;
    pr.tail_start = std::max<std::size_t>(1, detail::ceil_fraction(options.tail_fraction, horizon));
    pr.recurrence_start = options.recurrence_start ? options.recurrence_start : detail::default_recurrence_start(horizon);

    const std::size_t nt = t_grid.size();
    std::vector<Threshold> th;
    for (double t : t_grid) th.emplace_back(t);
    std::vector<std::uint64_t> count(nt, 0);
    if (options.record) pr.counts.assign(nt, {});
    pr.last_at_most.assign(nt, 0);
    pr.last_above.assign(nt, 0);
    std::vector<std::uint64_t> lo_c(nt, 0), hi_c(nt, 0);
    pr.lower_at.assign(nt, 0);
    pr.upper_at.assign(nt, 0);

    const auto terms = q.take(horizon);
    for (std::size_t i = 1; i <= horizon; ++i) {
        const auto d = pair.distance_at(terms[i - 1]);
        for (std::size_t t = 0; t < nt; ++t) {
            if (th[t].at_most(d)) {
                ++count[t];
                pr.last_at_most[t] = i;
            } else {
                pr.last_above[t] = i;
            }
        }
        if (!detail::is_checkpoint(i, options.checkpoint_stride, horizon) &&
            !std::binary_search(options.extra_checkpoints.begin(), options.extra_checkpoints.end(), i))
            continue;
        if (options.record) {
            pr.checkpoints.push_back(i);
            for (std::size_t t = 0; t < nt; ++t) pr.counts[t].push_back(static_cast<std::uint32_t>(count[t]));
        }
        if (i < pr.tail_start) continue;
        for (std::size_t t = 0; t < nt; ++t) {
            if (!pr.lower_at[t] || ratio_less(count[t], i, lo_c[t], pr.lower_at[t])) {
                lo_c[t] = count[t];
                pr.lower_at[t] = i;
            }
            if (!pr.upper_at[t] || ratio_less(hi_c[t], pr.upper_at[t], count[t], i)) {
                hi_c[t] = count[t];
                pr.upper_at[t] = i;
            }
        }
    }
    pr.horizon_counts = count;
    for (std::size_t t = 0; t < nt; ++t) {
        pr.phi_lower_est.push_back(make_ratio(lo_c[t], pr.lower_at[t]));
        pr.phi_upper_est.push_back(make_ratio(hi_c[t], pr.upper_at[t]));
    }
    return pr;
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

struct ClassifyConfig {
    std::vector<double> t_grid = dyadic_grid(1, 20);
    double eps_zero = std::ldexp(1.0, -20);
    Rational eps_one{1, 50};
    Rational tail_fraction{1, 1000};
    std::size_t horizon = 100000;
    std::size_t checkpoint_stride = 1;
    std::size_t witness_limit = 8;
};

struct PairVerdict {
    bool li_yorke = false;
    bool li_yorke_delta = false;
    bool distributional = false;
    bool distributional_delta = false;

    std::string method;  // "direct" or "membership"
    double delta = 0;
    double eps_zero = 0;
    Rational eps_one{0};
    Rational tail_fraction{0};
    std::size_t horizon = 0;
    std::size_t checkpoint_stride = 1;
    std::size_t tail_start = 0;
    std::size_t recurrence_start = 0;
    /// t_grid with delta merged in, increasing; delta_index locates delta
    std::vector<double> thresholds;
    std::size_t delta_index = 0;
    /// estimates of Φ* (upper) and Φ (lower) on `thresholds`
    std::vector<Rational> phi_upper, phi_lower;
    /// times m in Q with d < eps_zero, resp. d > delta (most recent first)
    std::vector<std::uint64_t> proximal_witnesses, distal_witnesses;
    /// which s in `thresholds` (if any) satisfied the lower clause
    std::optional<double> separating_s;

    bool same_flags(const PairVerdict& o) const {
        return li_yorke == o.li_yorke && li_yorke_delta == o.li_yorke_delta && distributional == o.distributional &&
               distributional_delta == o.distributional_delta;
    }
};

namespace detail {

struct MergedGrid {
    std::vector<double> values;
    std::size_t delta_index = 0;
    std::vector<bool> in_t_grid;
};

inline MergedGrid merge_grid(const std::vector<double>& t_grid, double delta) {
    MergedGrid g;
    g.values = t_grid;
    if (!std::binary_search(g.values.begin(), g.values.end(), delta))
        g.values.insert(std::upper_bound(g.values.begin(), g.values.end(), delta), delta);
    g.delta_index = static_cast<std::size_t>(std::lower_bound(g.values.begin(), g.values.end(), delta) - g.values.begin());
    for (double v : g.values) g.in_t_grid.push_back(std::binary_search(t_grid.begin(), t_grid.end(), v));
    return g;
}

inline void check_config(double delta, const ClassifyConfig& c) {
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    check_grid(c.t_grid);
    if (!(c.eps_zero > 0.0)) throw InvalidArgument("eps_zero must be positive");
    if (c.eps_one < Rational(0) || c.eps_one > Rational(1)) throw InvalidArgument("eps_one must lie in [0,1]");
    if (c.horizon < 2) throw InvalidArgument("horizon must be at least 2");
}

template <class D>
void li_yorke_flags(PairVerdict& v, const std::vector<D>& dist, const IndexSequence& q, double delta,
                    const ClassifyConfig& c) {
    const Threshold zero(c.eps_zero), dl(delta);
    const auto terms = q.take(dist.size());
    bool near = false, apart = false, far = false;
    for (std::size_t i = dist.size(); i-- > 0;) {
        if (i + 1 < v.recurrence_start) break;
        if (zero.below(dist[i])) {
            near = true;
            if (v.proximal_witnesses.size() < c.witness_limit) v.proximal_witnesses.push_back(terms[i]);
        }
        if (zero.above(dist[i])) apart = true;
        if (dl.above(dist[i])) {
            far = true;
            if (v.distal_witnesses.size() < c.witness_limit) v.distal_witnesses.push_back(terms[i]);
        }
    }
    v.li_yorke = near && apart;
    v.li_yorke_delta = v.li_yorke && far;
}

inline PairVerdict verdict_header(const char* method, double delta, const ClassifyConfig& c, std::size_t tail_start,
                                  std::size_t recurrence_start, const MergedGrid& g) {
    PairVerdict v;
    v.method = method;
    v.delta = delta;
    v.eps_zero = c.eps_zero;
    v.eps_one = c.eps_one;
    v.tail_fraction = c.tail_fraction;
    v.horizon = c.horizon;
    v.checkpoint_stride = c.checkpoint_stride;
    v.tail_start = tail_start;
    v.recurrence_start = recurrence_start;
    v.thresholds = g.values;
    v.delta_index = g.delta_index;
    return v;
}

} // namespace detail

/// Finite-horizon verdicts from the tail-window estimates of Φ and Φ*.
///
/// distributional: Φ*(t) >= 1 - eps_one with late recurrence of d <= t for every
/// t in t_grid, and Φ(s) <= eps_one with late recurrence of d > s for some s in
/// t_grid ∪ {δ}. distributional_delta fixes s = δ.
template <class Pair>
PairVerdict classify(const Pair& pair, const IndexSequence& q, double delta, const ClassifyConfig& c = {}) {
    detail::check_config(delta, c);
    const auto g = detail::merge_grid(c.t_grid, delta);
    ProfileOptions po;
    po.tail_fraction = c.tail_fraction;
    po.checkpoint_stride = c.checkpoint_stride;
    po.record = false;
    const auto pr = profile(pair, q, g.values, c.horizon, po);
    auto v = detail::verdict_header("direct", delta, c, pr.tail_start, pr.recurrence_start, g);
    v.phi_upper = pr.phi_upper_est;
    v.phi_lower = pr.phi_lower_est;

    const Rational one_minus = Rational(1) - c.eps_one;
    bool upper_all = true;
    for (std::size_t t = 0; t < g.values.size(); ++t)
        if (g.in_t_grid[t] && !(pr.phi_upper_est[t] >= one_minus && pr.recurs_at_most(t))) upper_all = false;
    auto lower_ok = [&](std::size_t s) { return pr.phi_lower_est[s] <= c.eps_one && pr.recurs_above(s); };
    bool some_s = false;
    for (std::size_t s = 0; s < g.values.size() && !some_s; ++s)
        if (lower_ok(s)) {
            some_s = true;
            v.separating_s = g.values[s];
        }
    v.distributional = upper_all && some_s;
    v.distributional_delta = upper_all && lower_ok(g.delta_index);

    const auto dist = detail::sample_distances(pair, q, c.horizon);
    detail::li_yorke_flags(v, dist, q, delta, c);
    return v;
}

/// The same verdict built only from density-class tests on hitting sets:
///   clause (1): N((x,y), [Δ]_ε, Q) = {m : d < ε} has upper density >= 1 - eps_one for every ε in eps_grid;
///   clause (2): {m : d > s} has upper density >= 1 - eps_one for s = δ (resp. some s in distal_grid ∪ {δ}).
/// With dyadic distances, eps_grid = 2·t_grid and distal_grid = t_grid align it with classify().
template <class Pair>
PairVerdict membership_characterization(const Pair& pair, const IndexSequence& q, double delta,
                                        const std::vector<double>& eps_grid, const ClassifyConfig& c,
                                        std::optional<std::vector<double>> distal_grid = std::nullopt) {
    detail::check_config(delta, c);
    detail::check_grid(eps_grid);
    const auto& dg_in = distal_grid ? *distal_grid : eps_grid;
    detail::check_grid(dg_in);
    const auto g = detail::merge_grid(dg_in, delta);

    const std::size_t n = c.horizon;
    const auto dist = detail::sample_distances(pair, q, n);
    const auto terms = q.take(n);
    const IndexSequence prefix = IndexSequence::from_terms(terms);

    DensityOptions dopt;
    dopt.checkpoint_stride = c.checkpoint_stride;
    dopt.window_start = std::max<std::size_t>(1, detail::ceil_fraction(c.tail_fraction, n));
    dopt.recurrence_start = detail::default_recurrence_start(n);
    const Rational a = Rational(1) - c.eps_one;

    auto hitting = [&](auto pred) {
        std::vector<std::uint64_t> hits;
        for (std::size_t i = 0; i < n; ++i)
            if (pred(dist[i])) hits.push_back(terms[i]);
        return IndexSequence::from_terms(std::move(hits));
    };

    auto v = detail::verdict_header("membership", delta, c, dopt.window_start, dopt.recurrence_start, g);

    bool clause1 = true;
    for (double eps : eps_grid) {
        const Threshold th(eps);
        auto m = in_density_class(hitting([&](const auto& d) { return th.below(d); }), prefix, a, n, dopt);
        if (!m.member) clause1 = false;
    }
    bool some_s = false, at_delta = false;
    for (std::size_t s = 0; s < g.values.size(); ++s) {
        const Threshold th(g.values[s]);
        auto m = in_density_class(hitting([&](const auto& d) { return th.above(d); }), prefix, a, n, dopt);
        v.phi_lower.push_back(Rational(1) - m.estimate.running_sup);
        if (m.member && !some_s) {
            some_s = true;
            v.separating_s = g.values[s];
        }
        if (s == g.delta_index) at_delta = m.member;
    }
    v.distributional = clause1 && some_s;
    v.distributional_delta = clause1 && at_delta;

    // Li-Yorke clauses as density-zero (a = 0) membership: the hitting sets only need to recur.
    const Threshold zero(c.eps_zero), dl(delta);
    const bool near = in_density_class(hitting([&](const auto& d) { return zero.below(d); }), prefix, Rational(0), n, dopt).member;
    const bool apart = in_density_class(hitting([&](const auto& d) { return zero.above(d); }), prefix, Rational(0), n, dopt).member;
    const bool far = in_density_class(hitting([&](const auto& d) { return dl.above(d); }), prefix, Rational(0), n, dopt).member;
    v.li_yorke = near && apart;
    v.li_yorke_delta = v.li_yorke && far;
    for (std::size_t i = n; i-- > 0 && i + 1 >= dopt.recurrence_start;) {
        if (zero.below(dist[i]) && v.proximal_witnesses.size() < c.witness_limit) v.proximal_witnesses.push_back(terms[i]);
        if (dl.above(dist[i]) && v.distal_witnesses.size() < c.witness_limit) v.distal_witnesses.push_back(terms[i]);
    }
    return v;
}

/// eps_grid aligned with a dyadic t_grid: ε = 2t.
inline std::vector<double> aligned_eps_grid(const std::vector<double>& t_grid) {
    std::vector<double> out;
    for (double t : t_grid) out.push_back(2 * t);
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Columns k,t,phi_n,phi_n_float; one row per (checkpoint, t).
inline void write_profile_csv(std::ostream& out, const DistributionProfile& pr, const std::string& comment = {}) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "k,t,phi_n,phi_n_float\n";
    for (std::size_t c = 0; c < pr.checkpoints.size(); ++c)
        for (std::size_t t = 0; t < pr.t_grid.size(); ++t) {
            auto r = pr.phi(t, c);
            out << pr.checkpoints[c] << ',' << detail::format_real(pr.t_grid[t]) << ',' << to_string(r) << ','
                << detail::format_real(to_double(r)) << '\n';
        }
}

inline std::string flag(bool b) { return b ? "true" : "false"; }

inline void write_verdict_header(std::ostream& out) {
    out << "pair,method,li_yorke,li_yorke_delta,distributional,distributional_delta,delta,eps_zero,eps_one,"
           "horizon,tail_start,recurrence_start,phi_upper_min,phi_lower_delta,separating_s,"
           "proximal_witness,distal_witness\n";
}

inline void write_verdict_row(std::ostream& out, const std::string& pair_id, const PairVerdict& v) {
    Rational upper_min(1);
    for (std::size_t t = 0; t < v.phi_upper.size(); ++t) upper_min = std::min(upper_min, v.phi_upper[t]);
    out << pair_id << ',' << v.method << ',' << flag(v.li_yorke) << ',' << flag(v.li_yorke_delta) << ','
        << flag(v.distributional) << ',' << flag(v.distributional_delta) << ',' << detail::format_real(v.delta) << ','
        << detail::format_real(v.eps_zero) << ',' << to_string(v.eps_one) << ',' << v.horizon << ',' << v.tail_start
        << ',' << v.recurrence_start << ',' << (v.phi_upper.empty() ? std::string("") : to_string(upper_min)) << ','
        << (v.phi_lower.empty() ? std::string("") : to_string(v.phi_lower.at(v.delta_index))) << ','
        << (v.separating_s ? detail::format_real(*v.separating_s) : std::string("")) << ','
        << (v.proximal_witnesses.empty() ? std::string("") : std::to_string(v.proximal_witnesses.front())) << ','
        << (v.distal_witnesses.empty() ? std::string("") : std::to_string(v.distal_witnesses.front())) << '\n';
}

} // namespace dchaos
