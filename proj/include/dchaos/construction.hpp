#pragma once

// From Li-Yorke witnesses to a sequence Q along which the same pairs are
// distributionally scrambled, and the same for uniformly chaotic witnesses.

#include <dchaos/distribution.hpp>
#include <dchaos/merge.hpp>
#include <dchaos/systems.hpp>

#include <algorithm>
#include <cstdio>
#include <future>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dchaos {

// ---------------------------------------------------------------------------
// Witness extraction
// ---------------------------------------------------------------------------

struct DeltaPolicy {
    enum class Mode { Fixed, Adaptive };
    Mode mode = Mode::Fixed;
    double value = 0.5;

    static DeltaPolicy fixed(double delta) {
        if (!(delta > 0.0)) throw InvalidArgument("fixed delta must be positive");
        return {Mode::Fixed, delta};
    }
    /// half the largest distance seen in the first search_budget/10 times
    static DeltaPolicy adaptive() { return {Mode::Adaptive, 0.0}; }
};

struct ExtractOptions {
    /// largest time examined
    std::uint64_t search_budget = 10'000'000;
    /// witnesses that must exist per clause
    std::size_t requested = 10;
};

template <class Pair>
struct PairWitness {
    std::size_t i = 0;
    std::size_t j = 0;
    double delta = 0;
    /// k-th term n has d(f^n x_i, f^n x_j) < 2^-k
    IndexSequence proximal;
    /// every term has distance > delta
    IndexSequence distal;
    /// absent for witnesses read from a file or built by hand
    std::shared_ptr<const Pair> pair;

    std::string id() const { return std::to_string(i) + "-" + std::to_string(j); }
};

template <class Pair>
struct WitnessSequences {
    std::vector<PairWitness<Pair>> pairs;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
};

namespace detail {

template <class Pair>
IndexSequence proximal_generator(std::shared_ptr<const Pair> pair, std::uint64_t budget) {
    struct Cursor {
        std::uint64_t n = 1;
        std::uint64_t k = 1;
    };
    auto cur = std::make_shared<Cursor>();
    return IndexSequence::generate([pair, budget, cur]() -> std::optional<std::uint64_t> {
        while (cur->n <= budget) {
            const std::uint64_t n = cur->n++;
            if (below_pow2(pair->distance_at(n), cur->k)) {
                ++cur->k;
                return n;
            }
        }
        return std::nullopt;
    });
}

template <class Pair>
IndexSequence distal_generator(std::shared_ptr<const Pair> pair, double delta, std::uint64_t budget) {
    auto n = std::make_shared<std::uint64_t>(1);
    const Threshold th(delta);
    return IndexSequence::generate([pair, budget, n, th]() -> std::optional<std::uint64_t> {
        while (*n <= budget) {
            const std::uint64_t t = (*n)++;
            if (th.above(pair->distance_at(t))) return t;
        }
        return std::nullopt;
    });
}

template <class Pair>
double adaptive_delta(const Pair& pair, std::uint64_t budget) {
    double best = 0;
    const std::uint64_t limit = std::max<std::uint64_t>(1, budget / 10);
    for (std::uint64_t n = 0; n <= limit; ++n) best = std::max(best, to_double(pair.distance_at(n)));
    return best / 2;
}

} // namespace detail

/// Scans every pair (i < j) of points forward for proximal times (k-th needs
/// d < 2^-k) and distal times (d > δ_ij). Throws BudgetExhausted when fewer than
/// `requested` witnesses of a clause exist within the search budget.
template <class System>
WitnessSequences<typename System::Pair> extract_witnesses(const System& system,
                                                          const std::vector<typename System::Point>& points,
                                                          const DeltaPolicy& policy, const ExtractOptions& opt = {}) {
    using Pair = typename System::Pair;
    if (opt.search_budget == 0) throw InvalidArgument("search_budget must be positive");
    WitnessSequences<Pair> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            auto pair = std::make_shared<const Pair>(system.pair(points[i], points[j]));
            PairWitness<Pair> w;
            w.i = i;
            w.j = j;
            w.pair = pair;
            w.delta = policy.mode == DeltaPolicy::Mode::Fixed ? policy.value
                                                              : detail::adaptive_delta(*pair, opt.search_budget);
            w.proximal = detail::proximal_generator(pair, opt.search_budget);
            if (!w.proximal.reaches(opt.requested))
                throw BudgetExhausted(i, j, "proximal", w.proximal.materialized(), opt.requested);
            if (!(w.delta > 0.0)) throw BudgetExhausted(i, j, "distal", 0, opt.requested);
            w.distal = detail::distal_generator(pair, w.delta, opt.search_budget);
            if (!w.distal.reaches(opt.requested))
                throw BudgetExhausted(i, j, "distal", w.distal.materialized(), opt.requested);
            out.pairs.push_back(std::move(w));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Sequence construction for a chaotic set
// ---------------------------------------------------------------------------

struct SequenceDensity {
    std::string name;
    Rational running_sup{0};
    Rational value_at_horizon{0};
    std::size_t sup_checkpoint = 0;
};

struct PairReport {
    std::string id;
    double delta = 0;
    std::optional<PairVerdict> verdict;
    std::vector<SequenceDensity> densities;
    /// rigidity-return check (uniform pipeline only)
    std::optional<bool> rigidity_return;
    std::optional<std::uint64_t> rigidity_failure_time;
};

struct ConstructionReport {
    IndexSequence q;
    MergeResult merge;
    std::size_t horizon = 0;
    std::vector<PairReport> pairs;

    /// ids of pairs whose verdict misses distributional-δ (resp. distributional)
    std::vector<std::string> failures(bool with_delta = true) const {
        std::vector<std::string> out;
        for (const auto& p : pairs)
            if (p.verdict && !(with_delta ? p.verdict->distributional_delta : p.verdict->distributional))
                out.push_back(p.id);
        return out;
    }
};

struct ConstructionOptions {
    ClassifyConfig classify;
    MergeOptions merge;
};

namespace detail {

inline SequenceDensity density_in(const std::string& name, const IndexSequence& s, const IndexSequence& q,
                                  std::size_t horizon, std::size_t stride) {
    DensityOptions o;
    o.checkpoint_stride = stride;
    auto e = upper_density(s, q, horizon, o);
    return {name, e.running_sup, e.value_at_horizon, e.sup_checkpoint};
}

} // namespace detail

/// Merges [P_01, S_01, P_02, S_02, …] and classifies every pair along the result.
template <class Pair>
ConstructionReport chaotic_set_to_sequence(const WitnessSequences<Pair>& w, std::size_t horizon,
                                           const ConstructionOptions& opt = {}) {
    if (w.empty()) throw InvalidArgument("chaotic_set_to_sequence: witness set is empty");
    std::vector<IndexSequence> family;
    for (const auto& p : w.pairs) {
        family.push_back(p.proximal);
        family.push_back(p.distal);
    }
    ConstructionReport rep;
    rep.merge = merge_density_one(family, horizon, opt.merge);
    rep.q = rep.merge.q;
    rep.horizon = horizon;
    if (!rep.q.reaches(horizon)) throw InvalidArgument("merged sequence ended before the horizon");
    auto cfg = opt.classify;
    cfg.horizon = horizon;
    // verdicts per pair are independent; collect them in pair order
    std::vector<std::future<PairVerdict>> verdicts;
    for (const auto& p : w.pairs)
        if (p.pair)
            verdicts.push_back(std::async(std::launch::async, [&rep, &cfg, pair = p.pair, delta = p.delta] {
                return classify(*pair, rep.q, delta, cfg);
            }));
    std::size_t next = 0;
    for (const auto& p : w.pairs) {
        PairReport pr;
        pr.id = p.id();
        pr.delta = p.delta;
        pr.densities.push_back(detail::density_in("P_" + p.id(), p.proximal, rep.q, horizon, cfg.checkpoint_stride));
        pr.densities.push_back(detail::density_in("S_" + p.id(), p.distal, rep.q, horizon, cfg.checkpoint_stride));
        if (p.pair) pr.verdict = verdicts[next++].get();
        rep.pairs.push_back(std::move(pr));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Uniformly chaotic witnesses
// ---------------------------------------------------------------------------

/// Nested point sets C_1 ⊆ C_2 ⊆ … with, per level and precision k (1-based
/// position in the list), a common proximal time (all pairs within 2^-k) and a
/// common rigidity time (every point within 2^-k of itself).
template <class System>
struct UniformChaoticWitness {
    System system;
    std::vector<std::vector<typename System::Point>> levels;
    std::vector<std::vector<std::uint64_t>> proximal_times;
    std::vector<std::vector<std::uint64_t>> rigidity_times;

    /// Throws WitnessInvalid (1-based level) at the first claim that fails.
    void verify() const {
        if (levels.empty()) throw InvalidArgument("uniform witness has no levels");
        if (proximal_times.size() != levels.size() || rigidity_times.size() != levels.size())
            throw InvalidArgument("uniform witness needs one proximal and one rigidity list per level");
        for (std::size_t n = 0; n < levels.size(); ++n) {
            const std::size_t level = n + 1;
            if (n + 1 < levels.size())
                for (const auto& x : levels[n])
                    if (std::find(levels[n + 1].begin(), levels[n + 1].end(), x) == levels[n + 1].end())
                        throw WitnessInvalid(level, 0, 0.0, "level is not contained in the next level");
            check_increasing(level, proximal_times[n], "proximal");
            check_increasing(level, rigidity_times[n], "rigidity");
            const auto& pts = levels[n];
            std::vector<typename System::Pair> pairs;
            std::vector<std::pair<std::size_t, std::size_t>> ids;
            for (std::size_t a = 0; a < pts.size(); ++a)
                for (std::size_t b = a + 1; b < pts.size(); ++b) {
                    pairs.push_back(system.pair(pts[a], pts[b]));
                    ids.emplace_back(a, b);
                }
            for (std::size_t k = 1; k <= proximal_times[n].size(); ++k) {
                const auto t = proximal_times[n][k - 1];
                for (std::size_t p = 0; p < pairs.size(); ++p) {
                    const auto d = pairs[p].distance_at(t);
                    if (!below_pow2(d, k))
                        throw WitnessInvalid(level, t, to_double(d),
                                             "proximal time for precision 2^-" + std::to_string(k) + " leaves points " +
                                                 std::to_string(ids[p].first) + "," + std::to_string(ids[p].second) +
                                                 " apart");
                }
            }
            for (std::size_t k = 1; k <= rigidity_times[n].size(); ++k) {
                const auto t = rigidity_times[n][k - 1];
                for (std::size_t a = 0; a < pts.size(); ++a) {
                    const auto d = system.self_distance(pts[a], t);
                    if (!below_pow2(d, k))
                        throw WitnessInvalid(level, t, to_double(d),
                                             "rigidity time for precision 2^-" + std::to_string(k) +
                                                 " does not return point " + std::to_string(a));
                }
            }
        }
    }

private:
    static void check_increasing(std::size_t level, const std::vector<std::uint64_t>& v, const char* what) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == 0 || (i > 0 && v[i] <= v[i - 1]))
                throw WitnessInvalid(level, v[i], 0.0, std::string(what) + " times must be positive and increasing");
    }
};

/// Verifies the witness, merges [P_1, S_1, P_2, S_2, …], checks that along the
/// top-level rigidity times every pair returns to within 2·2^-k of its initial
/// separation, and classifies each top-level pair with δ = d(x,y)/2.
template <class System>
ConstructionReport uniform_chaotic_to_sequence(const UniformChaoticWitness<System>& w, std::size_t horizon,
                                               const ConstructionOptions& opt = {}) {
    w.verify();
    std::vector<IndexSequence> family;
    for (std::size_t n = 0; n < w.levels.size(); ++n) {
        family.push_back(IndexSequence::from_terms(w.proximal_times[n]));
        family.push_back(IndexSequence::from_terms(w.rigidity_times[n]));
    }
    ConstructionReport rep;
    rep.merge = merge_density_one(family, horizon, opt.merge);
    rep.q = rep.merge.q;
    rep.horizon = horizon;
    if (!rep.q.reaches(horizon)) throw InvalidArgument("merged sequence ended before the horizon");
    auto cfg = opt.classify;
    cfg.horizon = horizon;

    const auto& top = w.levels.back();
    const auto& rig = w.rigidity_times.back();
    for (std::size_t a = 0; a < top.size(); ++a)
        for (std::size_t b = a + 1; b < top.size(); ++b) {
            const auto pair = w.system.pair(top[a], top[b]);
            PairReport pr;
            pr.id = std::to_string(a) + "-" + std::to_string(b);
            const auto d0 = pair.distance_at(0);
            pr.delta = to_double(d0) / 2;
            pr.rigidity_return = true;
            for (std::size_t k = 1; k <= rig.size(); ++k) {
                const double gap = distance_gap(pair.distance_at(rig[k - 1]), d0);
                if (!(gap < std::ldexp(2.0, -static_cast<int>(std::min<std::size_t>(k, 1000))))) {
                    pr.rigidity_return = false;
                    pr.rigidity_failure_time = rig[k - 1];
                    break;
                }
            }
            const std::size_t levels = w.levels.size();
            for (std::size_t n = 0; n < levels; ++n) {
                pr.densities.push_back(detail::density_in("P_" + std::to_string(n + 1), family[2 * n], rep.q, horizon,
                                                          cfg.checkpoint_stride));
                pr.densities.push_back(detail::density_in("S_" + std::to_string(n + 1), family[2 * n + 1], rep.q,
                                                          horizon, cfg.checkpoint_stride));
            }
            if (pr.delta > 0.0) pr.verdict = classify(pair, rep.q, pr.delta, cfg);
            rep.pairs.push_back(std::move(pr));
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Synthetic uniformly chaotic witness in the full shift
// ---------------------------------------------------------------------------

/// Greedy common proximal times after `after`: the k-th found time n has all
/// pairs agreeing on [n, n+k].
inline std::vector<std::uint64_t> find_uniform_proximal_times(const ShiftSystem& sys,
                                                              const std::vector<ShiftPoint>& pts,
                                                              std::uint64_t after, std::size_t count,
                                                              std::uint64_t limit) {
    std::vector<ShiftPair> pairs;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) pairs.push_back(sys.pair(pts[a], pts[b]));
    std::vector<std::uint64_t> out;
    std::uint64_t n = after + 1, k = 1;
    while (out.size() < count) {
        if (n > limit) throw InvalidArgument("synthetic witness: proximal times run past the search limit");
        std::optional<std::uint64_t> g;
        for (const auto& p : pairs) {
            auto h = p.next_disagreement(n);
            if (h && (!g || *h < *g)) g = h;
        }
        if (!g || *g - n >= k + 1) {
            out.push_back(n++);
            ++k;
        } else {
            n = *g + 1;
        }
    }
    return out;
}

/// Greedy common rigidity times after `after`: the k-th found time r has every
/// point agreeing with its own shift by r on [0, k].
inline std::vector<std::uint64_t> find_uniform_rigidity_times(const std::vector<ShiftPoint>& pts,
                                                              std::uint64_t after, std::size_t count) {
    std::vector<std::uint64_t> out;
    if (pts.empty()) return out;
    const auto& runs = pts.front().runs();
    const std::uint32_t s0 = pts.front().symbol_at(0);
    std::uint64_t k = 1;
    for (std::size_t r = 0; r + 1 < runs.size() && out.size() < count; ++r) {
        if (runs[r].symbol != s0) continue;
        for (std::uint64_t t = std::max(runs[r].start, after + 1); t < runs[r + 1].start && out.size() < count; ++t) {
            bool ok = true;
            for (const auto& x : pts)
                if (!below_pow2(x.self_distance(t), k)) {
                    ok = false;
                    break;
                }
            if (ok) {
                out.push_back(t);
                ++k;
            }
        }
    }
    if (out.size() < count) throw InvalidArgument("synthetic witness: not enough rigidity times; increase depth");
    return out;
}

struct SyntheticUniformOptions {
    /// W_1(a) = a, W_{j+1}(a) = W_j(a) 0^{|W_j|} W_j(a); points are W_depth(a) 0^∞
    std::size_t depth = 15;
    /// |C_1|, |C_2|, … (non-decreasing); point a carries label a
    std::vector<std::size_t> level_sizes{2, 3};
    std::vector<std::size_t> proximal_counts{20, 11000};
    std::vector<std::size_t> rigidity_counts{150, 400};
};

/// Labelled hierarchical words sharing their zero blocks (common proximal
/// times) and their copy starts (common rigidity times). Each level's lists
/// lie after the previous list, in the order P_1, S_1, P_2, S_2, ….
inline UniformChaoticWitness<ShiftSystem> synthetic_uniform_witness(const SyntheticUniformOptions& o = {}) {
    const std::size_t nl = o.level_sizes.size();
    if (nl == 0 || o.proximal_counts.size() != nl || o.rigidity_counts.size() != nl)
        throw InvalidArgument("synthetic witness: level sizes and counts must have one entry per level");
    if (o.depth < 1 || o.depth > 30) throw InvalidArgument("synthetic witness: depth must lie in [1,30]");
    for (std::size_t n = 0; n < nl; ++n)
        if (o.level_sizes[n] < 2 || (n > 0 && o.level_sizes[n] < o.level_sizes[n - 1]))
            throw InvalidArgument("synthetic witness: level sizes must be >= 2 and non-decreasing");

    std::vector<std::uint64_t> labels{0};
    std::uint64_t w = 1;
    for (std::size_t j = 1; j < o.depth; ++j) {
        const std::size_t m = labels.size();
        for (std::size_t i = 0; i < m; ++i) labels.push_back(labels[i] + 2 * w);
        w *= 3;
    }
    const std::size_t top = o.level_sizes.back();
    std::vector<ShiftPoint> all;
    for (std::size_t a = 1; a <= top; ++a) {
        std::vector<Run> runs;
        for (auto p : labels) {
            runs.push_back({p, static_cast<std::uint32_t>(a)});
            runs.push_back({p + 1, 0});
        }
        all.emplace_back(std::move(runs));
    }
    UniformChaoticWitness<ShiftSystem> wit{ShiftSystem(static_cast<std::uint32_t>(top + 1)), {}, {}, {}};
    std::uint64_t after = 0;
    for (std::size_t n = 0; n < nl; ++n) {
        std::vector<ShiftPoint> level(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(o.level_sizes[n]));
        auto p = find_uniform_proximal_times(wit.system, level, after, o.proximal_counts[n], w);
        after = p.back();
        auto s = find_uniform_rigidity_times(level, after, o.rigidity_counts[n]);
        after = s.back();
        wit.levels.push_back(std::move(level));
        wit.proximal_times.push_back(std::move(p));
        wit.rigidity_times.push_back(std::move(s));
    }
    return wit;
}

// ---------------------------------------------------------------------------
// Witness files
//
//   [pair 0 1]
//   delta = 0.5
//   proximal = 4, 5, 6
//   distal = 5, 6, 7
// ---------------------------------------------------------------------------

template <class Pair>
void write_witness_file(std::ostream& out, const WitnessSequences<Pair>& w, std::size_t terms_per_clause,
                        const std::string& comment = {}) {
    if (!comment.empty()) out << "# " << comment << '\n';
    for (const auto& p : w.pairs) {
        out << "[pair " << p.i << ' ' << p.j << "]\n" << "delta = " << detail::format_real(p.delta) << '\n';
        auto emit = [&](const char* key, const IndexSequence& s) {
            out << key << " =";
            const std::size_t n = s.reaches(terms_per_clause) ? terms_per_clause : s.materialized();
            auto terms = s.take(n);
            for (std::size_t i = 0; i < terms.size(); ++i) out << (i ? ", " : " ") << terms[i];
            out << '\n';
        };
        emit("proximal", p.proximal);
        emit("distal", p.distal);
    }
}

/// Reads witness sections; the result carries no pair objects.
template <class Pair>
WitnessSequences<Pair> read_witness_file(std::istream& in, const std::string& source) {
    WitnessSequences<Pair> out;
    std::string line;
    std::size_t lineno = 0;
    PairWitness<Pair>* cur = nullptr;
    auto trim = [](const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    auto list = [&](const std::string& v) {
        std::vector<std::uint64_t> terms;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            std::uint64_t x = 0;
            auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
            if (ec != std::errc() || p != item.data() + item.size())
                throw ParseError(source, lineno, "expected a time, got '" + item + "'");
            terms.push_back(x);
        }
        try {
            return IndexSequence::from_terms(std::move(terms));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t[0] == '[') {
            unsigned long a = 0, b = 0;
            char tail = 0;
            if (std::sscanf(t.c_str(), "[pair %lu %lu%c", &a, &b, &tail) != 3 || tail != ']')
                throw ParseError(source, lineno, "expected a section header [pair i j]");
            out.pairs.emplace_back();
            cur = &out.pairs.back();
            cur->i = a;
            cur->j = b;
            continue;
        }
        if (!cur) throw ParseError(source, lineno, "entry outside a [pair i j] section");
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
        const auto key = trim(t.substr(0, eq));
        const auto val = trim(t.substr(eq + 1));
        if (key == "delta") {
            try {
                cur->delta = std::stod(val);
            } catch (const std::exception&) {
                throw ParseError(source, lineno, "delta is not a number");
            }
        } else if (key == "proximal") {
            cur->proximal = list(val);
        } else if (key == "distal") {
            cur->distal = list(val);
        } else {
            throw ParseError(source, lineno, "unknown key '" + key + "'");
        }
    }
    return out;
}

inline void write_report_csv(std::ostream& out, const ConstructionReport& rep, const std::string& comment = {}) {
    if (!comment.empty()) out << "# " << comment << '\n';
    write_verdict_header(out);
    for (const auto& p : rep.pairs)
        if (p.verdict) write_verdict_row(out, p.id, *p.verdict);
}

inline void write_density_csv(std::ostream& out, const ConstructionReport& rep, const std::string& comment = {}) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "pair,sequence,running_sup,running_sup_float,value_at_horizon,sup_checkpoint,rigidity_return\n";
    for (const auto& p : rep.pairs)
        for (const auto& d : p.densities)
            out << p.id << ',' << d.name << ',' << to_string(d.running_sup) << ','
                << detail::format_real(to_double(d.running_sup)) << ',' << to_string(d.value_at_horizon) << ','
                << d.sup_checkpoint << ',' << (p.rigidity_return ? flag(*p.rigidity_return) : std::string()) << '\n';
}

} // namespace dchaos
