#pragma once

// Subcommands of the dchaos tool. Every CSV starts with a comment row naming
// the command, the config hash and the parameters used.

#include <dchaos/cli/config.hpp>
#include <dchaos/construction.hpp>
#include <dchaos/distribution.hpp>
#include <dchaos/index_seq.hpp>
#include <dchaos/merge.hpp>
#include <dchaos/oracle.hpp>
#include <dchaos/systems.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace dchaos::cli {

enum ExitCode : int { Success = 0, ValidationFailure = 1, RuntimeFailure = 2 };

struct RunOptions {
    std::string command;
    std::optional<std::string> config_path;
    std::optional<std::size_t> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> checkpoint_stride;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"density", "distfn", "classify", "merge", "pipeline", "uniform", "oracle"};
    return names;
}

namespace detail {

namespace fs = std::filesystem;

using AnyPair = std::variant<ShiftPair, IntervalOrbitPair>;

struct NamedPair {
    std::string id;
    AnyPair pair;
};

struct Context {
    std::string command;
    Config cfg;
    fs::path base_dir;
    fs::path out_dir;
    std::ostream* log;

    std::size_t horizon(std::size_t fallback) const { return cfg.u64("run.horizon", fallback); }
    std::size_t stride() const {
        auto s = cfg.u64("run.checkpoint_stride", 1);
        if (s == 0) cfg.reject("run.checkpoint_stride", "checkpoint stride must be positive");
        return s;
    }
    std::uint64_t seed() const { return cfg.u64("run.seed", 0); }

    std::string header(const std::string& extra = {}) const {
        std::string h = "dchaos " + command + " config_hash=" + cfg.hash_hex() + " seed=" + std::to_string(seed());
        if (auto hz = cfg.get("run.horizon")) h += " horizon=" + *hz;
        if (!extra.empty()) h += " " + extra;
        return h;
    }

    std::ofstream open(const std::string& name) const {
        fs::create_directories(out_dir);
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw Error("cannot write " + (out_dir / name).string());
        *log << "wrote " << (out_dir / name).string() << '\n';
        return f;
    }
};

inline IndexSequence sequence_from(const std::string& spec, const Context& ctx, const std::string& key) {
    auto num = [&](const std::string& s) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v == 0)
            ctx.cfg.reject(key, "bad number '" + s + "' in sequence spec '" + spec + "'");
        return v;
    };
    if (spec == "naturals") return IndexSequence::naturals();
    if (spec == "evens") return IndexSequence::progression(2, 2);
    if (spec == "odds") return IndexSequence::progression(1, 2);
    if (spec == "squares") return IndexSequence::squares();
    if (spec.rfind("multiples:", 0) == 0) {
        auto k = num(spec.substr(10));
        return IndexSequence::progression(k, k);
    }
    if (spec.rfind("ap:", 0) == 0) {
        auto rest = spec.substr(3);
        auto colon = rest.find(':');
        if (colon == std::string::npos) ctx.cfg.reject(key, "ap spec must be ap:FIRST:STEP");
        return IndexSequence::progression(num(rest.substr(0, colon)), num(rest.substr(colon + 1)));
    }
    if (spec.rfind("file:", 0) == 0) {
        fs::path p = spec.substr(5);
        if (p.is_relative()) p = ctx.base_dir / p;
        return read_sequence_file(p.string());
    }
    ctx.cfg.reject(key, "unknown sequence '" + spec + "'");
}

inline std::vector<double> t_grid_from(const Context& ctx) {
    const auto spec = ctx.cfg.str("run.t_grid", "dyadic:1:20");
    if (spec.rfind("dyadic:", 0) == 0) {
        int lo = 0, hi = 0;
        char tail = 0;
        if (std::sscanf(spec.c_str(), "dyadic:%d:%d%c", &lo, &hi, &tail) != 2 || lo < 0 || hi < lo || hi > 60)
            ctx.cfg.reject("run.t_grid", "expected dyadic:LO:HI with 0 <= LO <= HI <= 60");
        return dyadic_grid(lo, hi);
    }
    std::vector<double> g;
    for (const auto& s : ctx.cfg.list("run.t_grid")) {
        try {
            g.push_back(to_double(parse_rational(s)));
        } catch (const InvalidArgument&) {
            ctx.cfg.reject("run.t_grid", "bad threshold '" + s + "'");
        }
    }
    std::sort(g.begin(), g.end());
    try {
        dchaos::detail::check_grid(g);
    } catch (const InvalidArgument& e) {
        ctx.cfg.reject("run.t_grid", e.what());
    }
    return g;
}

inline bool interval_system(const Context& ctx) {
    const auto kind = ctx.cfg.str("system.kind", "shift");
    if (kind != "shift" && kind != "interval") ctx.cfg.reject("system.kind", "system kind must be shift or interval");
    return kind == "interval";
}

inline ClassifyConfig classify_config(const Context& ctx, std::size_t fallback_horizon) {
    ClassifyConfig c;
    c.t_grid = t_grid_from(ctx);
    c.eps_zero = ctx.cfg.real("run.eps_zero", interval_system(ctx) ? 1e-6 : std::ldexp(1.0, -20));
    c.eps_one = ctx.cfg.rational("run.eps_one", Rational(1, 50));
    c.tail_fraction = ctx.cfg.rational("run.tail_fraction", Rational(1, 1000));
    c.horizon = ctx.horizon(fallback_horizon);
    c.checkpoint_stride = ctx.stride();
    c.witness_limit = ctx.cfg.u64("run.witness_limit", 8);
    if (c.tail_fraction <= Rational(0) || c.tail_fraction > Rational(1))
        ctx.cfg.reject("run.tail_fraction", "tail_fraction must lie in (0,1]");
    if (c.eps_one < Rational(0) || c.eps_one > Rational(1)) ctx.cfg.reject("run.eps_one", "eps_one must lie in [0,1]");
    return c;
}

inline std::vector<std::uint64_t> family_lengths(const Context& ctx) {
    if (ctx.cfg.has("family.lengths")) return ctx.cfg.u64_list("family.lengths");
    const auto base = ctx.cfg.u64("family.block_base", 4);
    const auto count = ctx.cfg.u64("family.block_count", 8);
    if (base < 2) ctx.cfg.reject("family.block_base", "block_base must be at least 2");
    if (count == 0 || count > 30) ctx.cfg.reject("family.block_count", "block_count must lie in [1,30]");
    return geometric_lengths(base, count);
}

inline BlockFamily family_from(const Context& ctx) {
    const auto members = ctx.cfg.u64("family.members", 2);
    const auto m = ctx.cfg.u64("family.alphabet_size", std::max<std::uint64_t>(2, members));
    try {
        return make_block_family(static_cast<std::uint32_t>(m), family_lengths(ctx), members);
    } catch (const InvalidArgument& e) {
        ctx.cfg.reject("family.members", e.what());
    }
}

inline IntervalSystem interval_from(const Context& ctx) {
    try {
        return IntervalSystem(IntervalMap::parse(ctx.cfg.str("system.map", "tent:2")),
                              ctx.cfg.u64("system.max_iterations", 10'000'000));
    } catch (const InvalidArgument& e) {
        ctx.cfg.reject("system.map", e.what());
    }
}

/// Interval points: listed in [points] values, or `count` uniform draws from the seed.
inline std::vector<double> interval_points(const Context& ctx) {
    std::vector<double> pts;
    if (ctx.cfg.has("points.values")) {
        for (const auto& s : ctx.cfg.list("points.values")) {
            try {
                pts.push_back(std::stod(s));
            } catch (const std::exception&) {
                ctx.cfg.reject("points.values", "bad point '" + s + "'");
            }
        }
    } else {
        std::mt19937_64 rng(ctx.seed());
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto n = ctx.cfg.u64("points.count", 2);
        for (std::uint64_t i = 0; i < n; ++i) pts.push_back(u(rng));
    }
    for (double v : pts)
        if (!(v >= 0.0 && v <= 1.0)) ctx.cfg.reject("points.values", "points must lie in [0,1]");
    return pts;
}

inline std::vector<NamedPair> pairs_from(const Context& ctx) {
    std::vector<NamedPair> out;
    if (interval_system(ctx)) {
        auto sys = interval_from(ctx);
        auto pts = interval_points(ctx);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                out.push_back({std::to_string(i) + "-" + std::to_string(j), sys.pair(pts[i], pts[j])});
        return out;
    }
    const auto source = ctx.cfg.str("pair.source", "family");
    const auto m = static_cast<std::uint32_t>(ctx.cfg.u64("pair.alphabet_size", 2));
    if (source == "family") {
        auto fam = family_from(ctx);
        for (std::size_t i = 0; i < fam.points.size(); ++i)
            for (std::size_t j = i + 1; j < fam.points.size(); ++j)
                out.push_back({std::to_string(i) + "-" + std::to_string(j), fam.pair(i, j)});
    } else if (source == "diagonal") {
        out.push_back({"diagonal", ShiftPair(std::max<std::uint32_t>(m, 2), {})});
    } else if (source == "full") {
        out.push_back({"full", ShiftPair(std::max<std::uint32_t>(m, 2), {{0, 1}}, Periodicity{1, 0})});
    } else if (source.rfind("file:", 0) == 0) {
        fs::path p = source.substr(5);
        if (p.is_relative()) p = ctx.base_dir / p;
        std::ifstream in(p);
        if (!in) throw ParseError(p.string(), 0, "cannot open pair file");
        out.push_back({p.filename().string(), ShiftPair::parse(in, p.string())});
    } else {
        ctx.cfg.reject("pair.source", "pair source must be family, diagonal, full or file:PATH");
    }
    if (out.empty()) ctx.cfg.reject("family.members", "no pairs: the family needs at least two members");
    return out;
}

// ---- subcommands ------------------------------------------------------------

inline int cmd_density(const Context& ctx) {
    if (!ctx.cfg.has("sequence.p")) ctx.cfg.reject("sequence.p", "density needs [sequence] p = ...");
    auto p = sequence_from(ctx.cfg.str("sequence.p", ""), ctx, "sequence.p");
    auto q = sequence_from(ctx.cfg.str("sequence.q", "naturals"), ctx, "sequence.q");
    const auto n = ctx.horizon(1000);
    DensityOptions o;
    o.checkpoint_stride = ctx.stride();
    auto est = upper_density(p, q, n, o);
    auto f = ctx.open("density.csv");
    f << "# " << ctx.header("stride=" + std::to_string(o.checkpoint_stride)) << '\n' << "k,count,value,value_float\n";
    for (const auto& c : est.checkpoints)
        f << c.k << ',' << c.count << ',' << to_string(c.value()) << ','
          << dchaos::detail::format_real(to_double(c.value())) << '\n';
    *ctx.log << "value_at_horizon " << to_string(est.value_at_horizon) << "\nrunning_sup " << to_string(est.running_sup)
             << "\ninfinite_proxy " << flag(est.recurs) << '\n';
    if (ctx.cfg.has("sequence.a")) {
        const auto a = ctx.cfg.rational("sequence.a", Rational(0));
        if (a < Rational(0) || a > Rational(1)) ctx.cfg.reject("sequence.a", "a must lie in [0,1]");
        auto m = in_density_class(p, q, a, n, o);
        *ctx.log << "in_density_class(a=" << to_string(a) << ") " << flag(m.member) << '\n';
    }
    return Success;
}

inline int cmd_distfn(const Context& ctx) {
    auto pairs = pairs_from(ctx);
    auto q = sequence_from(ctx.cfg.str("sequence.q", "naturals"), ctx, "sequence.q");
    const auto grid = t_grid_from(ctx);
    ProfileOptions po;
    po.tail_fraction = ctx.cfg.rational("run.tail_fraction", Rational(1, 1000));
    po.checkpoint_stride = ctx.stride();
    const auto n = ctx.horizon(10000);
    const auto& np = pairs.front();
    auto pr = std::visit([&](const auto& p) { return profile(p, q, grid, n, po); }, np.pair);
    auto f = ctx.open("distfn.csv");
    write_profile_csv(f, pr, ctx.header("pair=" + np.id + " tail_start=" + std::to_string(pr.tail_start)));
    for (std::size_t t = 0; t < grid.size(); ++t)
        *ctx.log << "t=" << dchaos::detail::format_real(grid[t]) << " phi_lower_est=" << to_string(pr.phi_lower_est[t])
                 << " phi_upper_est=" << to_string(pr.phi_upper_est[t]) << '\n';
    return Success;
}

inline int cmd_classify(const Context& ctx) {
    auto pairs = pairs_from(ctx);
    auto q = sequence_from(ctx.cfg.str("sequence.q", "naturals"), ctx, "sequence.q");
    const auto c = classify_config(ctx, 100000);
    const double delta = ctx.cfg.real("run.delta", 0.5);
    if (!(delta > 0.0)) ctx.cfg.reject("run.delta", "delta must be positive");
    auto f = ctx.open("verdicts.csv");
    f << "# " << ctx.header("delta=" + dchaos::detail::format_real(delta) + " eps_one=" + to_string(c.eps_one)) << '\n';
    write_verdict_header(f);
    for (const auto& np : pairs) {
        auto direct = std::visit([&](const auto& p) { return classify(p, q, delta, c); }, np.pair);
        auto member = std::visit(
            [&](const auto& p) {
                return membership_characterization(p, q, delta, aligned_eps_grid(c.t_grid), c, c.t_grid);
            },
            np.pair);
        write_verdict_row(f, np.id, direct);
        write_verdict_row(f, np.id, member);
        *ctx.log << np.id << ": li_yorke=" << flag(direct.li_yorke) << " li_yorke_delta=" << flag(direct.li_yorke_delta)
                 << " distributional=" << flag(direct.distributional)
                 << " distributional_delta=" << flag(direct.distributional_delta)
                 << " paths_agree=" << flag(direct.same_flags(member)) << '\n';
    }
    return Success;
}

inline void write_stages(std::ostream& f, const std::vector<MergeStage>& stages, std::size_t horizon) {
    f << "stage,member,first_index,length,end_q,member_hits,target_denominator,meets_target,complete\n";
    BigInt start = 0;
    for (const auto& s : stages) {
        if (start >= horizon) break;
        f << s.stage << ',' << s.member << ',' << s.first_index << ',' << s.length << ',' << s.end_q << ','
          << s.member_hits << ',' << s.target_denominator << ',' << flag(s.meets_target()) << ','
          << flag(s.end_q <= horizon) << '\n';
        start = s.end_q;
    }
}

inline int cmd_merge(const Context& ctx) {
    const auto specs = ctx.cfg.list("merge.family");
    if (specs.empty()) ctx.cfg.reject("merge.family", "merge needs [merge] family = SEQ, SEQ, ...");
    std::vector<IndexSequence> family;
    for (const auto& s : specs) family.push_back(sequence_from(s, ctx, "merge.family"));
    const auto n = ctx.horizon(100000);
    MergeOptions mo;
    mo.density_floor = ctx.cfg.u64("merge.density_floor", 100);
    if (mo.density_floor == 0) ctx.cfg.reject("merge.density_floor", "density_floor must be positive");
    auto res = merge_density_one(family, n, mo);
    const auto terms = res.q.take(n);
    {
        auto f = ctx.open("merged_q.txt");
        write_sequence(f, terms, ctx.header("density_floor=" + std::to_string(mo.density_floor)));
    }
    DensityOptions o;
    o.checkpoint_stride = ctx.stride();
    const Rational required = ctx.cfg.rational("merge.require_density", Rational(0));
    bool ok = true;
    {
        auto f = ctx.open("merge_audit.csv");
        f << "# " << ctx.header("density_floor=" + std::to_string(mo.density_floor)) << '\n'
          << "member,sequence,running_sup,running_sup_float,sup_checkpoint,value_at_horizon\n";
        for (std::size_t i = 0; i < family.size(); ++i) {
            auto e = upper_density(family[i], res.q, n, o);
            f << i << ',' << specs[i] << ',' << to_string(e.running_sup) << ','
              << dchaos::detail::format_real(to_double(e.running_sup)) << ',' << e.sup_checkpoint << ','
              << to_string(e.value_at_horizon) << '\n';
            *ctx.log << specs[i] << ": running_sup " << to_string(e.running_sup) << " ("
                     << dchaos::detail::format_real(to_double(e.running_sup)) << ")\n";
            if (e.running_sup < required) ok = false;
        }
    }
    {
        auto f = ctx.open("merge_stages.csv");
        f << "# " << ctx.header() << '\n';
        auto st = res.stages();
        write_stages(f, st, n);
        for (const auto& s : st)
            if (s.end_q <= n && !s.meets_target()) ok = false;
    }
    return ok ? Success : ValidationFailure;
}

template <class Pair>
int finish_construction(const Context& ctx, const ConstructionReport& rep, const std::string& prefix, bool strict,
                        bool with_delta) {
    const std::string extra = "eps_one=" + ctx.cfg.str("run.eps_one", "1/50");
    {
        auto f = ctx.open(prefix + "_q.txt");
        write_sequence(f, rep.q.take(rep.horizon), ctx.header(extra));
    }
    {
        auto f = ctx.open(prefix + "_report.csv");
        write_report_csv(f, rep, ctx.header(extra));
    }
    {
        auto f = ctx.open(prefix + "_densities.csv");
        write_density_csv(f, rep, ctx.header(extra));
    }
    {
        auto f = ctx.open(prefix + "_stages.csv");
        f << "# " << ctx.header(extra) << '\n';
        write_stages(f, rep.merge.stages(), rep.horizon);
    }
    bool ok = true;
    for (const auto& p : rep.pairs) {
        const bool pass = p.verdict && (with_delta ? p.verdict->distributional_delta : p.verdict->distributional) &&
                          p.rigidity_return.value_or(true);
        *ctx.log << "pair " << p.id << ": " << (pass ? "PASS" : "FAIL");
        if (p.verdict)
            *ctx.log << " distributional=" << flag(p.verdict->distributional)
                     << " distributional_delta=" << flag(p.verdict->distributional_delta);
        if (p.rigidity_return) *ctx.log << " rigidity_return=" << flag(*p.rigidity_return);
        *ctx.log << '\n';
        ok = ok && pass;
    }
    return (ok || !strict) ? Success : ValidationFailure;
}

template <class System>
int pipeline_for(const Context& ctx, const System& sys, const std::vector<typename System::Point>& points) {
    ExtractOptions eo;
    eo.search_budget = ctx.cfg.u64("extract.search_budget", 10'000'000);
    eo.requested = ctx.cfg.u64("extract.requested", 10);
    const auto policy_name = ctx.cfg.str("extract.delta_policy", "fixed");
    DeltaPolicy policy;
    if (policy_name == "fixed") {
        const double d = ctx.cfg.real("run.delta", 0.5);
        if (!(d > 0.0)) ctx.cfg.reject("run.delta", "delta must be positive");
        policy = DeltaPolicy::fixed(d);
    } else if (policy_name == "adaptive") {
        policy = DeltaPolicy::adaptive();
    } else {
        ctx.cfg.reject("extract.delta_policy", "delta_policy must be fixed or adaptive");
    }
    auto w = extract_witnesses(sys, points, policy, eo);
    {
        auto f = ctx.open("pipeline_witnesses.txt");
        write_witness_file(f, w, ctx.cfg.u64("extract.dump_terms", 20), ctx.header());
    }
    ConstructionOptions co;
    co.classify = classify_config(ctx, 1'000'000);
    co.merge.density_floor = ctx.cfg.u64("merge.density_floor", 100);
    auto rep = chaotic_set_to_sequence(w, co.classify.horizon, co);
    return finish_construction<typename System::Pair>(ctx, rep, "pipeline", ctx.cfg.boolean("run.strict", true), true);
}

inline int cmd_pipeline(const Context& ctx) {
    if (interval_system(ctx)) return pipeline_for(ctx, interval_from(ctx), interval_points(ctx));
    auto fam = family_from(ctx);
    if (fam.points.size() < 2) ctx.cfg.reject("family.members", "pipeline needs at least two members");
    return pipeline_for(ctx, fam.system(), fam.points);
}

inline int cmd_uniform(const Context& ctx) {
    SyntheticUniformOptions so;
    so.depth = ctx.cfg.u64("uniform.depth", so.depth);
    auto sizes = ctx.cfg.u64_list("uniform.level_sizes");
    if (!sizes.empty()) so.level_sizes.assign(sizes.begin(), sizes.end());
    auto pc = ctx.cfg.u64_list("uniform.proximal_counts");
    if (!pc.empty()) so.proximal_counts.assign(pc.begin(), pc.end());
    auto rc = ctx.cfg.u64_list("uniform.rigidity_counts");
    if (!rc.empty()) so.rigidity_counts.assign(rc.begin(), rc.end());
    UniformChaoticWitness<ShiftSystem> w = [&] {
        try {
            return synthetic_uniform_witness(so);
        } catch (const InvalidArgument& e) {
            ctx.cfg.reject("uniform.depth", e.what());
        }
    }();
    ConstructionOptions co;
    co.classify = classify_config(ctx, 10200);
    co.merge.density_floor = ctx.cfg.u64("merge.density_floor", 100);
    auto rep = uniform_chaotic_to_sequence(w, co.classify.horizon, co);
    return finish_construction<ShiftPair>(ctx, rep, "uniform", ctx.cfg.boolean("run.strict", true), false);
}

inline int cmd_oracle(const Context& ctx) {
    auto fam = family_from(ctx);
    const auto grid = t_grid_from(ctx);
    const double delta = ctx.cfg.real("run.delta", 0.5);
    if (!(delta > 0.0)) ctx.cfg.reject("run.delta", "delta must be positive");
    const auto tail = ctx.cfg.rational("run.tail_fraction", Rational(1, 1000));
    const auto eps = ctx.cfg.rational("run.eps_one", Rational(1, 50));
    const std::size_t cap = ctx.horizon(1'000'000);
    auto pred = predict_block_profile(fam.alphabet_size, fam.points.size(), fam.lengths, delta, grid, tail);
    {
        auto f = ctx.open("oracle_prediction.csv");
        write_prediction_csv(f, pred, ctx.header("delta=" + dchaos::detail::format_real(delta)));
    }
    std::vector<std::size_t> boundaries;
    for (const auto& b : pred.boundaries)
        if (b.n <= cap && b.n >= 2) boundaries.push_back(b.n);
    bool ok = true;
    auto f = ctx.open("oracle.csv");
    f << "# " << ctx.header("delta=" + dchaos::detail::format_real(delta) + " cap=" + std::to_string(cap)) << '\n'
      << "pair,block,n,t,predicted,computed,brute_force,agree\n";
    if (fam.points.size() >= 2 && !boundaries.empty()) {
        const auto q = IndexSequence::naturals();
        std::vector<double> all = grid;
        auto merged = dchaos::detail::merge_grid(grid, delta);
        for (std::size_t i = 0; i < fam.points.size(); ++i)
            for (std::size_t j = i + 1; j < fam.points.size(); ++j) {
                const auto pair = fam.pair(i, j);
                ProfileOptions po;
                po.checkpoint_stride = boundaries.back();
                po.extra_checkpoints = boundaries;
                po.tail_fraction = Rational(1);
                auto pr = profile(pair, q, merged.values, boundaries.back(), po);
                for (std::size_t c = 0; c < pr.checkpoints.size(); ++c) {
                    const auto& bv = *std::find_if(pred.boundaries.begin(), pred.boundaries.end(),
                                                   [&](const BoundaryValues& b) { return b.n == pr.checkpoints[c]; });
                    for (std::size_t t = 0; t < merged.values.size(); ++t) {
                        const double tv = merged.values[t];
                        Rational predicted;
                        if (t == merged.delta_index) {
                            predicted = bv.phi_delta;
                        } else {
                            auto it = std::find(grid.begin(), grid.end(), tv);
                            predicted = bv.phi[static_cast<std::size_t>(it - grid.begin())];
                        }
                        const auto computed = pr.phi(t, c);
                        const auto brute = brute_force_phi(pair, q, tv, pr.checkpoints[c]);
                        const bool agree = predicted == computed && computed == brute;
                        ok = ok && agree;
                        f << i << '-' << j << ',' << bv.block << ',' << bv.n << ','
                          << (t == merged.delta_index && !merged.in_t_grid[t] ? std::string("delta")
                                                                                : dchaos::detail::format_real(tv))
                          << ',' << to_string(predicted) << ',' << to_string(computed) << ',' << to_string(brute)
                          << ',' << flag(agree) << '\n';
                    }
                }
            }
    }
    *ctx.log << "boundaries checked: " << boundaries.size() << "\nall agree: " << flag(ok)
             << "\nneeded eps_one: " << to_string(pred.needed_tolerance()) << " ("
             << dchaos::detail::format_real(to_double(pred.needed_tolerance())) << ")"
             << "\npredicted distributional-delta at eps_one=" << to_string(eps) << ": " << flag(pred.holds_for(eps))
             << '\n';
    return ok ? Success : ValidationFailure;
}

} // namespace detail

/// Runs one subcommand. Returns 0 on success, 1 on a validation failure or a
/// configuration error, 2 on a runtime error.
inline int run(const RunOptions& opt, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    try {
        detail::Context ctx;
        ctx.command = opt.command;
        ctx.log = &log;
        if (opt.config_path) {
            ctx.cfg = Config::load(*opt.config_path);
            ctx.base_dir = std::filesystem::path(*opt.config_path).parent_path();
        }
        if (opt.horizon) ctx.cfg.set("run.horizon", std::to_string(*opt.horizon));
        if (opt.seed) ctx.cfg.set("run.seed", std::to_string(*opt.seed));
        if (opt.checkpoint_stride) ctx.cfg.set("run.checkpoint_stride", std::to_string(*opt.checkpoint_stride));
        ctx.out_dir = opt.out_dir ? std::filesystem::path(*opt.out_dir)
                                  : std::filesystem::path(ctx.cfg.str("run.out", "."));
        if (!ctx.out_dir.is_absolute() && opt.config_path && !opt.out_dir) ctx.out_dir = ctx.base_dir / ctx.out_dir;

        if (opt.command == "density") return detail::cmd_density(ctx);
        if (opt.command == "distfn") return detail::cmd_distfn(ctx);
        if (opt.command == "classify") return detail::cmd_classify(ctx);
        if (opt.command == "merge") return detail::cmd_merge(ctx);
        if (opt.command == "pipeline") return detail::cmd_pipeline(ctx);
        if (opt.command == "uniform") return detail::cmd_uniform(ctx);
        if (opt.command == "oracle") return detail::cmd_oracle(ctx);
        err << "error: unknown command '" << opt.command << "'\n";
        return ValidationFailure;
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return ValidationFailure;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return ValidationFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return RuntimeFailure;
    }
}

} // namespace dchaos::cli
