#pragma once

// Staged round-robin merge producing Q with d̄(S_i ∩ Q | Q) = 1 for every
// member S_i of a (finite or diagonally enrolled countable) family.
//
// Stage j serves one member i: consecutive terms of S_i above max(Q) are
// appended until #(S_i ∩ Q)/|Q| >= 1 - 1/D_j, where D_j = max(j, density_floor).
// Member j is enrolled at stage j, and stage j serves member (j-1) mod enrolled.

#include <dchaos/index_seq.hpp>

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace dchaos {

struct MergeOptions {
    /// D0 in D_j = max(j, D0). 1 gives the plain 1 - 1/j schedule.
    std::uint64_t density_floor = 100;
};

struct MergeStage {
    std::uint64_t stage = 0;
    std::size_t member = 0;
    /// 0-based index into the member of the first appended term
    BigInt first_index;
    BigInt length;
    /// |Q| when the stage ends
    BigInt end_q;
    /// #(S_member ∩ Q) when the stage ends
    BigInt member_hits;
    std::size_t enrolled = 0;
    std::uint64_t target_denominator = 0;  // D_j

    /// member_hits / end_q >= 1 - 1/D_j, exact
    bool meets_target() const {
        BigInt d(target_denominator);
        return member_hits * d >= (d - 1) * end_q;
    }
};

namespace detail {

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

/// #{x in [lo, hi] : x ≡ r (mod m)}
inline BigInt count_congruent(const BigInt& lo, const BigInt& hi, const BigInt& r, const BigInt& m) {
    if (hi < lo) return 0;
    return floor_div(hi - r, m) - floor_div(lo - 1 - r, m);
}

/// Solves x ≡ a1 (mod n1), x ≡ a2 (mod n2); returns (r, lcm) or nullopt if incompatible.
inline std::optional<std::pair<BigInt, BigInt>> crt(BigInt a1, BigInt n1, BigInt a2, BigInt n2) {
    // extended Euclid on n1, n2
    BigInt old_r = n1, r = n2, old_s = 1, s = 0;
    while (r != 0) {
        BigInt q = old_r / r;
        BigInt t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    const BigInt g = old_r;
    BigInt diff = a2 - a1;
    if (diff % g != 0) return std::nullopt;
    const BigInt lcm = n1 / g * n2;
    BigInt k = (diff / g) * old_s % (n2 / g);
    BigInt x = (a1 + n1 * k) % lcm;
    if (x < 0) x += lcm;
    return std::make_pair(x, lcm);
}

} // namespace detail

/// Shared state behind a merged Q. Copies of the resulting IndexSequence and the
/// MergeResult all refer to one engine.
class MergeEngine {
public:
    using Enroller = std::function<std::optional<IndexSequence>(std::size_t)>;

    MergeEngine(Enroller enroll, MergeOptions options, bool symbolic)
        : enroll_(std::move(enroll)), options_(options), symbolic_(symbolic) {
        if (options_.density_floor == 0) throw InvalidArgument("merge: density_floor must be positive");
    }

    bool symbolic() const { return symbolic_; }
    const MergeOptions& options() const { return options_; }

    /// Stage records planned so far (in generic mode: stages already started).
    std::vector<MergeStage> stages() const {
        std::lock_guard lock(mutex_);
        return stages_;
    }

    /// Symbolic mode only: plans stages up to and including the given stage.
    void plan_through(std::uint64_t stage) {
        std::lock_guard lock(mutex_);
        if (!symbolic_) throw InvalidArgument("merge: symbolic planning needs progression members");
        while (stages_.size() < stage) plan_symbolic_locked();
    }

    std::size_t enrolled() const {
        std::lock_guard lock(mutex_);
        return members_.size();
    }

    IndexSequence member(std::size_t i) const {
        std::lock_guard lock(mutex_);
        return members_.at(i);
    }

    /// Next term of Q, or nullopt when the family is empty.
    std::optional<std::uint64_t> next() {
        std::lock_guard lock(mutex_);
        while (true) {
            if (emit_stage_ < stages_.size() && emit_offset_ < stages_[emit_stage_].length) {
                const auto& st = stages_[emit_stage_];
                const auto& seq = members_[st.member];
                BigInt idx = st.first_index + emit_offset_;
                std::uint64_t v;
                try {
                    v = seq.at(idx.convert_to<std::size_t>());
                } catch (const std::out_of_range&) {
                    throw ConstructionStalled(st.member, st.stage, last_);
                }
                if (emitted_ > 0 && v <= last_) throw ConstructionStalled(st.member, st.stage, last_);
                ++emit_offset_;
                ++emitted_;
                last_ = v;
                if (!symbolic_) record_generic_locked(v);
                return v;
            }
            if (emit_stage_ < stages_.size()) {
                ++emit_stage_;
                emit_offset_ = 0;
                continue;
            }
            if (symbolic_) {
                plan_symbolic_locked();
            } else if (!plan_generic_locked()) {
                return std::nullopt;
            }
        }
    }

private:
    std::uint64_t target_for(std::uint64_t stage) const { return std::max(stage, options_.density_floor); }

    bool enroll_locked(std::uint64_t stage) {
        if (exhausted_family_) return false;
        auto s = enroll_(static_cast<std::size_t>(stage - 1));
        if (!s) {
            exhausted_family_ = true;
            return false;
        }
        members_.push_back(*s);
        return true;
    }

    // ---- generic mode: counts follow emission --------------------------------

    bool plan_generic_locked() {
        const std::uint64_t stage = stages_.size() + 1;
        bool added = enroll_locked(stage);
        if (members_.empty()) return false;
        if (added) {
            // count existing Q terms in the new member
            BigInt c = 0;
            for (auto v : emitted_terms_)
                if (members_.back().contains(v)) ++c;
            counts_.push_back(c);
        }
        const std::size_t i = static_cast<std::size_t>((stage - 1) % members_.size());
        const BigInt q(emitted_);
        const BigInt d(target_for(stage));
        BigInt len = (d - 1) * q - d * counts_[i];
        if (len < 1) len = 1;
        auto start = emitted_ ? members_[i].index_above(last_) : std::optional<std::size_t>(0);
        if (!start || !members_[i].reaches(*start + 1)) throw ConstructionStalled(i, stage, last_);
        MergeStage st;
        st.stage = stage;
        st.member = i;
        st.first_index = *start;
        st.length = len;
        st.end_q = q + len;
        st.member_hits = counts_[i] + len;
        st.enrolled = members_.size();
        st.target_denominator = target_for(stage);
        stages_.push_back(std::move(st));
        return true;
    }

    void record_generic_locked(std::uint64_t v) {
        emitted_terms_.push_back(v);
        for (std::size_t k = 0; k < members_.size(); ++k)
            if (members_[k].contains(v)) ++counts_[k];
    }

    // ---- symbolic mode: closed-form overlap counts ---------------------------

    struct Segment {
        std::size_t member;
        BigInt first_index;
        BigInt length;
    };

    /// #(AP_k ∩ segment of AP_i)
    BigInt overlap_locked(std::size_t k, const Segment& seg) const {
        if (k == seg.member) return seg.length;
        const auto& fi = *members_[seg.member].progression_form();
        const auto& fk = *members_[k].progression_form();
        BigInt lo = fi.term(seg.first_index);
        BigInt hi = fi.term(seg.first_index + seg.length - 1);
        if (lo < fk.first) lo = fk.first;
        auto sol = detail::crt(BigInt(fi.first), BigInt(fi.step), BigInt(fk.first), BigInt(fk.step));
        if (!sol) return 0;
        return detail::count_congruent(lo, hi, sol->first, sol->second);
    }

    void plan_symbolic_locked() {
        const std::uint64_t stage = stages_.size() + 1;
        if (enroll_locked(stage)) {
            if (!members_.back().progression_form())
                throw InvalidArgument("merge: symbolic planning needs progression members");
            BigInt c = 0;
            for (const auto& seg : segments_) c += overlap_locked(members_.size() - 1, seg);
            counts_.push_back(c);
        }
        if (members_.empty()) throw InvalidArgument("merge: family is empty");
        const std::size_t i = static_cast<std::size_t>((stage - 1) % members_.size());
        const auto& f = *members_[i].progression_form();
        const BigInt d(target_for(stage));
        BigInt len = (d - 1) * q_ - d * counts_[i];
        if (len < 1) len = 1;
        BigInt start = 0;
        if (q_ > 0) start = f.count_le(max_q_);
        Segment seg{i, start, len};
        for (std::size_t k = 0; k < members_.size(); ++k) counts_[k] += overlap_locked(k, seg);
        q_ += len;
        max_q_ = f.term(start + len - 1);
        segments_.push_back(seg);
        MergeStage st;
        st.stage = stage;
        st.member = i;
        st.first_index = start;
        st.length = len;
        st.end_q = q_;
        st.member_hits = counts_[i];
        st.enrolled = members_.size();
        st.target_denominator = target_for(stage);
        stages_.push_back(std::move(st));
    }

    mutable std::mutex mutex_;
    Enroller enroll_;
    MergeOptions options_;
    bool symbolic_;
    bool exhausted_family_ = false;
    std::vector<IndexSequence> members_;
    std::vector<BigInt> counts_;
    std::vector<MergeStage> stages_;

    // emission cursor
    std::size_t emit_stage_ = 0;
    BigInt emit_offset_ = 0;
    std::uint64_t emitted_ = 0;
    std::uint64_t last_ = 0;
    std::vector<std::uint64_t> emitted_terms_;

    // symbolic planner state
    std::vector<Segment> segments_;
    BigInt q_ = 0;
    BigInt max_q_ = 0;
};

struct MergeResult {
    IndexSequence q;
    std::shared_ptr<MergeEngine> engine;

    std::vector<MergeStage> stages() const { return engine->stages(); }
};

namespace detail {

inline MergeResult make_merge(std::shared_ptr<MergeEngine> engine, std::size_t target_horizon) {
    auto q = IndexSequence::generate([engine]() { return engine->next(); });
    if (!q.reaches(target_horizon) && q.materialized() == 0)
        throw InvalidArgument("merge: family is empty");
    return MergeResult{q, engine};
}

} // namespace detail

/// Merges a finite family. Q is materialized to target_horizon and extends lazily
/// beyond it. When every member is a closed-form progression, stage bookkeeping
/// is symbolic and engine->plan_through() can look arbitrarily far ahead.
inline MergeResult merge_density_one(const std::vector<IndexSequence>& family, std::size_t target_horizon,
                                     const MergeOptions& options = {}) {
    if (family.empty()) throw InvalidArgument("merge: family is empty");
    if (target_horizon == 0) throw InvalidArgument("merge: target_horizon must be positive");
    bool symbolic = std::all_of(family.begin(), family.end(),
                                [](const IndexSequence& s) { return s.progression_form().has_value(); });
    auto members = family;
    auto engine = std::make_shared<MergeEngine>(
        [members](std::size_t j) -> std::optional<IndexSequence> {
            if (j < members.size()) return members[j];
            return std::nullopt;
        },
        options, symbolic);
    return detail::make_merge(engine, target_horizon);
}

/// Countable family: enroll(j) returns member j (0-based) or nullopt when the family ends.
inline MergeResult merge_density_one(MergeEngine::Enroller enroll, std::size_t target_horizon,
                                     const MergeOptions& options = {}) {
    if (target_horizon == 0) throw InvalidArgument("merge: target_horizon must be positive");
    auto engine = std::make_shared<MergeEngine>(std::move(enroll), options, false);
    return detail::make_merge(engine, target_horizon);
}

} // namespace dchaos
