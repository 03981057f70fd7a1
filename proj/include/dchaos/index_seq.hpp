#pragma once

// Strictly increasing sequences of positive integers, relative upper density
// and the finite-horizon membership test for the family of subsequences with
// upper density at least a.

#include <dchaos/common.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dchaos {

/// first, first + step, first + 2 step, ...
struct Progression {
    std::uint64_t first = 1;
    std::uint64_t step = 1;

    BigInt term(const BigInt& index) const { return BigInt(first) + BigInt(step) * index; }

    bool contains(const BigInt& v) const {
        if (v < first) return false;
        return ((v - first) % step) == 0;
    }

    /// Number of terms <= v.
    BigInt count_le(const BigInt& v) const {
        if (v < first) return 0;
        return (v - first) / step + 1;
    }

    bool operator==(const Progression&) const = default;
};

/// A strictly increasing sequence m_1 < m_2 < ... of positive integers.
///
/// Three backings: a finite list, a closed-form progression, or a generator
/// that extends the materialized prefix on demand. Copies share state; the
/// materialized prefix only ever grows and extension is serialized by an
/// internal mutex, so copies may be read from several threads.
///
/// Indices are 0-based (at(0) is m_1).
class IndexSequence {
public:
    using value_type = std::uint64_t;
    /// Returns the next term, or nullopt once the sequence is exhausted.
    using Generator = std::function<std::optional<std::uint64_t>()>;

    IndexSequence() : state_(std::make_shared<State>()) { state_->exhausted = true; }

    static IndexSequence from_terms(std::vector<std::uint64_t> terms) {
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (terms[i] == 0) throw InvalidArgument("sequence terms must be positive integers");
            if (i > 0 && terms[i] <= terms[i - 1])
                throw InvalidArgument("sequence is not strictly increasing at index " +
                                      std::to_string(i));
        }
        IndexSequence s;
        s.state_->terms = std::move(terms);
        return s;
    }

    static IndexSequence progression(std::uint64_t first, std::uint64_t step) {
        if (first == 0) throw InvalidArgument("progression must start at a positive integer");
        if (step == 0) throw InvalidArgument("progression step must be positive");
        IndexSequence s;
        s.state_->exhausted = false;
        s.state_->form = Progression{first, step};
        return s;
    }

    static IndexSequence naturals() { return progression(1, 1); }

    static IndexSequence generate(Generator next) {
        IndexSequence s;
        s.state_->exhausted = false;
        s.state_->next = std::move(next);
        return s;
    }

    /// k^2 for k >= 1.
    static IndexSequence squares() {
        auto k = std::make_shared<std::uint64_t>(0);
        return generate([k]() -> std::optional<std::uint64_t> {
            ++*k;
            if (*k > 4294967295ULL) return std::nullopt;
            return *k * *k;
        });
    }

    const std::optional<Progression>& progression_form() const { return state_->form; }

    /// The term at 0-based index; throws std::out_of_range past the end.
    std::uint64_t at(std::size_t index) const {
        if (const auto& f = state_->form) return progression_term(*f, index);
        std::lock_guard lock(state_->mutex);
        extend_locked(index + 1);
        if (index >= state_->terms.size())
            throw std::out_of_range("sequence has only " + std::to_string(state_->terms.size()) +
                                    " terms");
        return state_->terms[index];
    }

    /// True when at least count terms exist (materializing as needed).
    bool reaches(std::size_t count) const {
        if (state_->form) return true;
        std::lock_guard lock(state_->mutex);
        extend_locked(count);
        return state_->terms.size() >= count;
    }

    /// Copy of the first count terms; throws std::out_of_range when fewer exist.
    std::vector<std::uint64_t> take(std::size_t count) const {
        std::vector<std::uint64_t> out;
        if (const auto& f = state_->form) {
            out.reserve(count);
            for (std::size_t i = 0; i < count; ++i) out.push_back(progression_term(*f, i));
            return out;
        }
        std::lock_guard lock(state_->mutex);
        extend_locked(count);
        if (state_->terms.size() < count)
            throw std::out_of_range("sequence has only " + std::to_string(state_->terms.size()) +
                                    " terms, " + std::to_string(count) + " requested");
        out.assign(state_->terms.begin(), state_->terms.begin() + static_cast<std::ptrdiff_t>(count));
        return out;
    }

    /// Number of terms <= v.
    std::size_t count_le(std::uint64_t v) const {
        if (const auto& f = state_->form) return static_cast<std::size_t>(f->count_le(v));
        std::lock_guard lock(state_->mutex);
        extend_past_locked(v);
        return static_cast<std::size_t>(
            std::upper_bound(state_->terms.begin(), state_->terms.end(), v) - state_->terms.begin());
    }

    bool contains(std::uint64_t v) const {
        if (const auto& f = state_->form) return f->contains(v);
        std::lock_guard lock(state_->mutex);
        extend_past_locked(v);
        return std::binary_search(state_->terms.begin(), state_->terms.end(), v);
    }

    /// Index of the first term > v, or nullopt when the sequence ends first.
    std::optional<std::size_t> index_above(std::uint64_t v) const {
        std::size_t idx = count_le(v);
        if (!reaches(idx + 1)) return std::nullopt;
        return idx;
    }

    std::size_t materialized() const {
        if (state_->form) return std::numeric_limits<std::size_t>::max();
        std::lock_guard lock(state_->mutex);
        return state_->terms.size();
    }

    /// True once the generator (or the list) is known to have ended.
    bool exhausted() const {
        std::lock_guard lock(state_->mutex);
        return state_->exhausted;
    }

private:
    struct State {
        mutable std::mutex mutex;
        std::vector<std::uint64_t> terms;
        Generator next;
        bool exhausted = true;
        std::optional<Progression> form;
    };

    static std::uint64_t progression_term(const Progression& f, std::size_t index) {
        unsigned __int128 v = static_cast<unsigned __int128>(f.step) * index + f.first;
        if (v > std::numeric_limits<std::uint64_t>::max())
            throw std::out_of_range("progression term exceeds 64 bits");
        return static_cast<std::uint64_t>(v);
    }

    void pull_one_locked() const {
        auto v = state_->next();
        if (!v) {
            state_->exhausted = true;
            return;
        }
        if (*v == 0) throw InvalidArgument("generated term must be positive");
        if (!state_->terms.empty() && *v <= state_->terms.back())
            throw InvalidArgument("generated sequence is not strictly increasing: " +
                                  std::to_string(*v) + " after " +
                                  std::to_string(state_->terms.back()));
        state_->terms.push_back(*v);
    }

    void extend_locked(std::size_t count) const {
        while (state_->terms.size() < count && !state_->exhausted) pull_one_locked();
    }

    void extend_past_locked(std::uint64_t v) const {
        while (!state_->exhausted && (state_->terms.empty() || state_->terms.back() <= v))
            pull_one_locked();
    }

    std::shared_ptr<State> state_;
};

// ---------------------------------------------------------------------------
// Upper density relative to Q
// ---------------------------------------------------------------------------

struct DensityOptions {
    std::size_t checkpoint_stride = 1;
    /// First checkpoint k that enters running_sup (1 = every checkpoint).
    std::size_t window_start = 1;
    /// First index i whose term m_i counts as late recurrence; 0 = ceil(n/2).
    std::size_t recurrence_start = 0;
};

struct DensityCheckpoint {
    std::size_t k;
    std::uint64_t count;  // #(P ∩ {m_1..m_k})

    Rational value() const { return make_ratio(count, k); }
};

struct DensityEstimate {
    std::size_t horizon = 0;
    Rational value_at_horizon{0};
    /// max over checkpoints k in [window_start, horizon]
    Rational running_sup{0};
    std::size_t sup_checkpoint = 0;
    std::size_t window_start = 1;
    std::vector<DensityCheckpoint> checkpoints;
    /// P has a term among m_i, i >= recurrence_start (finite evidence that P is infinite)
    bool recurs = false;
    std::size_t recurrence_start = 0;
};

namespace detail {

inline std::size_t ceil_fraction(const Rational& f, std::size_t n) {
    auto num = static_cast<unsigned __int128>(static_cast<std::uint64_t>(f.numerator())) * n;
    auto den = static_cast<std::uint64_t>(f.denominator());
    return static_cast<std::size_t>((num + den - 1) / den);
}

inline std::size_t default_recurrence_start(std::size_t horizon) { return (horizon + 1) / 2; }

inline bool is_checkpoint(std::size_t k, std::size_t stride, std::size_t horizon) {
    return k % stride == 0 || k == horizon;
}

} // namespace detail

/// Exact #(P ∩ {m_1,…,m_k})/k at every checkpoint up to horizon.
inline DensityEstimate upper_density(const IndexSequence& p, const IndexSequence& q, std::size_t horizon,
                                     const DensityOptions& options = {}) {
    if (horizon == 0) throw InvalidArgument("upper_density: horizon must be positive");
    if (options.checkpoint_stride == 0)
        throw InvalidArgument("upper_density: checkpoint stride must be positive");
    if (!q.reaches(horizon))
        throw InvalidArgument("upper_density: Q has fewer than " + std::to_string(horizon) + " terms");

    DensityEstimate est;
    est.horizon = horizon;
    est.window_start = std::max<std::size_t>(1, std::min(options.window_start, horizon));
    est.recurrence_start =
        options.recurrence_start ? options.recurrence_start : detail::default_recurrence_start(horizon);

    const auto qs = q.take(horizon);
    std::uint64_t count = 0;
    std::size_t p_index = 0;
    std::optional<std::uint64_t> p_next;
    const auto& form = p.progression_form();
    auto advance_p = [&](std::uint64_t target) {
        // move p_next to the first P term >= target
        while (true) {
            if (!p_next) {
                if (!p.reaches(p_index + 1)) return;
                p_next = p.at(p_index);
            }
            if (*p_next >= target) return;
            ++p_index;
            p_next.reset();
        }
    };

    bool have_sup = false;
    std::uint64_t sup_count = 0;
    std::size_t sup_k = 0;
    for (std::size_t i = 0; i < horizon; ++i) {
        const std::uint64_t m = qs[i];
        bool hit;
        if (form) {
            hit = form->contains(m);
        } else {
            advance_p(m);
            hit = p_next && *p_next == m;
        }
        if (hit) {
            ++count;
            if (i + 1 >= est.recurrence_start) est.recurs = true;
        }
        const std::size_t k = i + 1;
        if (detail::is_checkpoint(k, options.checkpoint_stride, horizon)) {
            est.checkpoints.push_back({k, count});
            if (k >= est.window_start && (!have_sup || ratio_less(sup_count, sup_k, count, k))) {
                have_sup = true;
                sup_count = count;
                sup_k = k;
            }
        }
    }
    est.value_at_horizon = make_ratio(count, horizon);
    est.running_sup = make_ratio(sup_count, sup_k);
    est.sup_checkpoint = sup_k;
    return est;
}

struct DensityMembership {
    bool member = false;
    /// Finite evidence for "P is infinite": P recurs late in the horizon.
    bool infinite_proxy = false;
    DensityEstimate estimate;

    explicit operator bool() const { return member; }
};

/// Finite-horizon membership of P in the family of infinite subsequences of Q
/// with upper density >= a.
inline DensityMembership in_density_class(const IndexSequence& p, const IndexSequence& q, const Rational& a,
                                          std::size_t horizon, const DensityOptions& options = {}) {
    if (a < Rational(0) || a > Rational(1))
        throw InvalidArgument("in_density_class: a must lie in [0,1], got " + to_string(a));
    DensityMembership out;
    out.estimate = upper_density(p, q, horizon, options);
    out.infinite_proxy = out.estimate.recurs;
    out.member = out.infinite_proxy && out.estimate.running_sup >= a;
    return out;
}

// ---------------------------------------------------------------------------
// Sequence files: one positive integer per line, '#' starts a comment line.
// ---------------------------------------------------------------------------

inline IndexSequence parse_sequence_text(std::istream& in, const std::string& source) {
    std::vector<std::uint64_t> terms;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (line[b] == '#') continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string_view tok(line.data() + b, e - b + 1);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw ParseError(source, lineno, "expected a positive integer, got '" + std::string(tok) + "'");
        if (v == 0) throw ParseError(source, lineno, "terms must be positive");
        if (!terms.empty() && v <= terms.back())
            throw ParseError(source, lineno,
                             "sequence is not strictly increasing (" + std::to_string(v) + " after " +
                                 std::to_string(terms.back()) + ")");
        terms.push_back(v);
    }
    return IndexSequence::from_terms(std::move(terms));
}

inline IndexSequence read_sequence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open sequence file");
    return parse_sequence_text(in, path);
}

inline void write_sequence(std::ostream& out, const std::vector<std::uint64_t>& terms,
                           const std::string& comment = {}) {
    if (!comment.empty()) out << "# " << comment << '\n';
    for (auto t : terms) out << t << '\n';
}

} // namespace dchaos
