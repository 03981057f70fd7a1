#pragma once

// Full shift over {0,…,m-1} with d(x,y) = 2^-min{i : x_i != y_i}.
//
// Points are eventually constant run-length words. A pair is stored by its
// disagreement set, so d(σ^n x, σ^n y) = 2^-(g-n) with g the first disagreement
// at or after n.

#include <dchaos/distance.hpp>
#include <dchaos/index_seq.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dchaos {

struct Run {
    std::uint64_t start;
    std::uint32_t symbol;

    bool operator==(const Run&) const = default;
};

/// One-sided sequence given as runs; the last run extends forever.
class ShiftPoint {
public:
    ShiftPoint() : runs_{{0, 0}} {}

    explicit ShiftPoint(std::vector<Run> runs) : runs_(std::move(runs)) {
        if (runs_.empty() || runs_.front().start != 0) throw InvalidArgument("shift point must start at position 0");
        std::vector<Run> merged;
        for (std::size_t i = 0; i < runs_.size(); ++i) {
            if (i > 0 && runs_[i].start <= runs_[i - 1].start)
                throw InvalidArgument("shift point runs must have increasing starts");
            if (!merged.empty() && merged.back().symbol == runs_[i].symbol) continue;
            merged.push_back(runs_[i]);
        }
        runs_ = std::move(merged);
    }

    /// Finite word followed by symbol `tail` forever.
    static ShiftPoint from_word(const std::vector<std::uint32_t>& word, std::uint32_t tail) {
        std::vector<Run> runs;
        for (std::size_t i = 0; i < word.size(); ++i) runs.push_back({i, word[i]});
        runs.push_back({word.size(), tail});
        return ShiftPoint(std::move(runs));
    }

    const std::vector<Run>& runs() const { return runs_; }

    std::uint32_t symbol_at(std::uint64_t n) const {
        auto it = std::upper_bound(runs_.begin(), runs_.end(), n,
                                   [](std::uint64_t v, const Run& r) { return v < r.start; });
        return std::prev(it)->symbol;
    }

    std::uint32_t max_symbol() const {
        std::uint32_t m = 0;
        for (const auto& r : runs_) m = std::max(m, r.symbol);
        return m;
    }

    std::vector<std::uint32_t> word(std::uint64_t length) const {
        std::vector<std::uint32_t> out;
        out.reserve(length);
        std::size_t r = 0;
        for (std::uint64_t i = 0; i < length; ++i) {
            while (r + 1 < runs_.size() && runs_[r + 1].start <= i) ++r;
            out.push_back(runs_[r].symbol);
        }
        return out;
    }

    /// First i >= 0 with a_{sa+i} != b_{sb+i}.
    static std::optional<std::uint64_t> first_difference(const ShiftPoint& a, std::uint64_t sa,
                                                         const ShiftPoint& b, std::uint64_t sb) {
        std::size_t ia = a.run_index(sa), ib = b.run_index(sb);
        std::uint64_t i = 0;
        while (true) {
            if (a.runs_[ia].symbol != b.runs_[ib].symbol) return i;
            const bool a_last = ia + 1 == a.runs_.size();
            const bool b_last = ib + 1 == b.runs_.size();
            if (a_last && b_last) return std::nullopt;
            // advance to the nearer run boundary
            std::uint64_t na = a_last ? UINT64_MAX : a.runs_[ia + 1].start - sa;
            std::uint64_t nb = b_last ? UINT64_MAX : b.runs_[ib + 1].start - sb;
            i = std::min(na, nb);
            if (na == i) ++ia;
            if (nb == i) ++ib;
        }
    }

    /// d(σ^r x, x)
    DyadicDistance self_distance(std::uint64_t r) const {
        auto i = first_difference(*this, r, *this, 0);
        return i ? DyadicDistance::pow2(*i) : DyadicDistance::zero();
    }

    bool operator==(const ShiftPoint&) const = default;

private:
    std::size_t run_index(std::uint64_t n) const {
        auto it = std::upper_bound(runs_.begin(), runs_.end(), n,
                                   [](std::uint64_t v, const Run& r) { return v < r.start; });
        return static_cast<std::size_t>(std::prev(it) - runs_.begin());
    }

    std::vector<Run> runs_;
};

/// Half-open position interval [a, b).
struct Block {
    std::uint64_t a;
    std::uint64_t b;

    bool operator==(const Block&) const = default;
};

/// Beyond `offset`, the blocks inside [offset, offset + period) repeat with that period.
struct Periodicity {
    std::uint64_t period;
    std::uint64_t offset;

    bool operator==(const Periodicity&) const = default;
};

/// A pair of points in the full shift, stored as its disagreement set.
class ShiftPair {
public:
    ShiftPair() = default;

    ShiftPair(std::uint32_t alphabet_size, std::vector<Block> blocks,
              std::optional<Periodicity> periodicity = std::nullopt)
        : alphabet_size_(alphabet_size), periodicity_(periodicity) {
        if (alphabet_size < 2) throw InvalidArgument("alphabet_size must be at least 2");
        std::sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) { return x.a < y.a; });
        for (const auto& blk : blocks) {
            if (blk.b <= blk.a) throw InvalidArgument("empty or reversed disagreement block");
            if (!blocks_.empty() && blk.a < blocks_.back().b)
                throw InvalidArgument("disagreement blocks overlap");
            if (!blocks_.empty() && blk.a == blocks_.back().b)
                blocks_.back().b = blk.b;
            else
                blocks_.push_back(blk);
        }
        if (periodicity_) {
            if (periodicity_->period == 0) throw InvalidArgument("period must be positive");
            const std::uint64_t end = periodicity_->offset + periodicity_->period;
            if (!blocks_.empty() && blocks_.back().b > end)
                throw InvalidArgument("blocks extend past offset + period of a periodic pair");
            for (const auto& blk : blocks_)
                if (blk.a < periodicity_->offset && blk.b > periodicity_->offset) {
                    // split at the offset so the pattern lies wholly inside one period
                    split_at(periodicity_->offset);
                    break;
                }
            for (const auto& blk : blocks_)
                if (blk.b > periodicity_->offset) pattern_.push_back(blk);
        }
    }

    static ShiftPair between(const ShiftPoint& x, const ShiftPoint& y, std::uint32_t alphabet_size) {
        if (x.max_symbol() >= alphabet_size || y.max_symbol() >= alphabet_size)
            throw InvalidArgument("point uses a symbol outside the alphabet");
        std::vector<std::uint64_t> cuts;
        for (const auto& r : x.runs()) cuts.push_back(r.start);
        for (const auto& r : y.runs()) cuts.push_back(r.start);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<Block> blocks;
        std::optional<Periodicity> per;
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            const bool last = i + 1 == cuts.size();
            if (x.symbol_at(cuts[i]) == y.symbol_at(cuts[i])) continue;
            const std::uint64_t end = last ? cuts[i] + 1 : cuts[i + 1];
            blocks.push_back({cuts[i], end});
            if (last) per = Periodicity{1, cuts[i]};
        }
        return ShiftPair(alphabet_size, std::move(blocks), per);
    }

    std::uint32_t alphabet_size() const { return alphabet_size_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::optional<Periodicity>& periodicity() const { return periodicity_; }

    bool is_diagonal() const { return blocks_.empty(); }

    /// Smallest g >= n where the points differ.
    std::optional<std::uint64_t> next_disagreement(std::uint64_t n) const {
        auto it = std::upper_bound(blocks_.begin(), blocks_.end(), n,
                                   [](std::uint64_t v, const Block& b) { return v < b.b; });
        if (it != blocks_.end()) return std::max(it->a, n);
        if (!periodicity_ || pattern_.empty()) return std::nullopt;
        const auto [T, o] = *periodicity_;
        const std::uint64_t phase = o + (n - o) % T;
        const std::uint64_t base = n - phase;
        auto jt = std::upper_bound(pattern_.begin(), pattern_.end(), phase,
                                   [](std::uint64_t v, const Block& b) { return v < b.b; });
        if (jt != pattern_.end()) return base + std::max(jt->a, phase);
        return base + T + pattern_.front().a;
    }

    bool disagrees_at(std::uint64_t n) const {
        auto g = next_disagreement(n);
        return g && *g == n;
    }

    DyadicDistance distance_at(std::uint64_t n) const {
        auto g = next_disagreement(n);
        return g ? DyadicDistance::pow2(*g - n) : DyadicDistance::zero();
    }

    std::vector<DyadicDistance> distances(std::uint64_t first, std::size_t count) const {
        std::vector<DyadicDistance> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) out.push_back(distance_at(first + i));
        return out;
    }

    /// Disagreement intervals clipped to [lo, hi).
    std::vector<Block> intervals_in(std::uint64_t lo, std::uint64_t hi) const {
        std::vector<Block> out;
        std::uint64_t n = lo;
        while (n < hi) {
            auto g = next_disagreement(n);
            if (!g || *g >= hi) break;
            std::uint64_t e = run_end(*g);
            out.push_back({*g, std::min(e, hi)});
            n = e;
        }
        return out;
    }

    /// The pair (σ^s x, σ^s y).
    ShiftPair shifted(std::uint64_t s) const {
        if (!periodicity_) {
            std::vector<Block> out;
            for (const auto& blk : blocks_)
                if (blk.b > s) out.push_back({std::max(blk.a, s) - s, blk.b - s});
            return ShiftPair(alphabet_size_, std::move(out));
        }
        const auto [T, o] = *periodicity_;
        std::uint64_t o2 = o;
        if (s > o) o2 = o + ((s - o + T - 1) / T) * T;
        std::vector<Block> out;
        for (const auto& blk : intervals_in(s, o2 + T)) out.push_back({blk.a - s, blk.b - s});
        return ShiftPair(alphabet_size_, std::move(out), Periodicity{T, o2 - s});
    }

    bool operator==(const ShiftPair& other) const {
        return alphabet_size_ == other.alphabet_size_ && blocks_ == other.blocks_ &&
               periodicity_ == other.periodicity_;
    }

    // ---- text form -------------------------------------------------------------
    //   alphabet_size = 3
    //   blocks = 5..10, 20..30
    //   period = 10
    //   period_offset = 20

    std::string to_text() const {
        std::ostringstream os;
        os << "alphabet_size = " << alphabet_size_ << '\n' << "blocks = ";
        for (std::size_t i = 0; i < blocks_.size(); ++i) os << (i ? ", " : "") << blocks_[i].a << ".." << blocks_[i].b;
        os << '\n';
        if (periodicity_) os << "period = " << periodicity_->period << '\n' << "period_offset = " << periodicity_->offset << '\n';
        return os.str();
    }

    static ShiftPair parse(std::istream& in, const std::string& source) {
        std::map<std::string, std::pair<std::string, std::size_t>> kv;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
            auto key = trim(line.substr(0, eq));
            if (key != "alphabet_size" && key != "blocks" && key != "period" && key != "period_offset")
                throw ParseError(source, lineno, "unknown key '" + key + "'");
            kv[key] = {trim(line.substr(eq + 1)), lineno};
        }
        auto number = [&](const std::string& key) -> std::optional<std::uint64_t> {
            auto it = kv.find(key);
            if (it == kv.end()) return std::nullopt;
            return parse_u64(it->second.first, source, it->second.second);
        };
        auto m = number("alphabet_size");
        if (!m) throw ParseError(source, 0, "missing alphabet_size");
        std::vector<Block> blocks;
        if (auto it = kv.find("blocks"); it != kv.end()) {
            std::stringstream ss(it->second.first);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                auto dots = item.find("..");
                if (dots == std::string::npos)
                    throw ParseError(source, it->second.second, "block '" + item + "' is not of the form a..b");
                blocks.push_back({parse_u64(trim(item.substr(0, dots)), source, it->second.second),
                                  parse_u64(trim(item.substr(dots + 2)), source, it->second.second)});
            }
        }
        std::optional<Periodicity> per;
        if (auto t = number("period")) per = Periodicity{*t, number("period_offset").value_or(0)};
        try {
            return ShiftPair(static_cast<std::uint32_t>(*m), std::move(blocks), per);
        } catch (const InvalidArgument& e) {
            throw ParseError(source, 0, e.what());
        }
    }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::uint64_t parse_u64(const std::string& s, const std::string& source, std::size_t line) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ParseError(source, line, "expected a nonnegative integer, got '" + s + "'");
        return v;
    }

    void split_at(std::uint64_t pos) {
        std::vector<Block> out;
        for (const auto& blk : blocks_) {
            if (blk.a < pos && blk.b > pos) {
                out.push_back({blk.a, pos});
                out.push_back({pos, blk.b});
            } else {
                out.push_back(blk);
            }
        }
        blocks_ = std::move(out);
    }

    /// End of the maximal disagreement run containing g.
    std::uint64_t run_end(std::uint64_t g) const {
        std::uint64_t e = g;
        while (true) {
            auto it = std::upper_bound(blocks_.begin(), blocks_.end(), e,
                                       [](std::uint64_t v, const Block& b) { return v < b.b; });
            if (it != blocks_.end() && it->a <= e) {
                e = it->b;
                continue;
            }
            if (it == blocks_.end() && periodicity_ && !pattern_.empty()) {
                auto nd = next_disagreement(e);
                if (nd && *nd == e) {
                    const auto [T, o] = *periodicity_;
                    if (pattern_.size() == 1 && pattern_.front().a == o && pattern_.front().b == o + T) return UINT64_MAX;
                    const std::uint64_t phase = o + (e - o) % T;
                    auto jt = std::upper_bound(pattern_.begin(), pattern_.end(), phase,
                                               [](std::uint64_t v, const Block& b) { return v < b.b; });
                    e = e - phase + jt->b;
                    continue;
                }
            }
            return e;
        }
    }

    std::uint32_t alphabet_size_ = 2;
    std::vector<Block> blocks_;
    std::optional<Periodicity> periodicity_;
    std::vector<Block> pattern_;
};

/// The full shift on m symbols.
class ShiftSystem {
public:
    using Point = ShiftPoint;
    using Pair = ShiftPair;
    using Distance = DyadicDistance;

    explicit ShiftSystem(std::uint32_t alphabet_size) : alphabet_size_(alphabet_size) {
        if (alphabet_size < 2) throw InvalidArgument("alphabet_size must be at least 2");
    }

    std::uint32_t alphabet_size() const { return alphabet_size_; }

    ShiftPair pair(const ShiftPoint& x, const ShiftPoint& y) const { return ShiftPair::between(x, y, alphabet_size_); }

    DyadicDistance self_distance(const ShiftPoint& x, std::uint64_t r) const { return x.self_distance(r); }

    /// d(σ^n x, σ^n y) for n < limit never needs more than the exact pair representation.
    static constexpr bool exact = true;

private:
    std::uint32_t alphabet_size_;
};

// ---------------------------------------------------------------------------
// Block families
// ---------------------------------------------------------------------------

/// L_k = base^k for k = 1..count.
inline std::vector<std::uint64_t> geometric_lengths(std::uint64_t base, std::size_t count) {
    if (base < 2) throw InvalidArgument("block length base must be at least 2");
    std::vector<std::uint64_t> out;
    unsigned __int128 v = 1;
    for (std::size_t k = 0; k < count; ++k) {
        v *= base;
        if (v > (static_cast<unsigned __int128>(1) << 62)) throw InvalidArgument("block lengths overflow");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

struct BlockFamily {
    std::uint32_t alphabet_size = 2;
    std::vector<std::uint64_t> lengths;
    std::vector<ShiftPoint> points;

    /// Block k (1-based) occupies [boundary(k-1), boundary(k)); boundary(0) = 1.
    std::uint64_t boundary(std::size_t k) const {
        std::uint64_t s = 1;
        for (std::size_t i = 0; i < k && i < lengths.size(); ++i) s += lengths[i];
        return s;
    }

    /// Last position of block k, i.e. 1 + L_1 + … + L_k - 1 = L_1 + … + L_k.
    std::uint64_t block_end(std::size_t k) const { return boundary(k) - 1; }

    ShiftSystem system() const { return ShiftSystem(alphabet_size); }

    ShiftPair pair(std::size_t i, std::size_t j) const { return ShiftPair::between(points.at(i), points.at(j), alphabet_size); }
};

/// p points over {0,…,m-1}: position 0 and odd-indexed blocks hold 0 in every
/// point, even-indexed blocks hold q in point q, and 0 follows the last block.
/// Two distinct points disagree exactly on the even-indexed blocks.
inline BlockFamily make_block_family(std::uint32_t alphabet_size, const std::vector<std::uint64_t>& lengths,
                                     std::size_t member_count) {
    if (alphabet_size < 2) throw InvalidArgument("alphabet_size must be at least 2");
    if (member_count > alphabet_size)
        throw InvalidArgument("member_count " + std::to_string(member_count) + " exceeds alphabet size " +
                              std::to_string(alphabet_size));
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        if (lengths[k] == 0) throw InvalidArgument("block lengths must be positive");
        if (k > 0 && lengths[k] < lengths[k - 1]) throw InvalidArgument("block lengths must not decrease");
    }
    BlockFamily fam;
    fam.alphabet_size = alphabet_size;
    fam.lengths = lengths;
    for (std::size_t q = 0; q < member_count; ++q) {
        std::vector<Run> runs{{0, 0}};
        std::uint64_t pos = 1;
        for (std::size_t k = 0; k < lengths.size(); ++k) {
            const bool even_block = (k + 1) % 2 == 0;
            runs.push_back({pos, even_block ? static_cast<std::uint32_t>(q) : 0u});
            pos += lengths[k];
        }
        runs.push_back({pos, 0});
        fam.points.emplace_back(std::move(runs));
    }
    return fam;
}

} // namespace dchaos
