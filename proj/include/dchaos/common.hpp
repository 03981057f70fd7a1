#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dchaos {

/// Exact rational used for every density and distribution value.
using Rational = boost::rational<std::int64_t>;

/// Unbounded integer for stage bookkeeping that outgrows 64 bits.
using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A time index beyond the configured iteration budget was requested.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(std::uint64_t requested, std::uint64_t budget)
        : Error("time index " + std::to_string(requested) + " exceeds iteration budget " +
                std::to_string(budget)),
          requested_(requested), budget_(budget) {}

    std::uint64_t requested() const noexcept { return requested_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t requested_;
    std::uint64_t budget_;
};

/// Witness extraction ran out of search budget for one clause of one pair.
class BudgetExhausted : public Error {
public:
    BudgetExhausted(std::size_t first, std::size_t second, std::string clause, std::size_t found,
                    std::size_t wanted)
        : Error("pair (" + std::to_string(first) + "," + std::to_string(second) + "): " + clause +
                " clause found " + std::to_string(found) + " of " + std::to_string(wanted) +
                " witnesses within the search budget"),
          first_(first), second_(second), clause_(std::move(clause)) {}

    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }
    const std::string& clause() const noexcept { return clause_; }

private:
    std::size_t first_;
    std::size_t second_;
    std::string clause_;
};

/// The density-one merge needs a term from a member that has none left.
class ConstructionStalled : public Error {
public:
    ConstructionStalled(std::size_t member, std::uint64_t stage, std::uint64_t after)
        : Error("merge stalled at stage " + std::to_string(stage) + ": member " +
                std::to_string(member) + " has no term beyond " + std::to_string(after)),
          member_(member), stage_(stage) {}

    std::size_t member() const noexcept { return member_; }
    std::uint64_t stage() const noexcept { return stage_; }

private:
    std::size_t member_;
    std::uint64_t stage_;
};

/// A claimed proximal or rigidity time does not verify.
class WitnessInvalid : public Error {
public:
    WitnessInvalid(std::size_t level, std::uint64_t time, double measured, std::string what)
        : Error("witness invalid at level " + std::to_string(level) + ", time " +
                std::to_string(time) + ": " + what + " (measured distance " +
                format_double(measured) + ")"),
          level_(level), time_(time), measured_(measured) {}

    std::size_t level() const noexcept { return level_; }
    std::uint64_t time() const noexcept { return time_; }
    double measured() const noexcept { return measured_; }

private:
    static std::string format_double(double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    }

    std::size_t level_;
    std::uint64_t time_;
    double measured_;
};

/// Text input that does not parse; line is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& message)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
          source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

/// a/b < c/d for nonnegative integers with positive denominators.
inline bool ratio_less(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return static_cast<unsigned __int128>(a) * d < static_cast<unsigned __int128>(c) * b;
}

/// count/k >= r, exact.
inline bool ratio_at_least(std::uint64_t count, std::uint64_t k, const Rational& r) {
    if (r.numerator() <= 0) return true;
    return static_cast<unsigned __int128>(count) * static_cast<std::uint64_t>(r.denominator()) >=
           static_cast<unsigned __int128>(static_cast<std::uint64_t>(r.numerator())) * k;
}

/// count/k <= r, exact.
inline bool ratio_at_most(std::uint64_t count, std::uint64_t k, const Rational& r) {
    if (r.numerator() < 0) return false;
    return static_cast<unsigned __int128>(count) * static_cast<std::uint64_t>(r.denominator()) <=
           static_cast<unsigned __int128>(static_cast<std::uint64_t>(r.numerator())) * k;
}

inline Rational make_ratio(std::uint64_t count, std::uint64_t k) {
    return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(k));
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "p/q", an integer, or a plain decimal ("0.02") into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { throw InvalidArgument("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) fail();
    auto parse_int = [&](std::string_view s) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) fail();
        return v;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto den = parse_int(text.substr(slash + 1));
        if (den == 0) fail();
        return Rational(parse_int(text.substr(0, slash)), den);
    }
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) fail();
    if (frac.size() > 17) fail();
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    Rational r = Rational(w) + Rational(f, den);
    return negative ? -r : r;
}

} // namespace dchaos
