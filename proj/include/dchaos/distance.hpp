#pragma once

// Distance values and exact threshold comparisons.
//
// Shift distances are dyadic (2^-e or 0) and are compared against thresholds
// without rounding. Interval-map distances are plain doubles.

#include <dchaos/common.hpp>

#include <cmath>
#include <compare>
#include <limits>
#include <optional>
#include <string>

namespace dchaos {

/// 2^-exponent, or exactly 0 when exponent is empty.
struct DyadicDistance {
    std::optional<std::uint64_t> exponent;

    static DyadicDistance zero() { return {}; }
    static DyadicDistance pow2(std::uint64_t e) { return {e}; }

    bool is_zero() const { return !exponent.has_value(); }

    double to_double() const {
        if (!exponent) return 0.0;
        if (*exponent > 2000) return 0.0;
        return std::ldexp(1.0, -static_cast<int>(*exponent));
    }

    /// Exact value as a rational; exponents beyond 62 do not fit and throw.
    Rational to_rational() const {
        if (!exponent) return Rational(0);
        if (*exponent > 62) throw InvalidArgument("dyadic distance too small for a 64-bit rational");
        return Rational(1, std::int64_t{1} << *exponent);
    }

    std::string to_string() const { return exponent ? "2^-" + std::to_string(*exponent) : "0"; }

    friend bool operator==(const DyadicDistance&, const DyadicDistance&) = default;

    friend std::strong_ordering operator<=>(const DyadicDistance& a, const DyadicDistance& b) {
        if (a.is_zero() || b.is_zero()) return b.is_zero() <=> a.is_zero();
        return *b.exponent <=> *a.exponent;
    }
};

inline double to_double(const DyadicDistance& d) { return d.to_double(); }
inline double to_double(double d) { return d; }

/// A positive threshold t with precomputed dyadic cut points:
///   2^-e <= t  iff  e >= le_exp,   2^-e < t  iff  e >= lt_exp.
class Threshold {
public:
    explicit Threshold(double t) : value_(t) {
        if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("threshold must be a positive finite number");
        int exp = 0;
        double m = std::frexp(t, &exp);  // t = m 2^exp, m in [1/2, 1)
        le_exp_ = 1 - static_cast<std::int64_t>(exp);
        lt_exp_ = (m == 0.5 ? 2 : 1) - static_cast<std::int64_t>(exp);
        if (le_exp_ < 0) le_exp_ = 0;
        if (lt_exp_ < 0) lt_exp_ = 0;
    }

    explicit Threshold(const Rational& t) : value_(dchaos::to_double(t)), exact_(t) {
        if (t <= Rational(0)) throw InvalidArgument("threshold must be positive");
        // smallest e >= 0 with den <= num 2^e (resp. den < num 2^e)
        const BigInt num(t.numerator()), den(t.denominator());
        BigInt scaled = num;
        std::int64_t e = 0;
        while (scaled < den) {
            scaled <<= 1;
            ++e;
        }
        le_exp_ = e;
        lt_exp_ = scaled == den ? e + 1 : e;
    }

    double value() const { return value_; }
    const std::optional<Rational>& exact() const { return exact_; }
    std::int64_t le_exp() const { return le_exp_; }
    std::int64_t lt_exp() const { return lt_exp_; }

    bool at_most(const DyadicDistance& d) const {
        return d.is_zero() || static_cast<std::int64_t>(*d.exponent) >= le_exp_;
    }
    bool below(const DyadicDistance& d) const {
        return d.is_zero() || static_cast<std::int64_t>(*d.exponent) >= lt_exp_;
    }
    bool above(const DyadicDistance& d) const { return !at_most(d); }

    bool at_most(double d) const { return d <= value_; }
    bool below(double d) const { return d < value_; }
    bool above(double d) const { return d > value_; }

private:
    double value_;
    std::optional<Rational> exact_;
    std::int64_t le_exp_ = 0;
    std::int64_t lt_exp_ = 0;
};

/// d < 2^-k
inline bool below_pow2(const DyadicDistance& d, std::uint64_t k) { return d.is_zero() || *d.exponent > k; }
inline bool below_pow2(double d, std::uint64_t k) {
    return d < std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(k, 2000)));
}

/// |a - b| for the rigidity check of shift distances, evaluated in double.
inline double distance_gap(const DyadicDistance& a, const DyadicDistance& b) {
    return std::fabs(a.to_double() - b.to_double());
}
inline double distance_gap(double a, double b) { return std::fabs(a - b); }

} // namespace dchaos
