// Exact integer and rational arithmetic used by the circuit simulator and the
// protocol deciders. Backed by GMP.
#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sqma {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Parses "p/q", an integer, or a finite decimal such as "0.125" into an exact
/// rational. Throws ParseError on malformed input.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& value);

/// 2^e as a big integer.
BigInt pow2(std::uint64_t e);

/// Exact probability p/q in lowest terms with 0 <= p <= q.
class RationalProb {
public:
    RationalProb() : value_(0) {}
    explicit RationalProb(const Rational& value);
    RationalProb(const BigInt& numerator, const BigInt& denominator);

    static RationalProb zero() { return RationalProb{}; }
    static RationalProb one() { return RationalProb{Rational{1}}; }
    static RationalProb parse(std::string_view text);

    const Rational& value() const { return value_; }
    BigInt numerator() const { return value_.get_num(); }
    BigInt denominator() const { return value_.get_den(); }
    double to_double() const { return value_.get_d(); }
    std::string str() const;

    friend bool operator==(const RationalProb& a, const RationalProb& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const RationalProb& a, const RationalProb& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    Rational value_;
};

}  // namespace sqma
