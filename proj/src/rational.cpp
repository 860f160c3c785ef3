#include "sqma/rational.hpp"

#include "sqma/errors.hpp"

#include <cctype>

namespace sqma {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

BigInt parse_natural(std::string_view s) {
    if (!all_digits(s)) throw ParseError("expected digits, got '" + std::string(s) + "'");
    return BigInt(std::string(s));
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ParseError("empty rational");

    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    Rational result;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_natural(text.substr(0, slash));
        BigInt den = parse_natural(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        result = Rational(num, den);
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (whole.empty() && frac.empty()) throw ParseError("malformed decimal");
        BigInt w = whole.empty() ? BigInt(0) : parse_natural(whole);
        BigInt f = frac.empty() ? BigInt(0) : parse_natural(frac);
        BigInt scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        result = Rational(w * scale + f, scale);
    } else {
        result = Rational(parse_natural(text));
    }
    result.canonicalize();
    return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& value) {
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

BigInt pow2(std::uint64_t e) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

RationalProb::RationalProb(const Rational& value) : value_(value) {
    value_.canonicalize();
    if (value_ < 0 || value_ > 1) {
        throw std::domain_error("probability outside [0,1]: " + to_string(value_));
    }
}

RationalProb::RationalProb(const BigInt& numerator, const BigInt& denominator) {
    if (denominator == 0) throw std::domain_error("zero denominator");
    *this = RationalProb(Rational(numerator, denominator));
}

RationalProb RationalProb::parse(std::string_view text) {
    Rational v = parse_rational(text);
    if (v < 0 || v > 1) throw ParseError("probability outside [0,1]: " + std::string(text));
    return RationalProb(v);
}

std::string RationalProb::str() const { return to_string(value_); }

}  // namespace sqma
