#pragma once

// Exact integer and rational arithmetic. Probabilities and multiplicities are
// kept exact end to end; floating point enters only through state vectors.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <utility>

#include "envar/errors.hpp"

namespace envar {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// C(n, k) as an exact big integer. C(200, 100) ~ 9e58 overflows 64 bits,
// which is why callers must never round-trip these through double.
inline BigInt binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;  // exact: result is C(n-k+i, i) after each step
    }
    return result;
}

inline BigInt pow(BigInt base, std::int64_t exp) {
    if (exp < 0) throw OutOfRange("pow: negative exponent for BigInt");
    BigInt result = 1;
    while (exp > 0) {
        if (exp & 1) result *= base;
        base *= base;
        exp >>= 1;
    }
    return result;
}

inline BigRational pow(const BigRational& base, std::int64_t exp) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (exp < 0) {
        if (base == 0) throw OutOfRange("pow: zero base with negative exponent");
        return BigRational(pow(denominator(base), -exp), pow(numerator(base), -exp));
    }
    return BigRational(pow(numerator(base), exp), pow(denominator(base), exp));
}

// The exact value of a double. Doubles are dyadic rationals, so this is lossless.
inline BigRational exact_rational(double x) { return BigRational(x); }

inline std::string num_string(const BigRational& q) {
    return boost::multiprecision::numerator(q).str();
}

inline std::string den_string(const BigRational& q) {
    return boost::multiprecision::denominator(q).str();
}

// Strictly decimal big-integer parse: optional sign, digits only. Guarding
// against the constructor's base auto-detection, where a leading 0 means octal.
inline BigInt parse_bigint(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos == text.size()) throw ParseError("not an integer: '" + text + "'");
    while (pos + 1 < text.size() && text[pos] == '0') ++pos;  // drop leading zeros
    BigInt value = 0;
    for (; pos < text.size(); ++pos) {
        if (!std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("not an integer: '" + text + "'");
        value = value * 10 + (text[pos] - '0');
    }
    return negative ? -value : value;
}

// Parses "3/4", "7", "0.25", "-1.5e-3" to an exact rational.
inline BigRational parse_rational(const std::string& text) {
    const auto bad = [&] { return ParseError("not a rational number: '" + text + "'"); };
    std::string s = text;
    if (s.empty()) throw bad();

    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        if (num.empty() || den.empty()) throw bad();
        try {
            BigInt n = parse_bigint(num), d = parse_bigint(den);
            if (d == 0) throw bad();
            return BigRational(n, d);
        } catch (const std::runtime_error&) {
            throw bad();
        }
    }

    bool negative = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }

    std::string digits;
    std::int64_t exponent10 = 0;
    bool seen_digit = false, seen_point = false;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            if (seen_point) --exponent10;
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if ((c == 'e' || c == 'E') && seen_digit) {
            try {
                exponent10 += std::stoll(s.substr(pos + 1));
            } catch (const std::exception&) {
                throw bad();
            }
            pos = s.size() - 1;
            break;
        } else {
            throw bad();
        }
    }
    if (!seen_digit) throw bad();

    BigRational value(parse_bigint(digits), 1);
    if (exponent10 >= 0) {
        value *= BigRational(pow(BigInt(10), exponent10), 1);
    } else {
        value /= BigRational(pow(BigInt(10), -exponent10), 1);
    }
    return negative ? -value : value;
}

}  // namespace envar
