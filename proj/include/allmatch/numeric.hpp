#pragma once

// Exact integer and rational arithmetic used for counts and moments.

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace allmatch {

/// Arbitrary-precision integer. Counts are always nonnegative; the signed type
/// is used so inclusion-exclusion sums can pass through negative partials.
using BigCount = boost::multiprecision::cpp_int;

/// Exact rational, always kept in lowest terms with a positive denominator.
using BigRatio = boost::multiprecision::cpp_rational;

inline BigRatio make_ratio(const BigCount& num, const BigCount& den) {
    if (den == 0) throw undefined_ratio_error("zero denominator");
    return BigRatio(num, den);
}

inline BigCount numerator(const BigRatio& r) { return boost::multiprecision::numerator(r); }
inline BigCount denominator(const BigRatio& r) { return boost::multiprecision::denominator(r); }

inline BigCount factorial(std::int64_t n) {
    if (n < 0) throw domain_error("factorial of negative number");
    BigCount r = 1;
    for (std::int64_t i = 2; i <= n; ++i) r *= i;
    return r;
}

/// P(n, k) = n!/(n-k)!, zero outside 0 <= k <= n.
inline BigCount falling(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) return 0;
    BigCount r = 1;
    for (std::int64_t i = 0; i < k; ++i) r *= (n - i);
    return r;
}

/// C(n, k), zero outside 0 <= k <= n.
inline BigCount binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigCount r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

inline BigCount ipow(BigCount base, std::uint64_t exp) {
    BigCount r = 1;
    while (exp) {
        if (exp & 1U) r *= base;
        exp >>= 1U;
        if (exp) base *= base;
    }
    return r;
}

inline BigRatio ipow(const BigRatio& base, std::uint64_t exp) {
    return make_ratio(ipow(numerator(base), exp), ipow(denominator(base), exp));
}

inline BigCount pow2(std::uint64_t exp) {
    BigCount r = 1;
    r <<= exp;
    return r;
}

/// "p/q", or just "p" for integers.
inline std::string to_exact_string(const BigRatio& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline std::string to_exact_string(const BigCount& c) { return c.str(); }

/// Decimal rendering with `digits` significant digits, printf("%.*g") style.
/// Rounds half away from zero. Annotation only; never used in comparisons.
inline std::string to_decimal(const BigRatio& value, int digits = 12) {
    if (digits < 1) digits = 1;
    if (value == 0) return "0";
    BigCount num = numerator(value);
    const BigCount den = denominator(value);
    std::string sign;
    if (num < 0) {
        sign = "-";
        num = -num;
    }

    // exponent e with 10^e <= num/den < 10^(e+1)
    long e = static_cast<long>(num.str().size()) - static_cast<long>(den.str().size());
    auto scaled_cmp = [&](long exp10) {
        // compare num/den against 10^exp10
        BigCount p = ipow(BigCount(10), static_cast<std::uint64_t>(exp10 < 0 ? -exp10 : exp10));
        if (exp10 >= 0) return num < den * p ? -1 : (num == den * p ? 0 : 1);
        return num * p < den ? -1 : (num * p == den ? 0 : 1);
    };
    while (scaled_cmp(e) < 0) --e;
    while (scaled_cmp(e + 1) >= 0) ++e;

    const long shift = digits - 1 - e;
    BigCount top = num, bottom = den;
    if (shift >= 0)
        top *= ipow(BigCount(10), static_cast<std::uint64_t>(shift));
    else
        bottom *= ipow(BigCount(10), static_cast<std::uint64_t>(-shift));
    BigCount mant = (2 * top + bottom) / (2 * bottom);
    if (mant == ipow(BigCount(10), static_cast<std::uint64_t>(digits))) {
        mant /= 10;
        ++e;
    }
    std::string ds = mant.str();

    auto trim = [](std::string s) {
        if (s.find('.') != std::string::npos) {
            while (!s.empty() && s.back() == '0') s.pop_back();
            if (!s.empty() && s.back() == '.') s.pop_back();
        }
        return s;
    };

    std::string out;
    if (e >= -5 && e < digits) {
        if (e >= 0) {
            out = ds.substr(0, static_cast<std::size_t>(e) + 1);
            if (static_cast<std::size_t>(e) + 1 < ds.size()) out += "." + ds.substr(static_cast<std::size_t>(e) + 1);
        } else {
            out = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + ds;
        }
        out = trim(out);
    } else {
        out = trim(ds.substr(0, 1) + "." + ds.substr(1));
        std::string ex = std::to_string(e < 0 ? -e : e);
        if (ex.size() < 2) ex = "0" + ex;
        out += (e < 0 ? "e-" : "e+") + ex;
    }
    return sign + out;
}

inline std::string to_decimal(const BigCount& value, int digits = 12) {
    return to_decimal(BigRatio(value), digits);
}

/// Parses "p/q", a plain integer, or a finite decimal such as "0.02".
inline BigRatio parse_ratio(std::string_view text) {
    auto bad = [&] { return domain_error("not a rational number: '" + std::string(text) + "'"); };
    auto parse_int = [&](std::string_view s) {
        if (s.empty()) throw bad();
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw bad();
        for (std::size_t k = i; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') throw bad();
        return BigCount(std::string(s[0] == '+' ? s.substr(1) : s));
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigCount den = parse_int(text.substr(slash + 1));
        if (den == 0) throw bad();
        return make_ratio(parse_int(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view frac = text.substr(dot + 1);
        std::string_view whole = text.substr(0, dot);
        bool negative = !whole.empty() && whole[0] == '-';
        if (whole.empty() || whole == "-" || whole == "+") whole = "0";
        BigCount w = parse_int(whole);
        if (w < 0) w = -w;
        BigCount f = frac.empty() ? BigCount(0) : parse_int(frac);
        if (!frac.empty() && (frac[0] == '-' || frac[0] == '+')) throw bad();
        BigCount scale = ipow(BigCount(10), frac.size());
        BigRatio r = make_ratio(w * scale + f, scale);
        return negative ? -r : r;
    }
    return BigRatio(parse_int(text));
}

} // namespace allmatch
