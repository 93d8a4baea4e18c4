#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "persuade/errors.hpp"

namespace persuade {

/// Exact rational scalar. GMP keeps values canonical (reduced, positive denominator),
/// which makes equality and ordering decision procedures rather than tolerance tests.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

/// Canonical rendering: "p" for integers, "p/q" otherwise (GMP canonical form).
inline std::string to_string(const Rat& r) { return r.get_str(); }

/// Parses "p/q", plain integers, and decimal/scientific literals ("0.25", "1e-4", "-2.5e3").
/// Every accepted form converts exactly.
inline Rat parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw DomainError("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        mpz_class num, den;
        if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
            throw DomainError("bad rational literal: " + text);
        if (den == 0) throw DomainError("rational with zero denominator: " + text);
        Rat r(num, den);
        r.canonicalize();
        return r;
    }

    // decimal / scientific
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    std::string digits;
    long exp10 = 0;
    bool sawDigit = false, sawDot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (sawDot) --exp10;
            sawDigit = true;
        } else if (c == '.' && !sawDot) {
            sawDot = true;
        } else if ((c == 'e' || c == 'E') && sawDigit) {
            exp10 += std::stol(s.substr(i + 1));
            break;
        } else {
            throw DomainError("bad rational literal: " + text);
        }
    }
    if (!sawDigit) throw DomainError("bad rational literal: " + text);
    mpz_class num(digits.empty() ? "0" : digits, 10);
    if (neg) num = -num;
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rat r = exp10 < 0 ? Rat(num, pw) : Rat(num * pw);
    r.canonicalize();
    return r;
}

/// Decimal rendering with `digits` places, round half away from zero. Used for CSV output.
inline std::string to_decimal_string(const Rat& r, int digits) {
    if (digits < 0) digits = 0;
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class num = r.get_num() * pw * 2;
    mpz_class q, rem;
    mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), r.get_den().get_mpz_t());
    // q = 2*scaled value truncated; round half away from zero
    mpz_class scaled = (q >= 0) ? mpz_class((q + 1) / 2) : mpz_class((q - 1) / 2);
    bool neg = scaled < 0;
    mpz_class mag = neg ? mpz_class(-scaled) : scaled;
    std::string ds = mag.get_str();
    std::string out = neg ? "-" : "";
    if (digits == 0) return out + ds;
    if (static_cast<int>(ds.size()) <= digits)
        ds.insert(0, std::string(static_cast<std::size_t>(digits) - ds.size() + 1, '0'));
    out += ds.substr(0, ds.size() - static_cast<std::size_t>(digits));
    out += ".";
    out += ds.substr(ds.size() - static_cast<std::size_t>(digits));
    return out;
}

inline Rat pow_rat(const Rat& base, unsigned long e) {
    Rat r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den().get_mpz_t(), e);
    r.canonicalize();
    return r;
}

inline Rat abs_rat(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// Closed rational interval, used to report certified enclosures (truncated value
/// iteration, square roots).
struct RatInterval {
    Rat lo;
    Rat hi;

    RatInterval() = default;
    RatInterval(Rat point) : lo(point), hi(point) {}
    RatInterval(Rat lo, Rat hi) : lo(std::move(lo)), hi(std::move(hi)) {
        if (this->lo > this->hi) throw DomainError("empty rational interval");
    }

    Rat width() const { return hi - lo; }
    Rat midpoint() const { return (lo + hi) / 2; }
    bool is_point() const { return lo == hi; }
    bool strictly_above(const RatInterval& other) const { return lo > other.hi; }
    bool strictly_below(const RatInterval& other) const { return hi < other.lo; }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
};

inline RatInterval operator+(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}
inline RatInterval operator-(const RatInterval& a, const RatInterval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}

/// Scale by a nonnegative rational.
inline RatInterval scale(const RatInterval& a, const Rat& c) {
    if (c < 0) return {a.hi * c, a.lo * c};
    return {a.lo * c, a.hi * c};
}

/// Outward-rounded enclosure of sqrt(x) with width at most 10^-precision_digits.
inline RatInterval sqrt_interval(const Rat& x, int precision_digits = 30) {
    if (x < 0) throw DomainError("sqrt of a negative rational");
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 10, static_cast<unsigned long>(precision_digits));
    // sqrt(n/d) = sqrt(n*d)/d ; scale so the integer sqrt carries the precision
    mpz_class scaledNum = x.get_num() * x.get_den() * pw * pw;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaledNum.get_mpz_t());
    mpz_class den = x.get_den() * pw;
    Rat lo(root, den), hi(root + 1, den);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

} // namespace persuade
