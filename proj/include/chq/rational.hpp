#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chq {

/**
 * Exact rational number over 128-bit integers.
 *
 * Covers the existence-window algebra, where verdicts must flip exactly at
 * the critical exponents: config literals parse to exact decimal fractions
 * and doubles convert to their exact dyadic values. Operations normalize by
 * gcd and throw std::overflow_error if a product leaves the 128-bit range.
 */
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) {
        if (d == 0) throw std::invalid_argument("rational: zero denominator");
        normalize();
    }

    /// Exact value of the double (every finite double is dyadic).
    static Rational from_double(double x) {
        if (!std::isfinite(x)) throw std::invalid_argument("rational: non-finite double");
        if (x == 0.0) return Rational();
        int exp = 0;
        double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
        long long m = static_cast<long long>(std::ldexp(mant, 53));
        exp -= 53;
        Rational r;
        r.num_ = m;
        r.den_ = 1;
        while (exp > 0) { r.num_ = checked_mul(r.num_, 2); --exp; }
        while (exp < 0) { r.den_ = checked_mul(r.den_, 2); ++exp; }
        r.normalize();
        return r;
    }

    /// Parses "3", "-2.5", "1e-3", or a fraction "5/3" exactly.
    static Rational from_string(const std::string& text) {
        const auto slash = text.find('/');
        if (slash != std::string::npos)
            return from_string(text.substr(0, slash)) / from_string(text.substr(slash + 1));

        std::size_t pos = 0;
        bool neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) neg = text[pos++] == '-';
        __int128 num = 0;
        long digits = 0, frac_digits = 0;
        bool seen_dot = false, seen_digit = false;
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c == '.') {
                if (seen_dot) throw std::invalid_argument("rational: bad literal " + text);
                seen_dot = true;
            } else if (c >= '0' && c <= '9') {
                num = checked_mul(num, 10);
                num += c - '0';
                seen_digit = true;
                ++digits;
                if (seen_dot) ++frac_digits;
            } else if (c == 'e' || c == 'E') {
                break;
            } else {
                throw std::invalid_argument("rational: bad literal " + text);
            }
        }
        if (!seen_digit) throw std::invalid_argument("rational: bad literal " + text);
        long exp10 = -frac_digits;
        if (pos < text.size()) {  // exponent part
            ++pos;
            bool eneg = false;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) eneg = text[pos++] == '-';
            if (pos >= text.size()) throw std::invalid_argument("rational: bad literal " + text);
            long e = 0;
            for (; pos < text.size(); ++pos) {
                if (text[pos] < '0' || text[pos] > '9')
                    throw std::invalid_argument("rational: bad literal " + text);
                e = e * 10 + (text[pos] - '0');
                if (e > 60) throw std::overflow_error("rational: exponent too large");
            }
            exp10 += eneg ? -e : e;
        }
        Rational r;
        r.num_ = neg ? -num : num;
        r.den_ = 1;
        while (exp10 > 0) { r.num_ = checked_mul(r.num_, 10); --exp10; }
        while (exp10 < 0) { r.den_ = checked_mul(r.den_, 10); ++exp10; }
        r.normalize();
        return r;
    }

    double to_double() const {
        return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
    }

    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        Rational r;
        r.num_ = checked_mul(a.num_, b.den_) + checked_mul(b.num_, a.den_);
        r.den_ = checked_mul(a.den_, b.den_);
        r.normalize();
        return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        Rational r;
        r.num_ = checked_mul(a.num_, b.den_) - checked_mul(b.num_, a.den_);
        r.den_ = checked_mul(a.den_, b.den_);
        r.normalize();
        return r;
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        Rational r;
        r.num_ = checked_mul(a.num_, b.num_);
        r.den_ = checked_mul(a.den_, b.den_);
        r.normalize();
        return r;
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::invalid_argument("rational: division by zero");
        Rational r;
        r.num_ = checked_mul(a.num_, b.den_);
        r.den_ = checked_mul(a.den_, b.num_);
        r.normalize();
        return r;
    }
    Rational operator-() const {
        Rational r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return (a - b).sign() < 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return (a - b).sign() > 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return (a - b).sign() <= 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return (a - b).sign() >= 0; }

  private:
    __int128 num_;
    __int128 den_;  // > 0 after normalization

    static __int128 checked_mul(__int128 a, __int128 b) {
        __int128 out;
        if (__builtin_mul_overflow(a, b, &out))
            throw std::overflow_error("rational: 128-bit overflow");
        return out;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        const __int128 g = gcd128(num_, den_);
        num_ /= g;
        den_ /= g;
    }
};

}  // namespace chq
