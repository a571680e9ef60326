#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rcx {

/// Exact rational number on checked 64-bit integers.
///
/// Always stored reduced with a positive denominator. Intermediate products
/// are taken in 128-bit arithmetic and cross-reduced before narrowing; any
/// result that does not fit in 64 bits throws std::overflow_error rather
/// than wrapping. The quantities handled by the cumulant engines are small
/// (counts bounded by Catalan numbers times small rational model data), so
/// an overflow indicates a misuse, not a precision need.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        // Knuth's scheme: reduce by gcd of denominators before cross-multiplying.
        std::int64_t g = std::gcd(a.den_, b.den_);
        I128 t = I128(a.num_) * (b.den_ / g) + I128(b.num_) * (a.den_ / g);
        I128 d = I128(a.den_ / g) * b.den_;
        return make_reduced(t, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        std::int64_t g1 = std::gcd(std::abs(a.num_), b.den_);
        std::int64_t g2 = std::gcd(std::abs(b.num_), a.den_);
        I128 n = I128(a.num_ / g1) * (b.num_ / g2);
        I128 d = I128(a.den_ / g2) * (b.den_ / g1);
        return make_reduced_coprime(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        std::int64_t g1 = std::gcd(std::abs(a.num_), std::abs(b.num_));
        std::int64_t g2 = std::gcd(std::abs(b.den_), a.den_);
        I128 n = I128(a.num_ / g1) * (b.den_ / g2);
        I128 d = I128(a.den_ / g2) * (b.num_ / g1);
        if (d < 0) { n = -n; d = -d; }
        return make_reduced_coprime(n, d);
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return I128(a.num_) * b.den_ < I128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "n" or "n/d".
    static Rational from_string(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }

    std::size_t hash() const {
        std::size_t h = std::hash<std::int64_t>{}(num_);
        return h ^ (std::hash<std::int64_t>{}(den_) + 0x9e3779b97f4a7c15ULL + (h << 6));
    }

private:
    using I128 = __int128;

    std::int64_t num_{0};
    std::int64_t den_{1};

    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(std::abs(num_), den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    static std::int64_t narrow(I128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rational: 64-bit overflow");
        return static_cast<std::int64_t>(v);
    }
    static I128 gcd128(I128 a, I128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) { I128 t = a % b; a = b; b = t; }
        return a;
    }
    static Rational make_reduced(I128 n, I128 d) {
        if (d < 0) { n = -n; d = -d; }
        I128 g = gcd128(n, d);
        if (g > 1) { n /= g; d /= g; }
        Rational r;
        r.num_ = narrow(n);
        r.den_ = narrow(d);
        if (r.den_ == 0) throw std::domain_error("Rational: zero denominator");
        return r;
    }
    // numerator and denominator already coprime
    static Rational make_reduced_coprime(I128 n, I128 d) {
        Rational r;
        r.num_ = narrow(n);
        r.den_ = narrow(d);
        return r;
    }
};

}  // namespace rcx

template <>
struct std::hash<rcx::Rational> {
    std::size_t operator()(const rcx::Rational& r) const { return r.hash(); }
};
