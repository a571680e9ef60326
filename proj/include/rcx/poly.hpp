#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcx/rational.hpp"

namespace rcx {

/// Interned symbol names for polynomial variables. At most 16 distinct
/// symbols per process; exponents are capped at 15 so that a monomial packs
/// into one 64-bit word (one nibble per symbol slot).
class SymbolTable {
public:
    static int id(const std::string& name) {
        auto& t = instance();
        std::lock_guard<std::mutex> lock(t.mu_);
        auto it = t.ids_.find(name);
        if (it != t.ids_.end()) return it->second;
        if (t.names_.size() >= 16) throw std::length_error("SymbolTable: too many symbols");
        int id = static_cast<int>(t.names_.size());
        t.names_.push_back(name);
        t.ids_.emplace(name, id);
        return id;
    }
    static std::string name(int id) {
        auto& t = instance();
        std::lock_guard<std::mutex> lock(t.mu_);
        return t.names_.at(static_cast<std::size_t>(id));
    }

private:
    static SymbolTable& instance() {
        static SymbolTable t;
        return t;
    }
    std::mutex mu_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> ids_;
};

/// Monomial as 16 packed nibble exponents.
struct Monomial {
    std::uint64_t bits{0};

    int exponent(int sym) const { return static_cast<int>((bits >> (4 * sym)) & 0xF); }

    Monomial times(const Monomial& o) const {
        Monomial r;
        r.bits = bits + o.bits;
        // nibble-wise carry detection
        if (((bits ^ o.bits ^ r.bits) & 0x1111111111111110ULL) != 0 || r.bits < bits)
            check_slow(o);
        return r;
    }

    bool operator==(const Monomial& o) const { return bits == o.bits; }
    bool operator<(const Monomial& o) const { return bits < o.bits; }

    std::string to_string() const {
        if (bits == 0) return "1";
        std::string s;
        for (int sym = 0; sym < 16; ++sym) {
            int e = exponent(sym);
            if (e == 0) continue;
            if (!s.empty()) s += "*";
            s += SymbolTable::name(sym);
            if (e > 1) s += "^" + std::to_string(e);
        }
        return s;
    }

private:
    void check_slow(const Monomial& o) const {
        for (int sym = 0; sym < 16; ++sym)
            if (exponent(sym) + o.exponent(sym) > 15)
                throw std::overflow_error("Monomial: exponent exceeds 15");
    }
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Terms are kept sorted by monomial; zero coefficients are never stored,
/// so equality is structural.
class Poly {
public:
    Poly() = default;
    Poly(Rational c) {
        if (!c.is_zero()) terms_.push_back({Monomial{}, c});
    }
    Poly(std::int64_t c) : Poly(Rational(c)) {}

    static Poly symbol(const std::string& name, int exp = 1) {
        Poly p;
        if (exp < 0 || exp > 15) throw std::domain_error("Poly::symbol: bad exponent");
        if (exp == 0) return Poly(Rational(1));
        Monomial m;
        m.bits = static_cast<std::uint64_t>(exp) << (4 * SymbolTable::id(name));
        p.terms_.push_back({m, Rational(1)});
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].first.bits == 0);
    }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw std::domain_error("Poly: not a constant");
        return terms_[0].second;
    }
    std::size_t term_count() const { return terms_.size(); }

    const std::vector<std::pair<Monomial, Rational>>& terms() const { return terms_; }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() && j < b.terms_.size()) {
            if (a.terms_[i].first < b.terms_[j].first) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (b.terms_[j].first < a.terms_[i].first) {
                r.terms_.push_back(b.terms_[j++]);
            } else {
                Rational c = a.terms_[i].second + b.terms_[j].second;
                if (!c.is_zero()) r.terms_.push_back({a.terms_[i].first, c});
                ++i;
                ++j;
            }
        }
        for (; i < a.terms_.size(); ++i) r.terms_.push_back(a.terms_[i]);
        for (; j < b.terms_.size(); ++j) r.terms_.push_back(b.terms_[j]);
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    Poly operator-() const {
        Poly r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        // fast paths for scalars, the common case in the engines
        if (a.is_constant()) return b.scaled(a.terms_[0].second);
        if (b.is_constant()) return a.scaled(b.terms_[0].second);
        std::map<Monomial, Rational> acc;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m = ma.times(mb);
                auto [it, fresh] = acc.emplace(m, ca * cb);
                if (!fresh) {
                    it->second += ca * cb;
                    if (it->second.is_zero()) acc.erase(it);
                }
            }
        Poly r;
        r.terms_.assign(acc.begin(), acc.end());
        return r;
    }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    Poly scaled(const Rational& c) const {
        if (c.is_zero()) return Poly();
        Poly r = *this;
        for (auto& t : r.terms_) t.second *= c;
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Substitutes doubles for all symbols and evaluates.
    double eval(const std::map<std::string, double>& vals) const {
        double acc = 0;
        for (const auto& [m, c] : terms_) {
            double t = c.to_double();
            for (int sym = 0; sym < 16; ++sym) {
                int e = m.exponent(sym);
                if (e == 0) continue;
                auto it = vals.find(SymbolTable::name(sym));
                if (it == vals.end()) throw std::domain_error("Poly::eval: unbound symbol");
                for (int k = 0; k < e; ++k) t *= it->second;
            }
            acc += t;
        }
        return acc;
    }

    /// Substitutes an exact rational for one symbol.
    Poly substitute(const std::string& name, const Rational& v) const {
        int sym = SymbolTable::id(name);
        Poly r;
        for (const auto& [m, c] : terms_) {
            int e = m.exponent(sym);
            Rational coeff = c;
            for (int k = 0; k < e; ++k) coeff *= v;
            Monomial rest = m;
            rest.bits &= ~(0xFULL << (4 * sym));
            Poly term;
            if (!coeff.is_zero()) term.terms_.push_back({rest, coeff});
            r += term;
        }
        return r;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [m, c] : terms_) {
            if (!s.empty()) s += " + ";
            if (m.bits == 0) {
                s += c.to_string();
            } else if (c.is_one()) {
                s += m.to_string();
            } else {
                s += c.to_string() + "*" + m.to_string();
            }
        }
        return s;
    }

    std::size_t hash() const {
        std::size_t h = 0x51ab2ae1u;
        for (const auto& [m, c] : terms_) {
            h ^= std::hash<std::uint64_t>{}(m.bits) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= c.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

private:
    std::vector<std::pair<Monomial, Rational>> terms_;
};

inline Poly operator*(const Rational& c, const Poly& p) { return p.scaled(c); }

}  // namespace rcx

template <>
struct std::hash<rcx::Poly> {
    std::size_t operator()(const rcx::Poly& p) const { return p.hash(); }
};
