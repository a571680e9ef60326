#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rcx/ncpart.hpp"
#include "rcx/poly.hpp"

namespace rcx {

inline constexpr int kDValWordCap = 8;  // NC(8) has 1430 elements

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Poly> {
    static Poly zero() { return Poly(); }
    static Poly one() { return Poly(Rational(1)); }
    static Poly from_int(long long v) { return Poly(Rational(v)); }
    static bool is_zero(const Poly& p) { return p.is_zero(); }
};

template <>
struct ScalarOps<std::complex<double>> {
    static std::complex<double> zero() { return {0.0, 0.0}; }
    static std::complex<double> one() { return {1.0, 0.0}; }
    static std::complex<double> from_int(long long v) { return {static_cast<double>(v), 0.0}; }
    static bool is_zero(const std::complex<double>& z) { return z == std::complex<double>{}; }
};

/// Element of the commutative diagonal algebra D: one scalar per diagonal
/// slot. All D-valued quantities (conditional expectations, cumulants,
/// multipliers) are carried in this form; products act entrywise.
template <class S>
struct DiagVec {
    std::vector<S> v;

    DiagVec() = default;
    explicit DiagVec(std::vector<S> entries) : v(std::move(entries)) {}

    static DiagVec ones(int d) { return DiagVec(std::vector<S>(static_cast<std::size_t>(d), ScalarOps<S>::one())); }
    static DiagVec zeros(int d) { return DiagVec(std::vector<S>(static_cast<std::size_t>(d), ScalarOps<S>::zero())); }

    int dim() const { return static_cast<int>(v.size()); }
    S& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    const S& operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    bool is_zero() const {
        for (const auto& e : v)
            if (!ScalarOps<S>::is_zero(e)) return false;
        return true;
    }

    DiagVec& operator*=(const DiagVec& o) {
        check(o);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] * o.v[i];
        return *this;
    }
    DiagVec& operator+=(const DiagVec& o) {
        check(o);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] + o.v[i];
        return *this;
    }
    friend DiagVec operator*(DiagVec a, const DiagVec& b) { return a *= b; }
    friend DiagVec operator+(DiagVec a, const DiagVec& b) { return a += b; }
    DiagVec scaled(const S& c) const {
        DiagVec r = *this;
        for (auto& e : r.v) e = e * c;
        return r;
    }
    friend bool operator==(const DiagVec& a, const DiagVec& b) { return a.v == b.v; }

private:
    void check(const DiagVec& o) const {
        if (v.size() != o.v.size()) throw std::invalid_argument("DiagVec: dimension mismatch");
    }
};

/// One letter of a D-valued word: an element handle with its right diagonal
/// multiplier. Left diagonal factors are pushed onto the previous letter's
/// multiplier, or onto the word's leading multiplier.
template <class S>
struct DLetter {
    int handle;
    DiagVec<S> right;
};

template <class S>
struct DWord {
    DiagVec<S> lead;  // diagonal factor in front of the first letter
    std::vector<DLetter<S>> letters;

    static DWord plain(int d, const std::vector<int>& handles) {
        DWord w;
        w.lead = DiagVec<S>::ones(d);
        for (int h : handles) w.letters.push_back({h, DiagVec<S>::ones(d)});
        return w;
    }
    int size() const { return static_cast<int>(letters.size()); }
};

/// Abstract word-moment oracle: phi-tilde of the interleaved product
/// lead * a_1 D_1 * ... * a_r D_r, one scalar per diagonal slot.
template <class S>
class EvaluationContext {
public:
    virtual ~EvaluationContext() = default;
    virtual int dim() const = 0;
    virtual DiagVec<S> moment(const DWord<S>& w) const = 0;
};

enum class IntervalChoice { First, Last };

namespace detail {

// Nested multiplicative extension over the blocks of a non-crossing
// partition: repeatedly evaluate an interval block with block_fn, absorb the
// (diagonal) value into the preceding multiplier, and recurse. Because D is
// commutative the result does not depend on which interval block is taken;
// the choice knob exists so tests can assert that.
template <class S>
DiagVec<S> nested_extension(const Partition& pi, DWord<S> w,
                            const std::function<DiagVec<S>(const DWord<S>&)>& block_fn,
                            IntervalChoice choice) {
    if (pi.n() != w.size()) throw std::invalid_argument("nested_extension: size mismatch");
    if (!is_noncrossing(pi)) throw std::invalid_argument("nested_extension: crossing partition");

    std::vector<std::vector<int>> blocks = pi.blocks();
    while (blocks.size() > 1) {
        // locate an interval block (one always exists in a non-crossing partition)
        int chosen = -1;
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const auto& b = blocks[bi];
            if (b.back() - b.front() + 1 == static_cast<int>(b.size())) {
                chosen = static_cast<int>(bi);
                if (choice == IntervalChoice::First) break;
            }
        }
        const std::vector<int> v = blocks[static_cast<std::size_t>(chosen)];
        int a = v.front();
        int len = static_cast<int>(v.size());

        DWord<S> sub;
        sub.lead = DiagVec<S>::ones(w.lead.dim());
        sub.letters.assign(w.letters.begin() + a, w.letters.begin() + a + len);
        DiagVec<S> val = block_fn(sub);

        if (a == 0)
            w.lead *= val;
        else
            w.letters[static_cast<std::size_t>(a - 1)].right *= val;
        w.letters.erase(w.letters.begin() + a, w.letters.begin() + a + len);

        blocks.erase(blocks.begin() + chosen);
        for (auto& b : blocks)
            for (auto& e : b)
                if (e > a) e -= len;
    }
    return block_fn(w);
}

template <class S>
void check_dval_cap(const DWord<S>& w) {
    if (w.letters.empty()) throw std::invalid_argument("empty word");
    if (w.size() > kDValWordCap) throw std::length_error("word length exceeds cap");
}

}  // namespace detail

/// Nested multiplicative extension of phi-tilde over the blocks of pi.
template <class S>
DiagVec<S> phi_tilde_pi(const EvaluationContext<S>& ctx, const Partition& pi, const DWord<S>& w,
                        IntervalChoice choice = IntervalChoice::First) {
    return detail::nested_extension<S>(
        pi, w, [&](const DWord<S>& sub) { return ctx.moment(sub); }, choice);
}

/// D-valued free cumulant: sum over NC(n) of mu(pi, 1_n) * phi_tilde_pi.
template <class S>
DiagVec<S> dvalued_cumulant(const EvaluationContext<S>& ctx, const DWord<S>& w) {
    detail::check_dval_cap(w);
    const NCTable& t = nc_table(w.size());
    DiagVec<S> acc = DiagVec<S>::zeros(ctx.dim());
    for (std::size_t i = 0; i < t.partitions.size(); ++i) {
        DiagVec<S> term = phi_tilde_pi(ctx, t.partitions[i], w);
        long long mu = t.mobius_top[i];
        if (mu == 1) {
            acc += term;
        } else {
            acc += term.scaled(ScalarOps<S>::from_int(mu));
        }
    }
    return acc;
}

/// Nested multiplicative extension of the D-valued cumulant over pi.
template <class S>
DiagVec<S> dvalued_cumulant_pi(const EvaluationContext<S>& ctx, const Partition& pi,
                               const DWord<S>& w, IntervalChoice choice = IntervalChoice::First) {
    return detail::nested_extension<S>(
        pi, w, [&](const DWord<S>& sub) { return dvalued_cumulant(ctx, sub); }, choice);
}

/// Cumulant of grouped products: sum of dvalued_cumulant_pi over pi with
/// join_nc(pi, interval_sigma(lengths)) = 1_n.
template <class S>
DiagVec<S> grouped_dvalued_cumulant(const EvaluationContext<S>& ctx,
                                    const std::vector<int>& lengths, const DWord<S>& w) {
    detail::check_dval_cap(w);
    int n = 0;
    for (int l : lengths) n += l;
    if (n != w.size())
        throw std::invalid_argument("grouped_dvalued_cumulant: lengths do not sum to word size");
    Partition sigma = interval_sigma(lengths);
    Partition top = Partition::full(n);
    const NCTable& t = nc_table(n);
    DiagVec<S> acc = DiagVec<S>::zeros(ctx.dim());
    for (const auto& pi : t.partitions)
        if (join_nc(pi, sigma) == top) acc += dvalued_cumulant_pi(ctx, pi, w);
    return acc;
}

}  // namespace rcx
