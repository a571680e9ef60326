#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "rcx/ncpart.hpp"
#include "rcx/poly.hpp"

namespace rcx {

/// A word of element handles, evaluated by a functional.
using HandleWord = std::vector<int>;

inline constexpr int kScalarWordCap = 10;  // NC(10) tables build in seconds

/// Joint free-cumulant specification: evaluator returns kappa_{|word|} of
/// the word. Multilinearity is the caller's responsibility.
struct CumulantSpec {
    std::function<Poly(const HandleWord&)> kappa;
};

/// Moment functional: evaluator returns the joint moment of the word.
struct MultilinearFunctional {
    std::function<Poly(const HandleWord&)> moment;
};

/// Product over the blocks of pi of f applied to the subword indexed by the
/// block (order preserved). Scalars commute, so no nesting is needed here.
template <class F>
Poly multiplicative_extension(const F& f, const Partition& pi, const HandleWord& word) {
    if (pi.n() != static_cast<int>(word.size()))
        throw std::invalid_argument("multiplicative_extension: size mismatch");
    if (!is_noncrossing(pi))
        throw std::invalid_argument("multiplicative_extension: crossing partition");
    Poly acc(Rational(1));
    for (const auto& block : pi.blocks()) {
        HandleWord sub;
        sub.reserve(block.size());
        for (int e : block) sub.push_back(word[static_cast<std::size_t>(e)]);
        acc *= eval_on(f, sub);
        if (acc.is_zero()) break;
    }
    return acc;
}

/// Moment of the word from its cumulants: sum over NC(n) of the
/// multiplicative extension.
Poly cumulants_to_moments(const CumulantSpec& k, const HandleWord& word);

/// Cumulant of the word from its moments: Moebius inversion with weights
/// mu(pi, 1_n). Inverse of cumulants_to_moments.
Poly moments_to_cumulants(const MultilinearFunctional& m, const HandleWord& word);

/// Cumulant of the grouped products A_1, ..., A_r where A_j multiplies the
/// next lengths[j] letters: sum over pi in NC(n) with
/// join_nc(pi, interval_sigma(lengths)) = 1_n.
Poly grouped_cumulant(const CumulantSpec& k, const std::vector<int>& lengths,
                      const HandleWord& word);

namespace detail {
inline Poly eval_impl(const CumulantSpec& f, const HandleWord& w) { return f.kappa(w); }
inline Poly eval_impl(const MultilinearFunctional& f, const HandleWord& w) { return f.moment(w); }
}  // namespace detail

template <class F>
Poly eval_on(const F& f, const HandleWord& w) {
    return detail::eval_impl(f, w);
}

}  // namespace rcx
