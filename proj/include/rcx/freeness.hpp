#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcx/rcyclic_exact.hpp"
#include "rcx/wishart_mc.hpp"

namespace rcx {

/// Sign word for R-diagonal pair tests: entries +1 / -1.
using SignWord = std::vector<int>;

/// Rational diagonal probe with a display name.
struct DiagProbe {
    std::string name;
    std::vector<Rational> entries;
};

/// Default probe set: identity, diag(1..d), diag(1,0,...,0).
std::vector<DiagProbe> default_probes(int d);

struct WordRecord {
    std::string word;
    bool expected_zero{true};
    std::string value;       // exact polynomial vector, or mean for MC rows
    double abs_value{0};     // numeric magnitude (MC rows)
    double stderr_val{0};    // MC rows
    bool numeric{false};     // row carries abs/stderr columns
    bool violation{false};
    std::string note;
};

/// Scan verdict summary. Exact scans decide by structural zero comparison;
/// numeric scans flag |mean| > max(4 stderr, abs_floor) on expected-zero
/// words. Stored rows always include every violation; passing expected-zero
/// rows are stored only up to max_rows.
struct VanishingReport {
    std::string title;
    long long words_checked{0};
    long long expected_zero_words{0};
    long long violations{0};
    double max_abs_expected_zero{0};  // numeric scans
    std::vector<WordRecord> rows;
    bool truncated{false};

    bool passed() const { return violations == 0; }
    std::string to_json() const;
    std::string to_table() const;
};

struct ScanOptions {
    int max_r{4};
    std::vector<DiagProbe> probes;  // empty: default_probes(d)
    double abs_floor{1e-2};
    int threads{1};
    std::size_t max_rows{512};
};

/// Index-word pattern of the diagonal-decomposition theorem: a cumulant may
/// be nonzero only when every index is zero, or the length is even, every
/// index is nonzero and adjacent indices sum to 0 mod d.
bool theorem_allows_nonzero(const std::vector<int>& shifts, int d);

/// Contexts whose elements act as pure position shifts and whose phi-tilde
/// on a bare block depends only on the position steps. Both exact engines
/// (diagonal parts of an R-cyclic model, powers of S) have this form, which
/// lets scans evaluate cumulants through one Moebius sum per index word and
/// attach diagonal probes as exact scalar factors. Equivalence with the
/// generic nested evaluator is asserted by tests.
class ShiftStructuredContext {
public:
    virtual ~ShiftStructuredContext() = default;
    virtual int dim() const = 0;
    virtual Poly block_moment(const std::vector<std::pair<int, int>>& steps) const = 0;
};

/// Shift-structured view of a YContext.
class YShiftContext final : public ShiftStructuredContext {
public:
    explicit YShiftContext(const YContext& ctx) : ctx_(&ctx) {}
    int dim() const override { return ctx_->dim(); }
    Poly block_moment(const std::vector<std::pair<int, int>>& steps) const override {
        return ctx_->step_block_moment(steps);
    }

private:
    const YContext* ctx_;
};

/// Shift-structured context of the powers of S in M_d(C): the phi-tilde of
/// a product of S-powers is the identity when the shifts cancel, else zero.
class SPowerContext final : public ShiftStructuredContext {
public:
    explicit SPowerContext(int d) : d_(d) {}
    int dim() const override { return d_; }
    Poly block_moment(const std::vector<std::pair<int, int>>& steps) const override {
        int total = 0;
        for (const auto& [from, to] : steps) total += (to - from + d_) % d_;
        return total % d_ == 0 ? Poly(Rational(1)) : Poly();
    }

private:
    int d_;
};

/// kappa-tilde slot values of a bare index word (unit multipliers) over a
/// shift-structured context.
std::vector<Poly> bare_cumulant_slots(const ShiftStructuredContext& ctx,
                                      const std::vector<int>& shifts);

/// Exhaustive exact scan of all words Y_{i_1} D_1 ... Y_{i_r} D_r with
/// r <= max_r and probes from the option set: asserts exact zeros outside
/// the theorem pattern. When expected_alternating is given (uniform Wishart
/// models), identity-probe alternating words are asserted to equal it in
/// every slot.
VanishingReport theorem_pattern_check(const YContext& ctx, const ScanOptions& opt,
                                      const Poly* expected_alternating = nullptr);

/// Numeric counterpart over Monte Carlo trials: cumulants are computed per
/// trial and averaged; expected-zero words must satisfy
/// |mean| <= max(4 stderr, abs_floor) in every slot.
VanishingReport theorem_pattern_check_mc(const McContext& ctx, const ScanOptions& opt);

/// Scans all sign words up to max_n on the pair (y_plus, y_minus); expects
/// zero except for even-length alternating words, whose values are reported
/// (and asserted equal to expected_alternating when given).
VanishingReport r_diagonal_pair_test(const YContext& ctx, int y_plus, int y_minus, int max_n,
                                     const Poly* expected_alternating = nullptr);
VanishingReport r_diagonal_pair_test_mc(const McContext& ctx, int y_plus, int y_minus,
                                        int max_n, double abs_floor = 1e-2);

/// Exact check of the S-power cumulant lemma in M_d(C): (i) kappa-tilde of
/// S^{i_1} D_1 ... S^{i_r} D_r vanishes whenever the shifts do not sum to 0
/// mod d; (ii) the alternating-pair words (S^{k_1} D, S^{-k_1} D, ...) and
/// their one-step rotation vanish unless all k_j agree mod d.
VanishingReport s_cumulant_check(int d, int max_r, const ScanOptions& opt);

/// Exact scan asserting kappa-tilde = 0 whenever the index sum is nonzero
/// mod d; words with zero index sum are recorded, not asserted.
VanishingReport off_diagonal_vanishing_check(const YContext& ctx, const ScanOptions& opt);

/// Odd-order cumulants of the middle part Y_{d/2} (d even) must vanish.
VanishingReport even_part_check(const YContext& ctx, int max_order);

}  // namespace rcx
