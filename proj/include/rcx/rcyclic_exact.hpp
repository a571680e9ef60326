#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rcx/dval.hpp"
#include "rcx/poly.hpp"

namespace rcx {

inline constexpr int kEntryWordCap = 10;  // NC(10) has 16796 elements

/// Word of matrix-entry positions (i, j), with an optional scalar weight per
/// letter. Indices are 0-based modulo the model dimension.
struct EntryWord {
    std::vector<std::pair<int, int>> entries;
    std::vector<Poly> weights;  // empty, or one weight per letter

    int size() const { return static_cast<int>(entries.size()); }
};

/// Entry-cumulant specification of an R-cyclic d x d matrix: the joint free
/// cumulant of a tuple of entries, zero unless the tuple is cyclic
/// (j_1 = i_2, ..., j_s = i_1 mod d). The evaluation engine enforces
/// cyclicity independently, so a misbehaving table cannot leak non-cyclic
/// values into moments.
class EntryCumulantModel {
public:
    /// Uniform model: every cyclic tuple gets the same value.
    static EntryCumulantModel make_uniform(int d, Poly value);
    /// Explicit model over cyclic tuples keyed by their first-index sequence.
    static EntryCumulantModel make_explicit(int d,
                                            std::unordered_map<std::uint64_t, Poly> table);

    int d() const { return d_; }
    bool uniform() const { return uniform_; }
    const Poly& uniform_value() const { return uniform_value_; }
    std::uint64_t id() const { return id_; }

    /// True iff j_t == i_{t+1} (mod d) cyclically.
    bool is_cyclic(const std::vector<std::pair<int, int>>& tuple) const;

    /// kappa_{|tuple|} of the entry tuple; zero for non-cyclic tuples.
    Poly kappa(const std::vector<std::pair<int, int>>& tuple) const;

    /// Packs an index sequence i_1..i_s (the cyclic tuple with
    /// j_t = i_{t+1}) into a table key. Requires s <= 15 and d <= 16.
    static std::uint64_t pack_key(const std::vector<int>& i_seq);

    /// Installs an arbitrary evaluator (test hook); the engine still zeroes
    /// non-cyclic tuples before consulting it. Re-keys the model so cached
    /// moments of the previous evaluator are not reused.
    void set_custom(std::function<Poly(const std::vector<std::pair<int, int>>&)> fn);

    std::string to_json() const;
    static EntryCumulantModel from_json(const std::string& text);

    const std::unordered_map<std::uint64_t, Poly>& table() const { return table_; }

private:
    EntryCumulantModel() = default;

    int d_{1};
    bool uniform_{true};
    Poly uniform_value_;
    std::unordered_map<std::uint64_t, Poly> table_;
    std::function<Poly(const std::vector<std::pair<int, int>>&)> custom_;
    std::uint64_t id_{0};
};

/// Joint moment of a word of matrix entries: sum over NC(n), each partition
/// contributing the product of entry cumulants over its blocks, with blocks
/// on non-cyclic tuples pruned to zero. Memoized per (model, word) in
/// thread-local caches.
Poly entry_moment(const EntryCumulantModel& model, const EntryWord& w);

/// Drops thread-local entry-moment caches (bounds memory across many models).
void clear_entry_moment_cache();

/// Uniform model of the rescaled Wishart limit: every cyclic tuple of every
/// length has cumulant c * d1, making the diagonal entries MP_{c d1} and
/// phi(w w^t) = c/d1 + c^2.
EntryCumulantModel wishart_entry_model(int d1, Poly c);
EntryCumulantModel wishart_entry_model(int d1);  // symbolic c

/// Evaluation context whose elements are the diagonal decomposition parts
/// of the modeled matrix (transposed: Y_0..Y_{d-1} of X^t, else X_0..X_{d-1}
/// of X). The (s,s) entry of a product of parts is a single path product of
/// matrix entries; its trace is an entry moment.
class YContext final : public EvaluationContext<Poly> {
public:
    YContext(const EntryCumulantModel& model, bool transposed)
        : model_(&model), transposed_(transposed) {}

    int dim() const override { return model_->d(); }
    DiagVec<Poly> moment(const DWord<Poly>& w) const override;

    /// Bare path-block moment for the scan fast path: the phi-tilde value of
    /// a block whose letters take positions from -> to, with unit multipliers.
    Poly step_block_moment(const std::vector<std::pair<int, int>>& steps) const;

    const EntryCumulantModel& model() const { return *model_; }
    bool transposed() const { return transposed_; }

private:
    const EntryCumulantModel* model_;
    bool transposed_;
};

inline YContext y_context(const EntryCumulantModel& model, bool transposed = true) {
    return YContext(model, transposed);
}

/// One letter of a scalar-trace word: a diagonal part (fixed shift k) or the
/// full matrix (sum over all shifts), of the plain or transposed matrix.
struct PhiLetter {
    bool full{false};
    int k{0};
    bool transposed{true};
    Rational weight{1};

    static PhiLetter Yk(int k) { return {false, k, true, Rational(1)}; }
    static PhiLetter Xk(int k) { return {false, k, false, Rational(1)}; }
    static PhiLetter full_transposed(Rational w = Rational(1)) { return {true, 0, true, w}; }
    static PhiLetter full_plain(Rational w = Rational(1)) { return {true, 0, false, w}; }
};

/// Normalized trace phi of a product of diagonal parts and full-matrix
/// letters: averages the slot values of the path expansion over all d slots.
Poly scalar_phi(const EntryCumulantModel& model, const std::vector<PhiLetter>& word);

/// Random non-uniform R-cyclic model: independent small rationals on every
/// cyclic tuple of length <= max_len. Deterministic in the seed.
EntryCumulantModel random_rcyclic_model(int d, int max_len, std::uint64_t seed);

}  // namespace rcx
