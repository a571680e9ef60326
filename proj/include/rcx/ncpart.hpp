#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace rcx {

/// Set partition of {0..n-1} in canonical form: blocks ordered by their
/// minimum, elements ascending inside each block. Two partitions are equal
/// iff their canonical forms are identical.
class Partition {
public:
    Partition(int n, std::vector<std::vector<int>> blocks);

    static Partition singletons(int n);  // 0_n
    static Partition full(int n);        // 1_n

    int n() const { return n_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    /// Index (in canonical order) of the block containing element i.
    int block_of(int i) const { return block_of_.at(static_cast<std::size_t>(i)); }

    bool operator==(const Partition& o) const {
        return n_ == o.n_ && block_of_ == o.block_of_;
    }
    bool operator!=(const Partition& o) const { return !(*this == o); }
    bool operator<(const Partition& o) const {
        if (n_ != o.n_) return n_ < o.n_;
        return block_of_ < o.block_of_;
    }

    /// Canonical text form: blocks joined by '/', elements by ','. "0,1/2/3"
    std::string to_string() const;
    static Partition from_string(int n, const std::string& s);

    std::size_t hash() const;

private:
    int n_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_;
};

/// Refinement order: every block of p is contained in a block of q.
bool leq(const Partition& p, const Partition& q);

/// True iff no indices a<b<c<d have {a,c} in one block and {b,d} in another.
bool is_noncrossing(const Partition& p);

/// Calls fn once for each non-crossing partition of {0..n-1}, in a fixed
/// deterministic order. No cap: use for streaming.
void for_each_nc(int n, const std::function<void(const Partition&)>& fn);

inline constexpr int kEnumerationCap = 14;  // Catalan(14) = 2,674,440

/// All non-crossing partitions of {0..n-1}. Throws std::length_error above
/// the enumeration cap.
std::vector<Partition> enumerate_nc(int n);

/// Number of non-crossing partitions of an n-set (n-th Catalan number).
std::uint64_t catalan(int n);

/// Least non-crossing upper bound of p and q: full-lattice join (transitive
/// closure of block overlaps) followed by repeated merging of crossing block
/// pairs until non-crossing.
Partition join_nc(const Partition& p, const Partition& q);

/// Moebius function of the interval [p, q] in NC(n), by the defining
/// recursion mu(p,p) = 1, mu(p,q) = -sum_{p <= s < q} mu(p,s), memoized.
/// Returns 0 when p is not below q.
long long mobius_nc(const Partition& p, const Partition& q);

/// Interval partition whose j-th block holds the next lengths[j] integers.
Partition interval_sigma(const std::vector<int>& lengths);

/// Cached per-n data used by the cumulant engines: the list of NC(n)
/// partitions, mu(pi, 1_n) for each, and each partition's blocks as bit
/// masks over positions.
struct NCTable {
    int n;
    std::vector<Partition> partitions;
    std::vector<long long> mobius_top;                   // mu(pi, 1_n)
    std::vector<std::vector<std::uint32_t>> block_masks; // per partition
};

/// Table for NC(n), built on first use and cached; safe for concurrent use.
const NCTable& nc_table(int n);

}  // namespace rcx

template <>
struct std::hash<rcx::Partition> {
    std::size_t operator()(const rcx::Partition& p) const { return p.hash(); }
};
