#include "rcx/ncpart.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace rcx {

Partition::Partition(int n, std::vector<std::vector<int>> blocks) : n_(n) {
    if (n <= 0) throw std::invalid_argument("Partition: n must be positive");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("Partition: empty block");
        std::sort(b.begin(), b.end());
        for (int e : b) {
            if (e < 0 || e >= n) throw std::invalid_argument("Partition: element out of range");
            if (seen[static_cast<std::size_t>(e)])
                throw std::invalid_argument("Partition: duplicate element");
            seen[static_cast<std::size_t>(e)] = true;
        }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw std::invalid_argument("Partition: blocks do not cover the ground set");
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    blocks_ = std::move(blocks);
    block_of_.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi)
        for (int e : blocks_[bi]) block_of_[static_cast<std::size_t>(e)] = static_cast<int>(bi);
}

Partition Partition::singletons(int n) {
    std::vector<std::vector<int>> blocks;
    blocks.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) blocks.push_back({i});
    return Partition(n, std::move(blocks));
}

Partition Partition::full(int n) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    return Partition(n, {all});
}

std::string Partition::to_string() const {
    std::string s;
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        if (bi) s += '/';
        for (std::size_t j = 0; j < blocks_[bi].size(); ++j) {
            if (j) s += ',';
            s += std::to_string(blocks_[bi][j]);
        }
    }
    return s;
}

Partition Partition::from_string(int n, const std::string& s) {
    std::vector<std::vector<int>> blocks;
    std::stringstream outer(s);
    std::string blk;
    while (std::getline(outer, blk, '/')) {
        std::vector<int> b;
        std::stringstream inner(blk);
        std::string el;
        while (std::getline(inner, el, ',')) b.push_back(std::stoi(el));
        blocks.push_back(std::move(b));
    }
    return Partition(n, std::move(blocks));
}

std::size_t Partition::hash() const {
    std::size_t h = std::hash<int>{}(n_);
    for (int b : block_of_) h ^= std::hash<int>{}(b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

bool leq(const Partition& p, const Partition& q) {
    if (p.n() != q.n()) throw std::invalid_argument("leq: mismatched ground sets");
    for (const auto& b : p.blocks()) {
        int qb = q.block_of(b.front());
        for (int e : b)
            if (q.block_of(e) != qb) return false;
    }
    return true;
}

bool is_noncrossing(const Partition& p) {
    // Left-to-right scan keeping a stack of open blocks: each non-initial
    // element must belong to the block currently on top.
    int n = p.n();
    std::vector<int> first(static_cast<std::size_t>(p.num_blocks()), -1);
    std::vector<int> last(static_cast<std::size_t>(p.num_blocks()), -1);
    for (const auto& b : p.blocks()) {
        int bi = p.block_of(b.front());
        first[static_cast<std::size_t>(bi)] = b.front();
        last[static_cast<std::size_t>(bi)] = b.back();
    }
    std::vector<int> stack;
    for (int i = 0; i < n; ++i) {
        int b = p.block_of(i);
        if (first[static_cast<std::size_t>(b)] == i) {
            stack.push_back(b);
        } else if (stack.empty() || stack.back() != b) {
            return false;
        }
        if (last[static_cast<std::size_t>(b)] == i) stack.pop_back();
    }
    return true;
}

namespace {

// Depth-first generator over segments. The block containing the smallest
// element of a segment is built left to right; each skipped gap becomes an
// independent segment. This produces every non-crossing partition exactly
// once, with blocks created in order of their minima (canonical order).
struct NCGen {
    const std::function<void(const Partition&)>& fn;
    int n;
    std::vector<std::vector<int>> blocks;
    std::vector<std::pair<int, int>> segments;  // pending [lo, hi) ranges

    void run() {
        segments.push_back({0, n});
        next_segment();
    }

    void next_segment() {
        if (segments.empty()) {
            fn(Partition(n, blocks));
            return;
        }
        auto [lo, hi] = segments.back();
        segments.pop_back();
        blocks.push_back({lo});
        extend(lo, hi);
        blocks.pop_back();
        segments.push_back({lo, hi});
    }

    // current block ends at `last`; remaining candidates are (last, hi)
    void extend(int last, int hi) {
        // close the block here
        if (last + 1 < hi) {
            segments.push_back({last + 1, hi});
            next_segment();
            segments.pop_back();
        } else {
            next_segment();
        }
        // or append a further element, leaving a gap segment
        for (int nxt = last + 1; nxt < hi; ++nxt) {
            blocks.back().push_back(nxt);
            if (nxt > last + 1) segments.push_back({last + 1, nxt});
            extend(nxt, hi);
            if (nxt > last + 1) segments.pop_back();
            blocks.back().pop_back();
        }
    }
};

}  // namespace

void for_each_nc(int n, const std::function<void(const Partition&)>& fn) {
    if (n <= 0) throw std::invalid_argument("for_each_nc: n must be positive");
    NCGen gen{fn, n, {}, {}};
    gen.run();
}

std::uint64_t catalan(int n) {
    if (n < 0) throw std::invalid_argument("catalan: negative n");
    // C_0 = 1, C_{k+1} = sum_i C_i C_{k-i}
    std::vector<std::uint64_t> c(static_cast<std::size_t>(n) + 1, 0);
    c[0] = 1;
    for (int k = 1; k <= n; ++k)
        for (int i = 0; i < k; ++i)
            c[static_cast<std::size_t>(k)] +=
                c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(k - 1 - i)];
    return c[static_cast<std::size_t>(n)];
}

std::vector<Partition> enumerate_nc(int n) {
    if (n < 1) throw std::invalid_argument("enumerate_nc: n must be positive");
    if (n > kEnumerationCap)
        throw std::length_error("enumerate_nc: n exceeds the enumeration cap of 14");
    std::vector<Partition> out;
    out.reserve(catalan(n));
    for_each_nc(n, [&](const Partition& p) { out.push_back(p); });
    return out;
}

Partition join_nc(const Partition& p, const Partition& q) {
    if (p.n() != q.n()) throw std::invalid_argument("join_nc: mismatched ground sets");
    int n = p.n();

    // full-lattice join via union-find over block overlaps
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };
    for (const auto& b : p.blocks())
        for (std::size_t j = 1; j < b.size(); ++j) unite(b[0], b[j]);
    for (const auto& b : q.blocks())
        for (std::size_t j = 1; j < b.size(); ++j) unite(b[0], b[j]);

    std::map<int, std::vector<int>> grouped;
    for (int i = 0; i < n; ++i) grouped[find(i)].push_back(i);
    std::vector<std::vector<int>> blocks;
    for (auto& [root, members] : grouped) blocks.push_back(std::move(members));

    // crossing-merge fixpoint: merge any two interleaved blocks
    auto blocks_cross = [](const std::vector<int>& A, const std::vector<int>& B) {
        // walk elements in order; crossing iff the block label alternates
        // at least three times (pattern A..B..A..B)
        std::size_t i = 0, j = 0;
        int changes = -1, lastLabel = -1;
        while (i < A.size() || j < B.size()) {
            int label = (j >= B.size() || (i < A.size() && A[i] < B[j])) ? 0 : 1;
            if (label == 0) ++i; else ++j;
            if (label != lastLabel) { ++changes; lastLabel = label; }
        }
        return changes >= 3;
    };
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < blocks.size() && !merged; ++a) {
            for (std::size_t b = a + 1; b < blocks.size() && !merged; ++b) {
                if (blocks_cross(blocks[a], blocks[b])) {
                    blocks[a].insert(blocks[a].end(), blocks[b].begin(), blocks[b].end());
                    std::sort(blocks[a].begin(), blocks[a].end());
                    blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(b));
                    merged = true;
                }
            }
        }
    }
    return Partition(n, std::move(blocks));
}

namespace {

// cached enumeration shared by mobius_nc and nc_table
const std::vector<Partition>& nc_list(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<std::vector<Partition>>> lists;
    std::lock_guard<std::mutex> lock(mu);
    auto it = lists.find(n);
    if (it == lists.end())
        it = lists.emplace(n, std::make_unique<std::vector<Partition>>(enumerate_nc(n))).first;
    return *it->second;
}

struct MobiusMemo {
    std::mutex mu;
    std::map<std::pair<Partition, Partition>, long long> cache;
};

MobiusMemo& mobius_memo() {
    static MobiusMemo m;
    return m;
}

long long mobius_rec(const Partition& p, const Partition& q,
                     const std::vector<Partition>& all) {
    if (p == q) return 1;
    {
        auto& m = mobius_memo();
        std::lock_guard<std::mutex> lock(m.mu);
        auto it = m.cache.find({p, q});
        if (it != m.cache.end()) return it->second;
    }
    long long acc = 0;
    for (const auto& s : all)
        if (!(s == q) && leq(p, s) && leq(s, q)) acc += mobius_rec(p, s, all);
    long long val = -acc;
    auto& m = mobius_memo();
    std::lock_guard<std::mutex> lock(m.mu);
    m.cache.emplace(std::make_pair(p, q), val);
    return val;
}

}  // namespace

long long mobius_nc(const Partition& p, const Partition& q) {
    if (p.n() != q.n()) throw std::invalid_argument("mobius_nc: mismatched ground sets");
    if (!leq(p, q)) return 0;
    return mobius_rec(p, q, nc_list(p.n()));
}

Partition interval_sigma(const std::vector<int>& lengths) {
    if (lengths.empty()) throw std::invalid_argument("interval_sigma: empty lengths");
    std::vector<std::vector<int>> blocks;
    int next = 0;
    for (int len : lengths) {
        if (len <= 0) throw std::invalid_argument("interval_sigma: lengths must be positive");
        std::vector<int> b(static_cast<std::size_t>(len));
        std::iota(b.begin(), b.end(), next);
        next += len;
        blocks.push_back(std::move(b));
    }
    return Partition(next, std::move(blocks));
}

namespace {

std::unique_ptr<NCTable> build_table(int n) {
    auto t = std::make_unique<NCTable>();
    t->n = n;
    t->partitions = nc_list(n);
    std::size_t count = t->partitions.size();

    t->block_masks.resize(count);
    std::unordered_map<Partition, std::size_t> index;
    index.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        index.emplace(t->partitions[i], i);
        for (const auto& b : t->partitions[i].blocks()) {
            std::uint32_t mask = 0;
            for (int e : b) mask |= (1u << e);
            t->block_masks[i].push_back(mask);
        }
    }

    // mu(pi, 1_n) by descending recursion from the top:
    // mu(1,1) = 1 and mu(pi,1) = -sum_{sigma > pi} mu(sigma,1).
    // Equivalent to the defining recursion (cross-checked in tests).
    std::vector<std::pair<int, std::size_t>> order;  // (num_blocks, index)
    order.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        order.push_back({t->partitions[i].num_blocks(), i});
    std::sort(order.begin(), order.end());

    t->mobius_top.assign(count, 0);
    for (auto [nb, i] : order) {
        if (nb == 1) {
            t->mobius_top[i] = 1;
            continue;
        }
        long long acc = 0;
        for (auto [nb2, j] : order) {
            if (nb2 >= nb) break;  // coarser partitions have fewer blocks
            if (leq(t->partitions[i], t->partitions[j])) acc += t->mobius_top[j];
        }
        t->mobius_top[i] = -acc;
    }
    return t;
}

}  // namespace

const NCTable& nc_table(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<NCTable>> tables;
    std::lock_guard<std::mutex> lock(mu);
    auto it = tables.find(n);
    if (it == tables.end()) it = tables.emplace(n, build_table(n)).first;
    return *it->second;
}

}  // namespace rcx
