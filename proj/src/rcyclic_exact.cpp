#include "rcx/rcyclic_exact.hpp"

#include <atomic>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rcx {

namespace {

std::atomic<std::uint64_t> next_model_id{1};

std::uint64_t fresh_model_id() { return next_model_id.fetch_add(1); }

}  // namespace

EntryCumulantModel EntryCumulantModel::make_uniform(int d, Poly value) {
    if (d < 1) throw std::invalid_argument("EntryCumulantModel: d must be positive");
    EntryCumulantModel m;
    m.d_ = d;
    m.uniform_ = true;
    m.uniform_value_ = std::move(value);
    m.id_ = fresh_model_id();
    return m;
}

EntryCumulantModel EntryCumulantModel::make_explicit(
    int d, std::unordered_map<std::uint64_t, Poly> table) {
    if (d < 1) throw std::invalid_argument("EntryCumulantModel: d must be positive");
    EntryCumulantModel m;
    m.d_ = d;
    m.uniform_ = false;
    m.table_ = std::move(table);
    m.id_ = fresh_model_id();
    return m;
}

bool EntryCumulantModel::is_cyclic(const std::vector<std::pair<int, int>>& tuple) const {
    int s = static_cast<int>(tuple.size());
    for (int t = 0; t < s; ++t) {
        int j = tuple[static_cast<std::size_t>(t)].second;
        int i_next = tuple[static_cast<std::size_t>((t + 1) % s)].first;
        if ((j - i_next) % d_ != 0) return false;
    }
    return true;
}

std::uint64_t EntryCumulantModel::pack_key(const std::vector<int>& i_seq) {
    if (i_seq.size() > 15) throw std::length_error("pack_key: tuple too long");
    std::uint64_t key = static_cast<std::uint64_t>(i_seq.size());
    for (std::size_t t = 0; t < i_seq.size(); ++t) {
        if (i_seq[t] < 0 || i_seq[t] > 15) throw std::domain_error("pack_key: index out of range");
        key |= static_cast<std::uint64_t>(i_seq[t]) << (4 * (t + 1));
    }
    return key;
}

void EntryCumulantModel::set_custom(
    std::function<Poly(const std::vector<std::pair<int, int>>&)> fn) {
    custom_ = std::move(fn);
    id_ = fresh_model_id();
}

Poly EntryCumulantModel::kappa(const std::vector<std::pair<int, int>>& tuple) const {
    if (!is_cyclic(tuple)) return Poly();
    if (custom_) return custom_(tuple);
    if (uniform_) return uniform_value_;
    std::vector<int> iseq;
    iseq.reserve(tuple.size());
    for (const auto& [i, j] : tuple) iseq.push_back(i);
    auto it = table_.find(pack_key(iseq));
    return it == table_.end() ? Poly() : it->second;
}

namespace {

// memoization key: model id plus the packed entry word
struct WordKey {
    std::uint64_t model;
    std::string word;
    bool operator==(const WordKey& o) const { return model == o.model && word == o.word; }
};

struct WordKeyHash {
    std::size_t operator()(const WordKey& k) const {
        std::size_t h = std::hash<std::uint64_t>{}(k.model);
        h ^= std::hash<std::string>{}(k.word) + 0x9e3779b97f4a7c15ULL + (h << 6);
        return h;
    }
};

using MomentCache = std::unordered_map<WordKey, Poly, WordKeyHash>;

MomentCache& moment_cache() {
    thread_local MomentCache cache;
    return cache;
}

std::string pack_word(const EntryWord& w) {
    std::string s;
    s.reserve(static_cast<std::size_t>(w.size()) * 2);
    for (const auto& [i, j] : w.entries) {
        s.push_back(static_cast<char>(i));
        s.push_back(static_cast<char>(j));
    }
    return s;
}

Poly entry_moment_bare(const EntryCumulantModel& model,
                       const std::vector<std::pair<int, int>>& entries) {
    int n = static_cast<int>(entries.size());
    const NCTable& t = nc_table(n);

    // block values by position mask, computed lazily
    std::vector<char> have(static_cast<std::size_t>(1) << n, 0);
    std::vector<Poly> val(static_cast<std::size_t>(1) << n);
    auto block_value = [&](std::uint32_t mask) -> const Poly& {
        if (!have[mask]) {
            std::vector<std::pair<int, int>> sub;
            for (int e = 0; e < n; ++e)
                if (mask & (1u << e)) sub.push_back(entries[static_cast<std::size_t>(e)]);
            val[mask] = model.kappa(sub);
            have[mask] = 1;
        }
        return val[mask];
    };

    Poly acc;
    for (std::size_t pi = 0; pi < t.partitions.size(); ++pi) {
        Poly term(Rational(1));
        for (std::uint32_t mask : t.block_masks[pi]) {
            const Poly& bv = block_value(mask);
            if (bv.is_zero()) {
                term = Poly();
                break;
            }
            term *= bv;
        }
        acc += term;
    }
    return acc;
}

}  // namespace

Poly entry_moment(const EntryCumulantModel& model, const EntryWord& w) {
    if (w.size() == 0) throw std::invalid_argument("entry_moment: empty word");
    if (w.size() > kEntryWordCap) throw std::length_error("entry_moment: word length exceeds cap");
    for (const auto& [i, j] : w.entries)
        if (i < 0 || i >= model.d() || j < 0 || j >= model.d())
            throw std::out_of_range("entry_moment: index out of range");
    if (!w.weights.empty() && w.weights.size() != w.entries.size())
        throw std::invalid_argument("entry_moment: weight count mismatch");

    WordKey key{model.id(), pack_word(w)};
    auto& cache = moment_cache();
    Poly bare;
    auto it = cache.find(key);
    if (it != cache.end()) {
        bare = it->second;
    } else {
        bare = entry_moment_bare(model, w.entries);
        cache.emplace(std::move(key), bare);
    }
    if (w.weights.empty()) return bare;
    Poly scale(Rational(1));
    for (const auto& wt : w.weights) scale *= wt;
    return bare * scale;
}

void clear_entry_moment_cache() { moment_cache().clear(); }

EntryCumulantModel wishart_entry_model(int d1, Poly c) {
    if (d1 < 1) throw std::invalid_argument("wishart_entry_model: d1 must be positive");
    return EntryCumulantModel::make_uniform(d1, c * Poly(Rational(d1)));
}

EntryCumulantModel wishart_entry_model(int d1) {
    return wishart_entry_model(d1, Poly::symbol("c"));
}

DiagVec<Poly> YContext::moment(const DWord<Poly>& w) const {
    int d = model_->d();
    DiagVec<Poly> out = DiagVec<Poly>::zeros(d);
    for (int s = 0; s < d; ++s) {
        int p = s;
        EntryWord path;
        Poly scale = w.lead[s];
        bool dead = scale.is_zero();
        for (const auto& letter : w.letters) {
            if (dead) break;
            int k = letter.handle;
            if (k < 0 || k >= d) throw std::out_of_range("YContext: element handle out of range");
            int q = (p + k) % d;
            path.entries.push_back(transposed_ ? std::make_pair(q, p) : std::make_pair(p, q));
            scale *= letter.right[q];
            dead = scale.is_zero();
            p = q;
        }
        if (dead || p != s) continue;  // non-closing path: the (s,s) entry is 0
        out[s] = entry_moment(*model_, path) * scale;
    }
    return out;
}

Poly YContext::step_block_moment(const std::vector<std::pair<int, int>>& steps) const {
    EntryWord path;
    path.entries.reserve(steps.size());
    for (const auto& [from, to] : steps)
        path.entries.push_back(transposed_ ? std::make_pair(to, from) : std::make_pair(from, to));
    return entry_moment(*model_, path);
}

namespace {

void phi_paths(const EntryCumulantModel& model, const std::vector<PhiLetter>& word,
               std::size_t t, int start, int p, EntryWord& path, Poly& acc) {
    if (t == word.size()) {
        if (p == start) acc += entry_moment(model, path);
        return;
    }
    const PhiLetter& letter = word[t];
    int d = model.d();
    int klo = letter.full ? 0 : ((letter.k % d) + d) % d;
    int khi = letter.full ? d - 1 : klo;
    for (int k = klo; k <= khi; ++k) {
        int q = (p + k) % d;
        path.entries.push_back(letter.transposed ? std::make_pair(q, p) : std::make_pair(p, q));
        phi_paths(model, word, t + 1, start, q, path, acc);
        path.entries.pop_back();
    }
}

}  // namespace

Poly scalar_phi(const EntryCumulantModel& model, const std::vector<PhiLetter>& word) {
    if (word.empty()) throw std::invalid_argument("scalar_phi: empty word");
    if (static_cast<int>(word.size()) > kEntryWordCap)
        throw std::length_error("scalar_phi: word length exceeds cap");
    Rational weight(1);
    for (const auto& l : word) weight *= l.weight;
    Poly acc;
    for (int s = 0; s < model.d(); ++s) {
        EntryWord path;
        phi_paths(model, word, 0, s, s, path, acc);
    }
    return acc.scaled(weight / Rational(model.d()));
}

EntryCumulantModel random_rcyclic_model(int d, int max_len, std::uint64_t seed) {
    if (d < 1 || d > 15) throw std::invalid_argument("random_rcyclic_model: d out of range");
    // splitmix64 stream
    std::uint64_t state = seed;
    auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::unordered_map<std::uint64_t, Poly> table;
    std::vector<int> iseq;
    // enumerate all index sequences of each length
    std::function<void(int)> gen = [&](int len) {
        if (static_cast<int>(iseq.size()) == len) {
            std::int64_t num = static_cast<std::int64_t>(next() % 7) - 3;  // -3..3
            std::int64_t den = static_cast<std::int64_t>(next() % 4) + 1;  // 1..4
            if (num != 0) table.emplace(EntryCumulantModel::pack_key(iseq), Poly(Rational(num, den)));
            return;
        }
        for (int i = 0; i < d; ++i) {
            iseq.push_back(i);
            gen(len);
            iseq.pop_back();
        }
    };
    for (int len = 1; len <= max_len; ++len) gen(len);
    return EntryCumulantModel::make_explicit(d, std::move(table));
}

std::string EntryCumulantModel::to_json() const {
    nlohmann::ordered_json j;
    j["d"] = d_;
    auto poly_json = [](const Poly& p) {
        nlohmann::ordered_json pj = nlohmann::ordered_json::object();
        for (const auto& [m, c] : p.terms()) pj[m.to_string()] = c.to_string();
        return pj;
    };
    if (uniform_) {
        j["uniform"] = {{"value", poly_json(uniform_value_)}};
    } else {
        nlohmann::ordered_json t = nlohmann::ordered_json::object();
        // tuple key: "i1,j1;i2,j2;..." with j_t = i_{t+1}
        for (const auto& [key, value] : table_) {
            int len = static_cast<int>(key & 0xF);
            std::string ks;
            for (int t2 = 0; t2 < len; ++t2) {
                int i = static_cast<int>((key >> (4 * (t2 + 1))) & 0xF);
                int jn = static_cast<int>((key >> (4 * ((t2 + 1) % len + 1))) & 0xF);
                if (t2) ks += ';';
                ks += std::to_string(i) + "," + std::to_string(jn);
            }
            t[ks] = poly_json(value);
        }
        j["explicit"] = t;
    }
    return j.dump();
}

EntryCumulantModel EntryCumulantModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int d = j.at("d").get<int>();
    auto poly_from = [](const nlohmann::json& pj) {
        Poly p;
        for (auto it = pj.begin(); it != pj.end(); ++it) {
            Poly term(Rational::from_string(it.value().get<std::string>()));
            const std::string& mono = it.key();
            if (mono != "1") {
                std::size_t pos = 0;
                while (pos < mono.size()) {
                    std::size_t star = mono.find('*', pos);
                    std::string factor = mono.substr(pos, star == std::string::npos
                                                              ? std::string::npos
                                                              : star - pos);
                    std::size_t caret = factor.find('^');
                    std::string name = factor.substr(0, caret);
                    int exp = caret == std::string::npos ? 1 : std::stoi(factor.substr(caret + 1));
                    term *= Poly::symbol(name, exp);
                    if (star == std::string::npos) break;
                    pos = star + 1;
                }
            }
            p += term;
        }
        return p;
    };
    if (j.contains("uniform")) return make_uniform(d, poly_from(j["uniform"].at("value")));

    std::unordered_map<std::uint64_t, Poly> table;
    for (auto it = j.at("explicit").begin(); it != j.at("explicit").end(); ++it) {
        std::vector<int> iseq;
        std::stringstream ss(it.key());
        std::string pair;
        while (std::getline(ss, pair, ';'))
            iseq.push_back(std::stoi(pair.substr(0, pair.find(','))));
        table.emplace(pack_key(iseq), poly_from(it.value()));
    }
    return make_explicit(d, std::move(table));
}

}  // namespace rcx
