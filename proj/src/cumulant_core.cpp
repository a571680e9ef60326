#include "rcx/cumulant_core.hpp"

#include <numeric>

namespace rcx {

namespace {

void check_cap(const HandleWord& word) {
    if (word.empty()) throw std::invalid_argument("empty word");
    if (static_cast<int>(word.size()) > kScalarWordCap)
        throw std::length_error("word length exceeds cap");
}

}  // namespace

Poly cumulants_to_moments(const CumulantSpec& k, const HandleWord& word) {
    check_cap(word);
    const NCTable& t = nc_table(static_cast<int>(word.size()));
    Poly acc;
    for (const auto& pi : t.partitions) acc += multiplicative_extension(k, pi, word);
    return acc;
}

Poly moments_to_cumulants(const MultilinearFunctional& m, const HandleWord& word) {
    check_cap(word);
    const NCTable& t = nc_table(static_cast<int>(word.size()));
    Poly acc;
    for (std::size_t i = 0; i < t.partitions.size(); ++i) {
        Poly ext = multiplicative_extension(m, t.partitions[i], word);
        acc += ext.scaled(Rational(t.mobius_top[i]));
    }
    return acc;
}

Poly grouped_cumulant(const CumulantSpec& k, const std::vector<int>& lengths,
                      const HandleWord& word) {
    check_cap(word);
    int n = std::accumulate(lengths.begin(), lengths.end(), 0);
    if (n != static_cast<int>(word.size()))
        throw std::invalid_argument("grouped_cumulant: lengths do not sum to word size");
    Partition sigma = interval_sigma(lengths);
    Partition top = Partition::full(n);
    const NCTable& t = nc_table(n);
    Poly acc;
    for (const auto& pi : t.partitions)
        if (join_nc(pi, sigma) == top) acc += multiplicative_extension(k, pi, word);
    return acc;
}

}  // namespace rcx
