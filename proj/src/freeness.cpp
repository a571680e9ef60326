#include "rcx/freeness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "rcx/parallel.hpp"

namespace rcx {

std::vector<DiagProbe> default_probes(int d) {
    std::vector<DiagProbe> probes;
    probes.push_back({"I", std::vector<Rational>(static_cast<std::size_t>(d), Rational(1))});
    std::vector<Rational> ramp;
    for (int i = 0; i < d; ++i) ramp.push_back(Rational(i + 1));
    probes.push_back({"ramp", std::move(ramp)});
    std::vector<Rational> e0(static_cast<std::size_t>(d), Rational(0));
    e0[0] = Rational(1);
    probes.push_back({"e0", std::move(e0)});
    return probes;
}

bool theorem_allows_nonzero(const std::vector<int>& shifts, int d) {
    bool all_zero = std::all_of(shifts.begin(), shifts.end(), [](int k) { return k == 0; });
    if (all_zero) return true;
    if (shifts.size() % 2 != 0) return false;
    for (int k : shifts)
        if (k % d == 0) return false;
    for (std::size_t t = 0; t + 1 < shifts.size(); ++t)
        if ((shifts[t] + shifts[t + 1]) % d != 0) return false;
    return true;
}

std::vector<Poly> bare_cumulant_slots(const ShiftStructuredContext& ctx,
                                      const std::vector<int>& shifts) {
    int d = ctx.dim();
    int r = static_cast<int>(shifts.size());
    if (r == 0) throw std::invalid_argument("bare_cumulant_slots: empty word");
    if (r > kDValWordCap) throw std::length_error("bare_cumulant_slots: word length exceeds cap");
    const NCTable& table = nc_table(r);

    std::vector<Poly> out(static_cast<std::size_t>(d));
    std::vector<int> pos(static_cast<std::size_t>(r) + 1);
    std::vector<char> have(static_cast<std::size_t>(1) << r);
    std::vector<Poly> bv(static_cast<std::size_t>(1) << r);

    for (int s = 0; s < d; ++s) {
        pos[0] = s;
        for (int t = 0; t < r; ++t)
            pos[static_cast<std::size_t>(t) + 1] =
                (pos[static_cast<std::size_t>(t)] + shifts[static_cast<std::size_t>(t)]) % d;

        std::fill(have.begin(), have.end(), 0);
        auto block_value = [&](std::uint32_t mask) -> const Poly& {
            if (!have[mask]) {
                std::vector<std::pair<int, int>> steps;
                for (int e = 0; e < r; ++e)
                    if (mask & (1u << e))
                        steps.push_back({pos[static_cast<std::size_t>(e)],
                                         pos[static_cast<std::size_t>(e) + 1]});
                bv[mask] = ctx.block_moment(steps);
                have[mask] = 1;
            }
            return bv[mask];
        };

        Poly acc;
        for (std::size_t pi = 0; pi < table.partitions.size(); ++pi) {
            Poly term(Rational(1));
            bool dead = false;
            for (std::uint32_t mask : table.block_masks[pi]) {
                const Poly& v = block_value(mask);
                if (v.is_zero()) {
                    dead = true;
                    break;
                }
                term *= v;
            }
            if (!dead) acc += term.scaled(Rational(table.mobius_top[pi]));
        }
        out[static_cast<std::size_t>(s)] = std::move(acc);
    }
    return out;
}

namespace {

std::vector<DiagProbe> probes_with_identity(const std::vector<DiagProbe>& given, int d) {
    std::vector<DiagProbe> probes = given.empty() ? default_probes(d) : given;
    bool has_identity = std::any_of(probes.begin(), probes.end(), [&](const DiagProbe& p) {
        return std::all_of(p.entries.begin(), p.entries.end(),
                           [](const Rational& x) { return x.is_one(); });
    });
    if (!has_identity)
        probes.insert(probes.begin(),
                      {"I", std::vector<Rational>(static_cast<std::size_t>(d), Rational(1))});
    for (const auto& p : probes)
        if (static_cast<int>(p.entries.size()) != d)
            throw std::invalid_argument("probe dimension mismatch");
    return probes;
}

std::string render_diag(const std::vector<Poly>& slots) {
    std::string s = "(";
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i) s += ", ";
        s += slots[i].to_string();
    }
    return s + ")";
}

std::string render_word(const char* symbol, const std::vector<int>& shifts,
                        const std::vector<const DiagProbe*>* combo) {
    std::string s;
    for (std::size_t t = 0; t < shifts.size(); ++t) {
        if (t) s += ' ';
        s += symbol + std::to_string(shifts[t]);
        if (combo) s += "[" + (*combo)[t]->name + "]";
    }
    return s;
}

// per index word: scan every probe combination; probes enter the exact
// cumulant as per-slot scalar factors (the probe entries picked up along
// the position path), so each combination is decided exactly
struct WordOutcome {
    long long combos_checked{0};
    long long expected_zero{0};
    long long violations{0};
    std::vector<WordRecord> rows;
};

struct ExactScanSpec {
    const ShiftStructuredContext* ctx;
    std::vector<DiagProbe> probes;
    std::function<bool(const std::vector<int>&)> allowed;
    // assert identity-probe value on words matching this predicate
    std::function<bool(const std::vector<int>&)> assert_pred;
    Poly assert_value;
    const char* symbol{"Y"};
    std::size_t row_budget{16};  // per word
};

WordOutcome scan_one_word_exact(const ExactScanSpec& spec, const std::vector<int>& shifts) {
    const int d = spec.ctx->dim();
    const int r = static_cast<int>(shifts.size());
    const std::size_t np = spec.probes.size();
    WordOutcome out;

    std::vector<Poly> bare = bare_cumulant_slots(*spec.ctx, shifts);
    bool bare_zero = std::all_of(bare.begin(), bare.end(),
                                 [](const Poly& p) { return p.is_zero(); });
    bool allow = spec.allowed(shifts);

    // positions, for probe path scalars
    std::vector<int> pos(static_cast<std::size_t>(r) + 1);

    long long total_combos = 1;
    for (int t = 0; t < r; ++t) total_combos *= static_cast<long long>(np);
    out.combos_checked = total_combos;

    if (!allow) {
        out.expected_zero = total_combos;
        if (bare_zero) {
            out.rows.push_back({render_word(spec.symbol, shifts, nullptr) +
                                    " (all probe combinations)",
                                true, "0", 0, 0, false, false, ""});
            return out;
        }
        // a nonzero bare value violates unless every probe combination
        // kills every slot along its path
        std::vector<const DiagProbe*> combo(static_cast<std::size_t>(r), &spec.probes[0]);
        std::vector<std::size_t> odo(static_cast<std::size_t>(r), 0);
        while (true) {
            for (std::size_t t = 0; t < odo.size(); ++t) combo[t] = &spec.probes[odo[t]];
            bool violated = false;
            for (int s = 0; s < d && !violated; ++s) {
                if (bare[static_cast<std::size_t>(s)].is_zero()) continue;
                pos[0] = s;
                Rational scalar(1);
                for (int t = 0; t < r; ++t) {
                    pos[static_cast<std::size_t>(t) + 1] =
                        (pos[static_cast<std::size_t>(t)] + shifts[static_cast<std::size_t>(t)]) % d;
                    scalar *= combo[static_cast<std::size_t>(t)]
                                  ->entries[static_cast<std::size_t>(pos[static_cast<std::size_t>(t) + 1])];
                    if (scalar.is_zero()) break;
                }
                if (!scalar.is_zero()) violated = true;
            }
            if (violated) {
                ++out.violations;
                if (out.rows.size() < spec.row_budget)
                    out.rows.push_back({render_word(spec.symbol, shifts, &combo), true,
                                        render_diag(bare), 0, 0, false, true,
                                        "expected exact zero"});
            }
            // odometer
            std::size_t t = 0;
            for (; t < odo.size(); ++t) {
                if (++odo[t] < np) break;
                odo[t] = 0;
            }
            if (t == odo.size()) break;
        }
        return out;
    }

    // allowed word: record the identity-probe value, assert it when requested
    WordRecord row{render_word(spec.symbol, shifts, nullptr), false, render_diag(bare), 0, 0,
                   false, false, "allowed pattern"};
    if (spec.assert_pred && spec.assert_pred(shifts)) {
        bool ok = std::all_of(bare.begin(), bare.end(),
                              [&](const Poly& p) { return p == spec.assert_value; });
        if (!ok) {
            row.violation = true;
            row.note = "alternating value mismatch, expected " + spec.assert_value.to_string();
            ++out.violations;
        } else {
            row.note = "alternating value = " + spec.assert_value.to_string();
        }
    }
    out.rows.push_back(std::move(row));
    return out;
}

VanishingReport scan_words_exact(const ExactScanSpec& spec, std::string title,
                                 const std::vector<std::vector<int>>& words,
                                 const ScanOptions& opt) {
    VanishingReport report;
    report.title = std::move(title);
    std::vector<WordOutcome> outcomes(words.size());
    parallel_for(static_cast<int>(words.size()), opt.threads, [&](int i) {
        outcomes[static_cast<std::size_t>(i)] =
            scan_one_word_exact(spec, words[static_cast<std::size_t>(i)]);
    });
    for (const auto& o : outcomes) {
        report.words_checked += o.combos_checked;
        report.expected_zero_words += o.expected_zero;
        report.violations += o.violations;
        for (const auto& row : o.rows) {
            if (row.violation || report.rows.size() < opt.max_rows)
                report.rows.push_back(row);
            else
                report.truncated = true;
        }
    }
    return report;
}

std::vector<std::vector<int>> all_index_words(int d, int max_r) {
    std::vector<std::vector<int>> words;
    for (int r = 1; r <= max_r; ++r) {
        std::vector<int> w(static_cast<std::size_t>(r), 0);
        while (true) {
            words.push_back(w);
            int t = 0;
            for (; t < r; ++t) {
                if (++w[static_cast<std::size_t>(t)] < d) break;
                w[static_cast<std::size_t>(t)] = 0;
            }
            if (t == r) break;
        }
    }
    return words;
}

}  // namespace

VanishingReport theorem_pattern_check(const YContext& ctx, const ScanOptions& opt,
                                      const Poly* expected_alternating) {
    int d = ctx.dim();
    YShiftContext shift_ctx(ctx);
    ExactScanSpec spec;
    spec.ctx = &shift_ctx;
    spec.probes = probes_with_identity(opt.probes, d);
    spec.allowed = [d](const std::vector<int>& w) { return theorem_allows_nonzero(w, d); };
    if (expected_alternating) {
        spec.assert_pred = [d](const std::vector<int>& w) {
            return theorem_allows_nonzero(w, d) &&
                   !std::all_of(w.begin(), w.end(), [](int k) { return k == 0; });
        };
        spec.assert_value = *expected_alternating;
    }
    return scan_words_exact(spec, "theorem pattern (exact, d=" + std::to_string(d) + ")",
                            all_index_words(d, opt.max_r), opt);
}

VanishingReport off_diagonal_vanishing_check(const YContext& ctx, const ScanOptions& opt) {
    int d = ctx.dim();
    YShiftContext shift_ctx(ctx);
    ExactScanSpec spec;
    spec.ctx = &shift_ctx;
    spec.probes = probes_with_identity(opt.probes, d);
    spec.symbol = "M";
    spec.allowed = [d](const std::vector<int>& w) {
        int total = 0;
        for (int k : w) total += k;
        return total % d == 0;
    };
    return scan_words_exact(spec, "off-diagonal vanishing (d=" + std::to_string(d) + ")",
                            all_index_words(d, opt.max_r), opt);
}

VanishingReport s_cumulant_check(int d, int max_r, const ScanOptions& opt) {
    SPowerContext ctx(d);
    ExactScanSpec spec;
    spec.ctx = &ctx;
    spec.probes = probes_with_identity(opt.probes, d);
    spec.symbol = "S^";
    spec.allowed = [d](const std::vector<int>& w) {
        int total = 0;
        for (int k : w) total += k;
        return total % d == 0;
    };
    VanishingReport part1 = scan_words_exact(
        spec, "S-cumulants (i), d=" + std::to_string(d), all_index_words(d, max_r), opt);

    // part (ii): alternating-pair words and their one-step rotation must
    // vanish unless all pair indices agree mod d
    std::vector<std::vector<int>> words;
    for (int half = 2; 2 * half <= max_r; ++half) {
        std::vector<int> ks(static_cast<std::size_t>(half), 0);
        while (true) {
            bool all_equal = std::all_of(ks.begin(), ks.end(), [&](int k) { return k == ks[0]; });
            if (!all_equal) {  // the all-equal case is unconstrained
                std::vector<int> w;
                for (int k : ks) {
                    w.push_back(k);
                    w.push_back((d - k) % d);
                }
                words.push_back(w);
                std::vector<int> rotated(w.size());
                rotated[0] = w.back();
                std::copy(w.begin(), w.end() - 1, rotated.begin() + 1);
                words.push_back(rotated);
            }
            int t = 0;
            for (; t < half; ++t) {
                if (++ks[static_cast<std::size_t>(t)] < d) break;
                ks[static_cast<std::size_t>(t)] = 0;
            }
            if (t == half) break;
        }
    }
    ExactScanSpec spec2 = spec;
    spec2.allowed = [](const std::vector<int>&) { return false; };  // all listed words must vanish
    VanishingReport part2 =
        scan_words_exact(spec2, "S-cumulants (ii), d=" + std::to_string(d), words, opt);

    VanishingReport merged;
    merged.title = "S-cumulant lemma, d=" + std::to_string(d);
    merged.words_checked = part1.words_checked + part2.words_checked;
    merged.expected_zero_words = part1.expected_zero_words + part2.expected_zero_words;
    merged.violations = part1.violations + part2.violations;
    merged.truncated = part1.truncated || part2.truncated;
    merged.rows = std::move(part1.rows);
    merged.rows.insert(merged.rows.end(), part2.rows.begin(), part2.rows.end());
    return merged;
}

VanishingReport r_diagonal_pair_test(const YContext& ctx, int y_plus, int y_minus, int max_n,
                                     const Poly* expected_alternating) {
    if (y_plus == y_minus)
        throw std::invalid_argument("r_diagonal_pair_test: need two distinct elements");
    YShiftContext shift_ctx(ctx);
    VanishingReport report;
    report.title = "R-diagonal pair (Y" + std::to_string(y_plus) + ", Y" +
                   std::to_string(y_minus) + ")";
    for (int n = 1; n <= max_n; ++n) {
        std::vector<int> signs(static_cast<std::size_t>(n), 1);
        std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
        while (true) {
            for (std::size_t t = 0; t < odo.size(); ++t) signs[t] = odo[t] == 0 ? 1 : -1;
            bool alternating = n % 2 == 0;
            for (std::size_t t = 0; t + 1 < signs.size() && alternating; ++t)
                alternating = signs[t] == -signs[t + 1];

            std::vector<int> shifts;
            shifts.reserve(signs.size());
            for (int e : signs) shifts.push_back(e == 1 ? y_plus : y_minus);
            std::vector<Poly> value = bare_cumulant_slots(shift_ctx, shifts);
            bool zero = std::all_of(value.begin(), value.end(),
                                    [](const Poly& p) { return p.is_zero(); });

            std::string word;
            for (std::size_t t = 0; t < signs.size(); ++t) {
                if (t) word += ' ';
                word += signs[t] == 1 ? "y+" : "y-";
            }
            ++report.words_checked;
            WordRecord row{word, !alternating, render_diag(value), 0, 0, false, false, ""};
            if (!alternating) {
                ++report.expected_zero_words;
                if (!zero) {
                    row.violation = true;
                    row.note = "expected exact zero";
                    ++report.violations;
                }
            } else if (expected_alternating) {
                bool ok = std::all_of(value.begin(), value.end(),
                                      [&](const Poly& p) { return p == *expected_alternating; });
                if (!ok) {
                    row.violation = true;
                    row.note = "alternating value mismatch, expected " +
                               expected_alternating->to_string();
                    ++report.violations;
                } else {
                    row.note = "alternating value";
                }
            }
            report.rows.push_back(std::move(row));

            std::size_t t = 0;
            for (; t < odo.size(); ++t) {
                if (++odo[t] < 2) break;
                odo[t] = 0;
            }
            if (t == odo.size()) break;
        }
    }
    return report;
}

VanishingReport even_part_check(const YContext& ctx, int max_order) {
    int d = ctx.dim();
    if (d % 2 != 0) throw std::invalid_argument("even_part_check: d must be even");
    YShiftContext shift_ctx(ctx);
    VanishingReport report;
    report.title = "even part Y" + std::to_string(d / 2) + " (odd cumulants)";
    for (int r = 1; r <= max_order; r += 2) {
        std::vector<int> shifts(static_cast<std::size_t>(r), d / 2);
        std::vector<Poly> value = bare_cumulant_slots(shift_ctx, shifts);
        bool zero = std::all_of(value.begin(), value.end(),
                                [](const Poly& p) { return p.is_zero(); });
        ++report.words_checked;
        ++report.expected_zero_words;
        WordRecord row{render_word("Y", shifts, nullptr), true, render_diag(value), 0, 0,
                       false, false, "odd order"};
        if (!zero) {
            row.violation = true;
            ++report.violations;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

// numeric scans: cumulants per trial, then mean/stderr across trials
struct McWordSpec {
    std::vector<int> shifts;
    std::vector<const DiagProbe*> combo;  // may be empty (unit multipliers)
    bool expected_zero;
};

DWord<std::complex<double>> make_mc_word(int d, const McWordSpec& w) {
    DWord<std::complex<double>> word;
    word.lead = DiagVec<std::complex<double>>::ones(d);
    for (std::size_t t = 0; t < w.shifts.size(); ++t) {
        DiagVec<std::complex<double>> mult = DiagVec<std::complex<double>>::ones(d);
        if (!w.combo.empty())
            for (int i = 0; i < d; ++i)
                mult[i] = {w.combo[t]->entries[static_cast<std::size_t>(i)].to_double(), 0.0};
        word.letters.push_back({w.shifts[t], std::move(mult)});
    }
    return word;
}

VanishingReport scan_words_mc(const McContext& ctx, std::string title,
                              const std::vector<McWordSpec>& words, const char* symbol,
                              double abs_floor) {
    int d = ctx.dim();
    VanishingReport report;
    report.title = std::move(title);

    std::vector<std::vector<DiagVec<std::complex<double>>>> per_word_trials(words.size());
    ctx.for_each_trial([&](int, const TrialBlocks& blocks) {
        TrialYContext trial_ctx(blocks);
        for (std::size_t wi = 0; wi < words.size(); ++wi)
            per_word_trials[wi].push_back(
                dvalued_cumulant(trial_ctx, make_mc_word(d, words[wi])));
    });

    for (std::size_t wi = 0; wi < words.size(); ++wi) {
        const auto& w = words[wi];
        double worst_abs = 0, worst_stderr = 0;
        std::string mean_str = "(";
        bool violated = false;
        for (int s = 0; s < d; ++s) {
            std::vector<std::complex<double>> vals;
            vals.reserve(per_word_trials[wi].size());
            for (const auto& tv : per_word_trials[wi]) vals.push_back(tv[s]);
            EstimateWithError e = summarize(vals);
            if (s) mean_str += ", ";
            std::ostringstream os;
            os.precision(4);
            os << e.mean.real();
            mean_str += os.str();
            worst_abs = std::max(worst_abs, std::abs(e.mean));
            worst_stderr = std::max(worst_stderr, e.stderr_val);
            if (w.expected_zero &&
                std::abs(e.mean) > std::max(4 * e.stderr_val, abs_floor))
                violated = true;
        }
        mean_str += ")";

        ++report.words_checked;
        WordRecord row{render_word(symbol, w.shifts, w.combo.empty() ? nullptr : &w.combo),
                       w.expected_zero, mean_str, worst_abs, worst_stderr, true, false, ""};
        if (w.expected_zero) {
            ++report.expected_zero_words;
            report.max_abs_expected_zero = std::max(report.max_abs_expected_zero, worst_abs);
            if (violated) {
                row.violation = true;
                row.note = "|mean| above max(4 stderr, abs_floor)";
                ++report.violations;
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace

VanishingReport theorem_pattern_check_mc(const McContext& ctx, const ScanOptions& opt) {
    int d = ctx.dim();
    std::vector<DiagProbe> probes = probes_with_identity(opt.probes, d);
    std::vector<McWordSpec> words;
    for (const auto& shifts : all_index_words(d, opt.max_r)) {
        bool expected_zero = !theorem_allows_nonzero(shifts, d);
        std::vector<std::size_t> odo(shifts.size(), 0);
        while (true) {
            McWordSpec w;
            w.shifts = shifts;
            for (std::size_t t = 0; t < odo.size(); ++t) w.combo.push_back(&probes[odo[t]]);
            w.expected_zero = expected_zero;
            words.push_back(std::move(w));
            std::size_t t = 0;
            for (; t < odo.size(); ++t) {
                if (++odo[t] < probes.size()) break;
                odo[t] = 0;
            }
            if (t == odo.size()) break;
        }
    }
    return scan_words_mc(ctx, "theorem pattern (MC, d=" + std::to_string(d) + ")", words, "Y",
                         opt.abs_floor);
}

VanishingReport r_diagonal_pair_test_mc(const McContext& ctx, int y_plus, int y_minus,
                                        int max_n, double abs_floor) {
    if (y_plus == y_minus)
        throw std::invalid_argument("r_diagonal_pair_test_mc: need two distinct elements");
    std::vector<McWordSpec> words;
    for (int n = 1; n <= max_n; ++n) {
        std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
        while (true) {
            McWordSpec w;
            bool alternating = n % 2 == 0;
            int prev = 0;
            for (std::size_t t = 0; t < odo.size(); ++t) {
                int sign = odo[t] == 0 ? 1 : -1;
                w.shifts.push_back(sign == 1 ? y_plus : y_minus);
                if (t > 0 && sign != -prev) alternating = false;
                prev = sign;
            }
            w.expected_zero = !alternating;
            words.push_back(std::move(w));
            std::size_t t = 0;
            for (; t < odo.size(); ++t) {
                if (++odo[t] < 2) break;
                odo[t] = 0;
            }
            if (t == odo.size()) break;
        }
    }
    return scan_words_mc(ctx,
                         "R-diagonal pair MC (Y" + std::to_string(y_plus) + ", Y" +
                             std::to_string(y_minus) + ")",
                         words, "Y", abs_floor);
}

std::string VanishingReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["title"] = title;
    j["words_checked"] = words_checked;
    j["expected_zero_words"] = expected_zero_words;
    j["violations"] = violations;
    j["max_abs_expected_zero"] = max_abs_expected_zero;
    j["truncated"] = truncated;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["word"] = r.word;
        row["expected"] = r.expected_zero ? "zero" : "nonzero";
        row["value"] = r.value;
        if (r.numeric) {
            row["abs"] = r.abs_value;
            row["stderr"] = r.stderr_val;
        }
        row["verdict"] = r.violation ? "VIOLATION" : "ok";
        if (!r.note.empty()) row["note"] = r.note;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2);
}

std::string VanishingReport::to_table() const {
    std::ostringstream os;
    os << "== " << title << " ==\n";
    os << "words checked: " << words_checked << ", expected zero: " << expected_zero_words
       << ", violations: " << violations;
    if (max_abs_expected_zero > 0) os << ", max |mean| on zeros: " << max_abs_expected_zero;
    os << (truncated ? " (rows truncated)\n" : "\n");
    for (const auto& r : rows) {
        os << (r.violation ? "[VIOLATION] " : "[ok]        ") << r.word << "  expected "
           << (r.expected_zero ? "zero" : "nonzero") << "  value " << r.value;
        if (!r.note.empty()) os << "  (" << r.note << ")";
        os << '\n';
    }
    return os.str();
}

}  // namespace rcx
