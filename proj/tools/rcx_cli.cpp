// rcx: command-line front end for the R-cyclic diagonal-decomposition
// verification toolkit. Subcommands:
//   nc                 enumerate non-crossing partitions
//   verify-identities  numeric checks of the cyclic-group matrix calculus
//   verify-theorem     freeness / R-diagonality pattern verification
//   simulate           Wishart partial-transpose Monte Carlo
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcx/cumulant_core.hpp"
#include "rcx/freeness.hpp"
#include "rcx/matrix_context.hpp"
#include "rcx/parallel.hpp"
#include "rcx/spectra.hpp"

namespace {

constexpr const char* kToolVersion = "rcx 1.0.0";

using nlohmann::ordered_json;

std::uint64_t default_seed() {
    const char* env = std::getenv("RCX_SEED");
    if (env == nullptr) return 0;
    return std::strtoull(env, nullptr, 10);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

ordered_json checks_to_json(const std::vector<CheckResult>& checks) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return arr;
}

// ---------------------------------------------------------------- nc ----

int cmd_nc(int n, bool count_only, bool with_mobius, const std::string& output) {
    if (n < 1 || n > rcx::kEnumerationCap) {
        std::cerr << "nc: n must be in 1.." << rcx::kEnumerationCap << "\n";
        return 2;
    }
    if (with_mobius && n > 10) {
        std::cerr << "nc: --mobius supports n <= 10\n";
        return 2;
    }
    std::string text;
    if (count_only) {
        std::size_t count = 0;
        rcx::for_each_nc(n, [&](const rcx::Partition&) { ++count; });
        text = std::to_string(count) + "\n";
    } else if (with_mobius) {
        const rcx::NCTable& t = rcx::nc_table(n);
        for (std::size_t i = 0; i < t.partitions.size(); ++i)
            text += t.partitions[i].to_string() + "\t" + std::to_string(t.mobius_top[i]) + "\n";
    } else {
        rcx::for_each_nc(n, [&](const rcx::Partition& p) { text += p.to_string() + "\n"; });
    }
    write_output(output, text);
    return 0;
}

// --------------------------------------------------- verify-identities ----

int cmd_verify_identities(int d, int samples, std::uint64_t seed, const std::string& output,
                          const std::string& format) {
    if (d < 1 || d > 64) {
        std::cerr << "verify-identities: --d must be in 1..64\n";
        return 2;
    }
    rcx::Xoshiro256pp rng = rcx::Xoshiro256pp::for_stream(seed, 0);
    double dev_comm = rcx::check_commutation(d);
    double dev_decomp = 0, dev_xk = 0, dev_yk = 0;
    bool shift_ok = true;

    for (int rep = 0; rep < samples; ++rep) {
        rcx::ComplexMatrix x(rcx::sample_gaussian(d, d, rng));
        shift_ok = shift_ok && rcx::check_shift_lemma(x);

        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
        for (int k = 0; k < d; ++k) {
            rcx::ComplexMatrix sel = rcx::diag_part(x, k);
            sum += sel.mat;
            dev_xk = std::max(dev_xk,
                              (rcx::xk_via_expectation(x, k).mat - sel.mat).cwiseAbs().maxCoeff());
            dev_xk = std::max(dev_xk,
                              (rcx::xk_via_fourier(x, k).mat - sel.mat).cwiseAbs().maxCoeff());
            rcx::ComplexMatrix tsel = rcx::diag_part(rcx::ComplexMatrix(x.mat.transpose()), k);
            dev_yk = std::max(dev_yk,
                              (rcx::yk_via_fourier(x, k).mat - tsel.mat).cwiseAbs().maxCoeff());
        }
        dev_decomp = std::max(dev_decomp, (sum - x.mat).cwiseAbs().maxCoeff());
    }

    bool pass = dev_comm <= 1e-12 && shift_ok && dev_decomp == 0.0 && dev_xk <= 1e-10 &&
                dev_yk <= 1e-10;

    ordered_json j;
    j["schema"] = 1;
    j["tool"] = kToolVersion;
    j["config"] = {{"command", "verify-identities"}, {"d", d}, {"samples", samples},
                   {"seed", seed}};
    j["max_deviation"] = {{"commutation", dev_comm},
                          {"decomposition", dev_decomp},
                          {"xk_formulas", dev_xk},
                          {"yk_formula", dev_yk}};
    j["shift_lemma"] = shift_ok;
    j["pass"] = pass;

    if (format == "table") {
        std::string text = std::string("verify-identities d=") + std::to_string(d) + "\n" +
                           "  commutation max dev:   " + std::to_string(dev_comm) + "\n" +
                           "  decomposition max dev: " + std::to_string(dev_decomp) + "\n" +
                           "  X_k formulas max dev:  " + std::to_string(dev_xk) + "\n" +
                           "  Y_k formula max dev:   " + std::to_string(dev_yk) + "\n" +
                           "  shift lemma:           " + (shift_ok ? "ok" : "FAILED") + "\n" +
                           (pass ? "PASS" : "FAIL") + "\n";
        write_output(output, text);
    } else {
        write_output(output, j.dump(2) + "\n");
    }
    return pass ? 0 : 1;
}

// ------------------------------------------------------ verify-theorem ----

struct TheoremOptions {
    int d1 = 2;
    std::string c_value;  // empty: symbolic
    int max_r = 4;
    std::string backend = "exact";
    std::string model = "uniform";
    std::string model_file;
    int models = 20;
    int d2 = 200;
    int p = 400;
    int trials = 20;
    std::uint64_t seed = 0;
    double abs_floor = 1e-2;
    int threads = 1;
    int moment_order = 8;
    std::string output;
    std::string format = "json";
};

void run_exact_model(const rcx::EntryCumulantModel& model, const TheoremOptions& opt,
                     bool assert_values, std::vector<rcx::VanishingReport>& reports,
                     std::vector<CheckResult>& checks) {
    rcx::YContext ctx(model, true);
    int d = model.d();
    rcx::ScanOptions scan;
    scan.max_r = opt.max_r;
    scan.threads = opt.threads;

    rcx::Poly cd1;
    if (assert_values) {
        cd1 = model.uniform_value();  // uniform cyclic cumulant = c d1
        reports.push_back(rcx::theorem_pattern_check(ctx, scan, &cd1));
    } else {
        reports.push_back(rcx::theorem_pattern_check(ctx, scan));
    }
    reports.push_back(rcx::off_diagonal_vanishing_check(ctx, scan));

    for (int i = 1; 2 * i < d; ++i)
        reports.push_back(rcx::r_diagonal_pair_test(ctx, i, d - i, std::min(opt.max_r, 6),
                                                    assert_values ? &cd1 : nullptr));
    if (d % 2 == 0) reports.push_back(rcx::even_part_check(ctx, 7));

    if (assert_values) {
        // Y_0 follows the free Poisson law with rate cd1
        bool y0_ok = true;
        rcx::CumulantSpec k{[&cd1](const rcx::HandleWord&) { return cd1; }};
        for (int n = 1; n <= opt.moment_order; ++n) {
            rcx::Poly lhs = rcx::scalar_phi(
                model, std::vector<rcx::PhiLetter>(static_cast<std::size_t>(n),
                                                   rcx::PhiLetter::Yk(0)));
            rcx::Poly rhs = rcx::cumulants_to_moments(
                k, rcx::HandleWord(static_cast<std::size_t>(n), 0));
            y0_ok = y0_ok && lhs == rhs;
        }
        checks.push_back({"Y0 free-Poisson moments (n <= " + std::to_string(opt.moment_order) +
                              ")",
                          y0_ok, "exact"});

        // cumulants of the transposed trace alternate cd1^2 / cd1
        bool bn_ok = true;
        std::vector<rcx::Poly> trace_moments;
        for (int n = 1; n <= opt.moment_order; ++n)
            trace_moments.push_back(rcx::scalar_phi(
                model, std::vector<rcx::PhiLetter>(static_cast<std::size_t>(n),
                                                   rcx::PhiLetter::full_transposed())));
        rcx::MultilinearFunctional mom{[&trace_moments](const rcx::HandleWord& w) {
            return trace_moments.at(w.size() - 1);
        }};
        for (int n = 1; n <= opt.moment_order; ++n) {
            rcx::Poly got =
                rcx::moments_to_cumulants(mom, rcx::HandleWord(static_cast<std::size_t>(n), 0));
            rcx::Poly want = (n % 2 == 0) ? cd1.scaled(rcx::Rational(d)) : cd1;
            bn_ok = bn_ok && got == want;
        }
        checks.push_back({"free-difference cumulants cd1^2 / cd1 (n <= " +
                              std::to_string(opt.moment_order) + ")",
                          bn_ok, "exact"});
    }
}

int cmd_verify_theorem(const TheoremOptions& opt) {
    if (opt.d1 < 1 || opt.max_r < 1 || opt.max_r > rcx::kDValWordCap) {
        std::cerr << "verify-theorem: invalid --d1 / --max-r\n";
        return 2;
    }
    std::vector<rcx::VanishingReport> reports;
    std::vector<CheckResult> checks;

    if (opt.backend == "exact") {
        if (opt.model == "uniform") {
            rcx::Poly c = opt.c_value.empty()
                              ? rcx::Poly::symbol("c")
                              : rcx::Poly(rcx::Rational::from_string(opt.c_value));
            run_exact_model(rcx::wishart_entry_model(opt.d1, c), opt, true, reports, checks);
        } else if (opt.model == "random") {
            for (int i = 0; i < opt.models; ++i) {
                rcx::EntryCumulantModel model = rcx::random_rcyclic_model(
                    opt.d1, std::max(opt.max_r, 4), opt.seed + static_cast<std::uint64_t>(i));
                run_exact_model(model, opt, false, reports, checks);
                rcx::clear_entry_moment_cache();
            }
        } else if (opt.model == "file") {
            std::ifstream in(opt.model_file);
            if (!in) {
                std::cerr << "verify-theorem: cannot read model file\n";
                return 2;
            }
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            rcx::EntryCumulantModel model = rcx::EntryCumulantModel::from_json(text);
            run_exact_model(model, opt, model.uniform(), reports, checks);
        } else {
            std::cerr << "verify-theorem: unknown --model\n";
            return 2;
        }
    } else if (opt.backend == "mc") {
        rcx::EnsembleConfig cfg{opt.d1, opt.d2, opt.p, opt.trials, opt.seed};
        try {
            cfg.validate();
        } catch (const std::exception& e) {
            std::cerr << "verify-theorem: " << e.what() << "\n";
            return 2;
        }
        rcx::McContext ctx(cfg);
        rcx::ScanOptions scan;
        scan.max_r = std::min(opt.max_r, 4);
        scan.abs_floor = opt.abs_floor;
        reports.push_back(rcx::theorem_pattern_check_mc(ctx, scan));
        for (int i = 1; 2 * i < opt.d1; ++i)
            reports.push_back(
                rcx::r_diagonal_pair_test_mc(ctx, i, opt.d1 - i, scan.max_r, opt.abs_floor));

        // Y_0 moments against the free Poisson law with rate c d1
        double cd1 = cfg.c() * opt.d1;
        bool y0_ok = true;
        std::string detail;
        for (int n = 1; n <= 3; ++n) {
            auto stats = ctx.moment_stats(rcx::DWord<std::complex<double>>::plain(
                opt.d1, std::vector<int>(static_cast<std::size_t>(n), 0)));
            double want = rcx::mp_moments(cd1, n);
            for (int s = 0; s < opt.d1; ++s) {
                double tol = std::max(4 * stats.stderr_val[static_cast<std::size_t>(s)],
                                      opt.abs_floor);
                if (std::abs(stats.mean[s] - want) > tol) y0_ok = false;
            }
            detail += (n > 1 ? " " : "") + std::to_string(stats.mean[0].real());
        }
        checks.push_back({"Y0 moments vs MP(c d1), n <= 3", y0_ok, detail});

        // moments of d1 W^Gamma follow the free-difference law at c = cfg.c()
        bool bn_ok = true;
        auto [c1s, c2s] = rcx::bn_parameters(rcx::Poly::symbol("c"), opt.d1);
        rcx::CumulantSequence seq = rcx::free_difference_cumulants(c1s, c2s);
        rcx::CumulantSpec ks{[&seq](const rcx::HandleWord& w) {
            return seq.rule(static_cast<int>(w.size()));
        }};
        for (int n = 1; n <= 3; ++n) {
            rcx::EstimateWithError e = rcx::estimate_scalar_moment(
                cfg, std::vector<rcx::McWordToken>(
                         static_cast<std::size_t>(n),
                         rcx::McWordToken{rcx::McWordToken::Base::WGamma, 0, false}),
                opt.threads);
            double target = rcx::cumulants_to_moments(
                                ks, rcx::HandleWord(static_cast<std::size_t>(n), 0))
                                .eval({{"c", cfg.c()}}) /
                            std::pow(opt.d1, n);
            double tol = std::max(4 * e.stderr_val, opt.abs_floor);
            if (std::abs(e.mean - target) > tol) bn_ok = false;
        }
        checks.push_back({"phi((W^G)^n) vs free difference, n <= 3", bn_ok, ""});
    } else {
        std::cerr << "verify-theorem: unknown --backend\n";
        return 2;
    }

    bool pass = true;
    for (const auto& r : reports) pass = pass && r.passed();
    for (const auto& c : checks) pass = pass && c.pass;

    ordered_json j;
    j["schema"] = 1;
    j["tool"] = kToolVersion;
    j["config"] = {{"command", "verify-theorem"},
                   {"d1", opt.d1},
                   {"c", opt.c_value.empty() ? "symbolic" : opt.c_value},
                   {"max_r", opt.max_r},
                   {"backend", opt.backend},
                   {"model", opt.model},
                   {"models", opt.models},
                   {"d2", opt.d2},
                   {"p", opt.p},
                   {"trials", opt.trials},
                   {"seed", opt.seed},
                   {"abs_floor", opt.abs_floor},
                   {"threads", opt.threads}};
    j["reports"] = ordered_json::array();
    for (const auto& r : reports) j["reports"].push_back(ordered_json::parse(r.to_json()));
    j["checks"] = checks_to_json(checks);
    j["pass"] = pass;

    if (opt.format == "table") {
        std::string text;
        for (const auto& r : reports) {
            text += "== " + r.title + " ==  words " + std::to_string(r.words_checked) +
                    ", violations " + std::to_string(r.violations) + "\n";
        }
        for (const auto& c : checks)
            text += std::string(c.pass ? "[ok]   " : "[FAIL] ") + c.name + "\n";
        text += pass ? "PASS\n" : "FAIL\n";
        write_output(opt.output, text);
    } else {
        write_output(opt.output, j.dump(2) + "\n");
    }
    return pass ? 0 : 1;
}

// ------------------------------------------------------------ simulate ----

int cmd_simulate(int d1, int d2, int p, int trials, std::uint64_t seed, const std::string& emit,
                 int threads, bool timing, const std::string& output) {
    rcx::EnsembleConfig cfg{d1, d2, p, trials, seed};
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return 2;
    }
    auto t0 = std::chrono::steady_clock::now();

    if (emit == "spectrum") {
        std::string csv = "trial,eigenvalue\n";
        for (int t = 0; t < trials; ++t) {
            rcx::Xoshiro256pp rng = rcx::Xoshiro256pp::for_stream(seed, static_cast<std::uint64_t>(t));
            rcx::ComplexMatrix w = rcx::build_wishart(cfg, rng);
            rcx::ComplexMatrix scaled(Eigen::MatrixXcd(rcx::partial_transpose(w).mat *
                                                       static_cast<double>(d1)),
                                      rcx::BlockMeta{d1, d2});
            std::vector<double> ev = rcx::empirical_spectrum(scaled);
            std::ostringstream os;
            os.precision(12);
            for (double v : ev) os << t << ',' << v << '\n';
            csv += os.str();
        }
        write_output(output, csv);
        return 0;
    }
    if (emit != "moments") {
        std::cerr << "simulate: --emit must be spectrum or moments\n";
        return 2;
    }

    auto record = [&](const char* name, const char* word, ordered_json& into) {
        rcx::EstimateWithError e =
            rcx::estimate_scalar_moment(cfg, rcx::parse_mc_word(word), threads);
        into[name] = {{"word", word},
                      {"mean", e.mean.real()},
                      {"mean_imag", e.mean.imag()},
                      {"stderr", e.stderr_val},
                      {"trials", e.trials}};
    };

    ordered_json j;
    j["schema"] = 1;
    j["tool"] = kToolVersion;
    j["config"] = {{"command", "simulate"}, {"d1", d1}, {"d2", d2}, {"p", p},
                   {"trials", trials}, {"seed", seed}, {"c", cfg.c()}};
    ordered_json moments;
    record("phi_w", "W", moments);
    record("phi_w_wgamma", "W WG", moments);
    record("phi_wgamma_sq", "WG WG", moments);
    j["moments"] = std::move(moments);
    if (timing) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        j["wall_time_ms"] = ms;
    }
    write_output(output, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolVersion) +
                 ": diagonal decompositions of R-cyclic matrices, exact and Monte Carlo"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // nc
    int nc_n = 1;
    bool nc_count = false, nc_mobius = false;
    std::string nc_output;
    CLI::App* nc = app.add_subcommand("nc", "enumerate non-crossing partitions");
    nc->add_option("n", nc_n, "ground-set size")->required();
    nc->add_flag("--count", nc_count, "print only the number of partitions");
    nc->add_flag("--mobius", nc_mobius, "append mu(pi, 1_n) to each row");
    nc->add_option("--output", nc_output, "output file (default stdout)");

    // verify-identities
    int vi_d = 4, vi_samples = 25;
    std::uint64_t vi_seed = default_seed();
    std::string vi_output, vi_format = "json";
    CLI::App* vi = app.add_subcommand("verify-identities",
                                      "numeric cyclic-group matrix identities");
    vi->add_option("--d", vi_d, "matrix dimension")->required();
    vi->add_option("--samples", vi_samples, "random matrices per check");
    vi->add_option("--seed", vi_seed, "RNG seed (default: RCX_SEED or 0)");
    vi->add_option("--output", vi_output, "output file (default stdout)");
    vi->add_option("--format", vi_format, "json|table")
        ->check(CLI::IsMember({"json", "table"}));

    // verify-theorem
    TheoremOptions to;
    to.seed = default_seed();
    to.threads = rcx::default_threads();
    CLI::App* vt = app.add_subcommand("verify-theorem",
                                      "freeness and R-diagonality pattern checks");
    vt->add_option("--d1", to.d1, "matrix dimension")->required();
    vt->add_option("--c", to.c_value, "rational value for c (default symbolic)");
    vt->add_option("--max-r", to.max_r, "maximum cumulant order scanned");
    vt->add_option("--backend", to.backend, "exact|mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    vt->add_option("--model", to.model, "uniform|random|file")
        ->check(CLI::IsMember({"uniform", "random", "file"}));
    vt->add_option("--model-file", to.model_file, "model JSON (with --model file)");
    vt->add_option("--models", to.models, "number of random models");
    vt->add_option("--d2", to.d2, "inner dimension (mc backend)");
    vt->add_option("--p", to.p, "gaussian column count (mc backend)");
    vt->add_option("--trials", to.trials, "Monte Carlo trials (mc backend)");
    vt->add_option("--seed", to.seed, "seed (default: RCX_SEED or 0)");
    vt->add_option("--abs-floor", to.abs_floor, "numeric zero floor");
    vt->add_option("--threads", to.threads, "worker threads");
    vt->add_option("--moment-order", to.moment_order, "moment comparison depth (exact)");
    vt->add_option("--output", to.output, "output file (default stdout)");
    vt->add_option("--format", to.format, "json|table")
        ->check(CLI::IsMember({"json", "table"}));

    // simulate
    int s_d1 = 2, s_d2 = 200, s_p = 400, s_trials = 20;
    std::uint64_t s_seed = default_seed();
    int s_threads = rcx::default_threads();
    bool s_timing = false;
    std::string s_emit = "moments", s_output;
    CLI::App* sim = app.add_subcommand("simulate", "Wishart partial-transpose Monte Carlo");
    sim->add_option("--d1", s_d1, "outer dimension")->required();
    sim->add_option("--d2", s_d2, "inner dimension")->required();
    sim->add_option("--p", s_p, "gaussian column count")->required();
    sim->add_option("--trials", s_trials, "trials");
    sim->add_option("--seed", s_seed, "seed (default: RCX_SEED or 0)");
    sim->add_option("--emit", s_emit, "spectrum|moments")
        ->check(CLI::IsMember({"spectrum", "moments"}));
    sim->add_option("--threads", s_threads, "worker threads");
    sim->add_flag("--timing", s_timing, "include wall_time_ms in the JSON output");
    sim->add_option("--output", s_output, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (nc->parsed()) return cmd_nc(nc_n, nc_count, nc_mobius, nc_output);
        if (vi->parsed())
            return cmd_verify_identities(vi_d, vi_samples, vi_seed, vi_output, vi_format);
        if (vt->parsed()) return cmd_verify_theorem(to);
        if (sim->parsed())
            return cmd_simulate(s_d1, s_d2, s_p, s_trials, s_seed, s_emit, s_threads, s_timing,
                                s_output);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
