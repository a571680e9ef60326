#include "rcx/wishart_mc.hpp"

#include <cmath>
#include <stdexcept>

#include "rcx/parallel.hpp"

namespace rcx {

void EnsembleConfig::validate() const {
    if (d1 < 1 || d2 < 1 || p < 1) throw std::invalid_argument("EnsembleConfig: dimensions must be positive");
    if (trials < 1) throw std::invalid_argument("EnsembleConfig: trials must be positive");
}

Eigen::MatrixXcd sample_gaussian(int rows, int cols, Xoshiro256pp& rng) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("sample_gaussian: dimensions must be positive");
    Eigen::MatrixXcd g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
    return g;
}

ComplexMatrix build_wishart(const EnsembleConfig& cfg, Xoshiro256pp& rng) {
    cfg.validate();
    long n = static_cast<long>(cfg.d1) * cfg.d2;
    Eigen::MatrixXcd g = sample_gaussian(static_cast<int>(n), cfg.p, rng);
    Eigen::MatrixXcd w = (g * g.adjoint()) / (static_cast<double>(cfg.d1) * cfg.d2);
    return ComplexMatrix(std::move(w), BlockMeta{cfg.d1, cfg.d2});
}

TrialBlocks::TrialBlocks(const EnsembleConfig& cfg, int trial) : d1_(cfg.d1), m_(cfg.d2) {
    Xoshiro256pp rng = Xoshiro256pp::for_stream(cfg.seed, static_cast<std::uint64_t>(trial));
    // sample the stacked gaussian exactly as build_wishart does, so the
    // blocks here agree with the full-matrix path for the same stream
    Eigen::MatrixXcd g = sample_gaussian(d1_ * m_, cfg.p, rng);
    blocks_.reserve(static_cast<std::size_t>(d1_) * static_cast<std::size_t>(d1_));
    // block (i,j) of d1 * W^Gamma is G_j G_i^* / d2
    std::vector<Eigen::MatrixXcd> rows;
    rows.reserve(static_cast<std::size_t>(d1_));
    for (int i = 0; i < d1_; ++i) rows.push_back(g.middleRows(static_cast<long>(i) * m_, m_));
    for (int i = 0; i < d1_; ++i)
        for (int j = 0; j < d1_; ++j)
            blocks_.push_back((rows[static_cast<std::size_t>(j)] *
                               rows[static_cast<std::size_t>(i)].adjoint()) /
                              static_cast<double>(m_));
}

const Eigen::MatrixXcd& TrialBlocks::chain(const std::vector<int>& path) const {
    // path = positions p_0..p_k, k >= 1: product B(p0,p1) ... B(p_{k-1},p_k).
    // caller holds cache_mu_
    auto it = chain_cache_.find(path);
    if (it != chain_cache_.end()) return it->second;
    Eigen::MatrixXcd prod;
    if (path.size() == 2) {
        prod = block(path[0], path[1]);
    } else {
        std::vector<int> prefix(path.begin(), path.end() - 1);
        prod = chain(prefix) * block(path[path.size() - 2], path.back());
    }
    return chain_cache_.emplace(path, std::move(prod)).first->second;
}

std::complex<double> TrialBlocks::path_trace(const std::vector<int>& path) const {
    if (path.size() < 2 || path.front() != path.back())
        throw std::invalid_argument("path_trace: path must close");
    std::complex<double> tr;
    if (path.size() == 2) {
        tr = block(path[0], path[1]).trace();
    } else {
        // tr(C * B_last) without forming the product
        std::lock_guard<std::mutex> lock(cache_mu_);
        std::vector<int> prefix(path.begin(), path.end() - 1);
        const Eigen::MatrixXcd& c = chain(prefix);
        const Eigen::MatrixXcd& last = block(path[path.size() - 2], path.back());
        tr = (c.transpose().cwiseProduct(last)).sum();
    }
    return tr / static_cast<double>(m_);
}

DiagVec<std::complex<double>> TrialYContext::moment(
    const DWord<std::complex<double>>& w) const {
    int d = blocks_->d1();
    DiagVec<std::complex<double>> out = DiagVec<std::complex<double>>::zeros(d);
    for (int s = 0; s < d; ++s) {
        std::vector<int> path{s};
        std::complex<double> scale = w.lead[s];
        for (const auto& letter : w.letters) {
            int k = letter.handle;
            if (k < 0 || k >= d)
                throw std::out_of_range("TrialYContext: element handle out of range");
            int q = (path.back() + k) % d;
            path.push_back(q);
            scale *= letter.right[q];
        }
        if (path.back() != s || scale == std::complex<double>{}) continue;
        out[s] = blocks_->path_trace(path) * scale;
    }
    return out;
}

McContext::McContext(EnsembleConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    // keep sampled trials when the whole set fits comfortably in memory
    double bytes = 16.0 * cfg_.d1 * cfg_.d1 * static_cast<double>(cfg_.d2) * cfg_.d2 *
                   cfg_.trials;
    cache_trials_ = bytes <= 256.0 * 1024 * 1024;
    cache_.resize(static_cast<std::size_t>(cfg_.trials));
}

std::shared_ptr<const TrialBlocks> McContext::trial(int t) const {
    {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto& slot = cache_[static_cast<std::size_t>(t)];
        if (slot) return slot;
    }
    auto built = std::make_shared<const TrialBlocks>(cfg_, t);
    if (cache_trials_) {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto& slot = cache_[static_cast<std::size_t>(t)];
        if (!slot) slot = built;
        return slot;
    }
    return built;
}

void McContext::for_each_trial(const std::function<void(int, const TrialBlocks&)>& fn) const {
    for (int t = 0; t < cfg_.trials; ++t) fn(t, *trial(t));
}

McContext::MomentStats McContext::moment_stats(const DWord<std::complex<double>>& w) const {
    return moment_stats_batch({w}).front();
}

std::vector<McContext::MomentStats> McContext::moment_stats_batch(
    const std::vector<DWord<std::complex<double>>>& words) const {
    int d = cfg_.d1;
    std::vector<std::vector<DiagVec<std::complex<double>>>> per_word(words.size());
    for_each_trial([&](int, const TrialBlocks& blocks) {
        TrialYContext ctx(blocks);
        for (std::size_t wi = 0; wi < words.size(); ++wi)
            per_word[wi].push_back(ctx.moment(words[wi]));
    });
    std::vector<MomentStats> out;
    out.reserve(words.size());
    for (const auto& trials : per_word) {
        MomentStats st{DiagVec<std::complex<double>>::zeros(d),
                       std::vector<double>(static_cast<std::size_t>(d), 0.0)};
        for (int i = 0; i < d; ++i) {
            std::vector<std::complex<double>> vals;
            vals.reserve(trials.size());
            for (const auto& tvec : trials) vals.push_back(tvec[i]);
            EstimateWithError e = summarize(vals);
            st.mean[i] = e.mean;
            st.stderr_val[static_cast<std::size_t>(i)] = e.stderr_val;
        }
        out.push_back(std::move(st));
    }
    return out;
}

DiagVec<std::complex<double>> McContext::moment(const DWord<std::complex<double>>& w) const {
    return moment_stats(w).mean;
}

std::vector<McWordToken> parse_mc_word(const std::string& text) {
    std::vector<McWordToken> out;
    std::size_t pos = 0;
    auto skip_ws = [&] { while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',')) ++pos; };
    skip_ws();
    while (pos < text.size()) {
        McWordToken tok;
        if (text[pos] == 'W' || text[pos] == 'w') {
            ++pos;
            if (pos < text.size() && (text[pos] == 'G' || text[pos] == 'g')) {
                tok.base = McWordToken::Base::WGamma;
                ++pos;
            } else {
                tok.base = McWordToken::Base::W;
            }
        } else if (text[pos] == 'Y' || text[pos] == 'y') {
            ++pos;
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (start == pos) throw std::invalid_argument("parse_mc_word: Y needs an index");
            tok.base = McWordToken::Base::Yk;
            tok.k = std::stoi(text.substr(start, pos - start));
        } else {
            throw std::invalid_argument("parse_mc_word: unknown symbol in '" + text + "'");
        }
        if (pos < text.size() && text[pos] == '*') {
            tok.adjoint = true;
            ++pos;
        }
        out.push_back(tok);
        skip_ws();
    }
    if (out.empty()) throw std::invalid_argument("parse_mc_word: empty word");
    return out;
}

EstimateWithError summarize(const std::vector<std::complex<double>>& values) {
    EstimateWithError e;
    e.trials = static_cast<int>(values.size());
    if (values.empty()) return e;
    std::complex<double> sum{0, 0};
    for (const auto& v : values) sum += v;
    e.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (const auto& v : values) ss += std::norm(v - e.mean);
        double var = ss / static_cast<double>(values.size() - 1);
        e.stderr_val = std::sqrt(var / static_cast<double>(values.size()));
    }
    return e;
}

EstimateWithError estimate_scalar_moment(const EnsembleConfig& cfg,
                                         const std::vector<McWordToken>& word, int threads) {
    cfg.validate();
    if (word.empty()) throw std::invalid_argument("estimate_scalar_moment: empty word");
    long n = static_cast<long>(cfg.d1) * cfg.d2;

    std::vector<std::complex<double>> values(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, threads, [&](int t) {
        Xoshiro256pp rng = Xoshiro256pp::for_stream(cfg.seed, static_cast<std::uint64_t>(t));
        ComplexMatrix w = build_wishart(cfg, rng);
        ComplexMatrix wg = partial_transpose(w);

        auto resolve = [&](const McWordToken& tok) -> Eigen::MatrixXcd {
            Eigen::MatrixXcd m;
            switch (tok.base) {
                case McWordToken::Base::W: m = w.mat; break;
                case McWordToken::Base::WGamma: m = wg.mat; break;
                case McWordToken::Base::Yk: {
                    if (tok.k < 0 || tok.k >= cfg.d1)
                        throw std::invalid_argument("estimate_scalar_moment: Y index out of range");
                    ComplexMatrix scaled(Eigen::MatrixXcd(wg.mat * static_cast<double>(cfg.d1)),
                                         BlockMeta{cfg.d1, cfg.d2});
                    m = diag_part(scaled, tok.k).mat;
                    break;
                }
            }
            if (tok.adjoint) m = m.adjoint().eval();
            return m;
        };

        std::complex<double> tr;
        if (word.size() == 1) {
            tr = resolve(word[0]).trace();
        } else {
            Eigen::MatrixXcd prod = resolve(word[0]);
            for (std::size_t i = 1; i + 1 < word.size(); ++i) prod = prod * resolve(word[i]);
            Eigen::MatrixXcd last = resolve(word.back());
            tr = (prod.transpose().cwiseProduct(last)).sum();
        }
        values[static_cast<std::size_t>(t)] = tr / static_cast<double>(n);
    });
    return summarize(values);
}

std::vector<double> empirical_spectrum(const ComplexMatrix& X) {
    if (X.mat.rows() != X.mat.cols())
        throw std::invalid_argument("empirical_spectrum: non-square matrix");
    double herm_dev = (X.mat - X.mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > 1e-8)
        throw std::invalid_argument("empirical_spectrum: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(X.mat);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("empirical_spectrum: eigensolver failed");
    std::vector<double> ev(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
    return ev;
}

}  // namespace rcx
