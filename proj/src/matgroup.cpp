#include "rcx/matgroup.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rcx {

namespace {

using Cd = std::complex<double>;

Cd omega_pow(int d, long long e) {
    // exact values at the axes keep d in {1,2,4} free of rounding noise
    long long r = ((e % d) + d) % d;
    double theta = 2.0 * std::numbers::pi * static_cast<double>(r) / d;
    if (4 * r % d == 0) {
        switch (4 * r / d) {
            case 0: return {1, 0};
            case 1: return {0, 1};
            case 2: return {-1, 0};
            case 3: return {0, -1};
        }
    }
    return {std::cos(theta), std::sin(theta)};
}

// outer cyclic shift acting blockwise; m = 1 gives the plain matrix S
Eigen::MatrixXcd outer_shift(int d, int m, int k) {
    long n = static_cast<long>(d) * m;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    int kk = ((k % d) + d) % d;
    for (int i = 0; i < d; ++i) {
        int j = (i + kk) % d;
        s.block(static_cast<long>(i) * m, static_cast<long>(j) * m, m, m) =
            Eigen::MatrixXcd::Identity(m, m);
    }
    return s;
}

// outer D^l acting blockwise
Eigen::MatrixXcd outer_dpow(int d, int m, int l) {
    long n = static_cast<long>(d) * m;
    Eigen::MatrixXcd dm = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < d; ++i)
        dm.block(static_cast<long>(i) * m, static_cast<long>(i) * m, m, m) =
            omega_pow(d, static_cast<long long>(i) * l) * Eigen::MatrixXcd::Identity(m, m);
    return dm;
}

void require_square(const ComplexMatrix& X, const char* who) {
    if (X.mat.rows() != X.mat.cols()) throw std::invalid_argument(std::string(who) + ": non-square matrix");
}

}  // namespace

CyclicPair make_cyclic_pair(int d) {
    if (d < 1) throw std::invalid_argument("make_cyclic_pair: d must be positive");
    CyclicPair p;
    p.d = d;
    p.S = outer_shift(d, 1, 1);
    p.Dw = outer_dpow(d, 1, 1);
    return p;
}

ComplexMatrix diag_part(const ComplexMatrix& X, int k) {
    require_square(X, "diag_part");
    int d = X.outer_dim();
    int m = X.inner_dim();
    int kk = ((k % d) + d) % d;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(X.mat.rows(), X.mat.cols());
    for (int i = 0; i < d; ++i) {
        int j = (i + kk) % d;
        out.block(static_cast<long>(i) * m, static_cast<long>(j) * m, m, m) =
            X.mat.block(static_cast<long>(i) * m, static_cast<long>(j) * m, m, m);
    }
    ComplexMatrix r(std::move(out));
    r.meta = X.meta;
    return r;
}

ComplexMatrix xk_via_expectation(const ComplexMatrix& X, int k) {
    require_square(X, "xk_via_expectation");
    int d = X.outer_dim();
    int m = X.inner_dim();
    Eigen::MatrixXcd sk = outer_shift(d, m, k);
    Eigen::MatrixXcd smk = outer_shift(d, m, -k);
    ComplexMatrix prod(Eigen::MatrixXcd(X.mat * smk), BlockMeta{d, m});
    ComplexMatrix e = cond_exp_blocks(prod, d);
    ComplexMatrix r(Eigen::MatrixXcd(e.mat * sk));
    r.meta = X.meta;
    return r;
}

ComplexMatrix xk_via_fourier(const ComplexMatrix& X, int k) {
    require_square(X, "xk_via_fourier");
    int d = X.outer_dim();
    int m = X.inner_dim();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(X.mat.rows(), X.mat.cols());
    for (int i = 1; i <= d; ++i) {
        Eigen::MatrixXcd di = outer_dpow(d, m, i);
        Eigen::MatrixXcd dmi = outer_dpow(d, m, -i);
        acc += omega_pow(d, static_cast<long long>(i) * k) * (di * X.mat * dmi);
    }
    ComplexMatrix r(Eigen::MatrixXcd(acc / static_cast<double>(d)));
    r.meta = X.meta;
    return r;
}

ComplexMatrix yk_via_fourier(const ComplexMatrix& X, int k) {
    require_square(X, "yk_via_fourier");
    int d = X.outer_dim();
    int m = X.inner_dim();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(X.mat.rows(), X.mat.cols());
    for (int i = 1; i <= d; ++i) {
        Eigen::MatrixXcd di = outer_dpow(d, m, i);
        Eigen::MatrixXcd dmi = outer_dpow(d, m, -i);
        acc += omega_pow(d, -static_cast<long long>(i) * k) * (di * X.mat * dmi);
    }
    Eigen::MatrixXcd sk = outer_shift(d, m, k);
    ComplexMatrix r(Eigen::MatrixXcd(sk * (acc / static_cast<double>(d)) * sk));
    r.meta = X.meta;
    return r;
}

double check_commutation(int d) {
    CyclicPair p = make_cyclic_pair(d);
    double worst = 0;
    Eigen::MatrixXcd sk = Eigen::MatrixXcd::Identity(d, d);
    for (int k = 0; k < d; ++k) {
        Eigen::MatrixXcd dl = Eigen::MatrixXcd::Identity(d, d);
        for (int l = 0; l < d; ++l) {
            double dev = (sk * dl - omega_pow(d, static_cast<long long>(k) * l) * (dl * sk))
                             .cwiseAbs()
                             .maxCoeff();
            worst = std::max(worst, dev);
            dl = dl * p.Dw;
        }
        sk = sk * p.S;
    }
    return worst;
}

bool check_shift_lemma(const ComplexMatrix& X) {
    require_square(X, "check_shift_lemma");
    int d = static_cast<int>(X.mat.rows());
    CyclicPair p = make_cyclic_pair(d);
    Eigen::MatrixXcd sinv = p.S.adjoint();  // S is a real permutation, S^{-1} = S^t
    const double tol = 1e-12;

    auto wrap = [d](int i) { return ((i % d) + d) % d; };
    Eigen::MatrixXcd xs = X.mat * p.S, sx = p.S * X.mat, xsi = X.mat * sinv, six = sinv * X.mat;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (std::abs(xs(i, j) - X.mat(i, wrap(j - 1))) > tol) return false;
            if (std::abs(sx(i, j) - X.mat(wrap(i + 1), j)) > tol) return false;
            if (std::abs(xsi(i, j) - X.mat(i, wrap(j + 1))) > tol) return false;
            if (std::abs(six(i, j) - X.mat(wrap(i - 1), j)) > tol) return false;
        }

    // E(X S^k) = E(S^{-k} X^t) for every k
    Eigen::MatrixXcd sk = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd smk = Eigen::MatrixXcd::Identity(d, d);
    for (int k = 0; k < d; ++k) {
        Eigen::MatrixXcd lhs = (X.mat * sk).diagonal().asDiagonal();
        Eigen::MatrixXcd rhs = (smk * X.mat.transpose()).diagonal().asDiagonal();
        if ((lhs - rhs).cwiseAbs().maxCoeff() > tol) return false;
        sk = sk * p.S;
        smk = smk * sinv;
    }
    return true;
}

ComplexMatrix partial_transpose(const ComplexMatrix& X) {
    if (!X.meta) throw std::invalid_argument("partial_transpose: block metadata required");
    int d = X.meta->d1;
    int m = X.meta->m;
    Eigen::MatrixXcd out(X.mat.rows(), X.mat.cols());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out.block(static_cast<long>(i) * m, static_cast<long>(j) * m, m, m) =
                X.mat.block(static_cast<long>(j) * m, static_cast<long>(i) * m, m, m);
    return ComplexMatrix(std::move(out), *X.meta);
}

ComplexMatrix cond_exp_blocks(const ComplexMatrix& X, int d1) {
    require_square(X, "cond_exp_blocks");
    if (X.mat.rows() % d1 != 0)
        throw std::invalid_argument("cond_exp_blocks: d1 does not divide the dimension");
    int m = static_cast<int>(X.mat.rows()) / d1;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(X.mat.rows(), X.mat.cols());
    for (int i = 0; i < d1; ++i)
        out.block(static_cast<long>(i) * m, static_cast<long>(i) * m, m, m) =
            X.mat.block(static_cast<long>(i) * m, static_cast<long>(i) * m, m, m);
    return ComplexMatrix(std::move(out), BlockMeta{d1, m});
}

DiagVec<std::complex<double>> phi_tilde_numeric(const ComplexMatrix& X, int d1) {
    require_square(X, "phi_tilde_numeric");
    if (X.mat.rows() % d1 != 0)
        throw std::invalid_argument("phi_tilde_numeric: d1 does not divide the dimension");
    int m = static_cast<int>(X.mat.rows()) / d1;
    DiagVec<Cd> out = DiagVec<Cd>::zeros(d1);
    for (int i = 0; i < d1; ++i)
        out[i] = X.mat.block(static_cast<long>(i) * m, static_cast<long>(i) * m, m, m).trace() /
                 static_cast<double>(m);
    return out;
}

std::string matrix_to_csv(const ComplexMatrix& X) {
    std::ostringstream os;
    os.precision(17);
    for (long i = 0; i < X.mat.rows(); ++i) {
        for (long j = 0; j < X.mat.cols(); ++j) {
            if (j) os << ',';
            double re = X.mat(i, j).real(), im = X.mat(i, j).imag();
            os << re << (im < 0 ? "" : "+") << im << 'i';
        }
        os << '\n';
    }
    return os.str();
}

ComplexMatrix matrix_from_csv(const std::string& text) {
    std::vector<std::vector<Cd>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<Cd> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            // "re+imi" / "re-imi": the imaginary sign starts after position 0
            std::size_t split = cell.find_last_of("+-");
            while (split != std::string::npos && split > 0 &&
                   (cell[split - 1] == 'e' || cell[split - 1] == 'E'))
                split = cell.find_last_of("+-", split - 1);
            if (split == std::string::npos || split == 0 || cell.back() != 'i')
                throw std::invalid_argument("matrix_from_csv: bad cell '" + cell + "'");
            double re = std::stod(cell.substr(0, split));
            double im = std::stod(cell.substr(split, cell.size() - 1 - split));
            row.push_back({re, im});
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("matrix_from_csv: empty input");
    Eigen::MatrixXcd m(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw std::invalid_argument("matrix_from_csv: ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
    return ComplexMatrix(std::move(m));
}

}  // namespace rcx
