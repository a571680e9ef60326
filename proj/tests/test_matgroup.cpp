#include "doctest.h"

#include "rcx/matgroup.hpp"
#include "rcx/wishart_mc.hpp"

using namespace rcx;

namespace {

ComplexMatrix random_complex(int n, std::uint64_t seed, std::optional<BlockMeta> meta = {}) {
    Xoshiro256pp rng = Xoshiro256pp::for_stream(seed, 0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.complex_gaussian();
    ComplexMatrix out(std::move(m));
    out.meta = meta;
    return out;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("cyclic_pair") {
    TEST_CASE("generators match the displayed forms") {
        CyclicPair p2 = make_cyclic_pair(2);
        CHECK(p2.S(0, 1) == std::complex<double>(1, 0));
        CHECK(p2.S(1, 0) == std::complex<double>(1, 0));
        CHECK(p2.S(0, 0) == std::complex<double>(0, 0));
        CHECK(p2.Dw(0, 0) == std::complex<double>(1, 0));
        CHECK(p2.Dw(1, 1) == std::complex<double>(-1, 0));

        CyclicPair p1 = make_cyclic_pair(1);
        CHECK(p1.S(0, 0) == std::complex<double>(1, 0));
        CHECK(p1.Dw(0, 0) == std::complex<double>(1, 0));

        CyclicPair p4 = make_cyclic_pair(4);
        CHECK(p4.Dw(1, 1) == std::complex<double>(0, 1));
        CHECK(p4.Dw(2, 2) == std::complex<double>(-1, 0));
        CHECK(p4.Dw(3, 3) == std::complex<double>(0, -1));
        CHECK_THROWS_AS(make_cyclic_pair(0), std::invalid_argument);
    }

    TEST_CASE("unitarity and order d") {
        for (int d : {1, 2, 3, 5, 8}) {
            CyclicPair p = make_cyclic_pair(d);
            Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
            CHECK(max_abs(p.S * p.S.adjoint() - id) <= 1e-12);
            CHECK(max_abs(p.Dw * p.Dw.adjoint() - id) <= 1e-12);
            Eigen::MatrixXcd sp = id, dp = id;
            for (int k = 0; k < d; ++k) { sp = sp * p.S; dp = dp * p.Dw; }
            CHECK(max_abs(sp - id) <= 1e-12);
            CHECK(max_abs(dp - id) <= 1e-12);
        }
    }

    TEST_CASE("commutation deviation") {
        CHECK(check_commutation(1) == 0.0);
        for (int d : {2, 3, 6, 16}) CHECK(check_commutation(d) <= 1e-12);
    }
}

TEST_SUITE("diag_parts") {
    TEST_CASE("plain selection") {
        Eigen::MatrixXcd m(2, 2);
        m << std::complex<double>(1, 0), std::complex<double>(2, 0),
             std::complex<double>(3, 0), std::complex<double>(4, 0);
        ComplexMatrix X(m);
        ComplexMatrix off = diag_part(X, 1);
        CHECK(off.mat(0, 0) == std::complex<double>(0, 0));
        CHECK(off.mat(0, 1) == std::complex<double>(2, 0));
        CHECK(off.mat(1, 0) == std::complex<double>(3, 0));
        CHECK(off.mat(1, 1) == std::complex<double>(0, 0));

        ComplexMatrix eye(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(4, 4)));
        for (int k = 1; k < 4; ++k) CHECK(max_abs(diag_part(eye, k).mat) == 0.0);
    }

    TEST_CASE("parts sum back to the matrix and have the right support") {
        for (int d : {3, 5, 7}) {
            ComplexMatrix X = random_complex(d, 11 + static_cast<std::uint64_t>(d));
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
            for (int k = 0; k < d; ++k) {
                ComplexMatrix part = diag_part(X, k);
                sum += part.mat;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        if ((j - i - k) % d != 0) CHECK(part.mat(i, j) == std::complex<double>(0, 0));
            }
            CHECK(max_abs(sum - X.mat) == 0.0);  // entry selection is an exact partition
        }
    }

    TEST_CASE("blockwise selection respects the metadata") {
        ComplexMatrix X = random_complex(6, 4, BlockMeta{3, 2});
        ComplexMatrix part = diag_part(X, 1);
        CHECK(max_abs(part.block(0, 1) - X.block(0, 1)) == 0.0);
        CHECK(max_abs(part.block(0, 0)) == 0.0);
        CHECK(max_abs(part.block(0, 2)) == 0.0);
    }
}

TEST_SUITE("fourier_formulas") {
    TEST_CASE("three X_k routes and the Y_k route agree with selection") {
        for (int d : {2, 3, 5, 16}) {
            ComplexMatrix X = random_complex(d, 100 + static_cast<std::uint64_t>(d));
            for (int k = 0; k < d; ++k) {
                ComplexMatrix sel = diag_part(X, k);
                CHECK(max_abs(xk_via_expectation(X, k).mat - sel.mat) <= 1e-10);
                CHECK(max_abs(xk_via_fourier(X, k).mat - sel.mat) <= 1e-10);
                ComplexMatrix tsel = diag_part(ComplexMatrix(X.mat.transpose()), k);
                CHECK(max_abs(yk_via_fourier(X, k).mat - tsel.mat) <= 1e-10);
            }
        }
    }

    TEST_CASE("k=0 reproduces the averaging formula for E") {
        int d = 5;
        ComplexMatrix X = random_complex(d, 42);
        ComplexMatrix e = xk_via_fourier(X, 0);
        Eigen::MatrixXcd diag = X.mat.diagonal().asDiagonal();
        CHECK(max_abs(e.mat - diag) <= 1e-10);
    }

    TEST_CASE("blocked Fourier formulas select outer blocks of the partial transpose") {
        ComplexMatrix X = random_complex(6, 7, BlockMeta{2, 3});
        for (int k = 0; k < 2; ++k) {
            ComplexMatrix sel = diag_part(X, k);
            CHECK(max_abs(xk_via_fourier(X, k).mat - sel.mat) <= 1e-10);
            ComplexMatrix tsel = diag_part(partial_transpose(X), k);
            CHECK(max_abs(yk_via_fourier(X, k).mat - tsel.mat) <= 1e-10);
        }
    }
}

TEST_SUITE("shift_lemma") {
    TEST_CASE("holds on the identity, on S itself, and on random matrices") {
        CHECK(check_shift_lemma(ComplexMatrix(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(4, 4)))));
        CyclicPair p = make_cyclic_pair(5);
        CHECK(check_shift_lemma(ComplexMatrix(p.S)));
        for (int d : {2, 3, 9}) CHECK(check_shift_lemma(random_complex(d, 55)));
    }
}

TEST_SUITE("partial_transpose_and_expectations") {
    TEST_CASE("blockwise swap without inner transpose") {
        ComplexMatrix X = random_complex(4, 17, BlockMeta{2, 2});
        ComplexMatrix pt = partial_transpose(X);
        CHECK(max_abs(pt.block(0, 1) - X.block(1, 0)) == 0.0);
        CHECK(max_abs(pt.block(1, 0) - X.block(0, 1)) == 0.0);
        CHECK(max_abs(pt.block(0, 0) - X.block(0, 0)) == 0.0);  // inner blocks untouched

        ComplexMatrix twice = partial_transpose(pt);
        CHECK(max_abs(twice.mat - X.mat) == 0.0);
        CHECK(std::abs(pt.mat.trace() - X.mat.trace()) <= 1e-12);
        CHECK_THROWS_AS(partial_transpose(random_complex(4, 1)), std::invalid_argument);
    }

    TEST_CASE("block-diagonal matrices are fixed points") {
        ComplexMatrix X = random_complex(6, 23, BlockMeta{3, 2});
        ComplexMatrix bd = cond_exp_blocks(X, 3);
        CHECK(max_abs(partial_transpose(bd).mat - bd.mat) == 0.0);
        CHECK(max_abs(cond_exp_blocks(bd, 3).mat - bd.mat) == 0.0);
    }

    TEST_CASE("conditional expectation matches the averaging formula") {
        int d1 = 3, m = 2;
        ComplexMatrix X = random_complex(d1 * m, 29, BlockMeta{d1, m});
        ComplexMatrix e = cond_exp_blocks(X, d1);
        // (1/d1) sum_i (D^i (x) I) X (D^-i (x) I)
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d1 * m, d1 * m);
        CyclicPair p = make_cyclic_pair(d1);
        Eigen::MatrixXcd di = Eigen::MatrixXcd::Identity(d1, d1);
        for (int i = 0; i < d1; ++i) {
            Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(d1 * m, d1 * m);
            for (int b = 0; b < d1; ++b)
                big.block(b * m, b * m, m, m) = di(b, b) * Eigen::MatrixXcd::Identity(m, m);
            acc += big * X.mat * big.adjoint();
            di = di * p.Dw;
        }
        CHECK(max_abs(e.mat - acc / static_cast<double>(d1)) <= 1e-10);
    }

    TEST_CASE("phi_tilde_numeric on simple matrices") {
        ComplexMatrix eye(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(6, 6)), BlockMeta{3, 2});
        DiagVec<std::complex<double>> v = phi_tilde_numeric(eye, 3);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(v[i] - std::complex<double>(1, 0)) <= 1e-14);

        ComplexMatrix X = random_complex(6, 31, BlockMeta{3, 2});
        DiagVec<std::complex<double>> w = phi_tilde_numeric(X, 3);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(w[i] - X.block(i, i).trace() / 2.0) <= 1e-14);
    }
}

TEST_SUITE("matrix_csv") {
    TEST_CASE("round trip preserves every entry") {
        ComplexMatrix X = random_complex(5, 71);
        ComplexMatrix back = matrix_from_csv(matrix_to_csv(X));
        CHECK(back.mat.rows() == 5);
        CHECK(max_abs(back.mat - X.mat) == 0.0);
    }

    TEST_CASE("rejects malformed input") {
        CHECK_THROWS_AS(matrix_from_csv("1+2i,3\n"), std::invalid_argument);
        CHECK_THROWS_AS(matrix_from_csv(""), std::invalid_argument);
        CHECK_THROWS_AS(matrix_from_csv("1+2i\n1+2i,3+1i\n"), std::invalid_argument);
    }
}
