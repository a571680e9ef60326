#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "rcx/dval.hpp"

namespace rcx {

/// Dense complex matrix with optional block metadata: when present, the
/// matrix is (d1*m) x (d1*m) and treated as a d1 x d1 matrix of m x m
/// inner blocks.
struct BlockMeta {
    int d1;
    int m;
};

struct ComplexMatrix {
    Eigen::MatrixXcd mat;
    std::optional<BlockMeta> meta;

    ComplexMatrix() = default;
    explicit ComplexMatrix(Eigen::MatrixXcd m) : mat(std::move(m)) {}
    ComplexMatrix(Eigen::MatrixXcd m, BlockMeta b) : mat(std::move(m)), meta(b) {
        if (mat.rows() != mat.cols() || mat.rows() != static_cast<long>(b.d1) * b.m)
            throw std::invalid_argument("ComplexMatrix: block metadata does not divide shape");
    }

    long rows() const { return mat.rows(); }
    long cols() const { return mat.cols(); }
    /// Outer dimension: d1 when block metadata is present, else the plain size.
    int outer_dim() const { return meta ? meta->d1 : static_cast<int>(mat.rows()); }
    int inner_dim() const { return meta ? meta->m : 1; }

    Eigen::Block<Eigen::MatrixXcd> block(int i, int j) {
        int m = inner_dim();
        return mat.block(static_cast<long>(i) * m, static_cast<long>(j) * m, m, m);
    }
    Eigen::Block<const Eigen::MatrixXcd> block(int i, int j) const {
        int m = inner_dim();
        return mat.block(static_cast<long>(i) * m, static_cast<long>(j) * m, m, m);
    }
};

/// The two cyclic-group generators in M_d(C): S cyclically permutes the
/// standard basis backwards (ones on the superdiagonal and in the
/// bottom-left corner) and Dw = diag(1, w, ..., w^{d-1}) for w = exp(2 pi i/d).
struct CyclicPair {
    int d;
    Eigen::MatrixXcd S;
    Eigen::MatrixXcd Dw;
};

CyclicPair make_cyclic_pair(int d);

/// k-th diagonal part: keeps entries (or outer blocks) at j == i + k (mod d),
/// zero elsewhere. Summing over k = 0..d-1 reconstructs the matrix.
ComplexMatrix diag_part(const ComplexMatrix& X, int k);

/// X_k = E(X S^{-k}) S^k with E the (block-)diagonal projection.
ComplexMatrix xk_via_expectation(const ComplexMatrix& X, int k);
/// X_k = (1/d) sum_i w^{ik} D^i X D^{-i}.
ComplexMatrix xk_via_fourier(const ComplexMatrix& X, int k);
/// Y_k = S^k [(1/d) sum_i w^{-ik} D^i X D^{-i}] S^k, the k-th diagonal part
/// of the (partial) transpose.
ComplexMatrix yk_via_fourier(const ComplexMatrix& X, int k);

/// Max entrywise deviation of S^k D^l - w^{kl} D^l S^k over 0 <= k,l < d.
double check_commutation(int d);

/// Verifies the entry-shift identities (XS)_{ij} = x_{i,j-1},
/// (SX)_{ij} = x_{i+1,j}, (XS^{-1})_{ij} = x_{i,j+1}, (S^{-1}X)_{ij} = x_{i-1,j}
/// and E(X S^k) = E(S^{-k} X^t) for all k, to 1e-12.
bool check_shift_lemma(const ComplexMatrix& X);

/// Blockwise transpose: block (i,j) of the result is block (j,i) of X;
/// inner blocks are not transposed. Requires block metadata.
ComplexMatrix partial_transpose(const ComplexMatrix& X);

/// Conditional expectation onto block-diagonal matrices: zeroes all
/// off-diagonal outer blocks.
ComplexMatrix cond_exp_blocks(const ComplexMatrix& X, int d1);

/// phi-tilde: the length-d1 vector of normalized traces of the diagonal
/// blocks (tau = trace / m).
DiagVec<std::complex<double>> phi_tilde_numeric(const ComplexMatrix& X, int d1);

/// CSV round-trip for test fixtures: row-major, cells "re+imi".
std::string matrix_to_csv(const ComplexMatrix& X);
ComplexMatrix matrix_from_csv(const std::string& text);

}  // namespace rcx
