#pragma once

#include <vector>

#include "rcx/dval.hpp"
#include "rcx/rational.hpp"

namespace rcx {

/// Dense square matrix with exact rational entries.
class RatMatrix {
public:
    RatMatrix() = default;
    explicit RatMatrix(int d) : d_(d), e_(static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {}

    static RatMatrix identity(int d) {
        RatMatrix m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = Rational(1);
        return m;
    }
    /// Backward cyclic shift: ones on the superdiagonal and bottom-left corner.
    static RatMatrix shift(int d) {
        RatMatrix m(d);
        for (int i = 0; i + 1 < d; ++i) m.at(i, i + 1) = Rational(1);
        m.at(d - 1, 0) = Rational(1);
        return m;
    }
    static RatMatrix diagonal(const std::vector<Rational>& entries) {
        RatMatrix m(static_cast<int>(entries.size()));
        for (int i = 0; i < m.d_; ++i) m.at(i, i) = entries[static_cast<std::size_t>(i)];
        return m;
    }

    int dim() const { return d_; }
    Rational& at(int i, int j) { return e_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(j)]; }
    const Rational& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(j)]; }

    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
        if (a.d_ != b.d_) throw std::invalid_argument("RatMatrix: dimension mismatch");
        RatMatrix r(a.d_);
        for (int i = 0; i < a.d_; ++i)
            for (int k = 0; k < a.d_; ++k) {
                const Rational& aik = a.at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < a.d_; ++j) {
                    const Rational& bkj = b.at(k, j);
                    if (!bkj.is_zero()) r.at(i, j) += aik * bkj;
                }
            }
        return r;
    }
    friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
        if (a.d_ != b.d_) throw std::invalid_argument("RatMatrix: dimension mismatch");
        RatMatrix r(a.d_);
        for (std::size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
        return r;
    }
    RatMatrix scaled(const Rational& c) const {
        RatMatrix r = *this;
        for (auto& x : r.e_) x *= c;
        return r;
    }
    RatMatrix power(int k) const {
        RatMatrix r = identity(d_);
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

private:
    int d_{0};
    std::vector<Rational> e_;
};

/// Evaluation context over M_d(Q): elements are explicit rational matrices
/// and phi-tilde is the diagonal of the exact product. Diagonal multipliers
/// must be rational-valued (constant polynomials).
class ExactMatrixContext final : public EvaluationContext<Poly> {
public:
    explicit ExactMatrixContext(std::vector<RatMatrix> elements)
        : elements_(std::move(elements)) {
        if (elements_.empty()) throw std::invalid_argument("ExactMatrixContext: no elements");
        d_ = elements_[0].dim();
        for (const auto& m : elements_)
            if (m.dim() != d_) throw std::invalid_argument("ExactMatrixContext: mixed dimensions");
    }

    int dim() const override { return d_; }

    DiagVec<Poly> moment(const DWord<Poly>& w) const override {
        RatMatrix acc = diag_of(w.lead);
        for (const auto& letter : w.letters) {
            acc = acc * elements_.at(static_cast<std::size_t>(letter.handle));
            acc = acc * diag_of(letter.right);
        }
        DiagVec<Poly> out = DiagVec<Poly>::zeros(d_);
        for (int i = 0; i < d_; ++i) out[i] = Poly(acc.at(i, i));
        return out;
    }

private:
    RatMatrix diag_of(const DiagVec<Poly>& v) const {
        std::vector<Rational> entries;
        entries.reserve(static_cast<std::size_t>(v.dim()));
        for (int i = 0; i < v.dim(); ++i) entries.push_back(v[i].constant_value());
        return RatMatrix::diagonal(entries);
    }

    int d_;
    std::vector<RatMatrix> elements_;
};

}  // namespace rcx
