#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace iasim {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. All dimensions in this library are tiny
/// (at most 16), so everything is stored by value and copied freely.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> entries)
        : rows_(rows), cols_(cols), a_(entries) {
        if (a_.size() != rows * cols)
            throw std::invalid_argument("CMatrix: initializer size does not match shape");
    }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    /// Single column from a list of entries.
    static CMatrix column(std::initializer_list<cplx> entries) {
        CMatrix m(entries.size(), 1);
        std::size_t i = 0;
        for (cplx v : entries) m(i++, 0) = v;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        require_same_shape(o, "operator-=");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    CMatrix& operator*=(cplx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("matrix product: inner dimensions " +
                                        std::to_string(a.cols_) + " and " +
                                        std::to_string(b.rows_) + " do not match");
        CMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    /// Conjugate transpose.
    CMatrix adjoint() const {
        CMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
        return t;
    }

    CMatrix col(std::size_t j) const {
        CMatrix c(rows_, 1);
        for (std::size_t i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
        return c;
    }
    void set_col(std::size_t j, const CMatrix& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c(i, 0);
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double norm_fro() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0.0;
        for (const auto& v : a_) s = std::max(s, std::abs(v));
        return s;
    }

    bool is_finite() const {
        for (const auto& v : a_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    bool is_square() const { return rows_ == cols_; }

    bool is_hermitian(double rel_tol = 1e-10) const {
        if (!is_square()) return false;
        double diff = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                diff += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
        return std::sqrt(diff) <= rel_tol * std::max(norm_fro(), 1e-300);
    }

private:
    void require_same_shape(const CMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

/// Frobenius inner product trace(a b*).
inline cplx fro_inner(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("fro_inner: shape mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        s += a.data()[i] * std::conj(b.data()[i]);
    return s;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).max_abs();
}

}  // namespace iasim
