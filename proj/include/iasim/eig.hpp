#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "iasim/complex_matrix.hpp"

namespace iasim {

struct EigenPair {
    cplx value;
    CMatrix vector;  // unit-norm column
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Fix the free phase of a unit column: the first entry with magnitude above
/// 1e-12 is made real and non-negative. Makes eigenvector output deterministic
/// and comparable across runs.
inline void phase_normalize(CMatrix& v) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const cplx z = v(i, 0);
        if (std::abs(z) > 1e-12) {
            const cplx rot = std::conj(z) / std::abs(z);
            for (std::size_t j = 0; j < v.rows(); ++j) v(j, 0) *= rot;
            return;
        }
    }
}

inline CMatrix normalized_column(CMatrix v) {
    const double n = v.norm_fro();
    if (n < 1e-300) throw NumericalError("normalized_column: zero vector");
    v *= cplx{1.0 / n, 0.0};
    return v;
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns pairs sorted by eigenvalue, descending; eigenvalues are
/// exactly real and eigenvectors mutually orthonormal (columns of the
/// accumulated unitary). Ties keep the sweep output order.
inline std::vector<EigenPair> eig_hermitian(const CMatrix& a_in) {
    if (!a_in.is_square()) throw std::invalid_argument("eig_hermitian: matrix not square");
    if (!a_in.is_hermitian(1e-10))
        throw std::invalid_argument("eig_hermitian: matrix not Hermitian within 1e-10");
    const std::size_t n = a_in.rows();

    // Work on the exactly-Hermitian part; rounding in the input is below the
    // precondition tolerance anyway.
    CMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = 0.5 * (a_in(i, j) + std::conj(a_in(j, i)));

    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(a.norm_fro(), 1e-300);
    const double stop = 1e-15 * scale;
    const int max_sweeps = 64;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
        return std::sqrt(2.0 * s);
    };

    int sweep = 0;
    for (; sweep < max_sweeps && off_norm() > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r <= stop / (double)(n * n)) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const cplx phase = apq / r;

                // Rotation zeroing a(p,q): tan(2t) = 2r / (aqq - app),
                // |t| <= pi/4 branch via the usual stable formula.
                const double tau = (aqq - app) / (2.0 * r);
                double t;
                if (std::isinf(tau)) {
                    t = 0.0;
                } else if (tau >= 0.0) {
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                } else {
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = s * phase;   // G(p,q) entry
                const cplx spc = std::conj(sp);

                // A <- G* A G, columns/rows p and q only.
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx ajp = a(j, p), ajq = a(j, q);
                    a(j, p) = c * ajp - spc * ajq;
                    a(j, q) = sp * ajp + c * ajq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - sp * aqj;
                    a(q, j) = spc * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx{a(p, p).real(), 0.0};
                a(q, q) = cplx{a(q, q).real(), 0.0};

                for (std::size_t j = 0; j < n; ++j) {
                    const cplx vjp = v(j, p), vjq = v(j, q);
                    v(j, p) = c * vjp - spc * vjq;
                    v(j, q) = sp * vjp + c * vjq;
                }
            }
        }
    }
    if (sweep == max_sweeps && off_norm() > stop * 1e3)
        throw NumericalError("eig_hermitian: Jacobi iteration did not converge in 64 sweeps");

    std::vector<EigenPair> out(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() > a(j, j).real();
    });
    for (std::size_t i = 0; i < n; ++i) {
        out[i].value = cplx{a(order[i], order[i]).real(), 0.0};
        out[i].vector = v.col(order[i]);
        phase_normalize(out[i].vector);
    }
    return out;
}

struct Eig2x2Result {
    std::vector<EigenPair> pairs;  // two pairs normally, one if defective
    bool defective = false;
};

/// Eigendecomposition of a general complex 2x2 via the quadratic formula on
/// the characteristic polynomial. Pairs are ordered by |eigenvalue|,
/// descending. A defective matrix (one independent eigenvector) yields a
/// single pair and the flag.
inline Eig2x2Result eig_general_2x2(const CMatrix& a) {
    if (a.rows() != 2 || a.cols() != 2)
        throw std::invalid_argument("eig_general_2x2: matrix is not 2x2");
    const cplx tr = a(0, 0) + a(1, 1);
    const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    // Pick the root farther from zero first for cancellation stability.
    cplx l1 = 0.5 * (tr + disc);
    cplx l2 = 0.5 * (tr - disc);
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
    if (std::abs(l1) > 1e-300) l2 = det / l1;  // Vieta refinement

    const double scale = std::max(a.norm_fro(), 1e-300);

    auto eigvec_for = [&](cplx lambda) -> CMatrix {
        // Rows of (A - lambda I) are orthogonal (conjugated) to the
        // eigenvector; take the larger candidate of the two constructions.
        const CMatrix c1 = CMatrix::column({a(0, 1), lambda - a(0, 0)});
        const CMatrix c2 = CMatrix::column({lambda - a(1, 1), a(1, 0)});
        CMatrix best = (c1.norm_fro() >= c2.norm_fro()) ? c1 : c2;
        if (best.norm_fro() <= 1e-14 * scale) {
            // (A - lambda I) ~ 0: every vector is an eigenvector.
            best = CMatrix::column({1.0, 0.0});
        }
        best = normalized_column(best);
        phase_normalize(best);
        return best;
    };

    Eig2x2Result out;
    const CMatrix shifted = a - l1 * CMatrix::identity(2);
    const bool scalar_multiple_of_identity = shifted.norm_fro() <= 1e-12 * scale;

    if (std::abs(l1 - l2) <= 1e-12 * scale && !scalar_multiple_of_identity) {
        // Repeated eigenvalue with a rank-1 shifted matrix: defective.
        out.defective = true;
        out.pairs.push_back({l1, eigvec_for(l1)});
        return out;
    }
    if (scalar_multiple_of_identity) {
        out.pairs.push_back({l1, CMatrix::column({1.0, 0.0})});
        out.pairs.push_back({l2, CMatrix::column({0.0, 1.0})});
        return out;
    }
    out.pairs.push_back({l1, eigvec_for(l1)});
    out.pairs.push_back({l2, eigvec_for(l2)});
    return out;
}

/// Singular values of a, descending (square roots of the eigenvalues of the
/// smaller Gram matrix, with negative rounding dust clamped).
inline std::vector<double> singular_values(const CMatrix& a) {
    if (a.empty()) throw std::invalid_argument("singular_values: empty matrix");
    const CMatrix g = (a.rows() >= a.cols()) ? (a.adjoint() * a) : (a * a.adjoint());
    auto eig = eig_hermitian(g);
    std::vector<double> s(eig.size());
    for (std::size_t i = 0; i < eig.size(); ++i)
        s[i] = std::sqrt(std::max(0.0, eig[i].value.real()));
    return s;
}

/// Inverse by Gauss-Jordan with partial pivoting. Declares the matrix
/// singular when sigma_min < 1e-13 * sigma_max.
inline CMatrix inverse(const CMatrix& a) {
    if (!a.is_square()) throw std::invalid_argument("inverse: matrix not square");
    const std::size_t n = a.rows();
    const auto sv = singular_values(a);
    if (sv.front() <= 0.0 || sv.back() < 1e-13 * sv.front())
        throw SingularMatrixError("inverse: matrix is numerically singular");

    CMatrix w = a;
    CMatrix inv = CMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(col, j), w(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        }
        const cplx d = w(col, col);
        if (std::abs(d) < 1e-300) throw SingularMatrixError("inverse: zero pivot");
        const cplx dinv = 1.0 / d;
        for (std::size_t j = 0; j < n; ++j) {
            w(col, j) *= dinv;
            inv(col, j) *= dinv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const cplx f = w(r, col);
            if (f == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                w(r, j) -= f * w(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Orthonormal basis of the column space (rank by singular values above
/// 1e-12 relative): eigenvectors of a a* belonging to nonzero singular
/// values. For a single nonzero column this is just the normalized column,
/// up to phase.
inline CMatrix orthonormal_basis(const CMatrix& a) {
    if (a.empty()) throw std::invalid_argument("orthonormal_basis: empty matrix");
    const CMatrix g = a * a.adjoint();
    if (g.norm_fro() <= 0.0) throw std::invalid_argument("orthonormal_basis: zero matrix");
    auto eig = eig_hermitian(g);
    const double smax = std::sqrt(std::max(0.0, eig.front().value.real()));
    std::size_t rank = 0;
    for (const auto& p : eig)
        if (std::sqrt(std::max(0.0, p.value.real())) > 1e-12 * smax) ++rank;
    if (rank == 0) throw std::invalid_argument("orthonormal_basis: zero matrix");
    CMatrix b(a.rows(), rank);
    for (std::size_t j = 0; j < rank; ++j) b.set_col(j, eig[j].vector);
    return b;
}

/// Hermitian PSD square root: eigenvalue dust below zero is clamped; inputs
/// with materially negative eigenvalues are rejected.
inline CMatrix hermitian_sqrt(const CMatrix& a) {
    if (!a.is_square()) throw std::invalid_argument("hermitian_sqrt: matrix not square");
    auto eig = eig_hermitian(a);
    const double scale = std::max(a.norm_fro(), 1e-300);
    CMatrix out(a.rows(), a.cols());
    for (const auto& p : eig) {
        const double lam = p.value.real();
        if (lam < -1e-10 * scale)
            throw std::invalid_argument("hermitian_sqrt: matrix is materially indefinite");
        const double s = std::sqrt(std::max(0.0, lam));
        const CMatrix vvt = p.vector * p.vector.adjoint();
        out += s * vvt;
    }
    return out;
}

}  // namespace iasim
