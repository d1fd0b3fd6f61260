#pragma once

// Dense complex linear algebra shared by every module. Everything here is a
// thin layer over Eigen; the Hermitian eigendecomposition is the single
// primitive used for norms, positivity checks and matrix functions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace scramblemeter {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double exact = 1e-12;       // exact algebraic identities
inline constexpr double validation = 1e-10;  // validated quantum objects
inline constexpr double iterative = 1e-8;    // iteratively computed objects
}  // namespace tol

inline CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

inline bool all_finite(const CMatrix& m) {
    return m.real().allFinite() && m.imag().allFinite();
}

/// Kronecker product; a's indices vary slowest.
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline double max_abs_entry(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_deviation(const CMatrix& m) {
    return max_abs_entry(m - m.adjoint());
}

inline CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline double real_trace(const CMatrix& m) { return m.trace().real(); }

/// Re Tr(a b) for Hermitian a, without forming the product.
inline double trace_inner(const CMatrix& a, const CMatrix& b) {
    return (a.transpose().cwiseProduct(b)).sum().real();
}

struct HermitianEigen {
    RVector values;   // ascending
    CMatrix vectors;  // columns
};

inline HermitianEigen hermitian_eigen(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    if (es.info() != Eigen::Success) {
        throw Error("Hermitian eigendecomposition failed to converge");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

inline RVector hermitian_eigenvalues(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error("Hermitian eigendecomposition failed to converge");
    }
    return es.eigenvalues();
}

inline double min_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).minCoeff(); }
inline double max_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).maxCoeff(); }

/// Largest singular value. Hermitian inputs go through the eigensolver.
inline double operator_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == m.cols() && hermiticity_deviation(m) <= tol::exact * std::max(1.0, max_abs_entry(m))) {
        RVector ev = hermitian_eigenvalues(hermitian_part(m));
        return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
inline CVector top_eigenvector(const CMatrix& m) {
    HermitianEigen e = hermitian_eigen(m);
    return e.vectors.col(e.values.size() - 1);
}

/// Applies f to the spectrum of a Hermitian matrix.
template <class F>
CMatrix hermitian_function(const CMatrix& m, F&& f) {
    HermitianEigen e = hermitian_eigen(m);
    RVector fv = e.values.unaryExpr(f);
    return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

/// Orthogonal projection onto the positive semidefinite cone.
inline CMatrix psd_part(const CMatrix& m) {
    return hermitian_function(hermitian_part(m), [](double x) { return x > 0.0 ? x : 0.0; });
}

/// Orthonormal (Frobenius) basis of d x d Hermitian matrices: the d diagonal
/// units first, then for each a < b the symmetric and antisymmetric pairs.
inline std::vector<CMatrix> hermitian_basis(Index d) {
    std::vector<CMatrix> basis;
    basis.reserve(static_cast<std::size_t>(d * d));
    for (Index a = 0; a < d; ++a) {
        CMatrix e = CMatrix::Zero(d, d);
        e(a, a) = 1.0;
        basis.push_back(std::move(e));
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (Index a = 0; a < d; ++a) {
        for (Index b = a + 1; b < d; ++b) {
            CMatrix re = CMatrix::Zero(d, d);
            re(a, b) = s;
            re(b, a) = s;
            basis.push_back(std::move(re));
            CMatrix im = CMatrix::Zero(d, d);
            im(a, b) = Complex(0.0, -s);
            im(b, a) = Complex(0.0, s);
            basis.push_back(std::move(im));
        }
    }
    return basis;
}

/// Pauli matrices, in the convention sigma_z |0> = +|0>.
inline CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}
inline CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}
inline CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

inline CMatrix projector(const CVector& v) { return v * v.adjoint(); }

}  // namespace scramblemeter
