#pragma once

// Random instance generators and small reference computations shared by the
// test binaries. Nothing here calls into the code paths under test except
// for the plain data types.

#include <cmath>
#include <random>
#include <vector>

#include "scramblemeter/linalg.hpp"
#include "scramblemeter/qstate.hpp"

namespace scramblemeter::testing {

inline CMatrix random_complex(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, Index d) {
    CMatrix a = random_complex(rng, d, d);
    return 0.5 * (a + a.adjoint());
}

inline CVector random_pure(std::mt19937_64& rng, Index d) {
    CMatrix v = random_complex(rng, d, 1);
    return v.col(0).normalized();
}

/// Random full-rank density matrix (Ginibre).
inline CMatrix random_density(std::mt19937_64& rng, Index d) {
    CMatrix g = random_complex(rng, d, d);
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline CMatrix random_unitary(std::mt19937_64& rng, Index d) {
    Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, d, d));
    CMatrix q = qr.householderQ();
    return q;
}

/// First n columns of a random unitary.
inline CMatrix random_isometry_matrix(std::mt19937_64& rng, Index m, Index n) {
    return random_unitary(rng, m).leftCols(n);
}

/// Random POVM built as S^{-1/2} G_x S^{-1/2} from random PSD G_x.
inline std::vector<CMatrix> random_povm_effects(std::mt19937_64& rng, Index d, std::size_t count, Index rank = 1) {
    std::vector<CMatrix> g;
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t x = 0; x < count; ++x) {
        CMatrix a = random_complex(rng, d, rank);
        g.push_back(a * a.adjoint());
        sum += g.back();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sum);
    CMatrix w = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                es.eigenvectors().adjoint();
    for (auto& e : g) e = w * e * w;
    for (auto& e : g) e = 0.5 * (e + e.adjoint());
    return g;
}

inline double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace scramblemeter::testing
