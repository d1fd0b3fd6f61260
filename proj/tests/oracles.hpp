#pragma once

// Brute-force reference computations: slow, direct, and independent of the
// library code they are compared against.

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "scramblemeter/linalg.hpp"
#include "scramblemeter/qstate.hpp"

namespace scramblemeter::testing {

/// Maximum of sum_x <n_x|mu_x|n_x> with every n_x on a Bloch-sphere grid:
/// r_guess over uniform-prior pure-state ensembles.
inline double bloch_grid_max_ratio(const Povm& m, int nt = 180, int np = 360) {
    double total = 0.0;
    for (const auto& e : m.effects()) {
        double best = 0.0;
        for (int i = 0; i <= nt; ++i)
            for (int j = 0; j < np; ++j) {
                const double th = std::numbers::pi * i / nt, ph = 2 * std::numbers::pi * j / np;
                CVector n(2);
                n << std::cos(th / 2), std::polar(1.0, ph) * std::sin(th / 2);
                best = std::max(best, (n.adjoint() * e * n)(0, 0).real());
            }
        total += best;
    }
    return total;
}

// Full 2^N spin system. Bit (N-1-s) of a basis index is site s; bit value 0 is
// spin up.
struct FullChain {
    int n;
    double h;

    std::size_t dim() const { return std::size_t{1} << n; }

    CVector apply_h(const CVector& psi) const {
        CVector out = CVector::Zero(psi.size());
        for (std::size_t b = 0; b < dim(); ++b) {
            const Complex amp = psi(static_cast<Index>(b));
            if (amp == Complex(0.0)) continue;
            const double sz = 0.5 * (n - 2 * std::popcount(b));
            out(static_cast<Index>(b)) += -(2.0 / n) * sz * sz * amp;
            for (int s = 0; s < n; ++s) out(static_cast<Index>(b ^ (std::size_t{1} << s))) += -h * amp;
        }
        return out;
    }

    CVector evolve(CVector psi, double t) const {
        const double bound = n / 2.0 + std::abs(h) * n + 1.0;
        const int steps = static_cast<int>(std::ceil(std::abs(t) * bound / 0.5)) + 1;
        const Complex step(0.0, -t / steps);
        for (int k = 0; k < steps; ++k) {
            CVector term = psi;
            CVector sum = psi;
            for (int order = 1; order <= 40; ++order) {
                term = apply_h(term) * (step / static_cast<double>(order));
                sum += term;
                if (term.norm() < 1e-18) break;
            }
            psi = sum;
        }
        return psi;
    }

    CVector basis(std::size_t b) const {
        CVector v = CVector::Zero(static_cast<Index>(dim()));
        v(static_cast<Index>(b)) = 1.0;
        return v;
    }

    // One-site reduction of sum_ij a_ij |psi_i><psi_j|.
    CMatrix reduce(const std::vector<CVector>& psi, const CMatrix& a, int site) const {
        const std::size_t mask = std::size_t{1} << (n - 1 - site);
        CMatrix out = CMatrix::Zero(2, 2);
        for (std::size_t b = 0; b < dim(); ++b) {
            if (b & mask) continue;
            const std::size_t pair[2] = {b, b | mask};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y)
                            out(x, y) += a(i, j) * psi[i](static_cast<Index>(pair[x])) *
                                         std::conj(psi[j](static_cast<Index>(pair[y])));
        }
        return out;
    }

    // Amplitudes on the symmetric Dicke basis, index i <-> i down spins.
    CVector to_dicke(const CVector& psi) const {
        CVector out = CVector::Zero(n + 1);
        for (std::size_t b = 0; b < dim(); ++b) out(std::popcount(b)) += psi(static_cast<Index>(b));
        for (int k = 0; k <= n; ++k) {
            out(k) /= std::sqrt(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
        }
        return out;
    }
};

}  // namespace scramblemeter::testing
