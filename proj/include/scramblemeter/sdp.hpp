#pragma once

// Dense complex semidefinite programming.
//
//   minimize    Re Tr(C X)
//   subject to  Re Tr(A_i X) = b_i,   X >= 0,
//
// with the dual
//
//   maximize    b . y
//   subject to  Z = C - sum_i y_i A_i >= 0.
//
// X, Z, C and every A_i share a block-diagonal structure; a problem with a
// single block is the plain dense case. Hermitian matrices are handled
// natively (no realification). The method is an infeasible primal-dual
// interior point iteration with the HKM search direction and Mehrotra's
// predictor-corrector, started from identity-proportional X and Z.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace scramblemeter {

/// Block-diagonal Hermitian matrix, one dense block per entry.
using BlockMatrix = std::vector<CMatrix>;

inline CMatrix block_to_dense(const BlockMatrix& blocks) {
    Index n = 0;
    for (const auto& b : blocks) n += b.rows();
    CMatrix out = CMatrix::Zero(n, n);
    Index off = 0;
    for (const auto& b : blocks) {
        out.block(off, off, b.rows(), b.cols()) = b;
        off += b.rows();
    }
    return out;
}

struct SdpConstraint {
    BlockMatrix a;
    double b = 0.0;
};

struct SdpProblem {
    std::vector<Index> block_dims;
    BlockMatrix objective;
    std::vector<SdpConstraint> constraints;

    /// Single dense block.
    static SdpProblem dense(CMatrix c, std::vector<std::pair<CMatrix, double>> cons) {
        SdpProblem p;
        p.block_dims = {c.rows()};
        p.objective = {std::move(c)};
        for (auto& [a, b] : cons) p.constraints.push_back({{std::move(a)}, b});
        return p;
    }

    Index dim() const {
        Index n = 0;
        for (Index d : block_dims) n += d;
        return n;
    }

    /// Shapes agree and every matrix is Hermitian within 1e-12.
    void validate() const {
        if (block_dims.empty()) throw DimensionError("SDP needs at least one block");
        auto check = [&](const BlockMatrix& m, const char* what) {
            if (m.size() != block_dims.size()) throw DimensionError(std::string("SDP ") + what + ": wrong block count");
            for (std::size_t k = 0; k < m.size(); ++k) {
                if (m[k].rows() != block_dims[k] || m[k].cols() != block_dims[k]) {
                    throw DimensionError(std::string("SDP ") + what + ": block shape mismatch");
                }
                if (!all_finite(m[k])) throw ValidationError(std::string("SDP ") + what + ": non-finite entries");
                const double dev = hermiticity_deviation(m[k]);
                if (dev > tol::exact * std::max(1.0, max_abs_entry(m[k]))) {
                    throw ValidationError(std::string("SDP ") + what + " is not Hermitian", dev);
                }
            }
        };
        for (Index d : block_dims) {
            if (d < 1) throw DimensionError("SDP block dimensions must be positive");
        }
        check(objective, "objective");
        for (const auto& c : constraints) check(c.a, "constraint");
    }
};

enum class SdpStatus { optimal, max_iterations, infeasible };

inline const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::max_iterations: return "max-iterations";
        case SdpStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

struct SdpSolution {
    BlockMatrix primal_matrix;
    BlockMatrix dual_slack;
    std::vector<double> dual_vector;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;  // |primal - dual| / max(1, |primal|)
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    SdpStatus status = SdpStatus::max_iterations;
};

struct SdpOptions {
    double tol = 1e-8;
    int max_iters = 200;
    /// Receives (iteration, primal value, dual value, gap) once per iteration.
    std::function<void(int, double, double, double)> trace;
};

namespace detail {

struct BlockOps {
    const std::vector<Index>& dims;

    BlockMatrix zeros() const {
        BlockMatrix m;
        for (Index d : dims) m.push_back(CMatrix::Zero(d, d));
        return m;
    }
    BlockMatrix scaled_identity(double s) const {
        BlockMatrix m;
        for (Index d : dims) m.push_back(s * identity(d));
        return m;
    }
};

inline double inner(const BlockMatrix& a, const BlockMatrix& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += trace_inner(a[k], b[k]);
    return s;
}

inline double frobenius(const BlockMatrix& a) {
    double s = 0.0;
    for (const auto& m : a) s += m.squaredNorm();
    return std::sqrt(s);
}

inline void axpy(BlockMatrix& y, double alpha, const BlockMatrix& x) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

/// Largest step alpha <= 1 keeping X + alpha dX positive definite, damped.
inline double step_length(const BlockMatrix& x, const BlockMatrix& dx, double damping) {
    double alpha_max = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) {
        Eigen::LLT<CMatrix> llt(x[k]);
        if (llt.info() != Eigen::Success) return 0.0;
        const CMatrix l_inv = llt.matrixL().solve(identity(x[k].rows()));
        const CMatrix w = hermitian_part(l_inv * dx[k] * l_inv.adjoint());
        const double lmin = hermitian_eigenvalues(w).minCoeff();
        if (lmin < 0.0) alpha_max = std::min(alpha_max, -1.0 / lmin);
    }
    return std::min(1.0, damping * alpha_max);
}

}  // namespace detail

inline SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt = {}) {
    if (!(opt.tol > 0.0)) throw ValidationError("solve_sdp: tol must be positive");
    if (opt.max_iters < 1) throw ValidationError("solve_sdp: max_iters must be positive");
    p.validate();
    if (p.dim() > 512) throw DimensionError("solve_sdp: problem dimension exceeds 512");

    const std::size_t m = p.constraints.size();
    const std::size_t nb = p.block_dims.size();
    const double n = static_cast<double>(p.dim());
    const detail::BlockOps ops{p.block_dims};

    // Which blocks each constraint touches.
    std::vector<std::vector<std::size_t>> support(m);
    double norm_b = 0.0, max_a = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < nb; ++k) {
            if (max_abs_entry(p.constraints[i].a[k]) > 0.0) support[i].push_back(k);
        }
        norm_b += p.constraints[i].b * p.constraints[i].b;
        max_a = std::max(max_a, detail::frobenius(p.constraints[i].a));
    }
    norm_b = std::sqrt(norm_b);
    const double norm_c = detail::frobenius(p.objective);

    auto apply_a = [&](const BlockMatrix& x) {
        Eigen::VectorXd out(static_cast<Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t k : support[i]) s += trace_inner(p.constraints[i].a[k], x[k]);
            out(static_cast<Index>(i)) = s;
        }
        return out;
    };
    auto apply_at = [&](const Eigen::VectorXd& y) {
        BlockMatrix out = ops.zeros();
        for (std::size_t i = 0; i < m; ++i) {
            const double yi = y(static_cast<Index>(i));
            if (yi == 0.0) continue;
            for (std::size_t k : support[i]) out[k] += yi * p.constraints[i].a[k];
        }
        return out;
    };

    Eigen::VectorXd b(static_cast<Index>(m));
    for (std::size_t i = 0; i < m; ++i) b(static_cast<Index>(i)) = p.constraints[i].b;

    // Identity-proportional start, scaled to the data.
    const double sqrt_n = std::sqrt(n);
    double xi = std::max(1.0, sqrt_n);
    for (std::size_t i = 0; i < m; ++i) {
        const double an = detail::frobenius(p.constraints[i].a);
        if (an > 0.0) xi = std::max(xi, sqrt_n * (1.0 + std::abs(p.constraints[i].b)) / (1.0 + an));
    }
    const double eta = std::max({1.0, sqrt_n, norm_c, max_a}) / sqrt_n * 1.0;
    BlockMatrix x = ops.scaled_identity(xi);
    BlockMatrix z = ops.scaled_identity(std::max(eta, 1.0));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Index>(m));

    SdpSolution sol;
    sol.status = SdpStatus::max_iterations;

    auto record = [&](int iter) {
        const Eigen::VectorXd rp = b - apply_a(x);
        BlockMatrix rd = p.objective;
        detail::axpy(rd, -1.0, z);
        detail::axpy(rd, -1.0, apply_at(y));
        sol.primal_matrix = x;
        sol.dual_slack = z;
        sol.dual_vector.assign(y.data(), y.data() + y.size());
        sol.primal_value = detail::inner(p.objective, x);
        sol.dual_value = b.dot(y);
        sol.gap = std::abs(sol.primal_value - sol.dual_value) / std::max(1.0, std::abs(sol.primal_value));
        sol.primal_residual = rp.norm() / (1.0 + norm_b);
        sol.dual_residual = detail::frobenius(rd) / (1.0 + norm_c);
        sol.iterations = iter;
        return std::make_pair(rp, rd);
    };

    double best_merit = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int iter = 0;; ++iter) {
        auto [rp, rd] = record(iter);
        if (opt.trace) opt.trace(iter, sol.primal_value, sol.dual_value, sol.gap);
        if (sol.gap <= opt.tol && sol.primal_residual <= opt.tol && sol.dual_residual <= opt.tol) {
            sol.status = SdpStatus::optimal;
            return sol;
        }

        // Farkas-type certificates once iterates run away.
        if (sol.dual_value > 0.0) {
            BlockMatrix aty_z = apply_at(y);
            detail::axpy(aty_z, 1.0, z);
            if (sol.dual_value > 1e8 * std::max(1.0, norm_c) &&
                detail::frobenius(aty_z) / sol.dual_value < 1e-6 && sol.primal_residual > opt.tol) {
                sol.status = SdpStatus::infeasible;
                return sol;
            }
        }
        if (sol.primal_value < 0.0) {
            const double ax = apply_a(x).norm();
            if (-sol.primal_value > 1e8 * std::max(1.0, norm_b) && ax / -sol.primal_value < 1e-6 &&
                sol.dual_residual > opt.tol) {
                sol.status = SdpStatus::infeasible;
                return sol;
            }
        }
        if (iter >= opt.max_iters) return sol;

        const double merit = std::max({sol.gap, sol.primal_residual, sol.dual_residual});
        if (merit < 0.999 * best_merit) {
            best_merit = merit;
            stalled = 0;
        } else if (++stalled >= 8) {
            return sol;  // numerical floor reached; keep max-iterations status
        }

        const double mu = detail::inner(x, z) / n;

        BlockMatrix z_inv(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            Eigen::LLT<CMatrix> llt(z[k]);
            if (llt.info() != Eigen::Success) return sol;
            z_inv[k] = llt.solve(identity(z[k].rows()));
        }

        // Schur complement M_ij = Re Tr(A_i X A_j Z^{-1}).
        std::vector<BlockMatrix> g(m);
        for (std::size_t j = 0; j < m; ++j) {
            g[j].resize(nb);
            for (std::size_t k : support[j]) g[j][k] = x[k] * p.constraints[j].a[k] * z_inv[k];
        }
        Eigen::MatrixXd schur(static_cast<Index>(m), static_cast<Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                double s = 0.0;
                for (std::size_t k : support[i]) {
                    if (g[j][k].size() != 0) s += trace_inner(p.constraints[i].a[k], g[j][k]);
                }
                schur(static_cast<Index>(i), static_cast<Index>(j)) = s;
                schur(static_cast<Index>(j), static_cast<Index>(i)) = s;
            }
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
        if (ldlt.info() != Eigen::Success) return sol;

        // Solves for the direction with centering sigma*mu and second-order
        // correction term `corr` (dX_aff dZ_aff), which may be empty.
        auto direction = [&](double sigma_mu, const BlockMatrix* corr) {
            BlockMatrix base(nb);  // sigma mu Z^{-1} - X - corr Z^{-1} - X Rd Z^{-1}
            for (std::size_t k = 0; k < nb; ++k) {
                base[k] = sigma_mu * z_inv[k] - x[k] - x[k] * rd[k] * z_inv[k];
                if (corr) base[k] -= (*corr)[k] * z_inv[k];
            }
            const Eigen::VectorXd rhs = rp - apply_a(base);
            const Eigen::VectorXd dy = ldlt.solve(rhs);
            BlockMatrix dz = rd;
            detail::axpy(dz, -1.0, apply_at(dy));
            BlockMatrix dx(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                CMatrix t = sigma_mu * z_inv[k] - x[k] - x[k] * dz[k] * z_inv[k];
                if (corr) t -= (*corr)[k] * z_inv[k];
                dx[k] = hermitian_part(t);
                dz[k] = hermitian_part(dz[k]);
            }
            return std::make_tuple(std::move(dx), dy, std::move(dz));
        };

        // Predictor.
        auto [dx_a, dy_a, dz_a] = direction(0.0, nullptr);
        const double ap_a = detail::step_length(x, dx_a, 1.0);
        const double ad_a = detail::step_length(z, dz_a, 1.0);
        double mu_aff = 0.0;
        for (std::size_t k = 0; k < nb; ++k) {
            mu_aff += trace_inner(x[k] + ap_a * dx_a[k], z[k] + ad_a * dz_a[k]);
        }
        mu_aff /= n;
        const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
        const double sigma = ratio * ratio * ratio;

        // Corrector.
        BlockMatrix corr(nb);
        for (std::size_t k = 0; k < nb; ++k) corr[k] = dx_a[k] * dz_a[k];
        auto [dx, dy, dz] = direction(sigma * mu, &corr);
        const double damping = 0.98;
        const double ap = detail::step_length(x, dx, damping);
        const double ad = detail::step_length(z, dz, damping);
        if (ap <= 0.0 && ad <= 0.0) return sol;
        detail::axpy(x, ap, dx);
        detail::axpy(z, ad, dz);
        y += ad * dy;
        for (auto& blk : x) blk = hermitian_part(blk);
        for (auto& blk : z) blk = hermitian_part(blk);
    }
}

}  // namespace scramblemeter
