#pragma once

// Minimum-error state discrimination: the optimal POVM and guessing
// probability for an ensemble {(p_x, rho_x)}, by semidefinite programming,
// plus an independent fixed-point iteration used as a cross-check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "qstate.hpp"
#include "sdp.hpp"

namespace scramblemeter {

struct DiscriminationResult {
    Povm povm;
    double p_guess = 0.0;      // attained by `povm`: a certified lower bound
    double upper_bound = 0.0;  // Tr Y for a dual feasible Y >= p_x rho_x
    double gap = 0.0;          // upper_bound - p_guess
    SdpStatus status = SdpStatus::max_iterations;
    int iterations = 0;
};

namespace detail {

inline void check_ensemble(std::span<const CMatrix> states, std::span<const double> priors) {
    if (states.empty()) throw ValidationError("ensemble must contain at least one state");
    if (states.size() != priors.size()) throw DimensionError("ensemble: one prior per state required");
    const Index d = states.front().rows();
    for (const auto& s : states) {
        if (s.rows() != d || s.cols() != d) throw DimensionError("ensemble states must share a dimension");
    }
    double total = 0.0;
    for (double p : priors) {
        if (!(p >= 0.0)) throw ValidationError("priors must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > tol::exact * 10.0) throw ValidationError("priors must sum to one", std::abs(total - 1.0));
}

/// Smallest shift s >= 0 with Y + s I >= p_x rho_x for every x.
inline double dual_feasibility_shift(const CMatrix& y, std::span<const CMatrix> states, std::span<const double> priors) {
    double shift = 0.0;
    for (std::size_t x = 0; x < states.size(); ++x) {
        shift = std::max(shift, max_eigenvalue(hermitian_part(priors[x] * states[x] - y)));
    }
    return shift;
}

inline double guessing_value(std::span<const CMatrix> states, std::span<const double> priors, const Povm& m) {
    double s = 0.0;
    for (std::size_t x = 0; x < states.size(); ++x) s += priors[x] * trace_inner(m[x], states[x]);
    return s;
}

}  // namespace detail

/// Maximizes sum_x p_x Tr(mu_x rho_x) over POVMs with one effect per state.
/// The returned POVM is exactly valid and the upper bound comes from an
/// exactly feasible dual point, so `gap` is a rigorous optimality gap.
inline DiscriminationResult solve_discrimination(std::span<const CMatrix> states, std::span<const double> priors,
                                                 double tol = 1e-8, int max_iters = 200) {
    detail::check_ensemble(states, priors);
    const Index d = states.front().rows();
    const std::size_t count = states.size();

    // Primal: X = diag(mu_1, ..., mu_X), minimize -sum p_x Tr(rho_x mu_x),
    // subject to Tr(B (sum_x mu_x)) = Tr(B) for a Hermitian basis {B}.
    SdpProblem prob;
    prob.block_dims.assign(count, d);
    for (std::size_t x = 0; x < count; ++x) prob.objective.push_back(-priors[x] * hermitian_part(states[x]));
    const std::vector<CMatrix> basis = hermitian_basis(d);
    for (const CMatrix& b : basis) {
        prob.constraints.push_back({BlockMatrix(count, b), b.trace().real()});
    }

    SdpOptions opt;
    opt.tol = std::max(tol * 0.1, 1e-12);
    opt.max_iters = max_iters;
    const SdpSolution sol = solve_sdp(prob, opt);

    std::vector<CMatrix> effects = sol.primal_matrix;
    Povm povm = normalize_povm(std::move(effects));
    const double lower = detail::guessing_value(states, priors, povm);

    // Dual: sum_k y_k B_k = -Y with Y >= p_x rho_x.
    CMatrix y = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < basis.size(); ++k) y -= sol.dual_vector[k] * basis[k];
    y = hermitian_part(y);
    y += detail::dual_feasibility_shift(y, states, priors) * identity(d);
    const double upper = real_trace(y);

    DiscriminationResult out{std::move(povm), lower, upper, std::max(0.0, upper - lower), sol.status, sol.iterations};
    out.status = out.gap <= tol ? SdpStatus::optimal
                                : (sol.status == SdpStatus::infeasible ? SdpStatus::infeasible : SdpStatus::max_iterations);
    return out;
}

inline DiscriminationResult solve_discrimination(const std::vector<DensityMatrix>& states,
                                                 const std::vector<double>& priors, double tol = 1e-8,
                                                 int max_iters = 200) {
    std::vector<CMatrix> mats;
    for (const auto& s : states) mats.push_back(s.matrix());
    return solve_discrimination(std::span<const CMatrix>(mats), std::span<const double>(priors), tol, max_iters);
}

struct JrfResult {
    Povm povm;               // best iterate
    double p_guess_lower = 0.0;
    double p_guess_upper = 0.0;
    int iterations = 0;
};

/// Fixed-point iteration mu_x <- G^{-1/2} W_x mu_x W_x G^{-1/2}, W_x = p_x rho_x,
/// G = sum_x W_x mu_x W_x, from the uniform trivial measurement. Every iterate
/// is a valid POVM. The lower bound is the best guessing probability seen;
/// the upper bound is Tr Y for Y the Hermitian part of sum_x W_x mu_x shifted
/// until Y >= W_x for all x, minimized over iterates.
inline JrfResult jrf_iterate(std::span<const CMatrix> states, std::span<const double> priors, int iters) {
    detail::check_ensemble(states, priors);
    if (iters < 1) throw ValidationError("jrf_iterate: iters must be at least 1");
    const Index d = states.front().rows();
    const std::size_t count = states.size();

    std::vector<CMatrix> weighted;
    for (std::size_t x = 0; x < count; ++x) weighted.push_back(priors[x] * hermitian_part(states[x]));

    std::vector<CMatrix> mu(count, identity(d) / static_cast<double>(count));
    Povm best = Povm(mu);
    double lower = detail::guessing_value(states, priors, best);
    double upper = std::numeric_limits<double>::infinity();

    auto update_upper = [&](const std::vector<CMatrix>& effects) {
        CMatrix y = CMatrix::Zero(d, d);
        for (std::size_t x = 0; x < count; ++x) y += weighted[x] * effects[x];
        y = hermitian_part(y);
        y += detail::dual_feasibility_shift(y, states, priors) * identity(d);
        upper = std::min(upper, real_trace(y));
    };
    update_upper(mu);

    int it = 0;
    for (; it < iters; ++it) {
        CMatrix g = CMatrix::Zero(d, d);
        for (std::size_t x = 0; x < count; ++x) g += weighted[x] * mu[x] * weighted[x];
        g = hermitian_part(g);
        HermitianEigen es = hermitian_eigen(g);
        const double floor = 1e-13 * std::max(1e-300, es.values.maxCoeff());
        RVector inv_sqrt(d);
        CMatrix kernel = CMatrix::Zero(d, d);
        for (Index i = 0; i < d; ++i) {
            if (es.values(i) > floor) {
                inv_sqrt(i) = 1.0 / std::sqrt(es.values(i));
            } else {
                inv_sqrt(i) = 0.0;
                kernel += projector(es.vectors.col(i));
            }
        }
        const CMatrix w = es.vectors * inv_sqrt.asDiagonal() * es.vectors.adjoint();
        for (std::size_t x = 0; x < count; ++x) {
            mu[x] = hermitian_part(w * weighted[x] * mu[x] * weighted[x] * w + kernel / static_cast<double>(count));
        }
        Povm current = normalize_povm(mu);
        mu = current.effects();
        const double value = detail::guessing_value(states, priors, current);
        if (value > lower) {
            lower = value;
            best = std::move(current);
        }
        update_upper(mu);
        if (upper - lower <= 1e-15) {
            ++it;
            break;
        }
    }
    return {std::move(best), lower, std::max(upper, lower), it};
}

inline JrfResult jrf_iterate(const std::vector<DensityMatrix>& states, const std::vector<double>& priors, int iters) {
    std::vector<CMatrix> mats;
    for (const auto& s : states) mats.push_back(s.matrix());
    return jrf_iterate(std::span<const CMatrix>(mats), std::span<const double>(priors), iters);
}

}  // namespace scramblemeter
