#pragma once

// Single-shot quantities: guessing probability and discrimination ratio of an
// ensemble under a POVM, robustness of measurement, and the (conditional)
// min-entropy of classical-quantum states. All logarithms are base 2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "discrimination.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "qstate.hpp"
#include "sdp.hpp"

namespace scramblemeter {

/// Weighted list of states {(p_x, rho_x)}.
class Ensemble {
public:
    Ensemble(std::vector<double> priors, std::vector<DensityMatrix> states)
        : priors_(std::move(priors)), states_(std::move(states)) {
        if (states_.empty()) throw ValidationError("ensemble must contain at least one state");
        if (priors_.size() != states_.size()) throw DimensionError("ensemble: one prior per state required");
        double total = 0.0;
        for (double p : priors_) {
            if (!(p >= 0.0)) throw ValidationError("priors must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > tol::exact) throw ValidationError("priors must sum to one", std::abs(total - 1.0));
        for (const auto& s : states_) {
            if (s.dim() != states_.front().dim()) throw DimensionError("ensemble states must share a dimension");
            matrices_.push_back(s.matrix());
        }
    }

    static Ensemble uniform(std::vector<DensityMatrix> states) {
        std::vector<double> p(states.size(), 1.0 / static_cast<double>(states.size()));
        return Ensemble(std::move(p), std::move(states));
    }

    std::size_t size() const noexcept { return states_.size(); }
    Index dim() const noexcept { return states_.front().dim(); }
    const std::vector<double>& priors() const noexcept { return priors_; }
    const std::vector<DensityMatrix>& states() const noexcept { return states_; }
    std::span<const CMatrix> matrices() const noexcept { return matrices_; }
    double max_prior() const { return *std::max_element(priors_.begin(), priors_.end()); }

private:
    std::vector<double> priors_;
    std::vector<DensityMatrix> states_;
    std::vector<CMatrix> matrices_;
};

/// The classical-quantum state sum_x p_x |x><x| (x) rho_x. The register basis
/// is implicit in the item order.
class CqState {
public:
    explicit CqState(Ensemble e) : ensemble_(std::move(e)) {}
    CqState(std::vector<double> priors, std::vector<DensityMatrix> states)
        : ensemble_(std::move(priors), std::move(states)) {}

    const Ensemble& ensemble() const noexcept { return ensemble_; }
    std::size_t size() const noexcept { return ensemble_.size(); }

    /// Materialized block-diagonal operator on register (x) system.
    CMatrix matrix() const {
        const Index d = ensemble_.dim();
        const Index n = static_cast<Index>(size());
        CMatrix out = CMatrix::Zero(n * d, n * d);
        for (Index x = 0; x < n; ++x) {
            out.block(x * d, x * d, d, d) = ensemble_.priors()[static_cast<std::size_t>(x)] *
                                            ensemble_.matrices()[static_cast<std::size_t>(x)];
        }
        return out;
    }

private:
    Ensemble ensemble_;
};

namespace detail {
inline void check_povm_for(const Ensemble& e, const Povm& m) {
    if (m.size() != e.size()) throw DimensionError("POVM needs one effect per ensemble letter");
    if (m.dim() != e.dim()) throw DimensionError("POVM and ensemble dimensions differ");
}
}  // namespace detail

/// sum_x p_x Tr(mu_x rho_x).
inline double p_guess(const Ensemble& e, const Povm& m) {
    detail::check_povm_for(e, m);
    return detail::guessing_value(e.matrices(), e.priors(), m);
}

/// Discrimination ratio sum_x (p_x / p_max) Tr(mu_x rho_x), in [0, X].
inline double r_guess(const Ensemble& e, const Povm& m) { return p_guess(e, m) / e.max_prior(); }

/// Robustness of measurement: sum_x ||mu_x||_inf - 1.
inline double robustness(const Povm& m) {
    double s = 0.0;
    for (const auto& e : m.effects()) s += operator_norm(e);
    return s - 1.0;
}

/// max over ensembles of r_guess(E, m). The maximum has the closed form
/// sum_x ||mu_x||_inf (uniform priors, each rho_x the top eigenprojector of
/// mu_x), so no optimization is run.
inline double max_ratio_over_ensembles(const Povm& m) { return robustness(m) + 1.0; }

/// -log2 ||rho||_inf.
inline double h_min(const DensityMatrix& rho) { return -std::log2(operator_norm(rho.matrix())); }

struct ConditionalMinEntropy {
    double bits = 0.0;           // -log2(p_guess_upper)
    double p_guess_upper = 0.0;  // Tr sigma for a feasible sigma
    double p_guess_lower = 0.0;  // attained by the POVM read off the dual
    double gap = 0.0;            // upper - lower
    SdpStatus status = SdpStatus::max_iterations;
    int iterations = 0;
};

/// H_min(X|C) = -log2 min { Tr sigma : sigma >= p_x rho_x for all x }, the cq
/// form of min Tr sigma_B s.t. I_A (x) sigma_B >= rho_AB. Solved with
/// primal variable diag(sigma, S_1, ..., S_X) and equalities
/// sigma - S_x = p_x rho_x; the dual multipliers are sub-normalized effects.
inline ConditionalMinEntropy h_min_cond(const CqState& cq, double tol = 1e-8, int max_iters = 200) {
    const Ensemble& e = cq.ensemble();
    const Index d = e.dim();
    const std::size_t count = e.size();
    const std::vector<CMatrix> basis = hermitian_basis(d);

    SdpProblem prob;
    prob.block_dims.assign(count + 1, d);
    prob.objective.push_back(identity(d));
    for (std::size_t x = 0; x < count; ++x) prob.objective.push_back(CMatrix::Zero(d, d));
    for (std::size_t x = 0; x < count; ++x) {
        const CMatrix target = e.priors()[x] * e.matrices()[x];
        for (const CMatrix& b : basis) {
            SdpConstraint c;
            c.a.assign(count + 1, CMatrix::Zero(d, d));
            c.a[0] = b;
            c.a[x + 1] = -b;
            c.b = trace_inner(b, target);
            prob.constraints.push_back(std::move(c));
        }
    }

    SdpOptions opt;
    opt.tol = std::max(tol * 0.1, 1e-12);
    opt.max_iters = max_iters;
    const SdpSolution sol = solve_sdp(prob, opt);

    // Upper bound: shift sigma until sigma >= p_x rho_x holds exactly.
    CMatrix sigma = hermitian_part(sol.primal_matrix[0]);
    sigma += detail::dual_feasibility_shift(sigma, e.matrices(), e.priors()) * identity(d);
    const double upper = real_trace(sigma);

    // Lower bound: W_x = sum_k y_{x,k} B_k are PSD with sum <= I; complete them
    // to a POVM and evaluate the guessing probability it attains.
    std::vector<CMatrix> effects;
    for (std::size_t x = 0; x < count; ++x) {
        CMatrix w = CMatrix::Zero(d, d);
        for (std::size_t k = 0; k < basis.size(); ++k) w += sol.dual_vector[x * basis.size() + k] * basis[k];
        effects.push_back(psd_part(w));
    }
    const double lower = detail::guessing_value(e.matrices(), e.priors(), normalize_povm(std::move(effects)));

    ConditionalMinEntropy out;
    out.p_guess_upper = upper;
    out.p_guess_lower = std::min(lower, upper);
    out.gap = std::max(0.0, upper - lower);
    out.bits = -std::log2(upper);
    out.iterations = sol.iterations;
    out.status = out.gap <= tol ? SdpStatus::optimal
                                : (sol.status == SdpStatus::infeasible ? SdpStatus::infeasible : SdpStatus::max_iterations);
    return out;
}

struct DualityReport {
    double p_guess = 0.0;              // from solve_discrimination
    double two_pow_minus_hmin = 0.0;   // from h_min_cond
    double difference = 0.0;
    bool passed = false;
};

/// Checks max_mu p_guess = 2^{-H_min(X|C)} with the two sides computed by
/// different programs.
inline DualityReport verify_duality(const CqState& cq, double tol = 1e-6) {
    const Ensemble& e = cq.ensemble();
    const double inner_tol = std::min(1e-8, tol * 0.01);
    const auto disc = solve_discrimination(e.matrices(), e.priors(), inner_tol);
    const auto hmin = h_min_cond(cq, inner_tol);
    DualityReport r;
    r.p_guess = disc.p_guess;
    r.two_pow_minus_hmin = std::exp2(-hmin.bits);
    r.difference = std::abs(r.two_pow_minus_hmin - r.p_guess);
    r.passed = r.difference <= tol;
    return r;
}

}  // namespace scramblemeter
