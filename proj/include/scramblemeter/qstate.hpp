#pragma once

// Quantum objects and the isometric channel: site layouts, subsystems,
// partial traces, effect embeddings, and the channel / adjoint pair obtained
// from an isometry by tracing out the unobserved sites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace scramblemeter {

class DensityMatrix {
public:
    /// Validates Hermiticity, positivity and unit trace at 1e-10.
    explicit DensityMatrix(CMatrix mat, double tolerance = tol::validation) : mat_(std::move(mat)) {
        if (mat_.rows() != mat_.cols() || mat_.rows() == 0) {
            throw DimensionError("density matrix must be square and non-empty");
        }
        if (!all_finite(mat_)) throw ValidationError("density matrix has non-finite entries");
        const double herm = hermiticity_deviation(mat_);
        if (herm > tolerance) throw ValidationError("density matrix is not Hermitian", herm);
        mat_ = hermitian_part(mat_);
        const double lmin = min_eigenvalue(mat_);
        if (lmin < -tolerance) throw ValidationError("density matrix is not positive semidefinite", -lmin);
        const double tr_dev = std::abs(real_trace(mat_) - 1.0);
        if (tr_dev > tolerance) throw ValidationError("density matrix does not have unit trace", tr_dev);
    }

    static DensityMatrix pure(const CVector& psi) { return DensityMatrix(projector(psi.normalized())); }
    static DensityMatrix maximally_mixed(Index d) {
        return DensityMatrix(identity(d) / static_cast<double>(d));
    }

    const CMatrix& matrix() const noexcept { return mat_; }
    Index dim() const noexcept { return mat_.rows(); }

private:
    CMatrix mat_;
};

/// Local dimensions of the output sites; the full space is their tensor
/// product with site 0 as the slowest-varying leg.
class SiteLayout {
public:
    SiteLayout() = default;
    explicit SiteLayout(std::vector<Index> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw ValidationError("site layout needs at least one site");
        total_ = 1;
        for (Index d : dims_) {
            if (d < 1) throw ValidationError("site dimensions must be positive");
            total_ *= d;
        }
    }

    static SiteLayout qubits(std::size_t n) { return SiteLayout(std::vector<Index>(n, 2)); }

    const std::vector<Index>& dims() const noexcept { return dims_; }
    std::size_t num_sites() const noexcept { return dims_.size(); }
    Index total_dim() const noexcept { return total_; }

    friend bool operator==(const SiteLayout&, const SiteLayout&) = default;

private:
    std::vector<Index> dims_;
    Index total_ = 0;
};

/// A set of observed sites, strictly increasing, together with the product
/// dimension k of those sites.
class SubsystemSpec {
public:
    SubsystemSpec(std::vector<std::size_t> sites, const SiteLayout& layout) : sites_(std::move(sites)) {
        if (sites_.empty()) throw ValidationError("subsystem must contain at least one site");
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            if (sites_[i] >= layout.num_sites()) throw DimensionError("subsystem site index out of range");
            if (i > 0 && sites_[i] <= sites_[i - 1]) {
                throw ValidationError("subsystem sites must be strictly increasing");
            }
        }
        k_ = 1;
        for (std::size_t s : sites_) k_ *= layout.dims()[s];
        if (k_ < 2) throw ValidationError("subsystem dimension must be at least 2");
    }

    /// Every site of the layout.
    static SubsystemSpec whole(const SiteLayout& layout) {
        std::vector<std::size_t> all(layout.num_sites());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return SubsystemSpec(std::move(all), layout);
    }

    const std::vector<std::size_t>& sites() const noexcept { return sites_; }
    Index k() const noexcept { return k_; }

    std::string to_string() const {
        std::ostringstream os;
        os << '{';
        for (std::size_t i = 0; i < sites_.size(); ++i) os << (i ? "," : "") << sites_[i];
        os << '}';
        return os.str();
    }

    friend bool operator==(const SubsystemSpec& a, const SubsystemSpec& b) { return a.sites_ == b.sites_; }

private:
    std::vector<std::size_t> sites_;
    Index k_ = 0;
};

class Isometry {
public:
    const CMatrix& matrix() const noexcept { return mat_; }
    const SiteLayout& layout() const noexcept { return layout_; }
    Index in_dim() const noexcept { return mat_.cols(); }
    Index out_dim() const noexcept { return mat_.rows(); }

private:
    Isometry(CMatrix mat, SiteLayout layout) : mat_(std::move(mat)), layout_(std::move(layout)) {}
    friend Isometry validate_isometry(CMatrix mat, SiteLayout layout, double tolerance);

    CMatrix mat_;
    SiteLayout layout_;
};

/// Checks V^dagger V = I and that the row count matches the layout.
inline Isometry validate_isometry(CMatrix mat, SiteLayout layout, double tolerance = tol::iterative) {
    if (mat.rows() != layout.total_dim()) {
        throw DimensionError("isometry row count " + std::to_string(mat.rows()) +
                             " does not match site layout dimension " + std::to_string(layout.total_dim()));
    }
    if (mat.cols() < 1 || mat.cols() > mat.rows()) {
        throw DimensionError("isometry must satisfy 1 <= columns <= rows");
    }
    if (!all_finite(mat)) throw ValidationError("isometry has non-finite entries");
    const double dev = max_abs_entry(mat.adjoint() * mat - identity(mat.cols()));
    if (dev > tolerance) {
        std::ostringstream os;
        os << "matrix is not an isometry: max |V^dagger V - I| = " << dev;
        throw ValidationError(os.str(), dev);
    }
    return Isometry(std::move(mat), std::move(layout));
}

class Povm {
public:
    explicit Povm(std::vector<CMatrix> effects, double tolerance = tol::validation) : effects_(std::move(effects)) {
        if (effects_.empty()) throw ValidationError("POVM needs at least one effect");
        const Index d = effects_.front().rows();
        CMatrix sum = CMatrix::Zero(d, d);
        for (CMatrix& e : effects_) {
            if (e.rows() != d || e.cols() != d) throw DimensionError("POVM effects must share a square dimension");
            if (!all_finite(e)) throw ValidationError("POVM effect has non-finite entries");
            const double herm = hermiticity_deviation(e);
            if (herm > tolerance) throw ValidationError("POVM effect is not Hermitian", herm);
            e = hermitian_part(e);
            const double lmin = min_eigenvalue(e);
            if (lmin < -tolerance) throw ValidationError("POVM effect is not positive semidefinite", -lmin);
            sum += e;
        }
        const double dev = max_abs_entry(sum - identity(d));
        if (dev > tolerance) throw ValidationError("POVM effects do not sum to identity", dev);
    }

    const std::vector<CMatrix>& effects() const noexcept { return effects_; }
    const CMatrix& operator[](std::size_t i) const { return effects_[i]; }
    std::size_t size() const noexcept { return effects_.size(); }
    Index dim() const noexcept { return effects_.front().rows(); }

private:
    std::vector<CMatrix> effects_;
};

/// Turns an approximately valid set of effects into an exactly valid POVM:
/// effects are clipped to the PSD cone and conjugated by S^{-1/2}, S their sum.
/// Directions where S vanishes are handed to the first effect.
inline Povm normalize_povm(std::vector<CMatrix> effects) {
    if (effects.empty()) throw ValidationError("POVM needs at least one effect");
    const Index d = effects.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (CMatrix& e : effects) {
        if (e.rows() != d || e.cols() != d) throw DimensionError("POVM effects must share a square dimension");
        e = psd_part(e);
        sum += e;
    }
    const double floor = 1e-14 * std::max(1.0, max_abs_entry(sum));
    HermitianEigen es = hermitian_eigen(hermitian_part(sum));
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
    for (CMatrix& e : effects) e = hermitian_part(w * e * w);
    effects.front() += kernel;
    return Povm(std::move(effects), 1e-9);
}

/// {p_x I}: outcome statistics independent of the state.
inline Povm trivial_povm(Index d, const std::vector<double>& weights) {
    std::vector<CMatrix> eff;
    for (double w : weights) eff.push_back(w * identity(d));
    return Povm(std::move(eff));
}

inline Povm computational_basis_povm(Index d) {
    std::vector<CMatrix> eff;
    for (Index i = 0; i < d; ++i) {
        CMatrix p = CMatrix::Zero(d, d);
        p(i, i) = 1.0;
        eff.push_back(std::move(p));
    }
    return Povm(std::move(eff));
}

/// Tetrahedral qubit SIC-POVM: effects (I + n_j . sigma) / 4.
inline Povm qubit_sic_povm() {
    const double s = 1.0 / std::sqrt(3.0);
    const double dirs[4][3] = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    std::vector<CMatrix> eff;
    for (const auto& n : dirs) {
        eff.push_back((identity(2) + n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z()) / 4.0);
    }
    return Povm(std::move(eff));
}

/// Informationally complete POVM on dimension k. Qubits get the SIC-POVM;
/// otherwise k^2 rank-one projectors onto e_a, (e_a + e_b)/sqrt2 and
/// (e_a + i e_b)/sqrt2 span the Hermitian matrices, and conjugation by
/// S^{-1/2} makes them sum to identity without losing that span.
inline Povm informationally_complete_povm(Index k) {
    if (k == 2) return qubit_sic_povm();
    std::vector<CMatrix> eff;
    for (Index a = 0; a < k; ++a) {
        CVector v = CVector::Zero(k);
        v(a) = 1.0;
        eff.push_back(projector(v));
    }
    for (Index a = 0; a < k; ++a) {
        for (Index b = a + 1; b < k; ++b) {
            CVector v = CVector::Zero(k);
            v(a) = 1.0 / std::sqrt(2.0);
            v(b) = 1.0 / std::sqrt(2.0);
            eff.push_back(projector(v));
            v(b) = Complex(0.0, 1.0 / std::sqrt(2.0));
            eff.push_back(projector(v));
        }
    }
    return normalize_povm(std::move(eff));
}

namespace detail {

/// For every full-space index: its index within the kept sites and within
/// the traced-out complement.
struct LegSplit {
    std::vector<Index> kept;
    std::vector<Index> traced;
    Index kept_dim = 1;
    Index traced_dim = 1;
};

inline LegSplit split_legs(const SiteLayout& layout, const SubsystemSpec& keep) {
    const auto& dims = layout.dims();
    std::vector<bool> is_kept(dims.size(), false);
    for (std::size_t s : keep.sites()) is_kept[s] = true;

    LegSplit out;
    for (std::size_t s = 0; s < dims.size(); ++s) (is_kept[s] ? out.kept_dim : out.traced_dim) *= dims[s];
    const Index total = layout.total_dim();
    out.kept.resize(static_cast<std::size_t>(total));
    out.traced.resize(static_cast<std::size_t>(total));
    for (Index idx = 0; idx < total; ++idx) {
        Index rem = idx;
        Index kept = 0, traced = 0, kept_stride = 1, traced_stride = 1;
        for (std::size_t s = dims.size(); s-- > 0;) {
            const Index digit = rem % dims[s];
            rem /= dims[s];
            if (is_kept[s]) {
                kept += digit * kept_stride;
                kept_stride *= dims[s];
            } else {
                traced += digit * traced_stride;
                traced_stride *= dims[s];
            }
        }
        out.kept[static_cast<std::size_t>(idx)] = kept;
        out.traced[static_cast<std::size_t>(idx)] = traced;
    }
    return out;
}

/// Full-space indices grouped by their traced-out label.
inline std::vector<std::vector<Index>> group_by_traced(const LegSplit& split) {
    std::vector<std::vector<Index>> groups(static_cast<std::size_t>(split.traced_dim));
    for (std::size_t i = 0; i < split.traced.size(); ++i) {
        groups[static_cast<std::size_t>(split.traced[i])].push_back(static_cast<Index>(i));
    }
    return groups;
}

}  // namespace detail

/// Trace over every site not in `keep`; the kept sites stay in layout order.
inline CMatrix partial_trace(const CMatrix& m, const SiteLayout& layout, const SubsystemSpec& keep) {
    if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim()) {
        throw DimensionError("partial_trace: operator dimension does not match the site layout");
    }
    const detail::LegSplit split = detail::split_legs(layout, keep);
    CMatrix out = CMatrix::Zero(split.kept_dim, split.kept_dim);
    for (const auto& group : detail::group_by_traced(split)) {
        for (Index i : group) {
            const Index ki = split.kept[static_cast<std::size_t>(i)];
            for (Index j : group) out(ki, split.kept[static_cast<std::size_t>(j)]) += m(i, j);
        }
    }
    return out;
}

/// mu acting on the sites of c, identity on the rest.
inline CMatrix embed_effect(const CMatrix& mu, const SiteLayout& layout, const SubsystemSpec& c) {
    if (mu.rows() != c.k() || mu.cols() != c.k()) {
        throw DimensionError("embed_effect: effect dimension does not match the subsystem");
    }
    const detail::LegSplit split = detail::split_legs(layout, c);
    CMatrix out = CMatrix::Zero(layout.total_dim(), layout.total_dim());
    for (const auto& group : detail::group_by_traced(split)) {
        for (Index i : group) {
            const Index ki = split.kept[static_cast<std::size_t>(i)];
            for (Index j : group) out(i, j) = mu(ki, split.kept[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

/// Tr_{S \ C}(V rho V^dagger) for an arbitrary operator rho on the input.
inline CMatrix apply_channel_operator(const Isometry& v, const SubsystemSpec& c, const CMatrix& rho) {
    if (rho.rows() != v.in_dim() || rho.cols() != v.in_dim()) {
        throw DimensionError("apply_channel: input dimension does not match the isometry");
    }
    return partial_trace(v.matrix() * rho * v.matrix().adjoint(), v.layout(), c);
}

inline DensityMatrix apply_channel(const Isometry& v, const SubsystemSpec& c, const DensityMatrix& rho) {
    return DensityMatrix(hermitian_part(apply_channel_operator(v, c, rho.matrix())));
}

/// V^dagger (I (x) mu) V, the Heisenberg-picture image of an effect.
inline CMatrix adjoint_effect(const Isometry& v, const SubsystemSpec& c, const CMatrix& mu) {
    if (mu.rows() != c.k() || mu.cols() != c.k()) {
        throw DimensionError("adjoint_effect: effect dimension does not match the subsystem");
    }
    const detail::LegSplit split = detail::split_legs(v.layout(), c);
    const CMatrix& vm = v.matrix();
    CMatrix out = CMatrix::Zero(v.in_dim(), v.in_dim());
    // Sum over traced labels of V_t^dagger mu V_t, V_t the rows sharing label t.
    for (const auto& group : detail::group_by_traced(split)) {
        CMatrix rows(static_cast<Index>(group.size()), vm.cols());
        CMatrix mu_sub(static_cast<Index>(group.size()), static_cast<Index>(group.size()));
        for (std::size_t a = 0; a < group.size(); ++a) {
            rows.row(static_cast<Index>(a)) = vm.row(group[a]);
            for (std::size_t b = 0; b < group.size(); ++b) {
                mu_sub(static_cast<Index>(a), static_cast<Index>(b)) =
                    mu(split.kept[static_cast<std::size_t>(group[a])], split.kept[static_cast<std::size_t>(group[b])]);
            }
        }
        out.noalias() += rows.adjoint() * mu_sub * rows;
    }
    return out;
}

}  // namespace scramblemeter
