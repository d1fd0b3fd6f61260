#pragma once

// Lipkin-Meshkov-Glick model in the maximal-spin Dicke sector,
//
//   H = -(2/N) S_z^2 - 2h S_x,   J = 1,
//
// with the logical qubit encoded as |0> -> U(t)|S,+S>, |1> -> U(t)|S,-S>.
// One observed spin is enough: the encoding is permutation symmetric, so every
// single-site channel is the same.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "qstate.hpp"
#include "scramble.hpp"

namespace scramblemeter {

/// Spin-N/2 multiplet. Basis index i holds M = N/2 - i.
class DickeSector {
public:
    explicit DickeSector(int spins) : n_(spins) {
        if (spins < 1) throw ValidationError("Dicke sector needs at least one spin");
    }

    int spins() const noexcept { return n_; }
    Index dim() const noexcept { return n_ + 1; }
    double spin() const noexcept { return 0.5 * n_; }
    double m(Index i) const noexcept { return spin() - static_cast<double>(i); }

private:
    int n_;
};

struct LmgParams {
    int n = 2;
    double h = 0.0;
    double t = 0.0;

    void validate() const {
        if (n < 2) throw ValidationError("LMG model needs N >= 2");
        if (!std::isfinite(h)) throw ValidationError("field h must be finite");
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and non-negative");
    }
};

struct SweepRecord {
    int n = 0;
    double h = 0.0;
    double t = 0.0;
    double value_bits = 0.0;
    int best_num_effects = 0;
    int restarts_agreeing = 0;
    int iterations = 0;
};

struct SpinOperators {
    CMatrix sx;
    CMatrix sz;
    CMatrix sy;
};

inline SpinOperators spin_operators(const DickeSector& sector) {
    const Index d = sector.dim();
    const double s = sector.spin();
    CMatrix raise = CMatrix::Zero(d, d);  // S_+ |M> = c |M+1>, and M+1 sits one index lower
    for (Index i = 1; i < d; ++i) {
        const double m = sector.m(i);
        raise(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    SpinOperators ops;
    ops.sz = CMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) ops.sz(i, i) = sector.m(i);
    ops.sx = (raise + raise.adjoint()) / 2.0;
    ops.sy = (raise - raise.adjoint()) / Complex(0.0, 2.0);
    return ops;
}

inline CMatrix h_lmg(int n, double h) {
    LmgParams{n, h, 0.0}.validate();
    const SpinOperators ops = spin_operators(DickeSector(n));
    return -(2.0 / n) * ops.sz * ops.sz - 2.0 * h * ops.sx;
}

inline CMatrix h_lmg(const LmgParams& p) { return h_lmg(p.n, p.h); }

/// Time evolution of the two encoded states for fixed (N, h); the
/// eigendecomposition is computed once and shared across times.
class LmgEvolution {
public:
    LmgEvolution(int n, double h) : n_(n), h_(h), eig_(hermitian_eigen(h_lmg(n, h))) {
        const Index d = n + 1;
        top_ = eig_.vectors.row(0).adjoint();
        bottom_ = eig_.vectors.row(d - 1).adjoint();
    }

    int spins() const noexcept { return n_; }
    double field() const noexcept { return h_; }
    const RVector& energies() const noexcept { return eig_.values; }

    /// U(t) psi.
    CVector evolve(const CVector& psi, double t) const {
        CVector c = eig_.vectors.adjoint() * psi;
        for (Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -eig_.values(i) * t);
        return eig_.vectors * c;
    }

    /// (N+1) x 2 matrix with columns U(t)|S,+S> and U(t)|S,-S>.
    CMatrix encoded_pair(double t) const {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and non-negative");
        const Index d = n_ + 1;
        CMatrix phased(d, 2);
        for (Index i = 0; i < d; ++i) {
            const Complex ph = std::polar(1.0, -eig_.values(i) * t);
            phased(i, 0) = ph * top_(i);
            phased(i, 1) = ph * bottom_(i);
        }
        return eig_.vectors * phased;
    }

    Isometry isometry(double t) const {
        return validate_isometry(encoded_pair(t), SiteLayout({static_cast<Index>(n_ + 1)}), 1e-10);
    }

private:
    int n_;
    double h_;
    HermitianEigen eig_;
    CVector top_;
    CVector bottom_;
};

inline Isometry v_lmg(const LmgParams& p) {
    p.validate();
    return LmgEvolution(p.n, p.h).isometry(p.t);
}

/// p_{M,l} for splitting |S,M> into Dicke states of L and N-L spins, l being
/// the number of up spins among the L. Entries l = 0..L.
inline std::vector<double> dicke_split_coeffs(int n, double m, int l_block) {
    if (n < 2) throw ValidationError("dicke_split_coeffs: N must be at least 2");
    if (l_block < 1 || l_block >= n) throw ValidationError("dicke_split_coeffs: need 1 <= L < N");
    const double ups_real = m + 0.5 * n;
    const double ups_rounded = std::round(ups_real);
    if (std::abs(ups_real - ups_rounded) > 1e-9 || ups_rounded < 0 || ups_rounded > n) {
        throw ValidationError("dicke_split_coeffs: M must satisfy |M| <= N/2 with M + N/2 integral");
    }
    const int ups = static_cast<int>(ups_rounded);
    auto log_binom = [](int a, int b) {
        return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
    };
    std::vector<double> p(static_cast<std::size_t>(l_block) + 1, 0.0);
    for (int l = 0; l <= l_block; ++l) {
        const int rest = ups - l;
        if (rest < 0 || rest > n - l_block) continue;
        const double log_p2 = log_binom(l_block, l) + log_binom(n - l_block, rest) - log_binom(n, ups);
        p[static_cast<std::size_t>(l)] = std::exp(0.5 * log_p2);
    }
    return p;
}

namespace detail {

/// Site-up and site-down amplitudes for every basis index (L = 1).
inline std::pair<RVector, RVector> site_amplitudes(int n) {
    RVector up(n + 1), down(n + 1);
    const DickeSector sector(n);
    for (Index i = 0; i <= n; ++i) {
        const auto p = dicke_split_coeffs(n, sector.m(i), 1);
        down(i) = p[0];
        up(i) = p[1];
    }
    return {up, down};
}

/// One-spin reduced operator of sum_ab a_ab |v_a><v_b| given the site amplitudes.
inline CMatrix reduce_to_site(const CMatrix& pair, const CMatrix& logical, const RVector& up, const RVector& down) {
    const CMatrix w = pair * logical;  // O = w pair^dagger
    const Index d = pair.rows();
    auto entry = [&](Index r, Index c) { return w.row(r).cwiseProduct(pair.row(c).conjugate()).sum(); };
    CMatrix out = CMatrix::Zero(2, 2);
    for (Index i = 0; i < d; ++i) {
        const Complex o = entry(i, i);
        out(0, 0) += o * (up(i) * up(i));
        out(1, 1) += o * (down(i) * down(i));
    }
    // <up|.|down> pairs M with M - 1; <down|.|up> pairs M with M + 1.
    for (Index i = 0; i + 1 < d; ++i) {
        out(0, 1) += entry(i, i + 1) * (up(i) * down(i + 1));
        out(1, 0) += entry(i + 1, i) * (down(i + 1) * up(i));
    }
    return out;
}

}  // namespace detail

/// Reduced state on one spin of V A V^dagger, for a 2x2 logical operator A.
inline CMatrix single_site_channel(const DickeSector& sector, const CMatrix& logical, const Isometry& v) {
    if (logical.rows() != 2 || logical.cols() != 2) throw DimensionError("single_site_channel: input must be 2x2");
    if (v.in_dim() != 2 || v.out_dim() != sector.dim()) {
        throw DimensionError("single_site_channel: isometry does not match the Dicke sector");
    }
    if (sector.spins() < 2) throw ValidationError("single_site_channel: need N >= 2");
    const auto [up, down] = detail::site_amplitudes(sector.spins());
    return detail::reduce_to_site(v.matrix(), logical, up, down);
}

/// The single-site channel as a transfer map, ready for the optimizer.
inline TransferChannel single_site_transfer(const DickeSector& sector, const Isometry& v) {
    std::vector<CMatrix> images;
    images.reserve(4);
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 2; ++j) {
            CMatrix e = CMatrix::Zero(2, 2);
            e(i, j) = 1.0;
            images.push_back(single_site_channel(sector, e, v));
        }
    }
    return TransferChannel(2, std::move(images));
}

/// Accessible min-information of one spin along a time grid.
inline std::vector<SweepRecord> imin_timeseries(int n, double h, std::span<const double> t_grid,
                                                const SeesawConfig& cfg, const TaskRunner& runner = run_serial) {
    if (t_grid.empty()) throw ValidationError("imin_timeseries: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw ValidationError("imin_timeseries: time grid must be ascending");
    }
    LmgParams{n, h, t_grid.front()}.validate();
    const LmgEvolution evo(n, h);
    const DickeSector sector(n);
    std::vector<TransferChannel> channels;
    channels.reserve(t_grid.size());
    for (double t : t_grid) channels.push_back(single_site_transfer(sector, evo.isometry(t)));

    const std::vector<ChannelOptimum> optima = detail::optimize_channels(channels, cfg, runner);
    std::vector<SweepRecord> out;
    out.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const ChannelOptimum& o = optima[i];
        out.push_back({n, h, t_grid[i], o.value_bits, o.best_num_effects, o.restarts_agreeing, o.iterations});
    }
    return out;
}

/// t_0, t_0 + step, ... up to t_max (inclusive within half a step).
inline std::vector<double> time_grid(double t_max, double step) {
    if (!(step > 0.0) || !(t_max >= 0.0)) throw ValidationError("time grid needs step > 0 and t_max >= 0");
    const auto count = static_cast<std::size_t>(std::floor(t_max / step + 0.5)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = static_cast<double>(i) * step;
    return grid;
}

/// First time the series drops to eps, linearly interpolated between grid
/// points. Empty if it never does.
inline std::optional<double> scrambling_time(std::span<const SweepRecord> series, double eps) {
    if (!(eps > 0.0)) throw ValidationError("scrambling_time: eps must be positive");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].value_bits > eps) continue;
        if (i == 0) return series[0].t;
        const SweepRecord& a = series[i - 1];
        const SweepRecord& b = series[i];
        return a.t + (eps - a.value_bits) * (b.t - a.t) / (b.value_bits - a.value_bits);
    }
    return std::nullopt;
}

struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares of t against ln N.
inline LogFit logfit(std::span<const std::pair<int, double>> points) {
    if (points.size() < 3) throw ValidationError("logfit needs at least three points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].first < 1) throw ValidationError("logfit: N must be positive");
        for (std::size_t j = 0; j < i; ++j) {
            if (points[i].first == points[j].first) throw ValidationError("logfit: abscissae must be distinct");
        }
    }
    const double count = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [n, t] : points) {
        mx += std::log(static_cast<double>(n));
        my += t;
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, t] : points) {
        const double dx = std::log(static_cast<double>(n)) - mx;
        sxx += dx * dx;
        sxy += dx * (t - my);
        syy += (t - my) * (t - my);
    }
    LogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - fit.slope * sxy;
    fit.r_squared = syy > 0.0 ? 1.0 - std::max(ss_res, 0.0) / syy : 1.0;
    return fit;
}

struct ScramblingRow {
    int n = 0;
    double h = 0.0;
    double eps = 0.0;
    std::optional<double> t_scramb;
};

struct FitRow {
    double h = 0.0;
    std::optional<LogFit> fit;  // empty when fewer than three finite points
};

/// Scrambling time per (N, h) and a log fit per h over the finite entries.
/// Rows are ordered by h, then N, as given.
struct ScramblingStudy {
    std::vector<ScramblingRow> times;
    std::vector<FitRow> fits;
};

inline ScramblingStudy scrambling_study(const std::vector<int>& sizes, const std::vector<double>& fields, double eps,
                                        std::span<const double> t_grid, const SeesawConfig& cfg,
                                        const TaskRunner& runner = run_serial) {
    ScramblingStudy study;
    for (double h : fields) {
        std::vector<std::pair<int, double>> finite;
        for (int n : sizes) {
            const auto series = imin_timeseries(n, h, t_grid, cfg, runner);
            const auto t = scrambling_time(series, eps);
            study.times.push_back({n, h, eps, t});
            if (t) finite.emplace_back(n, *t);
        }
        FitRow row{h, std::nullopt};
        if (finite.size() >= 3) row.fit = logfit(finite);
        study.fits.push_back(row);
    }
    return study;
}

}  // namespace scramblemeter
