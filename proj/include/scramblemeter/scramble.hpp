#pragma once

// Accessible min-information of an isometry,
//
//   I(V, k) = max_{C_k} max_mu log2 sum_x ||Phi_C^dagger(mu_x)||_inf
//           = max_{C_k} max_mu log2(1 + R(Phi_C^dagger(mu))),
//
// maximized by a see-saw over POVMs on every k-dimensional subsystem.
// The outer problem maximizes a convex function, so only local optimality
// is reached; restarts are the remedy and their agreement is reported.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "discrimination.hpp"
#include "errors.hpp"
#include "infotheory.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "qstate.hpp"

namespace scramblemeter {

struct EffectsRange {
    int lo = 2;
    int hi = 4;
};

struct SeesawConfig {
    /// Defaults to [2, min(k^2, max(k, 4))] when unset.
    std::optional<EffectsRange> effects_range;
    int restarts = 20;
    int max_iters = 500;
    double obj_tol = 1e-9;
    std::uint64_t seed = 42;
    double sdp_tol = 1e-9;

    EffectsRange range_for(Index k) const {
        const int k2 = static_cast<int>(k * k);
        const EffectsRange r = effects_range.value_or(EffectsRange{2, std::min(k2, std::max(static_cast<int>(k), 4))});
        if (r.lo < 2 || r.hi > k2 || r.lo > r.hi) {
            throw ValidationError("effect-count range must lie within [2, k^2] with lo <= hi");
        }
        return r;
    }

    void validate() const {
        if (restarts < 1) throw ValidationError("restarts must be at least 1");
        if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
        if (!(obj_tol > 0.0)) throw ValidationError("obj_tol must be positive");
    }
};

/// Restarts whose value lies within this many bits of the best count as agreeing.
inline constexpr double kAgreementTol = 1e-6;
/// Values within this many bits are ties; the first in enumeration order wins.
inline constexpr double kTieTol = 1e-7;

/// sum_x ||Phi^dagger(mu_x)||_inf for any channel.
/// log2 of a norm sum. The sum is at least ||Phi^dagger(I)|| = 1, so anything
/// within rounding of 1 is reported as exactly zero bits.
inline double norm_sum_bits(double norm_sum, std::size_t effects) {
    const double rounding = 8.0 * static_cast<double>(effects + 1) * std::numeric_limits<double>::epsilon();
    return norm_sum <= 1.0 + rounding ? 0.0 : std::log2(norm_sum);
}

template <QuantumChannel Ch>
double pulled_back_norm_sum(const Ch& ch, const Povm& m) {
    double s = 0.0;
    for (const auto& e : m.effects()) s += operator_norm(hermitian_part(ch.adjoint(e)));
    return s;
}

/// log2 sum_x ||Phi^dagger(mu_x)||_inf, cross-checked against
/// log2(1 + R(Phi^dagger(mu))) on the pulled-back POVM.
template <QuantumChannel Ch>
double objective_bits(const Ch& ch, const Povm& m) {
    if (m.dim() != ch.output_dim()) throw DimensionError("objective: POVM dimension does not match the subsystem");
    std::vector<CMatrix> pulled;
    double norm_sum = 0.0;
    for (const auto& e : m.effects()) {
        pulled.push_back(hermitian_part(ch.adjoint(e)));
        norm_sum += operator_norm(pulled.back());
    }
    const double via_robustness = 1.0 + robustness(Povm(std::move(pulled), 1e-9));
    if (std::abs(via_robustness - norm_sum) > tol::exact) {
        throw Error("objective: norm-sum and robustness forms disagree");
    }
    return norm_sum_bits(norm_sum, m.size());
}

inline double objective(const Isometry& v, const SubsystemSpec& c, const Povm& m) {
    return objective_bits(IsometricChannel(v, c), m);
}

struct SeesawRun {
    Povm povm;
    double value_bits = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Linear objective after every half-step, starting with the initial POVM.
    std::vector<double> history;
};

/// Random rank-one effects a |phi_x><phi_x| with Haar-random phi_x, completed
/// to a POVM by sharing the deficit I - a sum_x |phi_x><phi_x| equally.
inline Povm random_rank_one_povm(Index k, int count, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<CMatrix> dirs;
    CMatrix sum = CMatrix::Zero(k, k);
    for (int x = 0; x < count; ++x) {
        CVector v(k);
        for (Index i = 0; i < k; ++i) v(i) = Complex(g(rng), g(rng));
        dirs.push_back(projector(v.normalized()));
        sum += dirs.back();
    }
    const double a = 1.0 / max_eigenvalue(sum);
    const CMatrix deficit = identity(k) - a * sum;
    std::vector<CMatrix> eff;
    for (auto& d : dirs) eff.push_back(a * d + deficit / static_cast<double>(count));
    return normalize_povm(std::move(eff));
}

/// Alternates two exact half-steps from `start`:
///  (a) witnesses psi_x = top eigenvectors of Phi^dagger(mu_x), which attains
///      sum_x ||Phi^dagger(mu_x)||;
///  (b) the POVM optimally discriminating the uniform ensemble
///      {Phi(|psi_x><psi_x|)}, which maximizes sum_x <psi_x|Phi^dagger(mu_x)|psi_x>.
/// The objective never decreases; an SDP answer that would lower it is discarded.
template <QuantumChannel Ch>
SeesawRun seesaw_from(const Ch& ch, Povm start, const SeesawConfig& cfg) {
    if (start.dim() != ch.output_dim()) throw DimensionError("seesaw: POVM dimension does not match the subsystem");
    const std::size_t count = start.size();
    const std::vector<double> uniform(count, 1.0 / static_cast<double>(count));

    SeesawRun run{std::move(start), 0.0, 0, false, {}};
    std::vector<CVector> witnesses(count);
    auto witness_step = [&] {
        double s = 0.0;
        for (std::size_t x = 0; x < count; ++x) {
            const HermitianEigen es = hermitian_eigen(hermitian_part(ch.adjoint(run.povm[x])));
            witnesses[x] = es.vectors.col(es.values.size() - 1);
            s += std::max(0.0, es.values(es.values.size() - 1));
        }
        return s;
    };
    auto witness_value = [&](const Povm& m) {
        double s = 0.0;
        for (std::size_t x = 0; x < count; ++x) {
            s += (witnesses[x].adjoint() * ch.adjoint(m[x]) * witnesses[x])(0, 0).real();
        }
        return s;
    };

    double current = witness_step();
    run.history.push_back(current);
    for (int it = 0; it < cfg.max_iters; ++it) {
        std::vector<CMatrix> outputs;
        for (std::size_t x = 0; x < count; ++x) outputs.push_back(hermitian_part(ch.apply(projector(witnesses[x]))));
        DiscriminationResult disc =
            solve_discrimination(std::span<const CMatrix>(outputs), std::span<const double>(uniform), cfg.sdp_tol);
        const double candidate = witness_value(disc.povm);
        if (candidate > current) {
            run.povm = std::move(disc.povm);
            run.history.push_back(candidate);
        } else {
            run.history.push_back(current);
        }
        const double next = witness_step();
        run.history.push_back(next);
        run.iterations = it + 1;
        const double improvement = next - current;
        current = next;
        if (improvement < cfg.obj_tol) {
            run.converged = true;
            break;
        }
    }
    run.value_bits = norm_sum_bits(pulled_back_norm_sum(ch, run.povm), run.povm.size());
    return run;
}

/// One restart from a random rank-one POVM with `count` effects.
template <QuantumChannel Ch>
SeesawRun seesaw_restart(const Ch& ch, int count, const SeesawConfig& cfg, std::uint64_t task_seed) {
    std::mt19937_64 rng(task_seed);
    return seesaw_from(ch, random_rank_one_povm(ch.output_dim(), count, rng), cfg);
}

struct RestartRecord {
    std::size_t subsystem = 0;  // index into IminResult::subsystems
    int num_effects = 0;
    int restart = 0;
    double value_bits = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct SeesawOutcome {
    Povm povm;
    double value_bits = 0.0;
    int iterations = 0;
    int restarts_agreeing = 0;
    std::vector<RestartRecord> restart_trace;
};

/// Best over cfg.restarts random starts for one subsystem and effect count.
template <QuantumChannel Ch>
SeesawOutcome seesaw_best(const Ch& ch, int count, const SeesawConfig& cfg, std::uint64_t subsystem_tag = 0,
                          const TaskRunner& runner = run_serial) {
    cfg.validate();
    const Index k = ch.output_dim();
    if (count < 2 || count > k * k) throw ValidationError("seesaw: effect count must lie within [2, k^2]");
    std::vector<std::optional<SeesawRun>> runs(static_cast<std::size_t>(cfg.restarts));
    runner(runs.size(), [&](std::size_t r) {
        runs[r] = seesaw_restart(ch, count, cfg,
                                 derive_seed(cfg.seed, {subsystem_tag, static_cast<std::uint64_t>(count), r}));
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r]->value_bits > runs[best]->value_bits) best = r;
    }
    SeesawOutcome out{runs[best]->povm, runs[best]->value_bits, runs[best]->iterations, 0, {}};
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (runs[r]->value_bits >= out.value_bits - kAgreementTol) ++out.restarts_agreeing;
        out.restart_trace.push_back({static_cast<std::size_t>(subsystem_tag), count, static_cast<int>(r),
                                     runs[r]->value_bits, runs[r]->iterations, runs[r]->converged});
    }
    return out;
}

inline SeesawOutcome seesaw(const Isometry& v, const SubsystemSpec& c, int count, const SeesawConfig& cfg) {
    return seesaw_best(IsometricChannel(v, c), count, cfg);
}

/// Every strictly increasing site subset whose dimensions multiply to k,
/// ordered by subset size, then lexicographically.
inline std::vector<SubsystemSpec> subsystems_of_dimension(const SiteLayout& layout, Index k) {
    std::vector<SubsystemSpec> out;
    const std::size_t n = layout.num_sites();
    std::vector<std::size_t> pick;
    for (std::size_t size = 1; size <= n; ++size) {
        pick.resize(size);
        for (std::size_t i = 0; i < size; ++i) pick[i] = i;
        while (true) {
            Index prod = 1;
            for (std::size_t s : pick) prod *= layout.dims()[s];
            if (prod == k) out.emplace_back(pick, layout);
            std::size_t i = size;
            while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return out;
}

struct ChannelOptimum {
    double value_bits = 0.0;
    Povm best_povm;
    int best_num_effects = 0;
    int restarts_agreeing = 0;
    int iterations = 0;
    std::map<int, double> per_x_values;
    std::vector<RestartRecord> restart_trace;
};

struct IminResult {
    double value_bits = 0.0;
    SubsystemSpec best_subsystem;
    Povm best_povm;
    int best_num_effects = 0;
    std::map<int, double> per_x_values;  // max over subsystems, per effect count
    std::vector<RestartRecord> restart_trace;
    std::vector<SubsystemSpec> subsystems;
    int restarts_agreeing = 0;  // at the best (subsystem, effect count)
    int restarts = 0;
    int iterations = 0;

    /// Fewer than a quarter of restarts found the best value.
    bool fragile() const { return 4 * restarts_agreeing < restarts; }
};

namespace detail {

/// Runs every (channel, effect count, restart) task through `runner` and
/// reduces in enumeration order.
template <QuantumChannel Ch>
std::vector<ChannelOptimum> optimize_channels(const std::vector<Ch>& channels, const SeesawConfig& cfg,
                                              const TaskRunner& runner) {
    cfg.validate();
    struct Task {
        std::size_t channel;
        int count;
        int restart;
    };
    std::vector<Task> tasks;
    std::vector<EffectsRange> ranges;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        ranges.push_back(cfg.range_for(channels[c].output_dim()));
        for (int x = ranges.back().lo; x <= ranges.back().hi; ++x)
            for (int r = 0; r < cfg.restarts; ++r) tasks.push_back({c, x, r});
    }
    std::vector<std::optional<SeesawRun>> runs(tasks.size());
    runner(tasks.size(), [&](std::size_t i) {
        const Task& t = tasks[i];
        runs[i] = seesaw_restart(channels[t.channel], t.count, cfg,
                                 derive_seed(cfg.seed, {t.channel, static_cast<std::uint64_t>(t.count),
                                                        static_cast<std::uint64_t>(t.restart)}));
    });

    std::vector<ChannelOptimum> out;
    std::size_t i = 0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        std::optional<ChannelOptimum> opt;
        for (int x = ranges[c].lo; x <= ranges[c].hi; ++x) {
            const std::size_t first = i;
            std::size_t best = first;
            for (int r = 0; r < cfg.restarts; ++r, ++i) {
                if (runs[i]->value_bits > runs[best]->value_bits) best = i;
            }
            int agreeing = 0;
            for (std::size_t j = first; j < i; ++j) {
                if (runs[j]->value_bits >= runs[best]->value_bits - kAgreementTol) ++agreeing;
            }
            const double v = runs[best]->value_bits;
            if (!opt) {
                opt = ChannelOptimum{v, runs[best]->povm, x, agreeing, runs[best]->iterations, {}, {}};
            } else if (v > opt->value_bits + kTieTol) {
                opt->value_bits = v;
                opt->best_povm = runs[best]->povm;
                opt->best_num_effects = x;
                opt->restarts_agreeing = agreeing;
                opt->iterations = runs[best]->iterations;
            }
            opt->per_x_values[x] = v;
            for (std::size_t j = first; j < i; ++j) {
                opt->restart_trace.push_back({c, x, tasks[j].restart, runs[j]->value_bits, runs[j]->iterations,
                                              runs[j]->converged});
            }
        }
        out.push_back(std::move(*opt));
    }
    return out;
}

}  // namespace detail

/// Optimum for one channel (e.g. a symmetry representative).
template <QuantumChannel Ch>
ChannelOptimum optimize_channel(const Ch& ch, const SeesawConfig& cfg, const TaskRunner& runner = run_serial) {
    return detail::optimize_channels(std::vector<Ch>{ch}, cfg, runner).front();
}

/// Maximum over all k-dimensional subsystems and effect counts.
inline IminResult imin_acc(const Isometry& v, Index k, const SeesawConfig& cfg, const TaskRunner& runner = run_serial) {
    if (k < 2) throw ValidationError("imin_acc: k must be at least 2");
    std::vector<SubsystemSpec> subs = subsystems_of_dimension(v.layout(), k);
    if (subs.empty()) throw DomainError("no subsystem of dimension " + std::to_string(k) + " in the output layout");
    std::vector<IsometricChannel> channels;
    for (const auto& s : subs) channels.emplace_back(v, s);
    std::vector<ChannelOptimum> optima = detail::optimize_channels(channels, cfg, runner);

    std::size_t best = 0;
    for (std::size_t c = 1; c < optima.size(); ++c) {
        if (optima[c].value_bits > optima[best].value_bits + kTieTol) best = c;
    }
    IminResult r{optima[best].value_bits,
                 subs[best],
                 optima[best].best_povm,
                 optima[best].best_num_effects,
                 {},
                 {},
                 subs,
                 optima[best].restarts_agreeing,
                 cfg.restarts,
                 optima[best].iterations};
    for (const auto& o : optima) {
        for (const auto& [x, val] : o.per_x_values) {
            auto it = r.per_x_values.find(x);
            if (it == r.per_x_values.end() || val > it->second) r.per_x_values[x] = val;
        }
        r.restart_trace.insert(r.restart_trace.end(), o.restart_trace.begin(), o.restart_trace.end());
    }
    return r;
}

struct SubsystemDeviation {
    SubsystemSpec subsystem;
    double max_deviation = 0.0;
};

struct ScramblerCertificate {
    std::vector<SubsystemDeviation> subsystems;
    double max_deviation = 0.0;
    bool certified = false;
};

inline constexpr double kCertificateTol = 1e-8;

/// max_x ||Phi^dagger(mu_x) - (Tr Phi^dagger(mu_x) / d_in) I||_inf over a
/// fixed informationally complete POVM: zero iff the channel is a
/// replacement channel.
template <QuantumChannel Ch>
double replacement_deviation(const Ch& ch) {
    const Povm ic = informationally_complete_povm(ch.output_dim());
    const Index din = ch.input_dim();
    double dev = 0.0;
    for (const auto& e : ic.effects()) {
        const CMatrix pulled = hermitian_part(ch.adjoint(e));
        dev = std::max(dev, operator_norm(pulled - (real_trace(pulled) / static_cast<double>(din)) * identity(din)));
    }
    return dev;
}

/// Perfect k-scrambler test over every k-dimensional subsystem.
inline ScramblerCertificate perfect_scrambler_certificate(const Isometry& v, Index k) {
    std::vector<SubsystemSpec> subs = subsystems_of_dimension(v.layout(), k);
    if (subs.empty()) throw DomainError("no subsystem of dimension " + std::to_string(k) + " in the output layout");
    ScramblerCertificate cert;
    for (auto& s : subs) {
        const double dev = replacement_deviation(IsometricChannel(v, s));
        cert.max_deviation = std::max(cert.max_deviation, dev);
        cert.subsystems.push_back({std::move(s), dev});
    }
    cert.certified = cert.max_deviation <= kCertificateTol;
    return cert;
}

}  // namespace scramblemeter
