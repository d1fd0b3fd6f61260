#pragma once

// Small stabilizer codes as dense encoders, and the check that a distance
// t+1 code hides its logical input from every set of at most t qubits.

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "qstate.hpp"
#include "scramble.hpp"

namespace scramblemeter {

struct CodeSpec {
    std::string name;
    int n = 0;  // physical qubits
    int j = 0;  // logical qubits
    int d = 0;  // distance
    Isometry encoder;

    int correctable_span() const noexcept { return d - 1; }
};

/// Operator for a Pauli string such as "XZZXI"; character i acts on qubit i.
inline CMatrix pauli_string(std::string_view word) {
    CMatrix out = identity(1);
    for (char c : word) {
        switch (c) {
            case 'I': out = tensor(out, identity(2)); break;
            case 'X': out = tensor(out, pauli_x()); break;
            case 'Y': out = tensor(out, pauli_y()); break;
            case 'Z': out = tensor(out, pauli_z()); break;
            default: throw ValidationError(std::string("unknown Pauli letter '") + c + "'");
        }
    }
    return out;
}

/// Orthonormal code-space basis: project computational basis states in index
/// order and keep the ones that survive Gram-Schmidt.
inline CMatrix stabilizer_codewords(const std::vector<std::string>& generators, int logical_qubits) {
    if (generators.empty()) throw ValidationError("need at least one stabilizer generator");
    const Index dim = Index{1} << generators.front().size();
    CMatrix proj = identity(dim);
    for (const auto& g : generators) {
        if (static_cast<Index>(Index{1} << g.size()) != dim) throw DimensionError("stabilizer generators differ in length");
        proj = proj * (identity(dim) + pauli_string(g)) / 2.0;
    }
    const Index want = Index{1} << logical_qubits;
    CMatrix words(dim, want);
    Index found = 0;
    for (Index b = 0; b < dim && found < want; ++b) {
        CVector v = proj.col(b);
        for (Index k = 0; k < found; ++k) v -= words.col(k).dot(v) * words.col(k);
        const double norm = v.norm();
        if (norm < 1e-8) continue;
        words.col(found++) = v / norm;
    }
    if (found != want) throw ValidationError("stabilizer group does not fix a code space of the requested size");
    return words;
}

inline CodeSpec builtin_code(std::string_view name) {
    if (name == "rep3") {
        CMatrix m = CMatrix::Zero(8, 2);
        m(0, 0) = 1.0;
        m(7, 1) = 1.0;
        return {"rep3", 3, 1, 1, validate_isometry(m, SiteLayout::qubits(3), 1e-12)};
    }
    if (name == "code422") {
        const CMatrix m = stabilizer_codewords({"XXXX", "ZZZZ"}, 2);
        return {"code422", 4, 2, 2, validate_isometry(m, SiteLayout::qubits(4), 1e-12)};
    }
    if (name == "code513") {
        const CMatrix m = stabilizer_codewords({"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}, 1);
        return {"code513", 5, 1, 3, validate_isometry(m, SiteLayout::qubits(5), 1e-12)};
    }
    throw ValidationError("unknown code '" + std::string(name) + "' (expected rep3, code422 or code513)");
}

struct TScramblerReport {
    std::string code;
    int t = 0;
    bool certified = false;
    std::vector<SubsystemDeviation> subsets;
    std::map<Index, double> imin_bits_per_k;
};

/// Replacement-channel test on every qubit subset of size 1..t, plus the
/// optimizer's value for each corresponding subsystem dimension.
inline TScramblerReport check_t_scrambler(const CodeSpec& code, int t, const SeesawConfig& cfg = {},
                                          const TaskRunner& runner = run_serial) {
    if (t < 1 || t >= code.n) throw ValidationError("check_t_scrambler: need 1 <= t < n");
    TScramblerReport report;
    report.code = code.name;
    report.t = t;
    double worst = 0.0;
    for (int size = 1; size <= t; ++size) {
        const Index k = Index{1} << size;
        ScramblerCertificate cert = perfect_scrambler_certificate(code.encoder, k);
        worst = std::max(worst, cert.max_deviation);
        for (auto& s : cert.subsystems) report.subsets.push_back(std::move(s));
        report.imin_bits_per_k[k] = imin_acc(code.encoder, k, cfg, runner).value_bits;
    }
    report.certified = worst <= kCertificateTol;
    return report;
}

}  // namespace scramblemeter
