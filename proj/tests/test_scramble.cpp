#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scramblemeter/scramble.hpp"
#include "test_support.hpp"

using namespace scramblemeter;
using namespace scramblemeter::testing;

namespace {

Isometry identity_isometry(Index d) { return validate_isometry(identity(d), SiteLayout({d})); }

Isometry bell_encoder() {
    CMatrix v = CMatrix::Zero(4, 2);
    const double s = 1.0 / std::sqrt(2.0);
    v(0, 0) = v(3, 0) = s;
    v(1, 1) = v(2, 1) = s;
    return validate_isometry(v, SiteLayout::qubits(2));
}

/// |i> -> |i>_D (x) |0>_C.
Isometry replacement_isometry() {
    CMatrix v = CMatrix::Zero(4, 2);
    v(0, 0) = 1.0;
    v(2, 1) = 1.0;
    return validate_isometry(v, SiteLayout::qubits(2));
}

Povm x_basis_povm() { return Povm({(identity(2) + pauli_x()) / 2.0, (identity(2) - pauli_x()) / 2.0}); }

SeesawConfig quick_config(int restarts = 6) {
    SeesawConfig cfg;
    cfg.restarts = restarts;
    return cfg;
}

}  // namespace

TEST(Objective, TrivialPovmIsZero) {
    std::mt19937_64 rng(1);
    const Isometry v = validate_isometry(random_isometry_matrix(rng, 8, 2), SiteLayout::qubits(3));
    EXPECT_EQ(objective(v, SubsystemSpec({1}, v.layout()), trivial_povm(2, {0.3, 0.7})), 0.0);
}

TEST(Objective, IdentityIsometryProjectiveBasis) {
    const Isometry v = identity_isometry(2);
    EXPECT_NEAR(objective(v, SubsystemSpec::whole(v.layout()), computational_basis_povm(2)), 1.0, 1e-14);
}

TEST(Objective, BellEncoderXBasis) {
    const Isometry v = bell_encoder();
    EXPECT_NEAR(objective(v, SubsystemSpec({0}, v.layout()), x_basis_povm()), 1.0, 1e-14);
    EXPECT_NEAR(objective(v, SubsystemSpec({0}, v.layout()), computational_basis_povm(2)), 0.0, 1e-14);
}

TEST(Objective, DimensionMismatchThrows) {
    const Isometry v = bell_encoder();
    EXPECT_THROW(objective(v, SubsystemSpec({0}, v.layout()), computational_basis_povm(3)), DimensionError);
}

TEST(Seesaw, ReplacementChannelGivesZeroOnEveryRestart) {
    const Isometry v = replacement_isometry();
    const auto out = seesaw(v, SubsystemSpec({1}, v.layout()), 2, quick_config());
    for (const auto& r : out.restart_trace) EXPECT_NEAR(r.value_bits, 0.0, 1e-12);
    EXPECT_EQ(out.restarts_agreeing, 6);
}

TEST(Seesaw, IdentityQubitReachesOneBit) {
    const Isometry v = identity_isometry(2);
    const auto out = seesaw(v, SubsystemSpec::whole(v.layout()), 2, quick_config());
    EXPECT_NEAR(out.value_bits, 1.0, 1e-7);
}

TEST(Seesaw, BellEncoderFindsTheXBasis) {
    const Isometry v = bell_encoder();
    const auto out = seesaw(v, SubsystemSpec({0}, v.layout()), 2, quick_config());
    EXPECT_NEAR(out.value_bits, 1.0, 1e-6);
}

TEST(Seesaw, ComputationalBasisStartIsStuckAtZero) {
    const Isometry v = bell_encoder();
    const auto run =
        seesaw_from(IsometricChannel(v, SubsystemSpec({0}, v.layout())), computational_basis_povm(2), SeesawConfig{});
    EXPECT_NEAR(run.value_bits, 0.0, 1e-9);
    EXPECT_TRUE(run.converged);
}

TEST(Seesaw, ObjectiveIsMonotoneAcrossHalfSteps) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 6; ++trial) {
        const Isometry v = validate_isometry(random_isometry_matrix(rng, 8, 2), SiteLayout::qubits(3));
        const IsometricChannel ch(v, SubsystemSpec(trial % 2 ? std::vector<std::size_t>{2} : std::vector<std::size_t>{0, 1},
                                                   v.layout()));
        const auto run = seesaw_restart(ch, 2 + trial % 3, SeesawConfig{}, 100 + trial);
        ASSERT_GE(run.history.size(), 3u);
        for (std::size_t i = 1; i < run.history.size(); ++i) EXPECT_GE(run.history[i], run.history[i - 1] - 1e-12);
    }
}

TEST(Seesaw, RejectsEffectCountOutsideRange) {
    const Isometry v = identity_isometry(2);
    EXPECT_THROW(seesaw(v, SubsystemSpec::whole(v.layout()), 5, quick_config()), ValidationError);
    EXPECT_THROW(seesaw(v, SubsystemSpec::whole(v.layout()), 1, quick_config()), ValidationError);
}

TEST(Subsystems, EnumerationOrderAndDimensions) {
    const SiteLayout layout({2, 2, 4, 2});
    const auto subs = subsystems_of_dimension(layout, 4);
    std::vector<std::string> names;
    for (const auto& s : subs) names.push_back(s.to_string());
    EXPECT_EQ(names, (std::vector<std::string>{"{2}", "{0,1}", "{0,3}", "{1,3}"}));
    EXPECT_TRUE(subsystems_of_dimension(layout, 3).empty());
}

TEST(IminAcc, IdentityIsometryAttainsLogDimension) {
    for (Index d : {2, 3, 4}) {
        const auto r = imin_acc(identity_isometry(d), d, quick_config());
        EXPECT_NEAR(r.value_bits, std::log2(static_cast<double>(d)), 1e-6) << "d=" << d;
    }
}

TEST(IminAcc, ReplacementSiteIsZeroAndDataSiteIsOne) {
    const Isometry v = replacement_isometry();
    const auto cfg = quick_config();
    const auto on_replacement = optimize_channel(IsometricChannel(v, SubsystemSpec({1}, v.layout())), cfg);
    EXPECT_NEAR(on_replacement.value_bits, 0.0, 1e-9);
    EXPECT_NEAR(imin_acc(v, 2, cfg).value_bits, 1.0, 1e-6);
}

TEST(IminAcc, NoSubsystemOfDimensionIsADomainError) {
    EXPECT_THROW(imin_acc(bell_encoder(), 3, quick_config()), DomainError);
}

TEST(IminAcc, ResultDiagnosticsAreConsistent) {
    const auto r = imin_acc(bell_encoder(), 2, quick_config(4));
    EXPECT_EQ(r.subsystems.size(), 2u);
    EXPECT_EQ(r.restart_trace.size(), 2u * 3u * 4u);  // subsystems x {2,3,4} x restarts
    double max_x = 0.0;
    for (const auto& [x, val] : r.per_x_values) max_x = std::max(max_x, val);
    EXPECT_EQ(r.value_bits, max_x);
    EXPECT_EQ(r.best_num_effects, 2);
    EXPECT_EQ(r.best_povm.size(), 2u);
    EXPECT_NEAR(objective(bell_encoder(), r.best_subsystem, r.best_povm), r.value_bits, 1e-12);
}

TEST(IminAcc, BoundsOnRandomIsometries) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 4; ++trial) {
        const Index din = 2 + trial % 2;
        const SiteLayout layout({2, 2, 3});
        const Isometry v = validate_isometry(random_isometry_matrix(rng, 12, din), layout);
        for (Index k : {2, 3, 4}) {
            const auto r = imin_acc(v, k, quick_config(3));
            const int xmax = r.per_x_values.rbegin()->first;
            EXPECT_GE(r.value_bits, -1e-12);
            EXPECT_LE(r.value_bits, std::log2(static_cast<double>(std::min<Index>({din, k, xmax}))) + 1e-9);
        }
    }
}

TEST(IminAcc, NearlyMonotoneInEffectCount) {
    std::mt19937_64 rng(6);
    const Isometry v = validate_isometry(random_isometry_matrix(rng, 8, 2), SiteLayout::qubits(3));
    const auto r = imin_acc(v, 2, quick_config(10));
    double previous = -1.0;
    for (const auto& [x, val] : r.per_x_values) {
        EXPECT_GE(val, previous - 1e-6) << "X=" << x;
        previous = val;
    }
}

TEST(IminAcc, SerialAndThreadedRunsAgreeExactly) {
    std::mt19937_64 rng(7);
    const Isometry v = validate_isometry(random_isometry_matrix(rng, 8, 2), SiteLayout::qubits(3));
    const auto a = imin_acc(v, 2, quick_config(4));
    const auto b = imin_acc(v, 2, quick_config(4), thread_runner(3));
    EXPECT_EQ(a.value_bits, b.value_bits);
    ASSERT_EQ(a.restart_trace.size(), b.restart_trace.size());
    for (std::size_t i = 0; i < a.restart_trace.size(); ++i) {
        EXPECT_EQ(a.restart_trace[i].value_bits, b.restart_trace[i].value_bits);
    }
}

TEST(Objective, UnchangedByUnitaryOnTheComplement) {
    std::mt19937_64 rng(8);
    const SiteLayout layout({2, 3});
    const Isometry v = validate_isometry(random_isometry_matrix(rng, 6, 2), layout);
    const SubsystemSpec c({0}, layout);
    const CMatrix u = tensor(identity(2), random_unitary(rng, 3));
    const Isometry w = validate_isometry(u * v.matrix(), layout);
    for (int trial = 0; trial < 5; ++trial) {
        const Povm m(random_povm_effects(rng, 2, 3));
        EXPECT_NEAR(objective(v, c, m), objective(w, c, m), 1e-10);
    }
}

TEST(Certificate, ReplacementIsCertified) {
    const auto cert = perfect_scrambler_certificate(replacement_isometry(), 2);
    // Site 1 carries no information; site 0 carries all of it.
    EXPECT_EQ(cert.subsystems.size(), 2u);
    EXPECT_NEAR(cert.subsystems[1].max_deviation, 0.0, 1e-15);
    EXPECT_FALSE(cert.certified);

    const Isometry v = replacement_isometry();
    const double dev = replacement_deviation(IsometricChannel(v, SubsystemSpec({1}, v.layout())));
    EXPECT_EQ(dev, 0.0);
}

TEST(Certificate, BellEncoderIsNotCertified) {
    const auto bell = perfect_scrambler_certificate(bell_encoder(), 2);
    EXPECT_FALSE(bell.certified);
}

TEST(Certificate, DistanceTwoEncoderIsCertified) {
    // |0> -> (|0000> + |1111>)/sqrt2, |1> -> (|0011> + |1100>)/sqrt2. Codewords
    // differ in at least two sites, so no single site sees the input.
    CMatrix m = CMatrix::Zero(16, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m(0b0000, 0) = m(0b1111, 0) = s;
    m(0b0011, 1) = m(0b1100, 1) = s;
    const Isometry v = validate_isometry(m, SiteLayout::qubits(4));
    const auto cert = perfect_scrambler_certificate(v, 2);
    EXPECT_TRUE(cert.certified);
    EXPECT_EQ(cert.subsystems.size(), 4u);
    EXPECT_LE(imin_acc(v, 2, quick_config(3)).value_bits, 1e-6);
}

TEST(Certificate, IdentityIsNotCertified) {
    const auto cert = perfect_scrambler_certificate(identity_isometry(2), 2);
    EXPECT_FALSE(cert.certified);
    EXPECT_GT(cert.max_deviation, 0.1);
}

TEST(TransferChannel, AgreesWithIsometricChannel) {
    std::mt19937_64 rng(9);
    const Isometry v = validate_isometry(random_isometry_matrix(rng, 12, 3), SiteLayout({2, 3, 2}));
    const IsometricChannel iso(v, SubsystemSpec({0, 2}, v.layout()));
    const TransferChannel tc = TransferChannel::from(iso);
    const CMatrix rho = random_density(rng, 3);
    const CMatrix mu = random_hermitian(rng, 4);
    EXPECT_LE(max_diff(tc.apply(rho), iso.apply(rho)), 1e-12);
    EXPECT_LE(max_diff(tc.adjoint(mu), iso.adjoint(mu)), 1e-12);
    EXPECT_GE(min_eigenvalue(hermitian_part(tc.choi())), -1e-10);
}
