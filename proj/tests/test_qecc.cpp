#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "scramblemeter/qecc.hpp"
#include "test_support.hpp"

using namespace scramblemeter;
using namespace scramblemeter::testing;

namespace {

int support_size(const CVector& v) {
    int count = 0;
    for (Index i = 0; i < v.size(); ++i) count += std::abs(v(i)) > 1e-12;
    return count;
}

SeesawConfig light_config() {
    SeesawConfig cfg;
    cfg.restarts = 4;
    return cfg;
}

bool all_small(const TScramblerReport& r, double tol) {
    for (const auto& [k, v] : r.imin_bits_per_k) {
        if (v > tol) return false;
    }
    return true;
}

}  // namespace

TEST(PauliString, MatchesTensorProducts) {
    EXPECT_LE(max_diff(pauli_string("XZ"), tensor(pauli_x(), pauli_z())), 1e-15);
    EXPECT_LE(max_diff(pauli_string("IYI"), tensor(tensor(identity(2), pauli_y()), identity(2))), 1e-15);
    EXPECT_THROW(pauli_string("XQ"), ValidationError);
}

TEST(BuiltinCode, RepetitionEmbedsBasis) {
    const CodeSpec c = builtin_code("rep3");
    const CMatrix& m = c.encoder.matrix();
    EXPECT_EQ(m.rows(), 8);
    EXPECT_EQ(m(0, 0), Complex(1.0));
    EXPECT_EQ(m(7, 1), Complex(1.0));
    EXPECT_EQ(support_size(m.col(0)), 1);
    EXPECT_EQ(support_size(m.col(1)), 1);
}

TEST(BuiltinCode, FourTwoTwoCodewords) {
    const CodeSpec c = builtin_code("code422");
    EXPECT_EQ(c.n, 4);
    EXPECT_EQ(c.j, 2);
    EXPECT_EQ(c.correctable_span(), 1);
    const CMatrix& m = c.encoder.matrix();
    ASSERT_EQ(m.cols(), 4);
    EXPECT_LE(max_diff(m.adjoint() * m, identity(4)), 1e-12);
    for (Index col = 0; col < 4; ++col) {
        EXPECT_EQ(support_size(m.col(col)), 2);
        for (Index i = 0; i < 16; ++i) {
            if (std::abs(m(i, col)) > 1e-12) {
                EXPECT_NEAR(std::abs(m(i, col)), 1.0 / std::sqrt(2.0), 1e-12);
            }
        }
        for (const char* s : {"XXXX", "ZZZZ"}) EXPECT_LE(max_diff(pauli_string(s) * m.col(col), m.col(col)), 1e-12);
    }
}

TEST(BuiltinCode, FiveQubitCodewords) {
    const CodeSpec c = builtin_code("code513");
    const CMatrix& m = c.encoder.matrix();
    ASSERT_EQ(m.cols(), 2);
    EXPECT_LE(max_diff(m.adjoint() * m, identity(2)), 1e-12);
    for (Index col = 0; col < 2; ++col) {
        EXPECT_EQ(support_size(m.col(col)), 16);
        for (Index i = 0; i < 32; ++i) {
            if (std::abs(m(i, col)) > 1e-12) {
                EXPECT_NEAR(std::abs(m(i, col)), 0.25, 1e-12);
            }
        }
        for (const char* s : {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}) {
            EXPECT_LE(max_diff(pauli_string(s) * m.col(col), m.col(col)), 1e-12);
        }
    }
}

TEST(BuiltinCode, UnknownNameThrows) { EXPECT_THROW(builtin_code("steane"), ValidationError); }

TEST(TScrambler, FourTwoTwoHidesSingleQubits) {
    const auto r = check_t_scrambler(builtin_code("code422"), 1, light_config());
    EXPECT_TRUE(r.certified);
    ASSERT_EQ(r.subsets.size(), 4u);
    for (const auto& s : r.subsets) EXPECT_LE(s.max_deviation, 1e-10) << s.subsystem.to_string();
    EXPECT_LE(r.imin_bits_per_k.at(2), 1e-7);
}

TEST(TScrambler, FiveQubitCodeHidesPairs) {
    const auto r = check_t_scrambler(builtin_code("code513"), 2, light_config());
    EXPECT_TRUE(r.certified);
    EXPECT_EQ(r.subsets.size(), 15u);
    EXPECT_LE(r.imin_bits_per_k.at(2), 1e-7);
    EXPECT_LE(r.imin_bits_per_k.at(4), 1e-7);
    EXPECT_TRUE(all_small(r, 1e-6));
}

TEST(TScrambler, FiveQubitCodeLeaksToSomeTriple) {
    const auto r = check_t_scrambler(builtin_code("code513"), 3, light_config());
    EXPECT_FALSE(r.certified);
    bool triple_fails = false;
    for (const auto& s : r.subsets) {
        if (s.subsystem.sites().size() == 3 && s.max_deviation > 1e-3) triple_fails = true;
    }
    EXPECT_TRUE(triple_fails);
    EXPECT_FALSE(all_small(r, 1e-6));
}

TEST(TScrambler, RepetitionCodeIsNotAScrambler) {
    const auto r = check_t_scrambler(builtin_code("rep3"), 1, light_config());
    EXPECT_FALSE(r.certified);
    EXPECT_NEAR(r.imin_bits_per_k.at(2), 1.0, 1e-6);
}

TEST(TScrambler, RejectsSpanOutOfRange) {
    const CodeSpec c = builtin_code("code422");
    EXPECT_THROW(check_t_scrambler(c, 0), ValidationError);
    EXPECT_THROW(check_t_scrambler(c, 4), ValidationError);
}
