#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "stclab/soqpsk32.hpp"

using namespace stclab;
using namespace stclab::soqpsk32;

namespace {

const CodematrixEntry& find(const std::vector<CodematrixEntry>& t, const IndexMatrix& idx) {
    for (const auto& e : t)
        if (e.indices == idx) return e;
    throw std::runtime_error("index matrix not in table");
}

}  // namespace

TEST(Qpsk, PointsAndNearest) {
    const double a = 1.0 / std::numbers::sqrt2;
    EXPECT_EQ(qpsk_point(0), Complex(a, a));
    EXPECT_EQ(qpsk_point(1), Complex(-a, a));
    EXPECT_EQ(qpsk_point(2), Complex(-a, -a));
    EXPECT_EQ(qpsk_point(3), Complex(a, -a));
    EXPECT_THROW(qpsk_point(4), ArgumentError);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(nearest_qpsk_index(qpsk_point(k) * 0.9), k);
}

TEST(BuildConstellation, CountsAndSubconstellations) {
    const auto t = build_constellation();
    ASSERT_EQ(t.size(), 32u);
    int base = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(t[i].index, static_cast<int>(i));
        base += t[i].subconstellation == Subconstellation::Base;
    }
    EXPECT_EQ(base, 16);
}

TEST(BuildConstellation, CosetLabelsOfKnownCells) {
    const auto t = build_constellation();
    const auto& first = find(t, {{{1, 3}, {0, 0}}});
    EXPECT_EQ(first.index, 0);
    EXPECT_EQ(first.q8.coset, 0);
    EXPECT_EQ(first.q8.bits, 0b00u);
    EXPECT_EQ(first.q16.coset, 0);
    EXPECT_EQ(first.q16.bits, 0u);

    const auto& e24 = find(t, {{{1, 1}, {0, 2}}});
    EXPECT_EQ(e24.index, 24);
    EXPECT_EQ(e24.q8.coset, 5);
    EXPECT_EQ(e24.q8.bits, 0b01u);
    EXPECT_EQ(e24.q16.coset, 10);
    EXPECT_EQ(e24.q16.bits, 1u);
    EXPECT_EQ(e24.subconstellation, Subconstellation::Primed);
}

TEST(MatrixFromIndices, KnownCellAndRoundTrip) {
    const double a = 1.0 / std::numbers::sqrt2;
    const ComplexMatrix want(2, 2, {Complex(a, a), Complex(a, -a), Complex(a, a), Complex(-a, a)});
    EXPECT_EQ(matrix_from_indices({{{0, 3}, {0, 1}}}), want);
    const ComplexMatrix all0 = matrix_from_indices({{{0, 0}, {0, 0}}});
    for (auto z : all0.entries()) EXPECT_EQ(z, qpsk_point(0));
    for (const auto& e : build_constellation()) EXPECT_EQ(indices_from_matrix(e.matrix), e.indices);
}

TEST(VerifyForms, FullTablePassesEmptyIsVacuous) {
    EXPECT_TRUE(verify_forms(build_constellation()).pass());
    EXPECT_TRUE(verify_forms({}).pass());
}

TEST(VerifyForms, FlippedSymbolGivesOneViolation) {
    auto t = build_constellation();
    t[3].matrix(1, 1) = -t[3].matrix(1, 1);
    const auto r = verify_forms(t);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].index, 3);
}

TEST(ChiCoordinates, KnownEntries) {
    const auto t = build_constellation();
    const RealVector c0 = chi_coordinates(find(t, {{{1, 3}, {0, 0}}}));
    const RealVector want{-1, 1, 1, 1, 0, 0, 0, 0};
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(c0[k], want[k], 1e-15);

    const RealVector c16 = chi_coordinates(find(t, {{{3, 1}, {0, 0}}}));
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(c16[k], 0.0);
    for (std::size_t k = 4; k < 8; ++k) EXPECT_NE(c16[k], 0.0);
}

TEST(ChiCoordinates, NonzeroHalfIsSigns) {
    for (const auto& e : build_constellation()) {
        const RealVector c = chi_coordinates(e);
        const std::size_t off = e.subconstellation == Subconstellation::Base ? 0 : 4;
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_NEAR(std::abs(c[off + k]), 1.0, 1e-15);
            EXPECT_EQ(c[(off + 4 + k) % 8], 0.0);
        }
    }
}

TEST(ExpandedConstellation, RegeneratesTableRowByRow) {
    const auto e = expanded_constellation();
    const auto t = build_constellation();
    ASSERT_EQ(e.points.size(), t.size());
    for (const auto& entry : t) {
        double best = 1e9;
        for (const auto& p : e.points)
            if (p.subconstellation == entry.subconstellation) best = std::min(best, max_abs_diff(p.matrix, entry.matrix));
        EXPECT_LE(best, 1e-12) << "entry " << entry.index;
    }
}

TEST(CosetPartition, EachCosetHasOneMemberPerBitPattern) {
    std::array<std::array<int, 4>, 8> q8{};
    std::array<std::array<int, 2>, 16> q16{};
    for (const auto& e : build_constellation()) {
        ++q8.at(static_cast<std::size_t>(e.q8.coset)).at(e.q8.bits);
        ++q16.at(static_cast<std::size_t>(e.q16.coset)).at(e.q16.bits);
        // Cosets 0..3 (q = 8) and 0..7 (q = 16) are base cosets.
        EXPECT_EQ(e.q8.coset < 4, e.subconstellation == Subconstellation::Base);
        EXPECT_EQ(e.q16.coset < 8, e.subconstellation == Subconstellation::Base);
    }
    for (const auto& c : q8)
        for (int n : c) EXPECT_EQ(n, 1);
    for (const auto& c : q16)
        for (int n : c) EXPECT_EQ(n, 1);
}

TEST(ConstellationFile, RoundTripAndErrors) {
    std::stringstream ss;
    write_constellation(ss, build_constellation());
    const auto back = read_constellation(ss);
    const auto t = build_constellation();
    ASSERT_EQ(back.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(back[i].indices, t[i].indices);
        EXPECT_EQ(back[i].q8.coset, t[i].q8.coset);
        EXPECT_EQ(back[i].q8.bits, t[i].q8.bits);
        EXPECT_EQ(back[i].q16.coset, t[i].q16.coset);
        EXPECT_EQ(back[i].q16.bits, t[i].q16.bits);
    }
    std::istringstream short_file("0, 1 3 0 0, 0, 00, 0, 0\n");
    EXPECT_THROW(read_constellation(short_file), ParseError);
    std::istringstream bad("0, 1 3 0 4, 0, 00, 0, 0\n");
    EXPECT_THROW(read_constellation(bad), ParseError);
    std::istringstream bad_bits("0, 1 3 0 0, 0, 2, 0, 0\n");
    EXPECT_THROW(read_constellation(bad_bits), ParseError);
}
