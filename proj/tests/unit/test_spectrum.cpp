#include <gtest/gtest.h>

#include <sstream>

#include "stclab/report.hpp"
#include "stclab/spectrum.hpp"

using namespace stclab;

namespace {

using Spectrum = std::vector<std::pair<double, std::size_t>>;

Spectrum flat(const std::vector<SpectrumLine>& s) {
    Spectrum out;
    for (const auto& l : s) out.emplace_back(l.distance2, l.multiplicity);
    return out;
}

}  // namespace

// Expected spectra come from tests/oracles/constellation_oracle.py.
TEST(DistanceSpectrum, BaseMatchesOracle) {
    EXPECT_EQ(flat(distance_spectrum(PointSet::Base)), (Spectrum{{4, 32}, {8, 48}, {12, 32}, {16, 8}}));
}

TEST(DistanceSpectrum, PrimedMatchesOracle) {
    EXPECT_EQ(flat(distance_spectrum(PointSet::Primed)), (Spectrum{{4, 32}, {8, 48}, {12, 32}, {16, 8}}));
}

TEST(DistanceSpectrum, FullMatchesOracle) {
    const auto s = distance_spectrum(PointSet::Full);
    EXPECT_EQ(flat(s), (Spectrum{{4, 64}, {8, 352}, {12, 64}, {16, 16}}));
    std::size_t total = 0;
    for (const auto& l : s) total += l.multiplicity;
    EXPECT_EQ(total, 32u * 31u / 2u);
}

TEST(DistanceSpectrum, SinglePointIsEmpty) {
    EXPECT_TRUE(distance_spectrum(std::vector<ComplexMatrix>{ComplexMatrix::identity(2)}).empty());
}

TEST(DistanceSpectrum, CsvFormat) {
    std::ostringstream out;
    write_spectrum_csv(out, distance_spectrum(PointSet::Base));
    EXPECT_EQ(out.str(),
              "distance2,multiplicity\n4.000000000000,32\n8.000000000000,48\n12.000000000000,32\n16.000000000000,8\n");
}

TEST(Report, FormatsLinesAndAggregates) {
    Report r;
    r.check("a", 1e-16, "< 1e-12", true);
    r.info("b", "x");
    EXPECT_TRUE(r.pass());
    Report s;
    s.check("c", std::string("bad"), "ok", false);
    r.append(s);
    EXPECT_FALSE(r.pass());
    std::ostringstream out;
    r.write(out);
    EXPECT_EQ(out.str(), "a=1.000000e-16  # require < 1e-12 PASS\nb=x\nc=bad  # require ok FAIL\n");
}
