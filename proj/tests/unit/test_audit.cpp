#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "stclab/audit.hpp"

using namespace stclab;

namespace {

std::map<std::string, ReportLine> by_key(const Report& r) {
    std::map<std::string, ReportLine> m;
    for (const auto& l : r.lines()) m[l.key] = l;
    return m;
}

}  // namespace

TEST(Audit, AllPassesWithThousandTrials) {
    const Report r = run_audit(AuditKind::All, 1000, 1);
    std::ostringstream out;
    r.write(out);
    EXPECT_TRUE(r.pass()) << out.str();
}

TEST(Audit, EveryCheckedLineNamesItsRequirement) {
    for (const auto& l : run_audit(AuditKind::All, 10, 2).lines()) {
        EXPECT_FALSE(l.key.empty());
        EXPECT_FALSE(l.value.empty());
    }
}

TEST(Audit, ZeroTrialsRejected) {
    EXPECT_THROW(run_audit(AuditKind::RadonHurwitz, 0, 1), ArgumentError);
}

TEST(Audit, SelectsSuites) {
    const auto rh = by_key(run_audit(AuditKind::RadonHurwitz, 5, 1));
    EXPECT_TRUE(rh.count("rh.mixed.max_residual"));
    EXPECT_FALSE(rh.count("theorem1.class"));
    const auto t1 = by_key(run_audit(AuditKind::Theorem1, 5, 1));
    EXPECT_EQ(t1.at("theorem1.class").value, "DIRECT_DISCERNIBLE");
    // The scalar control i*I is reported for information, not asserted.
    EXPECT_TRUE(t1.at("theorem1.control_iI.base_span_min_residual").requirement.empty());
    EXPECT_EQ(t1.at("theorem1.control_iI.base_span_min_residual").value, "1.000000e+00");
}

TEST(Audit, CorruptedGeneratorFileFailsAndNamesPair) {
    auto g = alamouti_generators();
    std::vector<ComplexMatrix> betas = g.betas();
    betas[2](0, 1) += Complex(0.25, 0.0);
    const GeneratorSet bad(2, 2, 2, betas, 0.5);
    const auto r = audit_generator_file(bad);
    EXPECT_FALSE(r.pass());
    const auto m = by_key(r);
    const std::string pair = m.at("rh.file.worst_pair").value;
    EXPECT_TRUE(pair.find('2') != std::string::npos) << pair;
    EXPECT_TRUE(audit_generator_file(alamouti_generators()).pass());
}
