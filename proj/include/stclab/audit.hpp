#pragma once

// Audit suites over the shipped 4PSK instance. Each returns a Report whose
// pass() is the conjunction of its checked metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "stclab/channel.hpp"
#include "stclab/expansion.hpp"
#include "stclab/orthogonal_design.hpp"
#include "stclab/report.hpp"
#include "stclab/soqpsk32.hpp"

namespace stclab {

enum class AuditKind { RadonHurwitz, Theorem1, Corollary1, Invariance, Forms, All };

namespace audit_detail {

inline std::string lt(double tol) { return "< " + Report::format(tol); }
inline std::string near(double target, double tol) {
    return "= " + Report::format(target) + " +- " + Report::format(tol);
}

inline Complex random_unimodular(RandomStream& rng) {
    return std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
}

inline double max_generator_diff(const GeneratorSet& a, const GeneratorSet& b) {
    double e = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) e = std::max(e, max_abs_diff(a[l], b[l]));
    return e;
}

}  // namespace audit_detail

/// Radon-Hurwitz audit of one user-supplied generator set.
inline Report audit_generator_file(const GeneratorSet& g, double tol = kExactTol) {
    Report rep;
    const auto rh = radon_hurwitz_check(g, tol);
    rep.info("rh.file.scale", rh.scale);
    rep.check("rh.file.max_residual", rh.max_residual, audit_detail::lt(tol), rh.pass);
    rep.info("rh.file.worst_pair", std::to_string(rh.worst_l) + "," + std::to_string(rh.worst_p));
    return rep;
}

inline Report audit_radon_hurwitz(std::size_t trials, std::uint64_t seed) {
    using namespace audit_detail;
    Report rep;
    const GeneratorSet base = alamouti_generators();
    const GeneratorSet primed = alamouti_primed_generators();
    for (auto [name, set] : {std::pair{"base", &base}, std::pair{"primed", &primed}}) {
        const auto rh = radon_hurwitz_check(*set);
        rep.check(std::string("rh.") + name + ".max_residual", rh.max_residual, lt(kExactTol), rh.pass);
        rep.check(std::string("rh.") + name + ".scale", rh.scale, near(0.5, kExactTol),
                  std::abs(rh.scale - 0.5) <= kExactTol);
    }
    const std::vector<ComplexMatrix> mixed{base[0], primed[0]};
    const auto mx = radon_hurwitz_check(std::span<const ComplexMatrix>(mixed));
    rep.check("rh.mixed.max_residual", mx.max_residual, near(1.0, kExactTol), std::abs(mx.max_residual - 1.0) <= kExactTol);
    rep.info("rh.mixed.worst_pair", std::to_string(mx.worst_l) + "," + std::to_string(mx.worst_p));

    // Rotated generator sets.
    RandomStream rng(derive_seed(seed, 1, 0));
    double worst_rh = 0.0, worst_scale = 0.0, worst_synth = 0.0, worst_compose = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Complex zeta = random_unimodular(rng);
        const GeneratorSet eta = rotate_generators(base, zeta);
        const auto rh = radon_hurwitz_check(eta);
        worst_rh = std::max(worst_rh, rh.max_residual);
        worst_scale = std::max(worst_scale, std::abs(rh.scale - base.scale()));

        std::vector<Complex> z{Complex(rng.gaussian(), rng.gaussian()), Complex(rng.gaussian(), rng.gaussian())};
        std::vector<Complex> zz{z[0] * zeta, z[1] * zeta};
        const ComplexMatrix lhs = synthesize(eta, isometry_symbols_to_chi(zz));
        const ComplexMatrix rhs = zeta * synthesize(base, isometry_symbols_to_chi(z));
        worst_synth = std::max(worst_synth, max_abs_diff(lhs, rhs));

        const Complex zeta2 = random_unimodular(rng);
        worst_compose = std::max(worst_compose, max_generator_diff(rotate_generators(eta, zeta2),
                                                                   rotate_generators(base, zeta * zeta2)));
    }
    rep.info("rh.rotation.trials", static_cast<double>(trials));
    rep.check("rh.rotation.max_residual", worst_rh, lt(kExactTol), worst_rh <= kExactTol);
    rep.check("rh.rotation.max_scale_error", worst_scale, lt(kExactTol), worst_scale <= kExactTol);
    rep.check("rh.rotation.max_synthesis_error", worst_synth, lt(1e-13), worst_synth <= 1e-13);
    rep.check("rh.rotation.max_composition_error", worst_compose, lt(kExactTol), worst_compose <= kExactTol);
    return rep;
}

inline Report audit_theorem1(std::size_t trials, std::uint64_t seed) {
    using namespace audit_detail;
    Report rep;
    const GeneratorSet g = alamouti_generators();
    const auto chis = sign_vectors(4);
    const ComplexMatrix u = soqpsk32::expansion_unitary();

    const auto cls = classify_expansion(u, 1.0, g, chis);
    rep.check("theorem1.class", to_string(cls.kind), "DIRECT_DISCERNIBLE",
              cls.kind == ExpansionKind::DirectDiscernible);
    const ExpandedConstellation e = expand(g, chis, u, 1.0);
    const auto rh = radon_hurwitz_check(e.primed_generators);
    rep.check("theorem1.primed_rh_residual", rh.max_residual, lt(kExactTol), rh.pass);
    const auto t1 = theorem1_audit(e);
    rep.check("theorem1.min_residual", t1.min_residual, near(1.0, 1e-10), std::abs(t1.min_residual - 1.0) <= 1e-10);
    rep.check("theorem1.max_residual", t1.max_residual, near(1.0, 1e-10), std::abs(t1.max_residual - 1.0) <= 1e-10);

    // Real-scalar control: G(-I) stays in the base span.
    const auto neg = theorem1_audit(expand(g, chis, -ComplexMatrix::identity(2), 1.0));
    rep.check("theorem1.control_minus_identity.max_residual", neg.max_residual, lt(1e-10), neg.max_residual < 1e-10);

    // Unimodular-scalar control: G i leaves the base span but lies in the span
    // of the rotated generators.
    const Complex i(0.0, 1.0);
    const ExpandedConstellation ei = expand(g, chis, i * ComplexMatrix::identity(2), 1.0);
    rep.info("theorem1.control_iI.base_span_min_residual", theorem1_audit(ei).min_residual);
    const auto eta_basis = real_span_basis(rotate_generators(g, i).betas());
    double in_eta = 0.0;
    for (const auto& b : ei.primed_generators.betas()) in_eta = std::max(in_eta, span_residual(eta_basis, b));
    rep.check("theorem1.control_iI.rotated_span_max_residual", in_eta, lt(1e-10), in_eta < 1e-10);
    const auto ci = classify_expansion(i * ComplexMatrix::identity(2), 1.0, g, chis);
    rep.check("theorem1.control_iI.class", to_string(ci.kind), "INDISCERNIBLE", ci.kind == ExpansionKind::Indiscernible);

    // Classification depends only on U zeta.
    RandomStream rng(derive_seed(seed, 2, 0));
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Complex w = random_unimodular(rng);
        const auto c2 = classify_expansion(u * std::conj(w), w, g, chis);
        if (c2.kind != cls.kind) ++mismatches;
    }
    rep.check("theorem1.class_invariance_mismatches", std::to_string(mismatches), "= 0", mismatches == 0);
    return rep;
}

inline Report audit_corollary1() {
    using namespace audit_detail;
    Report rep;
    const ExpandedConstellation e = soqpsk32::expanded_constellation();
    const auto c1 = corollary1_audit(e);
    rep.info("corollary1.primed_points", static_cast<double>(c1.per_point.size()));
    rep.check("corollary1.min_residual", c1.min_residual, near(2.0, 1e-10), std::abs(c1.min_residual - 2.0) <= 1e-10);
    rep.check("corollary1.max_residual", c1.max_residual, near(2.0, 1e-10), std::abs(c1.max_residual - 2.0) <= 1e-10);
    double base_res = 0.0;
    for (const auto* p : e.subset(Subconstellation::Base))
        base_res = std::max(base_res, analyze(e.base_generators, p->matrix).residual_norm);
    rep.check("corollary1.base_max_residual", base_res, lt(1e-10), base_res < 1e-10);

    double recon = 0.0;
    bool halves_ok = true;
    for (const auto& p : e.points) {
        const TaggedPoint d = decompose_direct_sum(e, p.matrix);
        recon = std::max(recon, max_abs_diff(reconstruct_direct_sum(e, d.chi_oplus), p.matrix));
        const std::size_t half = d.chi_oplus.size() / 2;
        const std::size_t zero_off = d.subconstellation == Subconstellation::Base ? half : 0;
        const std::size_t live_off = half - zero_off;
        for (std::size_t k = 0; k < half; ++k) {
            if (d.chi_oplus[zero_off + k] != 0.0) halves_ok = false;
            if (std::abs(std::abs(d.chi_oplus[live_off + k]) - 1.0) > kExactTol) halves_ok = false;
        }
    }
    rep.check("corollary1.direct_sum_reconstruction_error", recon, lt(kExactTol), recon <= kExactTol);
    rep.check("corollary1.chi_oplus_halves", halves_ok ? "ok" : "bad", "one half zero, other in {-1,+1}", halves_ok);
    return rep;
}

inline Report audit_invariance(std::size_t trials, std::uint64_t seed) {
    using namespace audit_detail;
    Report rep;
    const ExpandedConstellation e = soqpsk32::expanded_constellation();
    RandomStream rng(derive_seed(seed, 3, 0));
    ShapeInvarianceReport worst;
    double worst_col = 0.0, worst_recon = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ChannelRealization ch = sample_channel(rng, 2);
        const auto s = shape_invariance_audit(e, ch);
        worst.orthonormality_error = std::max(worst.orthonormality_error, s.orthonormality_error);
        worst.max_distance_error = std::max(worst.max_distance_error, s.max_distance_error);
        worst.max_stacked_distance_error = std::max(worst.max_stacked_distance_error, s.max_stacked_distance_error);
        worst.max_angle_error = std::max(worst.max_angle_error, s.max_angle_error);
        worst.max_cross_distance_error = std::max(worst.max_cross_distance_error, s.max_cross_distance_error);

        const EquivalentRealModel m = build_equivalent_real_model(e, ch);
        worst_col = std::max({worst_col, orthonormality_error(m.g), orthonormality_error(m.g_prime)});
        for (const auto& p : e.points) {
            const RealVector y = isometry_matrix_to_real(column_vector(apply_channel(p.matrix, ch.h)));
            RealVector padded(2 * y.size(), 0.0);
            std::copy(y.begin(), y.end(),
                      padded.begin() + (p.subconstellation == Subconstellation::Base ? 0 : static_cast<long>(y.size())));
            const RealVector ys = m.stacked_observation(p.chi_oplus);
            for (std::size_t k = 0; k < ys.size(); ++k) worst_recon = std::max(worst_recon, std::abs(ys[k] - padded[k]));
        }
    }
    rep.info("invariance.trials", static_cast<double>(trials));
    rep.check("invariance.column_orthonormality_error", worst_col, lt(kExactTol), worst_col < kExactTol);
    rep.check("invariance.g_oplus_orthonormality_error", worst.orthonormality_error, lt(kExactTol),
              worst.orthonormality_error < kExactTol);
    rep.check("invariance.same_subconstellation_distance_rel_error", worst.max_distance_error, lt(1e-11),
              worst.max_distance_error < 1e-11);
    rep.check("invariance.stacked_distance_rel_error", worst.max_stacked_distance_error, lt(1e-11),
              worst.max_stacked_distance_error < 1e-11);
    rep.check("invariance.stacked_angle_error", worst.max_angle_error, lt(1e-11), worst.max_angle_error < 1e-11);
    rep.check("invariance.stacked_reconstruction_error", worst_recon, lt(kExactTol), worst_recon <= kExactTol);
    rep.info("invariance.cross_subconstellation_distance_rel_error", worst.max_cross_distance_error);
    return rep;
}

inline Report audit_forms() {
    using namespace audit_detail;
    Report rep;
    const auto table = soqpsk32::build_constellation();
    const auto forms = soqpsk32::verify_forms(table);
    rep.check("forms.violations", std::to_string(forms.violations.size()), "= 0", forms.pass());

    // Regenerate the 32 matrices and match them one-to-one against the table.
    const ExpandedConstellation e = soqpsk32::expanded_constellation();
    double worst = 0.0;
    bool matched = e.points.size() == table.size();
    std::vector<bool> used(table.size(), false);
    for (const auto& p : e.points) {
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < table.size(); ++k) {
            if (used[k] || table[k].subconstellation != p.subconstellation) continue;
            const double d = max_abs_diff(p.matrix, table[k].matrix);
            if (d < best) {
                best = d;
                arg = k;
            }
        }
        if (best > kExactTol) matched = false;
        else used[arg] = true;
        worst = std::max(worst, best);
    }
    rep.check("forms.regeneration_max_error", worst, lt(kExactTol), matched && worst <= kExactTol);

    // Coset partitions: 8 x 4 at q = 8, 16 x 2 at q = 16, one member per uncoded-bit pattern.
    std::vector<int> q8(8 * 4, 0), q16(16 * 2, 0);
    bool partition = true;
    for (const auto& t : table) {
        if (t.q8.coset < 0 || t.q8.coset > 7 || t.q8.bits > 3 || t.q16.coset < 0 || t.q16.coset > 15 || t.q16.bits > 1) {
            partition = false;
            continue;
        }
        ++q8[static_cast<std::size_t>(t.q8.coset * 4) + t.q8.bits];
        ++q16[static_cast<std::size_t>(t.q16.coset * 2) + t.q16.bits];
    }
    partition = partition && std::all_of(q8.begin(), q8.end(), [](int c) { return c == 1; }) &&
                std::all_of(q16.begin(), q16.end(), [](int c) { return c == 1; });
    rep.check("forms.coset_partition", partition ? "ok" : "bad", "8x4 and 16x2", partition);

    // Orthogonality of pairwise differences within each subconstellation.
    std::size_t failures = 0;
    for (auto sub : {Subconstellation::Base, Subconstellation::Primed}) {
        const auto pts = e.subset(sub);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if (!pairwise_difference_check(e, *pts[i], *pts[j])) ++failures;
    }
    rep.check("forms.pairwise_difference_failures", std::to_string(failures), "= 0", failures == 0);
    return rep;
}

inline Report run_audit(AuditKind which, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw ArgumentError("audit: trials must be positive");
    Report rep;
    const bool all = which == AuditKind::All;
    if (all || which == AuditKind::RadonHurwitz) rep.append(audit_radon_hurwitz(trials, seed));
    if (all || which == AuditKind::Theorem1) rep.append(audit_theorem1(trials, seed));
    if (all || which == AuditKind::Corollary1) rep.append(audit_corollary1());
    if (all || which == AuditKind::Invariance) rep.append(audit_invariance(trials, seed));
    if (all || which == AuditKind::Forms) rep.append(audit_forms());
    return rep;
}

}  // namespace stclab
