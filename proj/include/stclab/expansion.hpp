#pragma once

// First-tier constellation expansions G_e = G u G U zeta of an orthogonal
// design constellation, their classification, and the numerical audits of the
// span/direct-sum structure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stclab/linalg.hpp"
#include "stclab/orthogonal_design.hpp"

namespace stclab {

enum class Subconstellation { Base, Primed };

inline const char* to_string(Subconstellation s) { return s == Subconstellation::Base ? "BASE" : "PRIMED"; }

struct TaggedPoint {
    ComplexMatrix matrix;
    Subconstellation subconstellation = Subconstellation::Base;
    /// (chi || 0) for base points, (0 || chi') for primed points.
    RealVector chi_oplus;

    /// The nonzero half of chi_oplus.
    RealVector own_chi() const {
        const std::size_t half = chi_oplus.size() / 2;
        auto first = chi_oplus.begin() + (subconstellation == Subconstellation::Base ? 0 : static_cast<long>(half));
        return RealVector(first, first + static_cast<long>(half));
    }
};

struct ExpandedConstellation {
    GeneratorSet base_generators;
    GeneratorSet primed_generators;  ///< beta'_l = beta_l U zeta
    ComplexMatrix unitary;
    Complex zeta{1.0, 0.0};
    std::vector<TaggedPoint> points;
    /// Primed points dropped because they coincide with a base point.
    std::size_t collapsed = 0;

    bool degenerate() const noexcept { return collapsed > 0; }

    std::vector<const TaggedPoint*> subset(Subconstellation s) const {
        std::vector<const TaggedPoint*> out;
        for (const auto& p : points)
            if (p.subconstellation == s) out.push_back(&p);
        return out;
    }

    const GeneratorSet& generators_for(Subconstellation s) const {
        return s == Subconstellation::Base ? base_generators : primed_generators;
    }
};

namespace detail {

inline void require_unitary(const ComplexMatrix& u, std::size_t n, double tol) {
    if (u.rows() != n || u.cols() != n)
        throw DimensionError("expansion unitary must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!is_unitary(u, tol)) throw ArgumentError("expansion matrix is not unitary");
}

inline void require_unimodular(Complex zeta) {
    if (std::abs(std::abs(zeta) - 1.0) > kExactTol) throw ArgumentError("rotation zeta is not unimodular");
}

inline RealVector join_halves(const RealVector& chi, Subconstellation s) {
    RealVector out(2 * chi.size(), 0.0);
    std::copy(chi.begin(), chi.end(), out.begin() + (s == Subconstellation::Base ? 0 : static_cast<long>(chi.size())));
    return out;
}

/// Entries equal after rounding to a 1e-12 grid.
inline bool rounded_equal(const ComplexMatrix& a, const ComplexMatrix& b) {
    auto q = [](double x) { return std::llround(x * 1e12); };
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        const Complex x = a.entries()[k];
        const Complex y = b.entries()[k];
        if (q(x.real()) != q(y.real()) || q(x.imag()) != q(y.imag())) return false;
    }
    return true;
}

/// Greedy one-to-one matching of two matrix sets at max-abs tolerance tol.
inline bool sets_match(const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && max_abs_diff(x, b[j]) <= tol) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace detail

inline ExpandedConstellation expand(const GeneratorSet& g, const std::vector<RealVector>& point_chis,
                                    const ComplexMatrix& u, Complex zeta) {
    detail::require_unitary(u, g.N(), 1e-10);
    detail::require_unimodular(zeta);
    if (point_chis.empty()) throw ArgumentError("expand: no constellation points");

    std::vector<ComplexMatrix> primed;
    primed.reserve(g.size());
    for (const auto& b : g.betas()) primed.push_back(b * u * zeta);
    ExpandedConstellation e{g, GeneratorSet(g.T(), g.N(), g.K(), std::move(primed), g.scale()), u, zeta, {}, 0};

    for (const auto& chi : point_chis) {
        ComplexMatrix s = synthesize(g, chi);
        if (!s.all_finite()) throw ArgumentError("expand: non-finite constellation point");
        e.points.push_back({std::move(s), Subconstellation::Base, detail::join_halves(chi, Subconstellation::Base)});
    }
    const std::size_t n_base = e.points.size();
    for (const auto& chi : point_chis) {
        ComplexMatrix s = synthesize(e.primed_generators, chi);
        bool duplicate = false;
        for (std::size_t k = 0; k < n_base && !duplicate; ++k) duplicate = detail::rounded_equal(s, e.points[k].matrix);
        if (duplicate) {
            ++e.collapsed;
            continue;
        }
        e.points.push_back({std::move(s), Subconstellation::Primed, detail::join_halves(chi, Subconstellation::Primed)});
    }
    return e;
}

/// All 2^{2K} sign vectors in {-1, +1}^{2K}, first coordinate varying slowest.
inline std::vector<RealVector> sign_vectors(std::size_t length) {
    std::vector<RealVector> out;
    const std::size_t count = std::size_t{1} << length;
    for (std::size_t m = 0; m < count; ++m) {
        RealVector v(length);
        for (std::size_t k = 0; k < length; ++k) v[k] = ((m >> (length - 1 - k)) & 1u) ? 1.0 : -1.0;
        out.push_back(std::move(v));
    }
    return out;
}

enum class ExpansionKind { Indiscernible, DirectDiscernible, IndirectDiscernible, NotAnExpansion };

inline const char* to_string(ExpansionKind k) {
    switch (k) {
        case ExpansionKind::Indiscernible: return "INDISCERNIBLE";
        case ExpansionKind::DirectDiscernible: return "DIRECT_DISCERNIBLE";
        case ExpansionKind::IndirectDiscernible: return "INDIRECT_DISCERNIBLE";
        case ExpansionKind::NotAnExpansion: return "NOT_AN_EXPANSION";
    }
    return "?";
}

struct ExpansionClass {
    ExpansionKind kind = ExpansionKind::NotAnExpansion;
    std::string witness;
    /// Multiplier d (|d| = 1) such that U zeta d has real eigenvalues; set for
    /// indirect expansions.
    std::optional<Complex> derotation;

    bool discernible() const noexcept {
        return kind == ExpansionKind::DirectDiscernible || kind == ExpansionKind::IndirectDiscernible;
    }
};

inline constexpr double kEigenTol = 1e-9;

/// Eigenvalues of a square matrix; closed form for 2x2, the diagonal for
/// triangular matrices of other sizes.
inline std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
    if (!m.is_square()) throw DimensionError("eigenvalues: non-square " + m.shape_string());
    if (m.rows() == 2) {
        auto [a, b] = eigenvalues_2x2(m);
        return {a, b};
    }
    bool upper = true, lower = true;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (r > c && std::abs(m(r, c)) > kExactTol) upper = false;
            if (r < c && std::abs(m(r, c)) > kExactTol) lower = false;
        }
    if (!upper && !lower)
        throw DimensionError("eigenvalues: only 2x2 or triangular matrices are supported, got " + m.shape_string());
    std::vector<Complex> ev;
    for (std::size_t k = 0; k < m.rows(); ++k) ev.push_back(m(k, k));
    return ev;
}

inline std::vector<Complex> distinct_values(const std::vector<Complex>& v, double tol) {
    std::vector<Complex> out;
    for (auto z : v)
        if (std::none_of(out.begin(), out.end(), [&](Complex w) { return std::abs(w - z) <= tol; })) out.push_back(z);
    return out;
}

/// Classifies G u G U zeta. The result depends on U and zeta only through the
/// product U zeta, so (U w*, zeta w) classifies like (U, zeta).
///
///  - NOT_AN_EXPANSION: G U zeta equals G as a set, or U zeta = +-I.
///  - INDISCERNIBLE: U zeta = w I, or the eigenvalue criterion fails (flagged
///    in the witness).
///  - DIRECT_DISCERNIBLE: U zeta has more than two distinct eigenvalues or
///    only real ones.
///  - INDIRECT_DISCERNIBLE: U zeta d has real eigenvalues for a nontrivial
///    unimodular d; d is reported as the de-rotation.
inline ExpansionClass classify_expansion(const ComplexMatrix& u, Complex zeta, const GeneratorSet& g,
                                         const std::vector<RealVector>& point_chis) {
    detail::require_unitary(u, g.N(), 1e-10);
    detail::require_unimodular(zeta);
    const ComplexMatrix m = u * zeta;
    const std::size_t n = g.N();
    std::ostringstream w;
    w.precision(12);

    const ComplexMatrix eye = ComplexMatrix::identity(n);
    if (max_abs_diff(m, eye) <= 1e-10 || max_abs_diff(m, -eye) <= 1e-10) {
        w << "U*zeta = " << (m(0, 0).real() > 0 ? "+I" : "-I");
        return {ExpansionKind::NotAnExpansion, w.str(), std::nullopt};
    }

    std::vector<ComplexMatrix> base, moved;
    for (const auto& chi : point_chis) {
        base.push_back(synthesize(g, chi));
        moved.push_back(base.back() * m);
    }
    if (detail::sets_match(base, moved, 1e-10)) return {ExpansionKind::NotAnExpansion, "G*U*zeta = G as sets", std::nullopt};

    if (max_abs_diff(m, m(0, 0) * eye) <= 1e-10) {
        w << "U*zeta = omega*I, omega = " << m(0, 0);
        return {ExpansionKind::Indiscernible, w.str(), std::nullopt};
    }

    const auto ev = eigenvalues(m);
    const auto distinct = distinct_values(ev, kEigenTol);
    w << "eigenvalues:";
    for (auto z : ev) w << ' ' << z;
    if (distinct.size() > 2) {
        w << "; " << distinct.size() << " distinct";
        return {ExpansionKind::DirectDiscernible, w.str(), std::nullopt};
    }
    const bool all_real =
        std::all_of(ev.begin(), ev.end(), [](Complex z) { return std::abs(z.imag()) <= kEigenTol; });
    if (all_real) {
        w << "; all real";
        return {ExpansionKind::DirectDiscernible, w.str(), std::nullopt};
    }

    // Rotate the first eigenvalue onto the real axis; every other argument must
    // then be congruent to 0 or pi. Take the representative with arg in [-pi/2, pi/2).
    double phi = -std::arg(ev.front());
    if (phi >= std::numbers::pi / 2) phi -= std::numbers::pi;
    if (phi < -std::numbers::pi / 2) phi += std::numbers::pi;
    const Complex d = std::polar(1.0, phi);
    const bool rotated_real =
        std::all_of(ev.begin(), ev.end(), [&](Complex z) { return std::abs((z * d).imag()) <= kEigenTol; });
    if (rotated_real) {
        w << "; real after de-rotation by " << d;
        return {ExpansionKind::IndirectDiscernible, w.str(), d};
    }
    w << "; borderline: two distinct non-real eigenvalues that are not a rotated real pair, "
         "eigenvalue criterion not met";
    return {ExpansionKind::Indiscernible, w.str(), std::nullopt};
}

/// Orthonormal basis (in the real isometric picture) of the real span of a set
/// of matrices, by modified Gram-Schmidt. Dependent vectors are dropped.
inline std::vector<RealVector> real_span_basis(const std::vector<ComplexMatrix>& mats, double tol = 1e-12) {
    std::vector<RealVector> basis;
    for (const auto& m : mats) {
        RealVector v = isometry_matrix_to_real(m);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) {
                const double c = dot(q, v);
                for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * q[k];
            }
        const double nv = norm2(v);
        if (nv > tol) {
            for (auto& x : v) x /= nv;
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

/// Norm of m minus its orthogonal projection onto the real span of basis.
inline double span_residual(const std::vector<RealVector>& basis, const ComplexMatrix& m) {
    RealVector v = isometry_matrix_to_real(m);
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) {
            const double c = dot(q, v);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * q[k];
        }
    return norm2(v);
}

inline constexpr double kDiscernibleResidual = 1e-6;

struct Theorem1Report {
    std::vector<double> per_generator;
    double min_residual = 0.0;
    double max_residual = 0.0;
    bool pass = false;  ///< every primed generator lies outside the base span
};

/// Distance of each primed generator from the real span of the base generators.
inline Theorem1Report theorem1_audit(const ExpandedConstellation& e) {
    const auto basis = real_span_basis(e.base_generators.betas());
    Theorem1Report r;
    for (const auto& b : e.primed_generators.betas()) r.per_generator.push_back(span_residual(basis, b));
    r.min_residual = *std::min_element(r.per_generator.begin(), r.per_generator.end());
    r.max_residual = *std::max_element(r.per_generator.begin(), r.per_generator.end());
    r.pass = r.min_residual > kDiscernibleResidual;
    return r;
}

struct Corollary1Report {
    std::vector<double> per_point;  ///< analyze() residual of each primed point
    double min_residual = 0.0;
    double max_residual = 0.0;
    bool pass = true;  ///< no nonzero primed point lies in the base design
};

inline Corollary1Report corollary1_audit(const ExpandedConstellation& e) {
    Corollary1Report r;
    for (const auto* p : e.subset(Subconstellation::Primed)) {
        if (frobenius_norm(p->matrix) <= kExactTol) continue;  // the zero matrix is in every span
        r.per_point.push_back(analyze(e.base_generators, p->matrix).residual_norm);
    }
    if (r.per_point.empty()) return r;
    r.min_residual = *std::min_element(r.per_point.begin(), r.per_point.end());
    r.max_residual = *std::max_element(r.per_point.begin(), r.per_point.end());
    r.pass = r.min_residual > kDiscernibleResidual;
    return r;
}

struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// sum chi_l beta_l + sum chi'_l beta'_l
inline ComplexMatrix reconstruct_direct_sum(const ExpandedConstellation& e, std::span<const double> chi_oplus) {
    const std::size_t half = e.base_generators.size();
    if (chi_oplus.size() != 2 * half) throw DimensionError("reconstruct_direct_sum: chi_oplus length");
    return synthesize(e.base_generators, chi_oplus.first(half)) +
           synthesize(e.primed_generators, chi_oplus.subspan(half));
}

/// Locates S among the points and returns its direct-sum coordinates, computed
/// afresh by analysis over the owning subconstellation's generators.
inline TaggedPoint decompose_direct_sum(const ExpandedConstellation& e, const ComplexMatrix& s) {
    for (const auto& p : e.points) {
        if (!p.matrix.same_shape(s) || max_abs_diff(p.matrix, s) > 1e-10) continue;
        const Analysis a = analyze(e.generators_for(p.subconstellation), s);
        return {p.matrix, p.subconstellation, detail::join_halves(a.chi, p.subconstellation)};
    }
    throw NotFoundError("decompose_direct_sum: matrix is not a constellation point");
}

/// (S - S')^H (S - S') = c |chi - chi'|^2 I for two points of the same
/// subconstellation; mixing subconstellations is rejected.
inline bool pairwise_difference_check(const ExpandedConstellation& e, const TaggedPoint& a, const TaggedPoint& b,
                                      double tol = kExactTol) {
    if (a.subconstellation != b.subconstellation)
        throw ArgumentError("pairwise_difference_check: points from different subconstellations");
    return pairwise_difference_check(e.generators_for(a.subconstellation), a.own_chi(), b.own_chi(), tol);
}

}  // namespace stclab
