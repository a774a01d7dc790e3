#pragma once

// Generator sets {beta_l} of linear complex orthogonal designs: synthesis
// S = sum chi_l beta_l, analysis back to chi, the Radon-Hurwitz test and the
// unimodular rotation of a generator set.

#include <cmath>
#include <cstddef>
#include <istream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stclab/linalg.hpp"

namespace stclab {

/// Ordered basis of 2K matrices of size T x N with Radon-Hurwitz scale c:
/// beta_l^H beta_p + beta_p^H beta_l = 2 c delta_lp I_N. c = 1 is the
/// textbook normalization; the unit-energy 4PSK example uses c = 1/2.
class GeneratorSet {
public:
    GeneratorSet(std::size_t t, std::size_t n, std::size_t k, std::vector<ComplexMatrix> betas, double scale)
        : t_(t), n_(n), k_(k), betas_(std::move(betas)), scale_(scale) {
        if (k == 0) throw ArgumentError("GeneratorSet: K must be positive");
        if (betas_.size() != 2 * k)
            throw DimensionError("GeneratorSet: expected " + std::to_string(2 * k) + " matrices, got " +
                                 std::to_string(betas_.size()));
        for (const auto& b : betas_) {
            if (b.rows() != t || b.cols() != n)
                throw DimensionError("GeneratorSet: generator is " + b.shape_string() + ", expected " +
                                     std::to_string(t) + "x" + std::to_string(n));
            if (!b.all_finite()) throw ArgumentError("GeneratorSet: non-finite generator entry");
        }
        if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("GeneratorSet: scale must be positive");
    }

    std::size_t T() const noexcept { return t_; }
    std::size_t N() const noexcept { return n_; }
    std::size_t K() const noexcept { return k_; }
    std::size_t size() const noexcept { return betas_.size(); }
    double scale() const noexcept { return scale_; }
    const std::vector<ComplexMatrix>& betas() const noexcept { return betas_; }
    const ComplexMatrix& operator[](std::size_t l) const { return betas_.at(l); }

    /// The design is linearly decodable only when T >= N.
    bool linearly_decodable_shape() const noexcept { return t_ >= n_; }

private:
    std::size_t t_, n_, k_;
    std::vector<ComplexMatrix> betas_;
    double scale_;
};

/// Alamouti generators in the order of the worked 4PSK example:
/// (1/sqrt2) {diag(1,-1), diag(i,i), antidiag(1,1), [[0,-i],[i,0]]}, c = 1/2.
inline GeneratorSet alamouti_generators() {
    const double a = 1.0 / std::numbers::sqrt2;
    const Complex i(0.0, 1.0);
    std::vector<ComplexMatrix> b{
        ComplexMatrix(2, 2, {a, 0.0, 0.0, -a}),
        ComplexMatrix(2, 2, {a * i, 0.0, 0.0, a * i}),
        ComplexMatrix(2, 2, {0.0, a, a, 0.0}),
        ComplexMatrix(2, 2, {0.0, -a * i, a * i, 0.0}),
    };
    return GeneratorSet(2, 2, 2, std::move(b), 0.5);
}

/// The second quadruple of the example, equal to alamouti_generators()
/// right-multiplied by diag(1,-1):
/// (1/sqrt2) {I, diag(i,-i), [[0,-1],[1,0]], [[0,i],[i,0]]}, c = 1/2.
inline GeneratorSet alamouti_primed_generators() {
    const double a = 1.0 / std::numbers::sqrt2;
    const Complex i(0.0, 1.0);
    std::vector<ComplexMatrix> b{
        ComplexMatrix(2, 2, {a, 0.0, 0.0, a}),
        ComplexMatrix(2, 2, {a * i, 0.0, 0.0, -a * i}),
        ComplexMatrix(2, 2, {0.0, -a, a, 0.0}),
        ComplexMatrix(2, 2, {0.0, a * i, a * i, 0.0}),
    };
    return GeneratorSet(2, 2, 2, std::move(b), 0.5);
}

struct RadonHurwitzReport {
    bool pass = false;
    double scale = 0.0;
    double max_residual = 0.0;
    std::size_t worst_l = 0;  ///< pair attaining max_residual
    std::size_t worst_p = 0;
};

/// Checks beta_l^H beta_p + beta_p^H beta_l = 2 c delta_lp I for every pair,
/// with c estimated as trace(beta_0^H beta_0) / N.
inline RadonHurwitzReport radon_hurwitz_check(std::span<const ComplexMatrix> betas, double tol = kExactTol) {
    if (betas.empty()) throw ArgumentError("radon_hurwitz_check: empty generator list");
    const std::size_t n = betas.front().cols();
    for (const auto& b : betas)
        if (!b.same_shape(betas.front())) throw DimensionError("radon_hurwitz_check: mixed generator shapes");

    RadonHurwitzReport rep;
    const ComplexMatrix g00 = hermitian(betas[0]) * betas[0];
    double tr = 0.0;
    for (std::size_t k = 0; k < n; ++k) tr += g00(k, k).real();
    rep.scale = tr / static_cast<double>(n);

    const ComplexMatrix eye = ComplexMatrix::identity(n);
    for (std::size_t l = 0; l < betas.size(); ++l)
        for (std::size_t p = l; p < betas.size(); ++p) {
            ComplexMatrix sym = hermitian(betas[l]) * betas[p] + hermitian(betas[p]) * betas[l];
            if (l == p) sym -= (2.0 * rep.scale) * eye;
            const double r = max_abs(sym);
            if (r > rep.max_residual) {
                rep.max_residual = r;
                rep.worst_l = l;
                rep.worst_p = p;
            }
        }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

inline RadonHurwitzReport radon_hurwitz_check(const GeneratorSet& g, double tol = kExactTol) {
    return radon_hurwitz_check(std::span<const ComplexMatrix>(g.betas()), tol);
}

inline ComplexMatrix synthesize(const GeneratorSet& g, std::span<const double> chi) {
    if (chi.size() != g.size())
        throw DimensionError("synthesize: chi has length " + std::to_string(chi.size()) + ", expected " +
                             std::to_string(g.size()));
    ComplexMatrix s(g.T(), g.N());
    for (std::size_t l = 0; l < chi.size(); ++l)
        if (chi[l] != 0.0) s += chi[l] * g[l];
    return s;
}

struct Analysis {
    RealVector chi;
    ComplexMatrix residual;  ///< S - synthesize(chi)
    double residual_norm = 0.0;
};

/// chi_l = <beta_l, S> / (c N). Exact inverse of synthesize() on the span of a
/// Radon-Hurwitz set (whose generators are orthogonal with squared norm cN);
/// for inputs outside the span the residual carries the orthogonal remainder.
inline Analysis analyze(const GeneratorSet& g, const ComplexMatrix& s) {
    if (s.rows() != g.T() || s.cols() != g.N())
        throw DimensionError("analyze: matrix is " + s.shape_string());
    Analysis a;
    a.chi.resize(g.size());
    const double denom = g.scale() * static_cast<double>(g.N());
    for (std::size_t l = 0; l < g.size(); ++l) a.chi[l] = frobenius_inner_real(g[l], s) / denom;
    a.residual = s - synthesize(g, a.chi);
    a.residual_norm = frobenius_norm(a.residual);
    return a;
}

/// beta_l^{+/-} = (beta_{2l-2} +/- i beta_{2l-1}) / 2, with l = 1..K.
inline std::pair<ComplexMatrix, ComplexMatrix> beta_plus_minus(const GeneratorSet& g, std::size_t l) {
    if (l < 1 || l > g.K())
        throw ArgumentError("beta_plus_minus: index " + std::to_string(l) + " outside 1.." + std::to_string(g.K()));
    const Complex i(0.0, 1.0);
    const ComplexMatrix& even = g[2 * l - 2];
    const ComplexMatrix& odd = g[2 * l - 1];
    return {0.5 * (even + i * odd), 0.5 * (even - i * odd)};
}

/// (S - S')^H (S - S') == c |chi - chi'|^2 I_N within tol.
inline bool pairwise_difference_check(const GeneratorSet& g, std::span<const double> chi_a,
                                      std::span<const double> chi_b, double tol = kExactTol) {
    if (chi_a.size() != chi_b.size()) throw DimensionError("pairwise_difference_check: length mismatch");
    const ComplexMatrix d = synthesize(g, chi_a) - synthesize(g, chi_b);
    const RealVector dchi = subtract(chi_a, chi_b);
    const ComplexMatrix expected = (g.scale() * dot(dchi, dchi)) * ComplexMatrix::identity(g.N());
    return max_abs_diff(hermitian(d) * d, expected) <= tol;
}

/// Generator set of the rotated constellation G*zeta:
///   eta_{2l-2} = zeta (Re zeta beta_{2l-2} - Im zeta beta_{2l-1})
///   eta_{2l-1} = zeta (Re zeta beta_{2l-1} + Im zeta beta_{2l-2})
/// so that sum [Re(z zeta) eta_{2l-2} + Im(z zeta) eta_{2l-1}] = zeta S(z).
inline GeneratorSet rotate_generators(const GeneratorSet& g, Complex zeta) {
    if (std::abs(std::abs(zeta) - 1.0) > kExactTol) throw ArgumentError("rotate_generators: |zeta| != 1");
    const double re = zeta.real();
    const double im = zeta.imag();
    std::vector<ComplexMatrix> eta;
    eta.reserve(g.size());
    for (std::size_t l = 1; l <= g.K(); ++l) {
        const ComplexMatrix& even = g[2 * l - 2];
        const ComplexMatrix& odd = g[2 * l - 1];
        eta.push_back(zeta * (re * even - im * odd));
        eta.push_back(zeta * (re * odd + im * even));
    }
    return GeneratorSet(g.T(), g.N(), g.K(), std::move(eta), g.scale());
}

// Text format:
//   T N K c
//   then 2K matrices, each T lines of N "re,im" tokens.
// Blank lines and lines starting with '#' are ignored.

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

/// Next non-blank, non-comment line; false at end of stream.
inline bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        return true;
    }
    return false;
}

inline Complex parse_complex_token(const std::string& tok, std::size_t lineno) {
    const auto comma = tok.find(',');
    if (comma == std::string::npos) throw ParseError(lineno, "expected re,im but got '" + tok + "'");
    try {
        std::size_t used = 0;
        const std::string re_s = tok.substr(0, comma);
        const std::string im_s = tok.substr(comma + 1);
        const double re = std::stod(re_s, &used);
        if (used != re_s.size()) throw std::invalid_argument(re_s);
        const double im = std::stod(im_s, &used);
        if (used != im_s.size()) throw std::invalid_argument(im_s);
        return {re, im};
    } catch (const std::logic_error&) {
        throw ParseError(lineno, "malformed complex entry '" + tok + "'");
    }
}

}  // namespace detail

inline GeneratorSet read_generator_set(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!detail::next_content_line(in, line, lineno)) throw ParseError(lineno, "empty generator file");
    std::istringstream head(line);
    std::size_t t = 0, n = 0, k = 0;
    double c = 0.0;
    std::string extra;
    if (!(head >> t >> n >> k >> c) || (head >> extra)) throw ParseError(lineno, "header must be 'T N K c'");
    if (t == 0 || n == 0 || k == 0) throw ParseError(lineno, "T, N and K must be positive");

    std::vector<ComplexMatrix> betas;
    for (std::size_t l = 0; l < 2 * k; ++l) {
        ComplexMatrix m(t, n);
        for (std::size_t r = 0; r < t; ++r) {
            if (!detail::next_content_line(in, line, lineno))
                throw ParseError(lineno, "unexpected end of file in generator " + std::to_string(l));
            std::istringstream row(line);
            std::string tok;
            std::size_t col = 0;
            while (row >> tok) {
                if (col == n) throw ParseError(lineno, "too many entries in row");
                m(r, col++) = detail::parse_complex_token(tok, lineno);
            }
            if (col != n) throw ParseError(lineno, "expected " + std::to_string(n) + " entries in row");
        }
        betas.push_back(std::move(m));
    }
    if (detail::next_content_line(in, line, lineno)) throw ParseError(lineno, "trailing content after generators");
    try {
        return GeneratorSet(t, n, k, std::move(betas), c);
    } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
    }
}

inline void write_generator_set(std::ostream& out, const GeneratorSet& g) {
    const auto old_prec = out.precision(std::numeric_limits<double>::max_digits10);
    out << g.T() << ' ' << g.N() << ' ' << g.K() << ' ' << g.scale() << '\n';
    for (std::size_t l = 0; l < g.size(); ++l) {
        out << "# beta_" << l << '\n';
        for (std::size_t r = 0; r < g.T(); ++r) {
            for (std::size_t c = 0; c < g.N(); ++c) {
                if (c) out << ' ';
                out << g[l](r, c).real() << ',' << g[l](r, c).imag();
            }
            out << '\n';
        }
    }
    out.precision(old_prec);
}

}  // namespace stclab
