#pragma once

// Quasi-static flat Rayleigh fading with one receive antenna, r = c h + n, and
// the equivalent real model y = sqrt(c) |h| G chi + n built from the
// generator sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "stclab/expansion.hpp"
#include "stclab/linalg.hpp"

namespace stclab {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for (base_seed, stream, index), e.g. (seed, snr point, frame).
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream, std::uint64_t index) {
    return mix64(mix64(mix64(base_seed) ^ stream) ^ index);
}

/// Seedable random stream with a fixed Gaussian transform: mt19937_64 words
/// mapped to 53-bit uniforms, then Box-Muller (cosine branch first, the sine
/// branch cached for the next call). The distribution objects of <random> are
/// not used because their output is implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    double gaussian() {
        if (cached_) {
            const double v = *cached_;
            cached_.reset();
            return v;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 2.0 * std::numbers::pi * uniform();
        cached_ = r * std::sin(t);
        return r * std::cos(t);
    }

    std::uint64_t next_word() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> cached_;
};

struct ChannelRealization {
    std::vector<Complex> h;  ///< one coefficient per transmit antenna
    double sigma = 0.0;      ///< noise standard deviation per real dimension

    double h_norm() const {
        double s = 0.0;
        for (auto z : h) s += std::norm(z);
        return std::sqrt(s);
    }
};

/// h_n = (a + i b) / sqrt 2 with a, b standard normal.
inline ChannelRealization sample_channel(RandomStream& rng, std::size_t n, double sigma = 0.0) {
    if (n == 0) throw ArgumentError("sample_channel: need at least one transmit antenna");
    if (!(sigma >= 0.0)) throw ArgumentError("sample_channel: sigma must be non-negative");
    ChannelRealization ch;
    ch.sigma = sigma;
    ch.h.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = rng.gaussian();
        const double b = rng.gaussian();
        ch.h.emplace_back(a / std::numbers::sqrt2, b / std::numbers::sqrt2);
    }
    return ch;
}

/// c h, the noiseless observation.
inline std::vector<Complex> apply_channel(const ComplexMatrix& c, std::span<const Complex> h) {
    if (c.cols() != h.size())
        throw DimensionError("apply_channel: codematrix has " + std::to_string(c.cols()) + " columns, channel " +
                             std::to_string(h.size()) + " coefficients");
    std::vector<Complex> r(c.rows(), Complex{});
    for (std::size_t t = 0; t < c.rows(); ++t)
        for (std::size_t n = 0; n < c.cols(); ++n) r[t] += c(t, n) * h[n];
    return r;
}

/// r = c h + n, noise with variance sigma^2 in each real dimension.
inline std::vector<Complex> transmit(const ComplexMatrix& c, const ChannelRealization& ch, RandomStream& rng) {
    auto r = apply_channel(c, ch.h);
    if (ch.sigma > 0.0)
        for (auto& z : r) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            z += Complex(ch.sigma * re, ch.sigma * im);
        }
    return r;
}

struct DeepFadeError : std::domain_error {
    using std::domain_error::domain_error;
};

inline constexpr double kDeepFade = 1e-9;

struct EquivalentRealModel {
    RealMatrix g;        ///< 2T x 2K, columns g_k
    RealMatrix g_prime;  ///< 2T x 2K, columns g'_k
    RealMatrix g_oplus;  ///< 4T x 4K, block diagonal [G 0; 0 G']
    double h_norm = 0.0;
    double scale = 1.0;  ///< Radon-Hurwitz scale c of the generator sets

    /// Noiseless stacked observation sqrt(c) |h| G_oplus chi_oplus.
    RealVector stacked_observation(std::span<const double> chi_oplus) const {
        RealVector y = g_oplus.apply(chi_oplus);
        const double a = std::sqrt(scale) * h_norm;
        for (auto& v : y) v *= a;
        return y;
    }
};

namespace detail {

inline RealMatrix generator_columns(const GeneratorSet& g, std::span<const Complex> h, double norm) {
    RealMatrix out(2 * g.T(), g.size());
    const ComplexMatrix hv = column_vector(h);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const RealVector col = isometry_matrix_to_real(g[k] * hv);
        for (std::size_t r = 0; r < col.size(); ++r) out(r, k) = col[r] / norm;
    }
    return out;
}

inline void require_channel(const ExpandedConstellation& e, const ChannelRealization& ch) {
    if (ch.h.size() != e.base_generators.N()) throw DimensionError("channel does not match antenna count");
    if (ch.h_norm() <= kDeepFade) throw DeepFadeError("deep fade: |h| below 1e-9");
}

}  // namespace detail

/// g_k = I(beta_k h) / (sqrt(c) |h|), likewise g'_k from the primed set.
inline EquivalentRealModel build_equivalent_real_model(const ExpandedConstellation& e, const ChannelRealization& ch) {
    detail::require_channel(e, ch);
    EquivalentRealModel m;
    m.h_norm = ch.h_norm();
    m.scale = e.base_generators.scale();
    const double norm = std::sqrt(m.scale) * m.h_norm;
    m.g = detail::generator_columns(e.base_generators, ch.h, norm);
    m.g_prime = detail::generator_columns(e.primed_generators, ch.h, norm);

    const std::size_t rows = m.g.rows(), cols = m.g.cols();
    m.g_oplus = RealMatrix(2 * rows, 2 * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            m.g_oplus(r, c) = m.g(r, c);
            m.g_oplus(rows + r, cols + c) = m.g_prime(r, c);
        }
    return m;
}

/// max-abs entry of A^T A - I.
inline double orthonormality_error(const RealMatrix& a) {
    const RealMatrix g = a.gram();
    double e = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) e = std::max(e, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return e;
}

struct ShapeInvarianceReport {
    /// Same-subconstellation pairs: | |(Ci - Cj) h| / (sqrt(c) |h| |chi_i - chi_j|) - 1 |.
    double max_distance_error = 0.0;
    /// Stacked model: | |G(x_i - x_j)| - |x_i - x_j| | / |x_i - x_j| over all pairs.
    double max_stacked_distance_error = 0.0;
    /// Stacked model: | angle(G x_i, G x_j) - angle(x_i, x_j) | over all pairs.
    double max_angle_error = 0.0;
    double orthonormality_error = 0.0;  ///< max-abs of G_oplus^T G_oplus - I
    /// Cross-subconstellation physical pairs, measured but not asserted:
    /// | |(Ci - Cj) h| / (sqrt(c) |h| |x_i - x_j|) - 1 |.
    double max_cross_distance_error = 0.0;
    std::size_t same_pairs = 0;
    std::size_t cross_pairs = 0;
};

inline ShapeInvarianceReport shape_invariance_audit(const ExpandedConstellation& e, const ChannelRealization& ch) {
    const EquivalentRealModel model = build_equivalent_real_model(e, ch);
    ShapeInvarianceReport rep;
    rep.orthonormality_error = orthonormality_error(model.g_oplus);
    const double a = std::sqrt(model.scale) * model.h_norm;

    std::vector<std::vector<Complex>> received;
    std::vector<RealVector> images;
    for (const auto& p : e.points) {
        received.push_back(apply_channel(p.matrix, ch.h));
        images.push_back(model.g_oplus.apply(p.chi_oplus));
    }

    for (std::size_t i = 0; i < e.points.size(); ++i)
        for (std::size_t j = i + 1; j < e.points.size(); ++j) {
            const auto& pi = e.points[i];
            const auto& pj = e.points[j];
            const RealVector dx = subtract(pi.chi_oplus, pj.chi_oplus);
            const double ndx = norm2(dx);
            if (ndx == 0.0) continue;

            double dr2 = 0.0;
            for (std::size_t t = 0; t < received[i].size(); ++t) dr2 += std::norm(received[i][t] - received[j][t]);
            const double rel_phys = std::abs(std::sqrt(dr2) / (a * ndx) - 1.0);
            if (pi.subconstellation == pj.subconstellation) {
                rep.max_distance_error = std::max(rep.max_distance_error, rel_phys);
                ++rep.same_pairs;
            } else {
                rep.max_cross_distance_error = std::max(rep.max_cross_distance_error, rel_phys);
                ++rep.cross_pairs;
            }

            const double nimg = norm2(subtract(images[i], images[j]));
            rep.max_stacked_distance_error = std::max(rep.max_stacked_distance_error, std::abs(nimg / ndx - 1.0));
            if (norm2(pi.chi_oplus) > 0.0 && norm2(pj.chi_oplus) > 0.0) {
                const double err = std::abs(angle_between(images[i], images[j]) -
                                            angle_between(pi.chi_oplus, pj.chi_oplus));
                rep.max_angle_error = std::max(rep.max_angle_error, err);
            }
        }
    return rep;
}

}  // namespace stclab
