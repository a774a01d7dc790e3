#pragma once

// Small dense complex/real matrices and the complex <-> real isometries used
// by the space-time constellation code. Sizes here are tiny (2x2, 4x8), so
// everything is a plain value type with row-major storage.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stclab {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;

/// Default tolerance for exactness audits on unit-scale data.
inline constexpr double kExactTol = 1e-12;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    /// Row-major initializer: ComplexMatrix(2, 2, {a, b, c, d}) is [[a, b], [c, d]].
    ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> values)
        : rows_(rows), cols_(cols), data_(values) {
        if (data_.size() != rows * cols)
            throw DimensionError("ComplexMatrix: initializer has " + std::to_string(data_.size()) +
                                 " entries, expected " + std::to_string(rows * cols));
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> values)
        : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (data_.size() != rows * cols)
            throw DimensionError("ComplexMatrix: entry count does not match shape");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<Complex> d) {
        ComplexMatrix m(d.size(), d.size());
        std::size_t k = 0;
        for (auto v : d) { m(k, k) = v; ++k; }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool same_shape(const ComplexMatrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(),
                           [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionError("matrix product: " + a.shape_string() + " * " + b.shape_string());
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

    std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void require_same_shape(const ComplexMatrix& o, const char* what) const {
        if (!same_shape(o))
            throw DimensionError(std::string(what) + ": " + shape_string() + " vs " + o.shape_string());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Real matrix, row-major. Only what the equivalent real channel model needs.
class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    RealVector column(std::size_t c) const {
        RealVector v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    RealVector apply(std::span<const double> x) const {
        if (x.size() != cols_) throw DimensionError("RealMatrix::apply: vector length mismatch");
        RealVector y(rows_, 0.0);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) y[r] += (*this)(r, c) * x[c];
        return y;
    }

    /// A^T A
    RealMatrix gram() const {
        RealMatrix g(cols_, cols_);
        for (std::size_t i = 0; i < cols_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < rows_; ++r) s += (*this)(r, i) * (*this)(r, j);
                g(i, j) = s;
            }
        return g;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline ComplexMatrix hermitian(const ComplexMatrix& m) {
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = std::conj(m(r, c));
    return out;
}

/// Re trace(A^H B): the real inner product on M_{T,N}(C) seen as R^{2TN}.
inline double frobenius_inner_real(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.same_shape(b))
        throw DimensionError("frobenius_inner_real: " + a.shape_string() + " vs " + b.shape_string());
    double s = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) s += ea[k].real() * eb[k].real() + ea[k].imag() * eb[k].imag();
    return s;
}

inline double frobenius_norm_squared(const ComplexMatrix& m) {
    double s = 0.0;
    for (auto z : m.entries()) s += std::norm(z);
    return s;
}

inline double frobenius_norm(const ComplexMatrix& m) { return std::sqrt(frobenius_norm_squared(m)); }

inline double max_abs(const ComplexMatrix& m) {
    double best = 0.0;
    for (auto z : m.entries()) best = std::max(best, std::abs(z));
    return best;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.same_shape(b)) throw DimensionError("max_abs_diff: shape mismatch");
    double best = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) best = std::max(best, std::abs(a.entries()[k] - b.entries()[k]));
    return best;
}

/// Column-major traversal, (re, im) interleaved. Length 2*rows*cols.
inline RealVector isometry_matrix_to_real(const ComplexMatrix& m) {
    RealVector out;
    out.reserve(2 * m.rows() * m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r) {
            out.push_back(m(r, c).real());
            out.push_back(m(r, c).imag());
        }
    return out;
}

/// Inverse of isometry_matrix_to_real for a known shape.
inline ComplexMatrix isometry_real_to_matrix(std::span<const double> v, std::size_t rows, std::size_t cols) {
    if (v.size() != 2 * rows * cols) throw DimensionError("isometry_real_to_matrix: length mismatch");
    ComplexMatrix m(rows, cols);
    std::size_t k = 0;
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r, k += 2) m(r, c) = Complex(v[k], v[k + 1]);
    return m;
}

/// (Re z_1, Im z_1, ..., Re z_K, Im z_K)
inline RealVector isometry_symbols_to_chi(std::span<const Complex> symbols) {
    RealVector chi;
    chi.reserve(2 * symbols.size());
    for (auto z : symbols) {
        chi.push_back(z.real());
        chi.push_back(z.imag());
    }
    return chi;
}

inline ComplexMatrix column_vector(std::span<const Complex> v) {
    ComplexMatrix m(v.size(), 1);
    for (std::size_t k = 0; k < v.size(); ++k) m(k, 0) = v[k];
    return m;
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kExactTol) {
    if (!u.is_square()) throw DimensionError("is_unitary: non-square " + u.shape_string());
    return max_abs_diff(hermitian(u) * u, ComplexMatrix::identity(u.rows())) <= tol;
}

/// Roots of the characteristic polynomial of a 2x2 matrix, ordered by real
/// part then imaginary part, descending.
inline std::pair<Complex, Complex> eigenvalues_2x2(const ComplexMatrix& m) {
    if (m.rows() != 2 || m.cols() != 2) throw DimensionError("eigenvalues_2x2: got " + m.shape_string());
    const Complex tr = m(0, 0) + m(1, 1);
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    // Pick the larger-magnitude root first to avoid cancellation, recover the
    // other from the product.
    Complex q = (std::abs(tr + disc) >= std::abs(tr - disc)) ? (tr + disc) / 2.0 : (tr - disc) / 2.0;
    Complex a = q;
    Complex b = (std::abs(q) > 0.0) ? det / q : tr - q;
    auto before = [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    };
    if (before(b, a)) std::swap(a, b);
    return {a, b};
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline RealVector subtract(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("subtract: length mismatch");
    RealVector d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
    return d;
}

/// Angle between two nonzero vectors, 2*atan2(|u - v|, |u + v|) on the unit
/// vectors; accurate near 0 and pi where acos is not.
inline double angle_between(std::span<const double> a, std::span<const double> b) {
    const double na = norm2(a);
    const double nb = norm2(b);
    if (na == 0.0 || nb == 0.0) throw ArgumentError("angle_between: zero vector");
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double u = a[k] / na;
        const double v = b[k] / nb;
        plus += (u + v) * (u + v);
        minus += (u - v) * (u - v);
    }
    return 2.0 * std::atan2(std::sqrt(minus), std::sqrt(plus));
}

}  // namespace stclab
