#pragma once

// The 32-codematrix super-orthogonal constellation over 4PSK with two
// transmit antennas: the index table, coset labels for the 8- and 16-state
// codes, and the closed-form checks on it.

#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stclab/expansion.hpp"
#include "stclab/linalg.hpp"
#include "stclab/orthogonal_design.hpp"

namespace stclab::soqpsk32 {

using IndexMatrix = std::array<std::array<int, 2>, 2>;

/// s_k, k = 0..3: (1+i), (-1+i), (-1-i), (1-i), all over sqrt 2.
inline Complex qpsk_point(int k) {
    constexpr double a = 1.0 / std::numbers::sqrt2;
    switch (k) {
        case 0: return {a, a};
        case 1: return {-a, a};
        case 2: return {-a, -a};
        case 3: return {a, -a};
        default: throw ArgumentError("qpsk_point: index " + std::to_string(k) + " outside 0..3");
    }
}

inline int nearest_qpsk_index(Complex z) {
    int best = 0;
    double best_d = std::norm(z - qpsk_point(0));
    for (int k = 1; k < 4; ++k) {
        const double d = std::norm(z - qpsk_point(k));
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

struct CosetLabel {
    int coset = 0;
    unsigned bits = 0;  ///< uncoded bits selecting the member of the coset
};

struct CodematrixEntry {
    int index = 0;
    IndexMatrix indices{};
    ComplexMatrix matrix;
    CosetLabel q8;   ///< 8-state code: 8 cosets of 4, two uncoded bits
    CosetLabel q16;  ///< 16-state code: 16 cosets of 2, one uncoded bit
    Subconstellation subconstellation = Subconstellation::Base;
};

inline ComplexMatrix matrix_from_indices(const IndexMatrix& idx) {
    ComplexMatrix m(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) m(r, c) = qpsk_point(idx[r][c]);
    return m;
}

inline IndexMatrix indices_from_matrix(const ComplexMatrix& m) {
    if (m.rows() != 2 || m.cols() != 2) throw DimensionError("indices_from_matrix: expected 2x2");
    IndexMatrix idx{};
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) idx[r][c] = nearest_qpsk_index(m(r, c));
    return idx;
}

namespace detail {

struct Row {
    int i;
    int idx[4];
    int q8_coset;
    unsigned q8_bits;
    int q16_coset;
    unsigned q16_bit;
};

// Index table in the order of the coset table; entries 0..15 form G, 16..31 form G diag(1,-1).
inline constexpr Row kTable[32] = {
    {0, {1, 3, 0, 0}, 0, 0b00, 0, 0},   {1, {1, 2, 1, 0}, 1, 0b00, 1, 0},   {2, {1, 1, 2, 0}, 0, 0b10, 2, 0},
    {3, {1, 0, 3, 0}, 1, 0b10, 3, 0},   {4, {0, 3, 0, 1}, 3, 0b00, 5, 0},   {5, {0, 2, 1, 1}, 2, 0b00, 4, 0},
    {6, {0, 1, 2, 1}, 3, 0b10, 7, 0},   {7, {0, 0, 3, 1}, 2, 0b10, 6, 0},   {8, {3, 3, 0, 2}, 0, 0b01, 2, 1},
    {9, {3, 2, 1, 2}, 1, 0b01, 3, 1},   {10, {3, 1, 2, 2}, 0, 0b11, 0, 1},  {11, {3, 0, 3, 2}, 1, 0b11, 1, 1},
    {12, {2, 3, 0, 3}, 3, 0b01, 7, 1},  {13, {2, 2, 1, 3}, 2, 0b01, 6, 1},  {14, {2, 1, 2, 3}, 3, 0b11, 5, 1},
    {15, {2, 0, 3, 3}, 2, 0b11, 4, 1},  {16, {3, 1, 0, 0}, 5, 0b00, 8, 0},  {17, {3, 0, 1, 0}, 4, 0b00, 9, 0},
    {18, {3, 3, 2, 0}, 5, 0b10, 10, 0}, {19, {3, 2, 3, 0}, 4, 0b10, 11, 0}, {20, {2, 1, 0, 1}, 6, 0b00, 13, 0},
    {21, {2, 0, 1, 1}, 7, 0b00, 12, 0}, {22, {2, 3, 2, 1}, 6, 0b10, 15, 0}, {23, {2, 2, 3, 1}, 7, 0b10, 14, 0},
    {24, {1, 1, 0, 2}, 5, 0b01, 10, 1}, {25, {1, 0, 1, 2}, 4, 0b01, 11, 1}, {26, {1, 3, 2, 2}, 5, 0b11, 8, 1},
    {27, {1, 2, 3, 2}, 4, 0b11, 9, 1},  {28, {0, 1, 0, 3}, 6, 0b01, 15, 1}, {29, {0, 0, 1, 3}, 7, 0b01, 14, 1},
    {30, {0, 3, 2, 3}, 6, 0b11, 13, 1}, {31, {0, 2, 3, 3}, 7, 0b11, 12, 1},
};

inline CodematrixEntry make_entry(int i, const IndexMatrix& idx, CosetLabel q8, CosetLabel q16) {
    return {i, idx, matrix_from_indices(idx), q8, q16, i <= 15 ? Subconstellation::Base : Subconstellation::Primed};
}

}  // namespace detail

inline constexpr std::size_t kSize = 32;

inline std::vector<CodematrixEntry> build_constellation() {
    std::vector<CodematrixEntry> out;
    out.reserve(kSize);
    for (const auto& r : detail::kTable) {
        const IndexMatrix idx{{{r.idx[0], r.idx[1]}, {r.idx[2], r.idx[3]}}};
        out.push_back(detail::make_entry(r.i, idx, {r.q8_coset, r.q8_bits}, {r.q16_coset, r.q16_bit}));
    }
    return out;
}

/// The expanding unitary diag(1, -1).
inline ComplexMatrix expansion_unitary() { return ComplexMatrix::diagonal({1.0, -1.0}); }

/// G u G diag(1,-1) regenerated from the Alamouti generators and all 16 sign vectors.
inline ExpandedConstellation expanded_constellation() {
    return expand(alamouti_generators(), sign_vectors(4), expansion_unitary(), 1.0);
}

struct FormViolation {
    int index;
    std::string reason;
};

struct FormsReport {
    std::vector<FormViolation> violations;
    bool pass() const noexcept { return violations.empty(); }
};

/// Base entries must read [A B*; B -A*], primed entries [A -B*; B A*].
inline FormsReport verify_forms(const std::vector<CodematrixEntry>& entries, double tol = kExactTol) {
    FormsReport rep;
    for (const auto& e : entries) {
        const auto& m = e.matrix;
        const Complex a = m(0, 0), b = m(1, 0);
        const bool base = e.subconstellation == Subconstellation::Base;
        const Complex want01 = base ? std::conj(b) : -std::conj(b);
        const Complex want11 = base ? -std::conj(a) : std::conj(a);
        if (std::abs(m(0, 1) - want01) > tol || std::abs(m(1, 1) - want11) > tol)
            rep.violations.push_back({e.index, base ? "not of form [A B*; B -A*]" : "not of form [A -B*; B A*]"});
    }
    return rep;
}

/// Direct-sum coordinates (chi || chi') of an entry; the half belonging to the
/// other subconstellation is zero.
inline RealVector chi_coordinates(const CodematrixEntry& e) {
    const GeneratorSet g = e.subconstellation == Subconstellation::Base ? alamouti_generators()
                                                                         : alamouti_primed_generators();
    const Analysis a = analyze(g, e.matrix);
    RealVector out(8, 0.0);
    const std::size_t off = e.subconstellation == Subconstellation::Base ? 0 : 4;
    for (std::size_t k = 0; k < 4; ++k) out[off + k] = a.chi[k];
    return out;
}

// Data file: one line per entry
//   i, idx00 idx01 idx10 idx11, q8_coset, q8_bits, q16_coset, q16_bit
// with bits written as binary digits ("01"). '#' starts a comment line.

inline std::vector<CodematrixEntry> read_constellation(std::istream& in) {
    std::vector<CodematrixEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (stclab::detail::next_content_line(in, line, lineno)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 6) throw ParseError(lineno, "expected 6 comma-separated fields");
        auto to_int = [&](const std::string& s) {
            std::istringstream is(s);
            int v = 0;
            std::string extra;
            if (!(is >> v) || (is >> extra)) throw ParseError(lineno, "bad integer '" + s + "'");
            return v;
        };
        auto to_bits = [&](const std::string& s, std::size_t width) {
            std::istringstream is(s);
            std::string digits, extra;
            if (!(is >> digits) || (is >> extra) || digits.size() != width ||
                digits.find_first_not_of("01") != std::string::npos)
                throw ParseError(lineno, "bad bit field '" + s + "'");
            return static_cast<unsigned>(std::stoul(digits, nullptr, 2));
        };
        const int i = to_int(fields[0]);
        std::istringstream is(fields[1]);
        IndexMatrix idx{};
        for (auto& row : idx)
            for (auto& v : row)
                if (!(is >> v) || v < 0 || v > 3) throw ParseError(lineno, "4PSK indices must be 0..3");
        std::string extra;
        if (is >> extra) throw ParseError(lineno, "too many 4PSK indices");
        if (i != static_cast<int>(out.size())) throw ParseError(lineno, "entries must be listed in index order");
        out.push_back(detail::make_entry(i, idx, {to_int(fields[2]), to_bits(fields[3], 2)},
                                         {to_int(fields[4]), to_bits(fields[5], 1)}));
    }
    if (out.size() != kSize) throw ParseError(lineno, "expected 32 entries, got " + std::to_string(out.size()));
    return out;
}

inline void write_constellation(std::ostream& out, const std::vector<CodematrixEntry>& entries) {
    out << "# i, idx00 idx01 idx10 idx11, q8_coset, q8_bits, q16_coset, q16_bit\n";
    for (const auto& e : entries) {
        out << e.index << ", " << e.indices[0][0] << ' ' << e.indices[0][1] << ' ' << e.indices[1][0] << ' '
            << e.indices[1][1] << ", " << e.q8.coset << ", " << ((e.q8.bits >> 1) & 1u) << (e.q8.bits & 1u) << ", "
            << e.q16.coset << ", " << (e.q16.bits & 1u) << '\n';
    }
}

}  // namespace stclab::soqpsk32
