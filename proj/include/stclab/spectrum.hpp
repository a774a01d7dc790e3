#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "stclab/soqpsk32.hpp"

namespace stclab {

enum class PointSet { Base, Primed, Full };

struct SpectrumLine {
    double distance2 = 0.0;
    std::size_t multiplicity = 0;
};

/// Squared Frobenius distances over all unordered pairs of distinct points,
/// grouped (values rounded to 1e-9) and sorted ascending.
inline std::vector<SpectrumLine> distance_spectrum(const std::vector<ComplexMatrix>& points) {
    std::map<long long, SpectrumLine> groups;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d2 = frobenius_norm_squared(points[i] - points[j]);
            auto& g = groups[std::llround(d2 * 1e9)];
            g.distance2 = std::round(d2 * 1e9) / 1e9;
            ++g.multiplicity;
        }
    std::vector<SpectrumLine> out;
    for (const auto& [key, line] : groups) out.push_back(line);
    return out;
}

inline std::vector<ComplexMatrix> select_points(const std::vector<soqpsk32::CodematrixEntry>& table, PointSet which) {
    std::vector<ComplexMatrix> pts;
    for (const auto& e : table) {
        const bool base = e.subconstellation == Subconstellation::Base;
        if (which == PointSet::Full || (which == PointSet::Base) == base) pts.push_back(e.matrix);
    }
    return pts;
}

inline std::vector<SpectrumLine> distance_spectrum(PointSet which) {
    return distance_spectrum(select_points(soqpsk32::build_constellation(), which));
}

inline void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumLine>& lines) {
    out << "distance2,multiplicity\n";
    char buf[64];
    for (const auto& l : lines) {
        std::snprintf(buf, sizeof buf, "%.12f,%zu\n", l.distance2, l.multiplicity);
        out << buf;
    }
}

}  // namespace stclab
