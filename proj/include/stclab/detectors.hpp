#pragma once

// Maximum-likelihood detection over the expanded constellation: exhaustive
// block decoding, and Viterbi decoding of the super-orthogonal trellis code
// described by a data-driven TrellisSpec.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stclab/channel.hpp"
#include "stclab/soqpsk32.hpp"

namespace stclab {

using soqpsk32::CodematrixEntry;

struct DecodeResult {
    std::vector<int> decided_indices;
    double metric = 0.0;  ///< sum of |r - C h|^2 along the decided path
    std::size_t ties_broken = 0;
    std::vector<std::uint8_t> bits;  ///< recovered information bits (trellis decoding)
};

/// |r - C h|^2 over the 2T real dimensions.
inline double branch_metric(std::span<const Complex> r, std::span<const Complex> ch_image) {
    double m = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) m += std::norm(r[t] - ch_image[t]);
    return m;
}

/// argmin over candidates of |r - C h|^2; exact ties go to the lowest
/// codematrix index and are counted.
inline DecodeResult ml_block_decode(std::span<const Complex> r, const ChannelRealization& ch,
                                    std::span<const CodematrixEntry> candidates) {
    if (candidates.empty()) throw ArgumentError("ml_block_decode: empty candidate list");
    DecodeResult res;
    int best = -1;
    double best_m = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        const auto image = apply_channel(c.matrix, ch.h);
        if (image.size() != r.size()) throw DimensionError("ml_block_decode: observation length mismatch");
        const double m = branch_metric(r, image);
        if (m < best_m) {
            best_m = m;
            best = c.index;
        } else if (m == best_m) {
            ++res.ties_broken;
            best = std::min(best, c.index);
        }
    }
    res.decided_indices.push_back(best);
    res.metric = best_m;
    return res;
}

struct Transition {
    int from = 0;
    int to = 0;
    int coset = 0;
    unsigned input = 0;       ///< coded input value selecting this transition
    std::vector<int> labels;  ///< parallel codematrix indices, ordered by uncoded bits
    Subconstellation subconstellation = Subconstellation::Base;
};

struct TrellisError : std::runtime_error {
    TrellisError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "trellis line " + std::to_string(line) + ": " + what : "trellis: " + what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class TrellisSpec {
public:
    int num_states() const noexcept { return num_states_; }
    int bits_per_section() const noexcept { return bits_per_section_; }
    int coded_bits() const noexcept { return coded_bits_; }
    int uncoded_bits() const noexcept { return bits_per_section_ - coded_bits_; }
    std::size_t labels_per_transition() const noexcept { return std::size_t{1} << uncoded_bits(); }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }

    /// Outgoing transition of `state` for coded input value `input`.
    const Transition& outgoing(int state, unsigned input) const {
        return transitions_[outgoing_.at(static_cast<std::size_t>(state)).at(input)];
    }
    std::size_t outgoing_count() const noexcept { return std::size_t{1} << coded_bits_; }

private:
    friend TrellisSpec load_trellis(std::string_view, const std::vector<CodematrixEntry>&);

    int num_states_ = 0;
    int bits_per_section_ = 0;
    int coded_bits_ = 0;
    std::vector<Transition> transitions_;
    std::vector<std::vector<std::size_t>> outgoing_;
};

/// Parses and validates a trellis description:
///   states=<n> bits_per_section=<k>
///   from to coset idx0 idx1 ...        (one line per transition)
/// A state's transitions take coded input values 0, 1, ... in order of
/// appearance. Labels are ordered by uncoded bits; with 4 labels the coset ids
/// and bits are checked against the 8-state columns of the table, with 2
/// labels against the 16-state columns.
inline TrellisSpec load_trellis(std::string_view text, const std::vector<CodematrixEntry>& table) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    if (!detail::next_content_line(in, line, lineno)) throw TrellisError(0, "empty trellis description");

    TrellisSpec spec;
    {
        std::istringstream head(line);
        std::string a, b, extra;
        if (!(head >> a >> b) || (head >> extra) || a.rfind("states=", 0) != 0 ||
            b.rfind("bits_per_section=", 0) != 0)
            throw TrellisError(lineno, "header must be 'states=<n> bits_per_section=<k>'");
        try {
            spec.num_states_ = std::stoi(a.substr(7));
            spec.bits_per_section_ = std::stoi(b.substr(17));
        } catch (const std::logic_error&) {
            throw TrellisError(lineno, "non-numeric header value");
        }
        if (spec.num_states_ <= 0 || spec.bits_per_section_ <= 0 || spec.bits_per_section_ > 16)
            throw TrellisError(lineno, "state count and bits_per_section must be positive");
    }

    std::vector<std::size_t> line_of;
    while (detail::next_content_line(in, line, lineno)) {
        std::istringstream row(line);
        Transition t;
        if (!(row >> t.from >> t.to >> t.coset)) throw TrellisError(lineno, "expected 'from to coset labels...'");
        int v = 0;
        while (row >> v) t.labels.push_back(v);
        if (!row.eof()) throw TrellisError(lineno, "non-numeric label");
        if (t.from < 0 || t.from >= spec.num_states_ || t.to < 0 || t.to >= spec.num_states_)
            throw TrellisError(lineno, "state index out of range");
        if (t.labels.empty()) throw TrellisError(lineno, "transition without labels");
        for (int l : t.labels)
            if (l < 0 || static_cast<std::size_t>(l) >= table.size())
                throw TrellisError(lineno, "label " + std::to_string(l) + " is not a codematrix index");
        spec.transitions_.push_back(std::move(t));
        line_of.push_back(lineno);
    }
    if (spec.transitions_.empty()) throw TrellisError(lineno, "no transitions");

    const std::size_t n_labels = spec.transitions_.front().labels.size();
    if (!std::has_single_bit(n_labels)) throw TrellisError(line_of.front(), "label count must be a power of two");
    for (std::size_t k = 0; k < spec.transitions_.size(); ++k)
        if (spec.transitions_[k].labels.size() != n_labels)
            throw TrellisError(line_of[k], "all transitions need the same number of parallel labels");
    if (n_labels != 4 && n_labels != 2)
        throw TrellisError(line_of.front(), "coset tables exist for 4 (8-state) or 2 (16-state) parallel labels");

    spec.outgoing_.assign(static_cast<std::size_t>(spec.num_states_), {});
    for (std::size_t k = 0; k < spec.transitions_.size(); ++k) {
        auto& t = spec.transitions_[k];
        auto& out = spec.outgoing_[static_cast<std::size_t>(t.from)];
        t.input = static_cast<unsigned>(out.size());
        out.push_back(k);
    }
    const std::size_t n_out = spec.outgoing_.front().size();
    if (!std::has_single_bit(n_out)) throw TrellisError(0, "outgoing transition count must be a power of two");
    for (int s = 0; s < spec.num_states_; ++s)
        if (spec.outgoing_[static_cast<std::size_t>(s)].size() != n_out)
            throw TrellisError(0, "state " + std::to_string(s) + " has " +
                                      std::to_string(spec.outgoing_[static_cast<std::size_t>(s)].size()) +
                                      " outgoing transitions, expected " + std::to_string(n_out));
    spec.coded_bits_ = std::countr_zero(n_out);
    if (spec.coded_bits_ + std::countr_zero(n_labels) != spec.bits_per_section_)
        throw TrellisError(0, "bits_per_section does not match log2(transitions) + log2(labels)");

    std::vector<int> uses(table.size(), 0);
    std::vector<int> incoming_sub(static_cast<std::size_t>(spec.num_states_), -1);
    std::vector<int> outgoing_sub(static_cast<std::size_t>(spec.num_states_), -1);
    for (std::size_t k = 0; k < spec.transitions_.size(); ++k) {
        auto& t = spec.transitions_[k];
        const std::size_t ln = line_of[k];
        const Subconstellation sub = table[static_cast<std::size_t>(t.labels.front())].subconstellation;
        for (std::size_t j = 0; j < t.labels.size(); ++j) {
            const auto& e = table[static_cast<std::size_t>(t.labels[j])];
            ++uses[static_cast<std::size_t>(e.index)];
            if (e.subconstellation != sub) throw TrellisError(ln, "branch mixes BASE and PRIMED labels");
            const soqpsk32::CosetLabel& cl = n_labels == 4 ? e.q8 : e.q16;
            if (cl.coset != t.coset)
                throw TrellisError(ln, "label " + std::to_string(e.index) + " belongs to coset " +
                                           std::to_string(cl.coset) + ", not " + std::to_string(t.coset));
            if (cl.bits != j)
                throw TrellisError(ln, "label " + std::to_string(e.index) + " is out of uncoded-bit order");
        }
        t.subconstellation = sub;
        const int code = sub == Subconstellation::Base ? 0 : 1;
        for (auto [state, slot] : {std::pair{t.from, &outgoing_sub}, std::pair{t.to, &incoming_sub}}) {
            int& seen = (*slot)[static_cast<std::size_t>(state)];
            if (seen >= 0 && seen != code)
                throw TrellisError(ln, "state " + std::to_string(state) +
                                           " mixes subconstellations on its departing or converging branches");
            seen = code;
        }
    }
    for (std::size_t i = 0; i < uses.size(); ++i)
        if (uses[i] == 0) throw TrellisError(0, "codematrix " + std::to_string(i) + " labels no branch");
    return spec;
}

/// The shipped 8-state code (same content as data/trellis8.txt).
inline constexpr std::string_view kTrellis8 = R"(states=8 bits_per_section=4
0 0 0  0  8  2 10
0 3 1  1  9  3 11
0 1 3  4 12  6 14
0 2 2  5 13  7 15
1 5 5 16 24 18 26
1 6 4 17 25 19 27
1 4 6 20 28 22 30
1 7 7 21 29 23 31
2 1 0  0  8  2 10
2 2 1  1  9  3 11
2 0 3  4 12  6 14
2 3 2  5 13  7 15
3 4 5 16 24 18 26
3 7 4 17 25 19 27
3 5 6 20 28 22 30
3 6 7 21 29 23 31
4 2 0  0  8  2 10
4 1 1  1  9  3 11
4 3 3  4 12  6 14
4 0 2  5 13  7 15
5 7 5 16 24 18 26
5 4 4 17 25 19 27
5 6 6 20 28 22 30
5 5 7 21 29 23 31
6 3 0  0  8  2 10
6 0 1  1  9  3 11
6 2 3  4 12  6 14
6 1 2  5 13  7 15
7 6 5 16 24 18 26
7 5 4 17 25 19 27
7 7 6 20 28 22 30
7 4 7 21 29 23 31
)";

inline TrellisSpec default_trellis() { return load_trellis(kTrellis8, soqpsk32::build_constellation()); }

namespace detail {

inline unsigned take_bits(std::span<const std::uint8_t> bits, std::size_t pos, int count) {
    unsigned v = 0;
    for (int k = 0; k < count; ++k) v = (v << 1) | (bits[pos + static_cast<std::size_t>(k)] & 1u);
    return v;
}

inline void put_bits(std::vector<std::uint8_t>& out, unsigned v, int count) {
    for (int k = count - 1; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((v >> k) & 1u));
}

}  // namespace detail

/// Per section: the first coded_bits() bits (MSB first) pick the transition,
/// the remaining uncoded bits pick the parallel label.
inline std::vector<int> trellis_encode(const TrellisSpec& spec, std::span<const std::uint8_t> bits,
                                       int initial_state = 0) {
    const auto k = static_cast<std::size_t>(spec.bits_per_section());
    if (bits.size() % k != 0)
        throw ArgumentError("trellis_encode: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                            std::to_string(k));
    if (initial_state < 0 || initial_state >= spec.num_states()) throw ArgumentError("trellis_encode: bad state");
    std::vector<int> out;
    out.reserve(bits.size() / k);
    int state = initial_state;
    for (std::size_t pos = 0; pos < bits.size(); pos += k) {
        const unsigned input = detail::take_bits(bits, pos, spec.coded_bits());
        const unsigned uncoded = detail::take_bits(bits, pos + static_cast<std::size_t>(spec.coded_bits()),
                                                   spec.uncoded_bits());
        const Transition& t = spec.outgoing(state, input);
        out.push_back(t.labels[uncoded]);
        state = t.to;
    }
    return out;
}

/// Viterbi decoding from a known start state with a free end state. Parallel
/// labels are resolved per branch before add-compare-select. Ties go to the
/// smaller predecessor state, then the smaller label position; the final state
/// tie goes to the smaller state index.
inline DecodeResult viterbi_decode(const TrellisSpec& spec, const std::vector<std::vector<Complex>>& received,
                                   const std::vector<ChannelRealization>& channels,
                                   const std::vector<CodematrixEntry>& table, int initial_state = 0) {
    if (received.size() != channels.size())
        throw DimensionError("viterbi_decode: " + std::to_string(received.size()) + " blocks but " +
                             std::to_string(channels.size()) + " channel realizations");
    if (initial_state < 0 || initial_state >= spec.num_states()) throw ArgumentError("viterbi_decode: bad state");
    const auto n_states = static_cast<std::size_t>(spec.num_states());
    const std::size_t n_sections = received.size();
    constexpr double inf = std::numeric_limits<double>::infinity();

    struct Survivor {
        std::size_t transition;
        unsigned label_pos;
    };
    std::vector<double> metric(n_states, inf), next(n_states);
    metric[static_cast<std::size_t>(initial_state)] = 0.0;
    std::vector<std::vector<Survivor>> history(n_sections, std::vector<Survivor>(n_states));
    DecodeResult res;

    // Transitions are visited by increasing from-state, so strict '<' keeps
    // the smaller predecessor on ties.
    const auto& trans = spec.transitions();
    std::vector<std::size_t> order(trans.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return trans[a].from < trans[b].from; });

    std::vector<double> label_metric(table.size());
    std::vector<std::vector<Complex>> images(table.size());
    const ChannelRealization* cached = nullptr;
    for (std::size_t s = 0; s < n_sections; ++s) {
        // Branch metrics for all labels; images are reused while the channel is unchanged.
        if (cached == nullptr || cached->h != channels[s].h) {
            for (const auto& e : table) images[static_cast<std::size_t>(e.index)] = apply_channel(e.matrix, channels[s].h);
            cached = &channels[s];
        }
        for (std::size_t i = 0; i < table.size(); ++i) label_metric[i] = branch_metric(received[s], images[i]);

        std::fill(next.begin(), next.end(), inf);
        for (std::size_t k : order) {
            const Transition& t = trans[k];
            const double pm = metric[static_cast<std::size_t>(t.from)];
            if (pm == inf) continue;
            unsigned best_pos = 0;
            double best = label_metric[static_cast<std::size_t>(t.labels[0])];
            for (unsigned j = 1; j < t.labels.size(); ++j) {
                const double m = label_metric[static_cast<std::size_t>(t.labels[j])];
                if (m < best) {
                    best = m;
                    best_pos = j;
                } else if (m == best) {
                    ++res.ties_broken;
                }
            }
            const double cand = pm + best;
            auto& slot = next[static_cast<std::size_t>(t.to)];
            if (cand < slot) {
                slot = cand;
                history[s][static_cast<std::size_t>(t.to)] = {k, best_pos};
            } else if (cand == slot) {
                ++res.ties_broken;
            }
        }
        metric.swap(next);
    }

    std::size_t state = 0;
    for (std::size_t k = 1; k < n_states; ++k) {
        if (metric[k] < metric[state]) state = k;
        else if (metric[k] == metric[state] && metric[k] != inf) ++res.ties_broken;
    }
    res.metric = n_sections == 0 ? 0.0 : metric[state];

    res.decided_indices.assign(n_sections, 0);
    std::vector<std::pair<unsigned, unsigned>> inputs(n_sections);
    for (std::size_t s = n_sections; s-- > 0;) {
        const Survivor sv = history[s][state];
        const Transition& t = spec.transitions()[sv.transition];
        res.decided_indices[s] = t.labels[sv.label_pos];
        inputs[s] = {t.input, sv.label_pos};
        state = static_cast<std::size_t>(t.from);
    }
    res.bits.reserve(n_sections * static_cast<std::size_t>(spec.bits_per_section()));
    for (auto [input, pos] : inputs) {
        detail::put_bits(res.bits, input, spec.coded_bits());
        detail::put_bits(res.bits, pos, spec.uncoded_bits());
    }
    return res;
}

}  // namespace stclab
