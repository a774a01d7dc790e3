#pragma once

// Monte Carlo link simulation over quasi-static Rayleigh fading with one
// receive antenna. Every frame draws from its own stream derived from
// (base_seed, snr point, frame), so results do not depend on thread count.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stclab/channel.hpp"
#include "stclab/detectors.hpp"
#include "stclab/soqpsk32.hpp"

namespace stclab {

enum class SimMode { UncodedBlock, Trellis };
enum class ChannelRedraw { PerFrame, PerBlock };

struct SimConfig {
    SimMode mode = SimMode::UncodedBlock;
    std::vector<double> snr_list_db{10.0};
    std::size_t frames_per_point = 1000;
    std::uint64_t base_seed = 1;
    std::size_t max_frame_errors = 200;  ///< 0 disables early stopping
    std::optional<std::string> trellis_path;
    ChannelRedraw channel_redraw = ChannelRedraw::PerFrame;
    std::size_t blocks_per_frame = 64;  ///< codematrices (trellis sections) per frame
    unsigned threads = 1;
    bool timing = true;  ///< false writes elapsed_seconds as 0 for byte-stable output

    void validate() const {
        if (frames_per_point == 0) throw ArgumentError("frames_per_point must be positive");
        if (snr_list_db.empty()) throw ArgumentError("snr list must be nonempty");
        for (double s : snr_list_db)
            if (!std::isfinite(s)) throw ArgumentError("snr values must be finite");
        if (blocks_per_frame == 0) throw ArgumentError("blocks_per_frame must be positive");
    }
};

struct SimResultRow {
    double snr_db = 0.0;
    std::size_t frames = 0;
    std::size_t bits = 0;
    std::size_t bit_errors = 0;
    std::size_t frame_errors = 0;
    double elapsed_seconds = 0.0;

    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
    double fer() const { return frames == 0 ? 0.0 : static_cast<double>(frame_errors) / static_cast<double>(frames); }
};

inline SimMode parse_sim_mode(const std::string& s) {
    if (s == "UNCODED_BLOCK" || s == "uncoded") return SimMode::UncodedBlock;
    if (s == "TRELLIS" || s == "trellis") return SimMode::Trellis;
    throw ArgumentError("unknown mode '" + s + "'");
}

inline const char* to_string(SimMode m) { return m == SimMode::UncodedBlock ? "UNCODED_BLOCK" : "TRELLIS"; }

inline ChannelRedraw parse_channel_redraw(const std::string& s) {
    if (s == "PER_FRAME") return ChannelRedraw::PerFrame;
    if (s == "PER_BLOCK") return ChannelRedraw::PerBlock;
    throw ArgumentError("unknown channel_redraw '" + s + "'");
}

inline const char* to_string(ChannelRedraw r) { return r == ChannelRedraw::PerFrame ? "PER_FRAME" : "PER_BLOCK"; }

/// Comma- or space-separated list of SNR values in dB.
inline std::vector<double> parse_snr_list(const std::string& s) {
    std::vector<double> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) {
        std::istringstream parts(tok);
        std::string p;
        while (parts >> p) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(p, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != p.size() || !std::isfinite(v)) throw ArgumentError("invalid SNR value '" + p + "'");
            out.push_back(v);
        }
    }
    if (out.empty()) throw ArgumentError("snr list must be nonempty");
    return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_unsigned(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    unsigned long long x = 0;
    try {
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        x = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ArgumentError(key + ": expected a non-negative integer, got '" + v + "'");
    return static_cast<T>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ArgumentError(key + ": expected true or false, got '" + v + "'");
}

}  // namespace detail

/// Flat `key=value` lines; '#' starts a comment.
inline SimConfig read_sim_config(std::istream& in, SimConfig cfg = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ArgumentError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key == "mode") cfg.mode = parse_sim_mode(val);
        else if (key == "snr_list_db") cfg.snr_list_db = parse_snr_list(val);
        else if (key == "frames_per_point") cfg.frames_per_point = detail::parse_unsigned<std::size_t>(key, val);
        else if (key == "base_seed") cfg.base_seed = detail::parse_unsigned<std::uint64_t>(key, val);
        else if (key == "max_frame_errors") cfg.max_frame_errors = detail::parse_unsigned<std::size_t>(key, val);
        else if (key == "trellis_path") cfg.trellis_path = val;
        else if (key == "channel_redraw") cfg.channel_redraw = parse_channel_redraw(val);
        else if (key == "blocks_per_frame") cfg.blocks_per_frame = detail::parse_unsigned<std::size_t>(key, val);
        else if (key == "threads") cfg.threads = detail::parse_unsigned<unsigned>(key, val);
        else if (key == "timing") cfg.timing = detail::parse_bool(key, val);
        else throw ArgumentError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return cfg;
}

/// Gray-coded 4PSK: 00 -> s0, 01 -> s1, 11 -> s2, 10 -> s3.
inline int gray_to_qpsk(unsigned two_bits) {
    static constexpr int map[4] = {0, 1, 3, 2};
    return map[two_bits & 3u];
}

inline unsigned qpsk_to_gray(int k) {
    static constexpr unsigned map[4] = {0b00, 0b01, 0b11, 0b10};
    return map[k & 3];
}

/// Maps 4 bits to one of the 16 base codematrices: the first two bits pick
/// the (0,0) entry, the last two the (1,0) entry, both Gray-coded.
class UncodedMapper {
public:
    explicit UncodedMapper(const std::vector<CodematrixEntry>& table) {
        by_bits_.fill(-1);
        for (const auto& e : table) {
            if (e.subconstellation != Subconstellation::Base) continue;
            base_.push_back(e);
            const unsigned v = (qpsk_to_gray(e.indices[0][0]) << 2) | qpsk_to_gray(e.indices[1][0]);
            if (by_bits_[v] != -1) throw ArgumentError("uncoded mapping: first column does not identify the codematrix");
            by_bits_[v] = e.index;
        }
        if (base_.size() != 16) throw ArgumentError("uncoded mapping: expected 16 base codematrices");
        for (unsigned v = 0; v < 16; ++v) bits_of_[static_cast<std::size_t>(by_bits_[v])] = v;
    }

    int index_for(unsigned four_bits) const { return by_bits_[four_bits & 15u]; }
    unsigned bits_for(int index) const { return bits_of_.at(static_cast<std::size_t>(index)); }
    const std::vector<CodematrixEntry>& candidates() const noexcept { return base_; }

private:
    std::array<int, 16> by_bits_{};
    std::array<unsigned, soqpsk32::kSize> bits_of_{};
    std::vector<CodematrixEntry> base_;
};

/// Mean ||C||_F^2 / T over the table: energy per channel use summed over antennas.
inline double mean_symbol_energy(const std::vector<CodematrixEntry>& table) {
    double s = 0.0;
    for (const auto& e : table) s += frobenius_norm_squared(e.matrix) / static_cast<double>(e.matrix.rows());
    return s / static_cast<double>(table.size());
}

/// sigma^2 = Es / (2 * 10^(snr/10)), per real noise dimension.
inline double noise_sigma(double snr_db, double es) { return std::sqrt(es / (2.0 * std::pow(10.0, snr_db / 10.0))); }

struct FrameOutcome {
    std::size_t bits = 0;
    std::size_t bit_errors = 0;
};

class LinkSimulator {
public:
    LinkSimulator(SimConfig cfg, TrellisSpec spec)
        : cfg_(std::move(cfg)), table_(soqpsk32::build_constellation()), mapper_(table_), spec_(std::move(spec)),
          es_(mean_symbol_energy(table_)) {
        cfg_.validate();
    }

    const SimConfig& config() const noexcept { return cfg_; }
    double symbol_energy() const noexcept { return es_; }

    std::size_t bits_per_frame() const { return 4 * cfg_.blocks_per_frame; }

    /// One frame at SNR point `snr_index`: bits, then channel(s), then noise, in that order.
    FrameOutcome run_frame(std::size_t snr_index, std::size_t frame) const {
        RandomStream rng(derive_seed(cfg_.base_seed, snr_index, frame));
        const double sigma = noise_sigma(cfg_.snr_list_db[snr_index], es_);
        const std::size_t nb = cfg_.blocks_per_frame;

        std::vector<std::uint8_t> bits(4 * nb);
        for (std::size_t k = 0; k < bits.size(); k += 64) {
            const std::uint64_t w = rng.next_word();
            for (std::size_t j = 0; j < 64 && k + j < bits.size(); ++j)
                bits[k + j] = static_cast<std::uint8_t>((w >> (63 - j)) & 1u);
        }

        std::vector<int> labels;
        if (cfg_.mode == SimMode::Trellis) {
            labels = trellis_encode(spec_, bits, 0);
        } else {
            labels.reserve(nb);
            for (std::size_t b = 0; b < nb; ++b) labels.push_back(mapper_.index_for(detail::take_bits(bits, 4 * b, 4)));
        }

        std::vector<ChannelRealization> channels;
        channels.reserve(nb);
        if (cfg_.channel_redraw == ChannelRedraw::PerFrame) {
            const ChannelRealization ch = sample_channel(rng, 2, sigma);
            channels.assign(nb, ch);
        } else {
            for (std::size_t b = 0; b < nb; ++b) channels.push_back(sample_channel(rng, 2, sigma));
        }

        std::vector<std::vector<Complex>> received;
        received.reserve(nb);
        for (std::size_t b = 0; b < nb; ++b)
            received.push_back(transmit(table_[static_cast<std::size_t>(labels[b])].matrix, channels[b], rng));

        std::vector<std::uint8_t> decided;
        if (cfg_.mode == SimMode::Trellis) {
            decided = viterbi_decode(spec_, received, channels, table_, 0).bits;
        } else {
            decided.reserve(bits.size());
            for (std::size_t b = 0; b < nb; ++b) {
                const auto d = ml_block_decode(received[b], channels[b], mapper_.candidates());
                detail::put_bits(decided, mapper_.bits_for(d.decided_indices.front()), 4);
            }
        }

        FrameOutcome out;
        out.bits = bits.size();
        for (std::size_t k = 0; k < bits.size(); ++k) out.bit_errors += bits[k] != decided[k];
        return out;
    }

    /// Runs frames in fixed-size batches, each batch split across threads and
    /// folded in frame order, so the early stop lands on the same frame for any
    /// thread count.
    SimResultRow run_point(std::size_t snr_index) const {
        const auto start = std::chrono::steady_clock::now();
        SimResultRow row;
        row.snr_db = cfg_.snr_list_db.at(snr_index);
        const unsigned nthreads = std::max(1u, cfg_.threads);
        constexpr std::size_t kBatch = 256;
        std::vector<FrameOutcome> batch;
        bool done = false;
        for (std::size_t first = 0; first < cfg_.frames_per_point && !done; first += kBatch) {
            const std::size_t n = std::min(kBatch, cfg_.frames_per_point - first);
            batch.assign(n, {});
            if (nthreads == 1) {
                for (std::size_t k = 0; k < n; ++k) batch[k] = run_frame(snr_index, first + k);
            } else {
                std::vector<std::jthread> workers;
                for (unsigned w = 0; w < nthreads; ++w)
                    workers.emplace_back([&, w] {
                        for (std::size_t k = w; k < n; k += nthreads) batch[k] = run_frame(snr_index, first + k);
                    });
            }
            for (const auto& f : batch) {
                ++row.frames;
                row.bits += f.bits;
                row.bit_errors += f.bit_errors;
                if (f.bit_errors > 0) ++row.frame_errors;
                if (cfg_.max_frame_errors > 0 && row.frame_errors >= cfg_.max_frame_errors) {
                    done = true;
                    break;
                }
            }
        }
        if (cfg_.timing)
            row.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return row;
    }

    std::vector<SimResultRow> run() const {
        std::vector<SimResultRow> rows;
        for (std::size_t s = 0; s < cfg_.snr_list_db.size(); ++s) rows.push_back(run_point(s));
        return rows;
    }

private:
    SimConfig cfg_;
    std::vector<CodematrixEntry> table_;
    UncodedMapper mapper_;
    TrellisSpec spec_;
    double es_;
};

inline TrellisSpec load_trellis_for(const SimConfig& cfg) {
    if (!cfg.trellis_path) return default_trellis();
    std::ifstream f(*cfg.trellis_path);
    if (!f) throw std::runtime_error("cannot read trellis file '" + *cfg.trellis_path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return load_trellis(ss.str(), soqpsk32::build_constellation());
}

inline std::vector<SimResultRow> run_simulation(const SimConfig& cfg) {
    return LinkSimulator(cfg, load_trellis_for(cfg)).run();
}

/// '#' header lines stating the SNR convention, then the CSV table.
inline void write_sim_csv(std::ostream& out, const SimConfig& cfg, const std::vector<SimResultRow>& rows) {
    const double es = mean_symbol_energy(soqpsk32::build_constellation());
    char buf[256];
    out << "# mode=" << to_string(cfg.mode) << " channel_redraw=" << to_string(cfg.channel_redraw)
        << " blocks_per_frame=" << cfg.blocks_per_frame << " base_seed=" << cfg.base_seed
        << " max_frame_errors=" << cfg.max_frame_errors << '\n';
    std::snprintf(buf, sizeof buf,
                  "# snr_db is Es/N0 per receive antenna; Es = mean ||C||_F^2 / T = %.6f summed over transmit "
                  "antennas; noise variance per real dimension = Es / (2 * 10^(snr_db/10))\n",
                  es);
    out << buf;
    out << "snr_db,frames,bits,bit_errors,frame_errors,ber,fer,elapsed_seconds\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%zu,%zu,%zu,%zu,%.9e,%.9e,%.3f\n", r.snr_db, r.frames, r.bits,
                      r.bit_errors, r.frame_errors, r.ber(), r.fer(), r.elapsed_seconds);
        out << buf;
    }
}

}  // namespace stclab
