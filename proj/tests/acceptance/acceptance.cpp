// Acceptance checks 1-8. One PASS/FAIL line per criterion; exit status 1 if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "stclab/audit.hpp"
#include "stclab/simulation.hpp"
#include "stclab/spectrum.hpp"

using namespace stclab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) { return Report::format(v); }

Outcome radon_hurwitz() {
    const auto b = radon_hurwitz_check(alamouti_generators());
    const auto p = radon_hurwitz_check(alamouti_primed_generators());
    const std::vector<ComplexMatrix> mixed{alamouti_generators()[0], alamouti_primed_generators()[0]};
    const auto m = radon_hurwitz_check(std::span<const ComplexMatrix>(mixed));
    const bool ok = b.pass && p.pass && b.max_residual < 1e-12 && p.max_residual < 1e-12 &&
                    std::abs(b.scale - 0.5) < 1e-12 && std::abs(p.scale - 0.5) < 1e-12 && !m.pass &&
                    std::abs(m.max_residual - 1.0) <= 1e-12;
    return {ok, "base residual " + fmt(b.max_residual) + ", primed residual " + fmt(p.max_residual) + ", scale " +
                    fmt(b.scale) + ", mixed residual " + fmt(m.max_residual)};
}

Outcome regeneration() {
    const auto table = soqpsk32::build_constellation();
    const auto e = soqpsk32::expanded_constellation();
    double worst = 0.0;
    std::vector<bool> used(table.size(), false);
    bool matched = e.points.size() == table.size();
    for (const auto& p : e.points) {
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < table.size(); ++k) {
            if (used[k]) continue;
            const double d = max_abs_diff(p.matrix, table[k].matrix);
            if (d < best) best = d, arg = k;
        }
        if (best > 1e-12 || table[arg].subconstellation != p.subconstellation) matched = false;
        used[arg] = true;
        worst = std::max(worst, best);
    }
    const auto forms = soqpsk32::verify_forms(table);
    return {matched && forms.pass(), std::to_string(e.points.size()) + " points, max entry error " + fmt(worst) +
                                         ", form violations " + std::to_string(forms.violations.size())};
}

Outcome span_audits() {
    const auto g = alamouti_generators();
    const auto e = soqpsk32::expanded_constellation();
    const auto t1 = theorem1_audit(e);
    const auto c1 = corollary1_audit(e);
    const auto control = theorem1_audit(expand(g, sign_vectors(4), Complex(0, 1) * ComplexMatrix::identity(2), 1.0));
    const bool gen_ok = std::abs(t1.min_residual - 1.0) <= 1e-10 && std::abs(t1.max_residual - 1.0) <= 1e-10;
    const bool pts_ok = c1.per_point.size() == 16 && std::abs(c1.min_residual - 2.0) <= 1e-10 &&
                        std::abs(c1.max_residual - 2.0) <= 1e-10;
    const bool control_ok = control.max_residual < 1e-10;
    return {gen_ok && pts_ok && control_ok,
            "primed generator residuals [" + fmt(t1.min_residual) + ", " + fmt(t1.max_residual) +
                "], primed point residuals [" + fmt(c1.min_residual) + ", " + fmt(c1.max_residual) +
                "], U = iI control residual " + fmt(control.max_residual) + " (required < 1e-10)"};
}

Outcome shape_invariance() {
    const auto e = soqpsk32::expanded_constellation();
    RandomStream rng(derive_seed(4, 0, 0));
    double orth = 0.0, dist = 0.0, ang = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto r = shape_invariance_audit(e, sample_channel(rng, 2));
        orth = std::max(orth, r.orthonormality_error);
        dist = std::max(dist, r.max_distance_error);
        ang = std::max(ang, r.max_angle_error);
    }
    return {orth < 1e-12 && dist < 1e-11 && ang < 1e-11,
            "1000 draws, orthonormality " + fmt(orth) + ", distance " + fmt(dist) + ", angle " + fmt(ang)};
}

Outcome lemma1() {
    const auto g = alamouti_generators();
    RandomStream rng(derive_seed(5, 0, 0));
    double synth = 0.0, rh = 0.0, scale = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Complex zeta = std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
        const std::vector<Complex> z{Complex(rng.gaussian(), rng.gaussian()), Complex(rng.gaussian(), rng.gaussian())};
        const std::vector<Complex> zz{z[0] * zeta, z[1] * zeta};
        const auto eta = rotate_generators(g, zeta);
        synth = std::max(synth, max_abs_diff(synthesize(eta, isometry_symbols_to_chi(zz)),
                                             zeta * synthesize(g, isometry_symbols_to_chi(z))));
        const auto r = radon_hurwitz_check(eta);
        rh = std::max(rh, r.max_residual);
        scale = std::max(scale, std::abs(r.scale - g.scale()));
    }
    return {synth <= 1e-13 && rh < 1e-12 && scale < 1e-12,
            "100 rotations, synthesis error " + fmt(synth) + ", RH residual " + fmt(rh) + ", scale error " + fmt(scale)};
}

Outcome decoders() {
    const auto table = soqpsk32::build_constellation();
    const auto spec = default_trellis();
    constexpr std::size_t frames = 10000, blocks = 64;
    std::size_t ml_wrong = 0, vit_wrong = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        RandomStream rng(derive_seed(6, 0, f));
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto ch = sample_channel(rng, 2);
            const auto& sent = table[rng.next_word() % table.size()];
            ml_wrong += ml_block_decode(apply_channel(sent.matrix, ch.h), ch, table).decided_indices.front() != sent.index;
        }
        std::vector<std::uint8_t> bits(4 * blocks);
        for (auto& x : bits) x = static_cast<std::uint8_t>(rng.next_word() >> 63);
        const auto labels = trellis_encode(spec, bits);
        std::vector<ChannelRealization> chs;
        std::vector<std::vector<Complex>> rx;
        for (int l : labels) {
            chs.push_back(sample_channel(rng, 2));
            rx.push_back(apply_channel(table[static_cast<std::size_t>(l)].matrix, chs.back().h));
        }
        vit_wrong += viterbi_decode(spec, rx, chs, table).bits != bits;
    }

    // One section from state 0: Viterbi must return the ML metric over every
    // label reachable from that state.
    std::vector<CodematrixEntry> reachable;
    for (unsigned in = 0; in < spec.outgoing_count(); ++in)
        for (int l : spec.outgoing(0, in).labels) reachable.push_back(table[static_cast<std::size_t>(l)]);
    RandomStream rng(derive_seed(6, 1, 0));
    double gap = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto ch = sample_channel(rng, 2, 0.8);
        const auto r = transmit(table[rng.next_word() % 16].matrix, ch, rng);
        gap = std::max(gap, std::abs(viterbi_decode(spec, {r}, {ch}, table).metric - ml_block_decode(r, ch, reachable).metric));
    }
    return {ml_wrong == 0 && vit_wrong == 0 && gap <= 1e-12,
            "ML block errors " + std::to_string(ml_wrong) + "/" + std::to_string(frames * blocks) +
                ", Viterbi frame errors " + std::to_string(vit_wrong) + "/" + std::to_string(frames) +
                ", 1-section metric gap " + fmt(gap)};
}

std::string simulate_csv(const SimConfig& cfg, std::vector<SimResultRow>& rows) {
    rows = run_simulation(cfg);
    std::ostringstream out;
    write_sim_csv(out, cfg, rows);
    return out.str();
}

Outcome link_level() {
    const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
    SimConfig unc;
    unc.mode = SimMode::UncodedBlock;
    unc.snr_list_db = {30.0};
    unc.frames_per_point = 10000;
    unc.base_seed = 7;
    unc.timing = false;
    unc.threads = hw;

    std::vector<SimResultRow> rows, again;
    const std::string a = simulate_csv(unc, rows);
    SimConfig unc1 = unc;
    unc1.threads = 1;
    const bool repro_unc = a == simulate_csv(unc1, again);
    const double ber30 = rows.front().ber(), fer30 = rows.front().fer();

    SimConfig u12 = unc;
    u12.snr_list_db = {12.0};
    SimConfig t12 = u12;
    t12.mode = SimMode::Trellis;
    std::vector<SimResultRow> ur, tr;
    simulate_csv(u12, ur);
    const std::string tc = simulate_csv(t12, tr);
    SimConfig t12b = t12;
    t12b.threads = 1;
    const bool repro_tr = tc == simulate_csv(t12b, again);
    const double fu = ur.front().fer(), ft = tr.front().fer();

    return {ber30 < 1e-3 && ft < fu && repro_unc && repro_tr,
            "uncoded 30 dB BER " + fmt(ber30) + " FER " + fmt(fer30) + "; 12 dB FER trellis " + fmt(ft) + " (" +
                std::to_string(tr.front().frames) + " frames) vs uncoded " + fmt(fu) + " (" +
                std::to_string(ur.front().frames) + " frames); reproducible " + (repro_unc && repro_tr ? "yes" : "no")};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string cli_output(const std::string& args) {
    std::string out;
    FILE* p = popen((std::string(STCLAB_CLI) + " " + args).c_str(), "r");
    if (!p) return out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    pclose(p);
    return out;
}

Outcome spectrum() {
    bool ok = true;
    std::string detail;
    for (auto [name, set] : {std::pair{"base", PointSet::Base}, std::pair{"primed", PointSet::Primed},
                             std::pair{"full", PointSet::Full}}) {
        const std::string oracle = slurp(std::string(STCLAB_ORACLE_DIR) + "/spectrum_" + name + ".csv");
        std::ostringstream lib;
        write_spectrum_csv(lib, distance_spectrum(set));
        const std::string cli = cli_output(std::string("spectrum ") + name);
        const bool match = !oracle.empty() && lib.str() == oracle && cli == oracle;
        ok = ok && match;
        detail += std::string(detail.empty() ? "" : ", ") + name + (match ? " match" : " MISMATCH");
    }
    return {ok, detail + " (oracle CSV vs library and CLI output, byte-exact)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Radon-Hurwitz suite", radon_hurwitz},
        {"Constellation regeneration", regeneration},
        {"Span audits", span_audits},
        {"Shape invariance", shape_invariance},
        {"Rotated generator sets", lemma1},
        {"Decoder correctness", decoders},
        {"Link-level sanity", link_level},
        {"Distance spectrum", spectrum},
    };
    bool all = true;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && o.pass;
        std::printf("%s criterion %d: %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
