// stc-lab command-line front end.
//
// Exit status: 0 success, 1 audit or simulation failure, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "stclab/audit.hpp"
#include "stclab/simulation.hpp"
#include "stclab/spectrum.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes through `fn` to --out if given, else stdout.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    fn(f);
}

stclab::AuditKind parse_audit_kind(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    static const std::map<std::string, stclab::AuditKind> kinds{
        {"RH", stclab::AuditKind::RadonHurwitz},      {"THEOREM1", stclab::AuditKind::Theorem1},
        {"COROLLARY1", stclab::AuditKind::Corollary1}, {"INVARIANCE", stclab::AuditKind::Invariance},
        {"FORMS", stclab::AuditKind::Forms},           {"ALL", stclab::AuditKind::All}};
    const auto it = kinds.find(s);
    if (it == kinds.end()) throw UsageError("unknown audit '" + s + "'");
    return it->second;
}

stclab::PointSet parse_point_set(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "base") return stclab::PointSet::Base;
    if (s == "primed") return stclab::PointSet::Primed;
    if (s == "full") return stclab::PointSet::Full;
    throw UsageError("unknown point set '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stc-lab: super-orthogonal space-time constellations"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::size_t trials = 1000;
    std::string out_path;

    auto* audit = app.add_subcommand("audit", "Run audit suites and print key=value records");
    std::string audit_which = "ALL";
    std::string generators_path;
    audit->add_option("which", audit_which, "RH, THEOREM1, COROLLARY1, INVARIANCE, FORMS or ALL");
    audit->add_option("--trials", trials, "Random trials per randomized check");
    audit->add_option("--seed", seed, "Base seed");
    audit->add_option("--generators", generators_path, "Audit this generator-set file instead (RH only)");
    audit->add_option("--out", out_path, "Write the report here");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo link simulation, CSV output");
    std::string config_path, mode, snr, trellis_path, redraw;
    std::optional<std::size_t> frames, blocks, max_errors;
    std::optional<std::uint64_t> sim_seed;
    std::optional<unsigned> threads;
    bool no_timing = false;
    simulate->add_option("--config", config_path, "key=value config file");
    simulate->add_option("--mode", mode, "UNCODED_BLOCK or TRELLIS");
    simulate->add_option("--snr", snr, "SNR list in dB, comma separated");
    simulate->add_option("--frames", frames, "Frames per SNR point");
    simulate->add_option("--seed", sim_seed, "Base seed");
    simulate->add_option("--trellis", trellis_path, "Trellis description file");
    simulate->add_option("--channel-redraw", redraw, "PER_FRAME or PER_BLOCK");
    simulate->add_option("--blocks-per-frame", blocks, "Codematrices per frame");
    simulate->add_option("--max-frame-errors", max_errors, "Early stop after this many frame errors (0 = never)");
    simulate->add_option("--threads", threads, "Worker threads");
    simulate->add_flag("--no-timing", no_timing, "Write elapsed_seconds as 0");
    simulate->add_option("--out", out_path, "CSV output file");

    auto* spectrum = app.add_subcommand("spectrum", "Squared-distance spectrum as CSV");
    std::string spectrum_which = "full";
    spectrum->add_option("which", spectrum_which, "base, primed or full");
    spectrum->add_option("--out", out_path, "CSV output file");

    auto* show = app.add_subcommand("show-constellation", "Print the 32-point constellation table");
    show->add_option("--out", out_path, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*audit) {
            stclab::Report rep;
            if (!generators_path.empty()) {
                if (parse_audit_kind(audit_which) != stclab::AuditKind::RadonHurwitz)
                    throw UsageError("--generators applies to the RH audit only");
                std::ifstream f(generators_path);
                if (!f) throw UsageError("cannot read '" + generators_path + "'");
                rep = stclab::audit_generator_file(stclab::read_generator_set(f));
            } else {
                rep = stclab::run_audit(parse_audit_kind(audit_which), trials, seed);
            }
            with_output(out_path, [&](std::ostream& o) {
                rep.write(o);
                o << "audit=" << (rep.pass() ? "PASS" : "FAIL") << '\n';
            });
            return rep.pass() ? 0 : kExitFailure;
        }

        if (*simulate) {
            stclab::SimConfig cfg;
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                if (!f) throw UsageError("cannot read '" + config_path + "'");
                cfg = stclab::read_sim_config(f);
            }
            if (!mode.empty()) cfg.mode = stclab::parse_sim_mode(mode);
            if (!snr.empty()) cfg.snr_list_db = stclab::parse_snr_list(snr);
            if (frames) cfg.frames_per_point = *frames;
            if (sim_seed) cfg.base_seed = *sim_seed;
            if (!trellis_path.empty()) cfg.trellis_path = trellis_path;
            if (!redraw.empty()) cfg.channel_redraw = stclab::parse_channel_redraw(redraw);
            if (blocks) cfg.blocks_per_frame = *blocks;
            if (max_errors) cfg.max_frame_errors = *max_errors;
            if (threads) cfg.threads = *threads;
            if (no_timing) cfg.timing = false;
            cfg.validate();

            std::vector<stclab::SimResultRow> rows;
            try {
                rows = stclab::run_simulation(cfg);
            } catch (const stclab::ArgumentError&) {
                throw;
            } catch (const std::exception& e) {
                std::cerr << "stc-lab: simulation failed: " << e.what() << '\n';
                return kExitFailure;
            }
            with_output(out_path, [&](std::ostream& o) { stclab::write_sim_csv(o, cfg, rows); });
            return 0;
        }

        if (*spectrum) {
            const auto lines = stclab::distance_spectrum(parse_point_set(spectrum_which));
            with_output(out_path, [&](std::ostream& o) { stclab::write_spectrum_csv(o, lines); });
            return 0;
        }

        if (*show) {
            with_output(out_path,
                        [&](std::ostream& o) { stclab::soqpsk32::write_constellation(o, stclab::soqpsk32::build_constellation()); });
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "stc-lab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const stclab::ArgumentError& e) {
        std::cerr << "stc-lab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "stc-lab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "stc-lab: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
