#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "turbo/sim_harness.hpp"
#include "turbo/turbo_pipeline.hpp"
#include "turbo/verify.hpp"

namespace turbo::cli {

/// "0.5", "0,0.5,1" or "start:step:stop" (inclusive, tolerant to rounding).
inline std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> grid;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw std::invalid_argument("bad number '" + s + "' in Eb/N0 grid");
        return v;
    };

    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() != 3)
            throw std::invalid_argument("range must be start:step:stop");
        const double start = number(parts[0]);
        const double step = number(parts[1]);
        const double stop = number(parts[2]);
        if (!(step > 0) || stop < start)
            throw std::invalid_argument("range needs step > 0 and stop >= start");
        const long n = std::lround(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) {
            // round to 1e-9 dB so 0.1-steps print as 0.3, not 0.30000000000000004
            grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
        }
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');)
            grid.push_back(number(p));
    }
    if (grid.empty())
        throw std::invalid_argument("empty Eb/N0 grid");
    return grid;
}

inline std::string format_grid(const std::vector<double>& grid)
{
    std::string out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i)
            out += ',';
        detail::append_number(out, grid[i]);
    }
    return out;
}

struct Options {
    int k = 990;
    std::string ebn0 = "0.0:0.2:1.6";
    std::string decoder = "max-log-map";
    std::optional<double> scale;
    std::string criterion = "hda";
    int max_iter = 8;
    std::string interleaver = "umts";
    std::uint64_t seed = 1;
    std::uint64_t min_block_errors = 100;
    std::uint64_t max_blocks = 100000;
    bool crc = false;
    std::string out;
    std::uint64_t blocks = 10000;
};

inline Combiner parse_combiner(const std::string& s)
{
    if (s == "log-map")
        return Combiner::log_map;
    if (s == "max-log-map")
        return Combiner::max_log_map;
    throw std::invalid_argument("unknown decoder '" + s + "'");
}

inline ExperimentConfig to_experiment(const Options& o)
{
    ExperimentConfig cfg;
    cfg.k = o.k;
    cfg.interleaver = o.interleaver == "random" ? InterleaverKind::random : InterleaverKind::umts;
    cfg.interleaver_seed = o.seed;
    cfg.ebn0_grid = parse_grid(o.ebn0);
    cfg.decoder = DecoderConfig::defaults_for(parse_combiner(o.decoder));
    if (o.scale)
        cfg.decoder.extrinsic_scale = *o.scale;
    cfg.decoder.max_full_iterations = o.max_iter;
    cfg.decoder.criterion = parse_criterion(o.criterion);
    cfg.crc_present = o.crc;
    cfg.min_block_errors = o.min_block_errors;
    cfg.max_blocks = o.max_blocks;
    cfg.master_seed = o.seed;
    cfg.validate();
    return cfg;
}

/// Command line that reproduces the run, every default spelled out.
inline std::string echo(const std::string& sub, const ExperimentConfig& cfg, std::uint64_t blocks,
                        const std::string& out_path)
{
    std::string s = "turbosim " + sub + " --k " + std::to_string(cfg.k) + " --ebn0 " + format_grid(cfg.ebn0_grid) +
                    " --decoder " + std::string(to_string(cfg.decoder.combiner)) + " --scale ";
    detail::append_number(s, cfg.decoder.extrinsic_scale);
    s += " --max-iter " + std::to_string(cfg.decoder.max_full_iterations) + " --interleaver " +
         std::string(to_string(cfg.interleaver)) + " --seed " + std::to_string(cfg.master_seed);
    if (sub == "simulate") {
        s += " --criterion " + std::string(to_string(cfg.decoder.criterion)) + " --min-block-errors " +
             std::to_string(cfg.min_block_errors) + " --max-blocks " + std::to_string(cfg.max_blocks);
        if (cfg.crc_present)
            s += " --crc";
        if (!out_path.empty())
            s += " --out " + out_path;
    } else {
        s += " --blocks " + std::to_string(blocks);
    }
    return s;
}

inline void print_equivalence(std::ostream& out, double ebn0, const EquivalenceReport& r)
{
    out << "ebn0_db=" << ebn0 << '\n'
        << "blocks=" << r.blocks << '\n'
        << "agree=" << r.agree << '\n'
        << "pcs_earlier=" << r.pcs_earlier << '\n'
        << "hda_earlier=" << r.hda_earlier << '\n'
        << "disagreements=" << r.disagreements() << '\n'
        << "tie_deferred=" << r.tie_deferred << '\n'
        << "neither_fired=" << r.neither_fired << '\n'
        << "pcs_avg_iterations=" << r.pcs_avg_iterations() << '\n'
        << "hda_avg_iterations=" << r.hda_avg_iterations() << '\n'
        << "pcs_bler=" << r.pcs_bler() << '\n'
        << "hda_bler=" << r.hda_bler() << '\n';
}

/// Entry point of the `turbosim` tool. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Turbo decoding stopping-criteria simulator (PCS / HDA / CRC)", "turbosim"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--k", o.k, "Information block length (CRC included when --crc)");
        sub->add_option("--ebn0", o.ebn0, "Eb/N0 points in dB: list a,b,c or start:step:stop");
        sub->add_option("--decoder", o.decoder, "SISO algorithm")
            ->check(CLI::IsMember({"log-map", "max-log-map"}));
        sub->add_option("--scale", o.scale, "Extrinsic scaling (default 0.75 max-log-map, 1.0 log-map)");
        sub->add_option("--max-iter", o.max_iter, "Maximum full iterations")->check(CLI::PositiveNumber);
        sub->add_option("--interleaver", o.interleaver, "Interleaver kind")
            ->check(CLI::IsMember({"umts", "random"}));
        sub->add_option("--seed", o.seed, "Master seed");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo BLER/BER/iteration sweep, CSV output");
    add_common(simulate);
    simulate->add_option("--criterion", o.criterion, "Stopping criterion")
        ->check(CLI::IsMember({"fixed", "hda", "pcs", "crc", "genie"}));
    simulate->add_option("--min-block-errors", o.min_block_errors, "Stop a point after this many block errors");
    simulate->add_option("--max-blocks", o.max_blocks, "Block budget per point");
    simulate->add_flag("--crc", o.crc, "Attach a 24-bit CRC inside the k-bit block");
    simulate->add_option("--out", o.out, "CSV path (stdout when omitted)");

    CLI::App* equivalence = app.add_subcommand("equivalence", "Per-block PCS vs HDA earliest-stop comparison");
    add_common(equivalence);
    equivalence->add_option("--blocks", o.blocks, "Blocks per Eb/N0 point");

    CLI::App* verify_cmd = app.add_subcommand("verify", "Run the oracle suites");
    verify_cmd->add_option("--seed", o.seed, "Seed for randomized trials");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0)
            err << app.help();
        return code;
    }

    try {
        if (verify_cmd->parsed()) {
            bool ok = true;
            for (const auto& r : verify::run_all(o.seed)) {
                out << (r.passed ? "PASS " : "FAIL ") << r.name << ' ' << r.detail << '\n';
                ok = ok && r.passed;
            }
            return ok ? 0 : 1;
        }

        if (equivalence->parsed()) {
            if (equivalence->count("--ebn0") == 0)
                o.ebn0 = "0.5";
            if (equivalence->count("--k") == 0)
                o.k = 40;
        }
        ExperimentConfig cfg;
        try {
            cfg = to_experiment(o);
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << "\n\n" << (simulate->parsed() ? simulate->help() : equivalence->help());
            return 2;
        }

        if (simulate->parsed()) {
            err << "# " << echo("simulate", cfg, 0, o.out) << '\n';
            const std::vector<SimRecord> records = run_sweep(cfg);
            if (o.out.empty())
                out << format_csv(records);
            else
                write_csv(records, o.out);
            return 0;
        }

        err << "# " << echo("equivalence", cfg, o.blocks, "") << '\n';
        const Trellis trellis = build_trellis(RscSpec::umts());
        const Permutation perm = build_interleaver(cfg);
        const double rate = turbo_code_rate(static_cast<std::size_t>(cfg.k), trellis.memory());
        std::vector<std::pair<double, EquivalenceReport>> reports;
        for (std::size_t i = 0; i < cfg.ebn0_grid.size(); ++i) {
            const double ebn0 = cfg.ebn0_grid[i];
            reports.emplace_back(ebn0, run_equivalence_check(o.blocks, cfg.decoder, derive_params(ebn0, rate), trellis,
                                                             perm, block_seed(cfg.master_seed, i, 0)));
            print_equivalence(out, ebn0, reports.back().second);
        }

        out << '\n'
            << std::setw(8) << "Eb/N0" << std::setw(9) << "blocks" << std::setw(9) << "agree" << std::setw(8)
            << "pcs<" << std::setw(8) << "hda<" << std::setw(8) << "ties" << std::setw(10) << "it(pcs)"
            << std::setw(10) << "it(hda)" << std::setw(11) << "bler(pcs)" << std::setw(11) << "bler(hda)" << '\n';
        std::uint64_t disagreements = 0;
        for (const auto& [ebn0, r] : reports) {
            out << std::fixed << std::setprecision(2) << std::setw(8) << ebn0 << std::setw(9) << r.blocks
                << std::setw(9) << r.agree << std::setw(8) << r.pcs_earlier << std::setw(8) << r.hda_earlier
                << std::setw(8) << r.tie_deferred << std::setprecision(3) << std::setw(10) << r.pcs_avg_iterations()
                << std::setw(10) << r.hda_avg_iterations() << std::setprecision(4) << std::setw(11) << r.pcs_bler()
                << std::setw(11) << r.hda_bler() << '\n';
            out.unsetf(std::ios::floatfield);
            disagreements += r.disagreements();
        }
        if (cfg.decoder.combiner == Combiner::max_log_map && disagreements > 0) {
            err << "error: PCS and HDA disagreed on " << disagreements << " tie-free blocks under max-log-MAP\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace turbo::cli
