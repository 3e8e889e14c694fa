#pragma once

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "turbo/parallel.hpp"
#include "turbo/turbo_pipeline.hpp"

namespace turbo {

enum class InterleaverKind { umts, random };

inline std::string_view to_string(Combiner c) { return c == Combiner::log_map ? "log-map" : "max-log-map"; }
inline std::string_view to_string(InterleaverKind i) { return i == InterleaverKind::umts ? "umts" : "random"; }

struct ExperimentConfig {
    int k = 990; // code block length, CRC included when crc_present
    InterleaverKind interleaver = InterleaverKind::umts;
    std::uint64_t interleaver_seed = 1;
    std::vector<double> ebn0_grid;
    DecoderConfig decoder;
    bool crc_present = false;
    std::uint64_t min_block_errors = 100;
    std::uint64_t max_blocks = 100000;
    std::uint64_t master_seed = 1;
    unsigned workers = 0; // 0: default_workers()

    int payload_length() const { return crc_present ? k - 24 : k; }

    void validate() const
    {
        decoder.validate();
        if (k < 1)
            throw std::invalid_argument("block length must be positive");
        if (interleaver == InterleaverKind::umts && (k < 40 || k > 5114))
            throw std::invalid_argument("UMTS interleaver needs 40 <= k <= 5114");
        if (crc_present && k <= 24)
            throw std::invalid_argument("k must exceed the 24 CRC bits");
        if (decoder.criterion == Criterion::crc && !crc_present)
            throw std::invalid_argument("criterion crc requires a CRC-attached payload");
        for (std::size_t i = 1; i < ebn0_grid.size(); ++i)
            if (!(ebn0_grid[i] > ebn0_grid[i - 1]))
                throw std::invalid_argument("Eb/N0 grid must be strictly increasing");
        if (max_blocks == 0)
            throw std::invalid_argument("max_blocks must be positive");
    }
};

struct SimRecord {
    double ebn0_db = 0.0;
    std::uint64_t blocks_run = 0;
    std::uint64_t block_errors = 0;
    std::uint64_t bit_errors = 0;
    double bler = 0.0;
    double ber = 0.0;
    double avg_iterations = 0.0;
    std::uint64_t tie_deferrals = 0;
    Criterion criterion = Criterion::hda;
    Combiner combiner = Combiner::max_log_map;
    double scale = 1.0;
    int k = 0;
    double effective_rate = 0.0;
    std::uint64_t seed = 0;
};

inline Permutation build_interleaver(const ExperimentConfig& cfg)
{
    return cfg.interleaver == InterleaverKind::umts ? build_umts_interleaver(cfg.k)
                                                     : build_random_interleaver(static_cast<std::size_t>(cfg.k), cfg.interleaver_seed);
}

/// Runs one grid point. Blocks are drawn in index order and the point ends at
/// the first block index where the error count reaches min_block_errors (or at
/// max_blocks); blocks are computed in fixed-size batches, so the cut and the
/// statistics do not depend on the worker count.
inline SimRecord run_point(const ExperimentConfig& cfg, std::size_t point_index, const Trellis& trellis,
                           const Permutation& perm)
{
    cfg.validate();
    if (point_index >= cfg.ebn0_grid.size())
        throw std::out_of_range("grid point index out of range");
    const double ebn0 = cfg.ebn0_grid[point_index];
    const std::size_t k = static_cast<std::size_t>(cfg.k);
    const std::size_t payload = static_cast<std::size_t>(cfg.payload_length());
    const ChannelParams channel = derive_params(ebn0, turbo_code_rate(k, trellis.memory()));
    const unsigned workers = cfg.workers ? cfg.workers : default_workers();

    struct BlockStats {
        std::uint32_t bit_errors = 0;
        int half_iterations = 0;
        bool tie_deferred = false;
    };
    std::vector<std::optional<TurboDecoder>> decoders(workers);
    constexpr std::size_t batch = 64;
    std::vector<BlockStats> stats(batch);

    SimRecord rec;
    rec.ebn0_db = ebn0;
    rec.criterion = cfg.decoder.criterion;
    rec.combiner = cfg.decoder.combiner;
    rec.scale = cfg.decoder.extrinsic_scale;
    rec.k = cfg.k;
    rec.effective_rate = static_cast<double>(payload) / static_cast<double>(3 * k + 4 * trellis.memory());
    rec.seed = cfg.master_seed;
    std::uint64_t half_sum = 0;

    bool done = false;
    for (std::uint64_t start = 0; !done && start < cfg.max_blocks; start += batch) {
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, cfg.max_blocks - start));
        parallel_for(0, count, workers, [&](std::size_t i, unsigned w) {
            if (!decoders[w])
                decoders[w].emplace(trellis, perm);
            Rng rng(block_seed(cfg.master_seed, point_index, start + i));
            Bits info = rng.random_bits(payload);
            if (cfg.crc_present)
                info = crc_attach(info);
            const ReceivedLlrs rx = transmit(turbo_encode(info, perm, trellis), channel, trellis.memory(), rng);
            DecodeOptions opts;
            opts.truth = info;
            const DecodeResult r = decoders[w]->decode(rx, cfg.decoder, opts);
            BlockStats s;
            for (std::size_t j = 0; j < payload; ++j)
                s.bit_errors += r.decided_info[j] != info[j];
            s.half_iterations = r.half_iterations_used;
            s.tie_deferred = r.stop.deferred_by_tie;
            stats[i] = s;
        });
        for (std::size_t i = 0; i < count; ++i) {
            const BlockStats& s = stats[i];
            ++rec.blocks_run;
            rec.bit_errors += s.bit_errors;
            rec.block_errors += s.bit_errors > 0;
            half_sum += static_cast<std::uint64_t>(s.half_iterations);
            rec.tie_deferrals += s.tie_deferred;
            if (rec.block_errors >= cfg.min_block_errors) {
                done = true;
                break;
            }
        }
    }

    rec.bler = static_cast<double>(rec.block_errors) / static_cast<double>(rec.blocks_run);
    rec.ber = static_cast<double>(rec.bit_errors) / (static_cast<double>(rec.blocks_run) * static_cast<double>(payload));
    rec.avg_iterations = static_cast<double>(half_sum) / (2.0 * static_cast<double>(rec.blocks_run));
    return rec;
}

inline SimRecord run_point(const ExperimentConfig& cfg, std::size_t point_index)
{
    const Trellis trellis = build_trellis(RscSpec::umts());
    const Permutation perm = build_interleaver(cfg);
    return run_point(cfg, point_index, trellis, perm);
}

inline std::vector<SimRecord> run_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Trellis trellis = build_trellis(RscSpec::umts());
    const Permutation perm = build_interleaver(cfg);
    std::vector<SimRecord> out;
    for (std::size_t i = 0; i < cfg.ebn0_grid.size(); ++i)
        out.push_back(run_point(cfg, i, trellis, perm));
    return out;
}

/// Eb/N0 penalty for carrying a 24-bit CRC inside a k-bit block.
inline double crc_rate_shift_db(int k_payload)
{
    if (k_payload <= 24)
        throw std::invalid_argument("crc_rate_shift_db needs k > 24");
    return 10.0 * std::log10(static_cast<double>(k_payload) / static_cast<double>(k_payload - 24));
}

/// 95% Wilson score interval for a binomial proportion.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials)
{
    if (trials == 0)
        return {};
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    // the bounds at 0 and n are exact; the closed form leaves rounding residue there
    return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

namespace detail {

inline void append_number(std::string& out, double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline void append_number(std::string& out, std::uint64_t v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

} // namespace detail

inline constexpr std::string_view kCsvHeader =
    "ebn0_db,k,combiner,criterion,scale,blocks,block_errors,bler,ber,avg_iterations,tie_deferrals,effective_rate,seed";

/// CSV text, rows sorted by (combiner, criterion, ebn0_db). Numbers use the
/// shortest round-trip form and never depend on the locale.
inline std::string format_csv(std::vector<SimRecord> records)
{
    std::stable_sort(records.begin(), records.end(), [](const SimRecord& a, const SimRecord& b) {
        return std::make_tuple(to_string(a.combiner), to_string(a.criterion), a.ebn0_db) <
               std::make_tuple(to_string(b.combiner), to_string(b.criterion), b.ebn0_db);
    });
    std::string out(kCsvHeader);
    out += '\n';
    for (const SimRecord& r : records) {
        using detail::append_number;
        append_number(out, r.ebn0_db);
        out += ',';
        append_number(out, static_cast<std::uint64_t>(r.k));
        out += ',';
        out += to_string(r.combiner);
        out += ',';
        out += to_string(r.criterion);
        out += ',';
        append_number(out, r.scale);
        out += ',';
        append_number(out, r.blocks_run);
        out += ',';
        append_number(out, r.block_errors);
        out += ',';
        append_number(out, r.bler);
        out += ',';
        append_number(out, r.ber);
        out += ',';
        append_number(out, r.avg_iterations);
        out += ',';
        append_number(out, r.tie_deferrals);
        out += ',';
        append_number(out, r.effective_rate);
        out += ',';
        append_number(out, r.seed);
        out += '\n';
    }
    return out;
}

inline void write_csv(const std::vector<SimRecord>& records, const std::string& path)
{
    if (records.empty())
        throw std::invalid_argument("write_csv: no records to write");
    const std::string text = format_csv(records);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("write_csv: cannot open '" + path + "' for writing: " +
                                 std::generic_category().message(errno));
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw std::runtime_error("write_csv: write to '" + path + "' failed");
}

} // namespace turbo
