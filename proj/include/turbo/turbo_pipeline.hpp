#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "turbo/channel.hpp"
#include "turbo/constituent_code.hpp"
#include "turbo/interleaver.hpp"
#include "turbo/parallel.hpp"
#include "turbo/random.hpp"
#include "turbo/siso.hpp"
#include "turbo/stopping.hpp"
#include "turbo/types.hpp"

namespace turbo {

/// Rate-1/3 parallel concatenation. Each tail holds the encoder's `memory`
/// tail systematic bits followed by its `memory` tail parity bits.
struct TurboCodeword {
    Bits systematic;
    Bits parity1;
    Bits parity2;
    Bits tail1;
    Bits tail2;

    std::size_t transmitted_length() const
    {
        return systematic.size() + parity1.size() + parity2.size() + tail1.size() + tail2.size();
    }

    /// Streams concatenated in member order.
    Bits flatten() const
    {
        Bits out;
        out.reserve(transmitted_length());
        for (const Bits* b : {&systematic, &parity1, &parity2, &tail1, &tail2})
            out.insert(out.end(), b->begin(), b->end());
        return out;
    }
};

/// Channel LLRs with the same layout as TurboCodeword.
struct ReceivedLlrs {
    Llrs systematic;
    Llrs parity1;
    Llrs parity2;
    Llrs tail1;
    Llrs tail2;

    static ReceivedLlrs split(std::span<const double> flat, std::size_t k, int memory)
    {
        const std::size_t m2 = 2 * static_cast<std::size_t>(memory);
        if (flat.size() != 3 * k + 2 * m2)
            throw std::invalid_argument("received LLR vector has length " + std::to_string(flat.size()) +
                                        ", expected 3k + 4*memory");
        ReceivedLlrs r;
        auto take = [&flat](std::size_t from, std::size_t n) { return Llrs(flat.begin() + from, flat.begin() + from + n); };
        r.systematic = take(0, k);
        r.parity1 = take(k, k);
        r.parity2 = take(2 * k, k);
        r.tail1 = take(3 * k, m2);
        r.tail2 = take(3 * k + m2, m2);
        return r;
    }
};

inline TurboCodeword turbo_encode(std::span<const Bit> info, const Permutation& perm, const Trellis& trellis)
{
    if (info.size() != perm.size())
        throw std::invalid_argument("turbo_encode: info length " + std::to_string(info.size()) +
                                    " does not match interleaver length " + std::to_string(perm.size()));
    const EncodedBlock first = rsc_encode(trellis, info, true);
    const EncodedBlock second = rsc_encode(trellis, perm.apply(info), true);

    TurboCodeword cw;
    cw.systematic.assign(info.begin(), info.end());
    cw.parity1 = first.parity;
    cw.parity2 = second.parity;
    cw.tail1 = first.tail_systematic;
    cw.tail1.insert(cw.tail1.end(), first.tail_parity.begin(), first.tail_parity.end());
    cw.tail2 = second.tail_systematic;
    cw.tail2.insert(cw.tail2.end(), second.tail_parity.begin(), second.tail_parity.end());
    return cw;
}

/// BPSK + AWGN + channel LLRs for a whole codeword.
inline ReceivedLlrs transmit(const TurboCodeword& cw, const ChannelParams& channel, int memory, Rng& rng)
{
    const Bits bits = cw.flatten();
    const std::vector<double> rx = add_noise(modulate(bits), channel.sigma, rng);
    return ReceivedLlrs::split(to_channel_llr(rx, channel.lc), cw.systematic.size(), memory);
}

/// Actual transmitted rate including both tails.
inline double turbo_code_rate(std::size_t k, int memory)
{
    return static_cast<double>(k) / static_cast<double>(3 * k + 4 * static_cast<std::size_t>(memory));
}

struct DecoderConfig {
    Combiner combiner = Combiner::max_log_map;
    double extrinsic_scale = 0.75;
    int max_full_iterations = 8;
    Criterion criterion = Criterion::hda;
    bool record_all_criteria = false;

    static DecoderConfig defaults_for(Combiner c)
    {
        DecoderConfig cfg;
        cfg.combiner = c;
        cfg.extrinsic_scale = c == Combiner::max_log_map ? 0.75 : 1.0;
        return cfg;
    }

    void validate() const
    {
        if (max_full_iterations < 1)
            throw std::invalid_argument("max_full_iterations must be >= 1");
        if (!(extrinsic_scale > 0.0 && extrinsic_scale <= 1.0))
            throw std::invalid_argument("extrinsic_scale must be in (0, 1]");
    }
};

/// Outcome of one criterion at every half-iteration (index half - 1).
/// Half-iteration 1 is never evaluated.
struct CriterionTrace {
    std::vector<std::uint8_t> matched;
    std::vector<std::uint8_t> permitted;

    bool fired(int half) const { return matched[half - 1] && permitted[half - 1]; }
    bool deferred(int half) const { return matched[half - 1] && !permitted[half - 1]; }

    /// First half-iteration where the criterion fired, or 0.
    int first_fire() const
    {
        for (std::size_t h = 0; h < matched.size(); ++h)
            if (matched[h] && permitted[h])
                return static_cast<int>(h) + 1;
        return 0;
    }

    bool any_denied_until(int half) const
    {
        for (int h = 1; h <= half && h <= static_cast<int>(permitted.size()); ++h)
            if (!permitted[h - 1])
                return true;
        return false;
    }
};

/// Per-half criterion flags recorded in equivalence mode.
struct DecodeTrace {
    CriterionTrace pcs;
    CriterionTrace hda;
    CriterionTrace crc;
    CriterionTrace genie;                 // empty without ground truth
    std::vector<std::uint8_t> block_error; // decisions != truth, empty without ground truth
};

struct DecodeResult {
    Bits decided_info;
    StopDecision stop;
    int half_iterations_used = 0;
    std::optional<DecodeTrace> trace;

    double iterations() const { return half_iterations_used / 2.0; }
};

struct DecodeOptions {
    std::span<const Bit> truth;         // natural-order info, needed by the genie criterion
    bool halt_once_pcs_and_hda_fired = false; // equivalence mode: nothing left to observe
};

/// Iterative decoder for one interleaver/trellis pair. Keeps scratch buffers
/// between blocks; use one instance per thread.
class TurboDecoder {
public:
    TurboDecoder(const Trellis& trellis, const Permutation& perm) : trellis_(&trellis), perm_(&perm), siso_(trellis) {}

    DecodeResult decode(const ReceivedLlrs& rx, const DecoderConfig& config, const DecodeOptions& options = {})
    {
        config.validate();
        const Permutation& perm = *perm_;
        const std::size_t k = perm.size();
        const std::size_t m = static_cast<std::size_t>(trellis_->memory());
        if (rx.systematic.size() != k || rx.parity1.size() != k || rx.parity2.size() != k ||
            rx.tail1.size() != 2 * m || rx.tail2.size() != 2 * m)
            throw std::invalid_argument("turbo_decode: received LLR layout does not match k=" + std::to_string(k));
        const bool have_truth = !options.truth.empty();
        if (have_truth && options.truth.size() != k)
            throw std::invalid_argument("turbo_decode: ground truth length mismatch");
        if (config.criterion == Criterion::genie && !have_truth)
            throw std::invalid_argument("genie criterion needs the transmitted information");

        load_inputs(rx, k, m);

        const int max_half = 2 * config.max_full_iterations;
        DecodeResult result;
        if (config.record_all_criteria) {
            DecodeTrace trace;
            for (CriterionTrace* t : {&trace.pcs, &trace.hda, &trace.crc}) {
                t->matched.assign(max_half, 0);
                t->permitted.assign(max_half, 1);
            }
            if (have_truth) {
                trace.genie.matched.assign(max_half, 0);
                trace.genie.permitted.assign(max_half, 1);
                trace.block_error.assign(max_half, 0);
            }
            result.trace = std::move(trace);
        }

        ext1_.assign(k, 0.0);
        ext2_.assign(k, 0.0);
        HalfIterationSnapshot snaps[2];
        const bool crc_possible = k > 24;

        int half = 1;
        for (; half <= max_half; ++half) {
            const int which = (half % 2 == 1) ? 1 : 2;
            SisoInput& in = which == 1 ? in1_ : in2_;
            const Llrs& other_ext = which == 1 ? ext2_ : ext1_;
            const Llrs mapped = which == 1 ? perm.apply_inverse(other_ext) : perm.apply(other_ext);
            for (std::size_t i = 0; i < k; ++i)
                in.apriori[i] = config.extrinsic_scale * mapped[i];

            const SisoOutput& out = siso_.decode(in, config.combiner);
            (which == 1 ? ext1_ : ext2_) = out.extrinsic;

            HalfIterationSnapshot& cur = snaps[which - 1];
            const HardDecisions sys = hard_decide(out.sys_post);
            const HardDecisions par = hard_decide(out.par_post);
            cur.half_index = half;
            cur.which_siso = which;
            cur.sys_hard = sys.bits;
            cur.par_hard = par.bits;
            cur.sys_tie = sys.tie;
            cur.par_tie = par.tie;
            result.half_iterations_used = half;

            if (result.trace && have_truth)
                result.trace->block_error[half - 1] = natural_order(cur) != Bits(options.truth.begin(), options.truth.end());

            if (half < 2)
                continue;
            const HalfIterationSnapshot& other = snaps[2 - which];

            if (result.trace) {
                DecodeTrace& tr = *result.trace;
                record(tr.pcs, half, evaluate(Criterion::pcs, cur, other, options.truth));
                record(tr.hda, half, evaluate(Criterion::hda, cur, other, options.truth));
                if (crc_possible)
                    record(tr.crc, half, evaluate(Criterion::crc, cur, other, options.truth));
                if (have_truth)
                    record(tr.genie, half, evaluate(Criterion::genie, cur, other, options.truth));
            }

            if (config.criterion != Criterion::fixed) {
                const Check c = evaluate(config.criterion, cur, other, options.truth);
                if (c.matched && !c.permitted)
                    result.stop.deferred_by_tie = true;
                if (c.matched && c.permitted) {
                    result.stop.stop = true;
                    result.stop.half_index = half;
                    result.stop.reason = reason_for(config.criterion, which);
                    break;
                }
            }

            if (options.halt_once_pcs_and_hda_fired && result.trace && result.trace->pcs.first_fire() > 0 &&
                result.trace->hda.first_fire() > 0)
                break;
        }

        if (!result.stop.stop) {
            result.stop.half_index = result.half_iterations_used;
            result.stop.reason = result.half_iterations_used == max_half ? StopReason::max_iters : StopReason::none;
        }
        result.decided_info = natural_order(snaps[(result.half_iterations_used % 2 == 1) ? 0 : 1]);
        return result;
    }

private:
    struct Check {
        bool matched = false;
        bool permitted = true;
    };

    static StopReason reason_for(Criterion c, int which)
    {
        switch (c) {
        case Criterion::pcs: return which == 2 ? StopReason::pcs_a : StopReason::pcs_b;
        case Criterion::hda: return StopReason::hda;
        case Criterion::crc: return StopReason::crc;
        case Criterion::genie: return StopReason::genie;
        case Criterion::fixed: return StopReason::max_iters;
        }
        return StopReason::none;
    }

    static void record(CriterionTrace& t, int half, Check c)
    {
        t.matched[half - 1] = c.matched;
        t.permitted[half - 1] = c.permitted;
    }

    Bits natural_order(const HalfIterationSnapshot& s) const
    {
        return s.which_siso == 1 ? s.sys_hard : perm_->apply_inverse(s.sys_hard);
    }

    Check evaluate(Criterion c, const HalfIterationSnapshot& cur, const HalfIterationSnapshot& other,
                   std::span<const Bit> truth) const
    {
        Check r;
        r.permitted = tie_guard(cur, other, c);
        switch (c) {
        case Criterion::pcs: r.matched = pcs_check(cur, other, *perm_, *trellis_); break;
        case Criterion::hda: r.matched = hda_check(cur, other, *perm_); break;
        case Criterion::crc: r.matched = crc_check(natural_order(cur)); break;
        case Criterion::genie: r.matched = genie_check(cur, truth, *perm_); break;
        case Criterion::fixed: break;
        }
        return r;
    }

    void load_inputs(const ReceivedLlrs& rx, std::size_t k, std::size_t m)
    {
        in1_.sys = rx.systematic;
        in1_.sys.insert(in1_.sys.end(), rx.tail1.begin(), rx.tail1.begin() + m);
        in1_.par = rx.parity1;
        in1_.par.insert(in1_.par.end(), rx.tail1.begin() + m, rx.tail1.end());
        in1_.apriori.assign(k, 0.0);

        in2_.sys = perm_->apply(rx.systematic);
        in2_.sys.insert(in2_.sys.end(), rx.tail2.begin(), rx.tail2.begin() + m);
        in2_.par = rx.parity2;
        in2_.par.insert(in2_.par.end(), rx.tail2.begin() + m, rx.tail2.end());
        in2_.apriori.assign(k, 0.0);
    }

    const Trellis* trellis_;
    const Permutation* perm_;
    SisoDecoder siso_;
    SisoInput in1_, in2_;
    Llrs ext1_, ext2_;
};

inline DecodeResult turbo_decode(const ReceivedLlrs& rx, const DecoderConfig& config, const Permutation& perm,
                                 const Trellis& trellis, const DecodeOptions& options = {})
{
    TurboDecoder dec(trellis, perm);
    return dec.decode(rx, config, options);
}

/// Per-block comparison of the earliest PCS and HDA stops.
struct EquivalenceReport {
    std::uint64_t blocks = 0;
    std::uint64_t agree = 0;        // same earliest stop (including "never")
    std::uint64_t pcs_earlier = 0;
    std::uint64_t hda_earlier = 0;
    std::uint64_t tie_deferred = 0; // a tie guard vetoed either check; excluded from the three above
    std::uint64_t neither_fired = 0;
    std::uint64_t pcs_half_iterations = 0;
    std::uint64_t hda_half_iterations = 0;
    std::uint64_t pcs_block_errors = 0;
    std::uint64_t hda_block_errors = 0;

    std::uint64_t disagreements() const { return pcs_earlier + hda_earlier; }
    double pcs_avg_iterations() const { return blocks ? pcs_half_iterations / (2.0 * blocks) : 0.0; }
    double hda_avg_iterations() const { return blocks ? hda_half_iterations / (2.0 * blocks) : 0.0; }
    double pcs_bler() const { return blocks ? static_cast<double>(pcs_block_errors) / blocks : 0.0; }
    double hda_bler() const { return blocks ? static_cast<double>(hda_block_errors) / blocks : 0.0; }
};

/// Decodes `blocks` random blocks once, records PCS and HDA on every
/// half-iteration, and tallies where their earliest stops differ. The
/// loop itself never stops on a criterion, so both are observed on the same
/// decoder trajectory.
inline EquivalenceReport run_equivalence_check(std::size_t blocks, DecoderConfig config, const ChannelParams& channel,
                                               const Trellis& trellis, const Permutation& perm, std::uint64_t seed,
                                               unsigned workers = default_workers())
{
    config.record_all_criteria = true;
    config.criterion = Criterion::fixed;
    config.validate();
    const int max_half = 2 * config.max_full_iterations;

    struct Outcome {
        int pcs_stop = 0;
        int hda_stop = 0;
        bool tie = false;
        bool pcs_error = false;
        bool hda_error = false;
    };
    std::vector<Outcome> outcomes(blocks);
    std::vector<std::optional<TurboDecoder>> decoders(std::max(1u, workers));

    parallel_for(0, blocks, workers, [&](std::size_t b, unsigned w) {
        if (!decoders[w])
            decoders[w].emplace(trellis, perm);
        Rng rng(block_seed(seed, 0, b));
        const Bits info = rng.random_bits(perm.size());
        const ReceivedLlrs rx = transmit(turbo_encode(info, perm, trellis), channel, trellis.memory(), rng);
        DecodeOptions opts;
        opts.truth = info;
        opts.halt_once_pcs_and_hda_fired = true;
        const DecodeResult r = decoders[w]->decode(rx, config, opts);
        const DecodeTrace& tr = *r.trace;

        Outcome o;
        o.pcs_stop = tr.pcs.first_fire();
        o.hda_stop = tr.hda.first_fire();
        const int pcs_end = o.pcs_stop ? o.pcs_stop : max_half;
        const int hda_end = o.hda_stop ? o.hda_stop : max_half;
        const int horizon = std::max(pcs_end, hda_end);
        o.tie = tr.pcs.any_denied_until(horizon) || tr.hda.any_denied_until(horizon);
        o.pcs_error = tr.block_error[pcs_end - 1];
        o.hda_error = tr.block_error[hda_end - 1];
        outcomes[b] = o;
    });

    EquivalenceReport rep;
    rep.blocks = blocks;
    for (const Outcome& o : outcomes) {
        rep.pcs_half_iterations += o.pcs_stop ? o.pcs_stop : max_half;
        rep.hda_half_iterations += o.hda_stop ? o.hda_stop : max_half;
        rep.pcs_block_errors += o.pcs_error;
        rep.hda_block_errors += o.hda_error;
        if (o.tie) {
            ++rep.tie_deferred;
            continue;
        }
        const int pcs = o.pcs_stop ? o.pcs_stop : max_half + 1;
        const int hda = o.hda_stop ? o.hda_stop : max_half + 1;
        if (pcs == hda) {
            ++rep.agree;
            if (!o.pcs_stop)
                ++rep.neither_fired;
        } else if (pcs < hda) {
            ++rep.pcs_earlier;
        } else {
            ++rep.hda_earlier;
        }
    }
    return rep;
}

} // namespace turbo
