#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include "turbo/constituent_code.hpp"
#include "turbo/interleaver.hpp"
#include "turbo/random.hpp"
#include "turbo/siso.hpp"
#include "turbo/stopping.hpp"

namespace turbo::verify {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Noisy channel LLRs for a random terminated codeword plus Gaussian a priori
/// values, so inputs look like what a turbo decoder actually sees.
inline SisoInput random_siso_input(const Trellis& trellis, std::size_t k, Rng& rng, double lc = 2.0,
                                   double sigma = 0.8, double apriori_spread = 1.5)
{
    const EncodedBlock cw = rsc_encode(trellis, rng.random_bits(k), true);
    SisoInput in;
    auto noisy = [&](Bit b) { return lc * ((b ? -1.0 : 1.0) + sigma * rng.gaussian()); };
    for (std::size_t i = 0; i < k; ++i) {
        in.sys.push_back(noisy(cw.systematic[i]));
        in.par.push_back(noisy(cw.parity[i]));
        in.apriori.push_back(apriori_spread * rng.gaussian());
    }
    for (std::size_t i = 0; i < cw.tail_systematic.size(); ++i) {
        in.sys.push_back(noisy(cw.tail_systematic[i]));
        in.par.push_back(noisy(cw.tail_parity[i]));
    }
    return in;
}

/// The branch metrics the SISO decoder uses, in a table the Viterbi search reads.
inline BranchMetrics siso_branch_metrics(const Trellis& trellis, const SisoInput& in)
{
    const std::size_t k = in.apriori.size();
    BranchMetrics bm(in.sys.size(), trellis.num_states());
    for (std::size_t t = 0; t < in.sys.size(); ++t)
        for (int s = 0; s < trellis.num_states(); ++s)
            for (Bit u = 0; u < 2; ++u)
                bm(t, s, u) = branch_metric(in.sys[t], in.par[t], t < k ? in.apriori[t] : 0.0, u, trellis.parity(s, u));
    return bm;
}

struct MarginalsReport {
    std::size_t trials = 0;
    double max_sys_error = 0.0;
    double max_par_error = 0.0;
};

inline MarginalsReport log_map_vs_brute_force(std::size_t k, std::size_t trials, std::uint64_t seed)
{
    const Trellis trellis = build_trellis(RscSpec::umts());
    Rng rng(seed);
    MarginalsReport rep;
    SisoDecoder dec(trellis);
    for (std::size_t n = 0; n < trials; ++n) {
        const SisoInput in = random_siso_input(trellis, k, rng);
        const SisoOutput& fast = dec.decode(in, Combiner::log_map);
        const SisoOutput exact = brute_force_marginals(trellis, in);
        for (std::size_t i = 0; i < k; ++i) {
            rep.max_sys_error = std::max(rep.max_sys_error, std::abs(fast.sys_post[i] - exact.sys_post[i]));
            rep.max_par_error = std::max(rep.max_par_error, std::abs(fast.par_post[i] - exact.par_post[i]));
        }
        ++rep.trials;
    }
    return rep;
}

struct MlPathReport {
    std::size_t trials = 0;
    std::size_t ties = 0;
    std::size_t mismatches = 0;       // tie-free trials where decisions left the ML path
    std::size_t inconsistent = 0;     // tie-free trials where re-encoding sys decisions missed par decisions
};

/// Max-log-MAP hard decisions against the Viterbi ML path on identical metrics.
inline MlPathReport max_log_map_vs_viterbi(std::size_t k, std::size_t trials, std::uint64_t seed)
{
    const Trellis trellis = build_trellis(RscSpec::umts());
    Rng rng(seed);
    SisoDecoder dec(trellis);
    MlPathReport rep;
    for (std::size_t n = 0; n < trials; ++n) {
        const SisoInput in = random_siso_input(trellis, k, rng);
        const SisoOutput& out = dec.decode(in, Combiner::max_log_map);
        const HardDecisions sys = hard_decide(out.sys_post);
        const HardDecisions par = hard_decide(out.par_post);
        const ViterbiPath ml = viterbi_ml_path(trellis, siso_branch_metrics(trellis, in), true);
        ++rep.trials;
        if (sys.tie || par.tie || ml.tied) {
            ++rep.ties;
            continue;
        }
        const Bits ml_sys(ml.info.begin(), ml.info.begin() + static_cast<std::ptrdiff_t>(k));
        const Bits ml_par(ml.parity.begin(), ml.parity.begin() + static_cast<std::ptrdiff_t>(k));
        if (sys.bits != ml_sys || par.bits != ml_par)
            ++rep.mismatches;
        if (rsc_encode(trellis, sys.bits, false).parity != par.bits)
            ++rep.inconsistent;
    }
    return rep;
}

/// Lengths whose UMTS interleaver is not a bijection (expected empty).
inline std::vector<int> umts_interleaver_failures(int first = 40, int last = 5114)
{
    std::vector<int> bad;
    for (int k = first; k <= last; ++k) {
        try {
            const Permutation p = build_umts_interleaver(k);
            if (p.size() != static_cast<std::size_t>(k))
                bad.push_back(k);
        } catch (const std::exception&) {
            bad.push_back(k);
        }
    }
    return bad;
}

/// Count of attach/check round trips that failed.
inline std::size_t crc_round_trip_failures(std::size_t per_length, std::uint64_t seed)
{
    Rng rng(seed);
    std::size_t failures = 0;
    for (std::size_t len : {40u, 990u, 5000u})
        for (std::size_t n = 0; n < per_length; ++n)
            if (!crc_check(crc_attach(rng.random_bits(len))))
                ++failures;
    return failures;
}

inline std::vector<SuiteResult> run_all(std::uint64_t seed, std::size_t viterbi_trials = 10000)
{
    std::vector<SuiteResult> results;
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return std::string(buf);
    };

    for (std::size_t k : {4u, 8u}) {
        const MarginalsReport r = log_map_vs_brute_force(k, 100, seed + k);
        results.push_back({"brute_force_marginals_k" + std::to_string(k),
                           r.max_sys_error <= 1e-6 && r.max_par_error <= 1e-6,
                           "max|dsys|=" + fmt(r.max_sys_error) + " max|dpar|=" + fmt(r.max_par_error)});
    }
    for (std::size_t k : {8u, 40u}) {
        const MlPathReport r = max_log_map_vs_viterbi(k, viterbi_trials, seed + 100 + k);
        results.push_back({"viterbi_ml_path_k" + std::to_string(k),
                           r.mismatches == 0 && r.inconsistent == 0 && r.ties * 100 < r.trials,
                           "trials=" + std::to_string(r.trials) + " ties=" + std::to_string(r.ties) +
                               " mismatches=" + std::to_string(r.mismatches) +
                               " inconsistent=" + std::to_string(r.inconsistent)});
    }
    {
        const std::vector<int> bad = umts_interleaver_failures();
        results.push_back({"umts_interleaver_bijective", bad.empty(),
                           "lengths=40..5114 failures=" + std::to_string(bad.size())});
    }
    {
        const std::size_t failures = crc_round_trip_failures(1000, seed + 7);
        results.push_back({"crc_round_trip", failures == 0, "payloads=3000 failures=" + std::to_string(failures)});
    }
    return results;
}

} // namespace turbo::verify
