#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "turbo/constituent_code.hpp"
#include "turbo/types.hpp"

namespace turbo {

/// Stand-in for log(0). Sums of sentinels stay finite, so no NaN can appear.
inline constexpr double kLogZero = -1e30;

enum class Combiner { log_map, max_log_map };

/// ln(e^a + e^b), exact correction term.
inline double max_star(double a, double b) noexcept
{
    const double hi = a > b ? a : b;
    const double diff = a > b ? b - a : a - b;
    return hi + std::log1p(std::exp(diff));
}

inline double combine(Combiner c, double a, double b) noexcept
{
    return c == Combiner::log_map ? max_star(a, b) : std::max(a, b);
}

/// Channel and a priori inputs for one constituent decoder.
/// `sys` and `par` cover k info positions followed by the encoder's tail;
/// `apriori` covers the k info positions only.
struct SisoInput {
    Llrs sys;
    Llrs par;
    Llrs apriori;
};

struct SisoOutput {
    Llrs sys_post; // L(s_k), positive favours bit 0
    Llrs par_post; // L(p_k)
    Llrs extrinsic;
};

struct SisoOptions {
    bool normalize = true; // shift alpha/beta so the per-position maximum is 0
};

/// Log-domain branch metric with antipodal labels x = +1 for bit 0, -1 for bit 1:
///   gamma = (x_s * (sys + apriori) + x_p * par) / 2
inline double branch_metric(double sys, double par, double apriori, Bit sys_bit, Bit par_bit) noexcept
{
    const double xs = sys_bit ? -1.0 : 1.0;
    const double xp = par_bit ? -1.0 : 1.0;
    return 0.5 * (xs * (sys + apriori) + xp * par);
}

namespace detail {

inline std::size_t check_siso_input(const Trellis& trellis, const SisoInput& in)
{
    const std::size_t k = in.apriori.size();
    const std::size_t n = k + static_cast<std::size_t>(trellis.memory());
    if (k == 0)
        throw std::invalid_argument("SISO input has no information positions");
    if (in.sys.size() != n || in.par.size() != n)
        throw std::invalid_argument("SISO input length mismatch: expected " + std::to_string(n) +
                                    " channel values (k + memory), got sys=" + std::to_string(in.sys.size()) +
                                    " par=" + std::to_string(in.par.size()));
    return k;
}

} // namespace detail

/// BCJR forward/backward decoder over a terminated trellis, producing
/// posterior LLRs for both the systematic and the parity labels.
///
/// Holds its recursion workspace so one instance can decode many blocks.
class SisoDecoder {
public:
    explicit SisoDecoder(const Trellis& trellis, SisoOptions options = {}) : trellis_(&trellis), options_(options) {}

    const SisoOutput& decode(const SisoInput& in, Combiner combiner)
    {
        if (combiner == Combiner::log_map)
            run<Combiner::log_map>(in);
        else
            run<Combiner::max_log_map>(in);
        return out_;
    }

    std::span<const double> alpha() const { return alpha_; }
    std::span<const double> beta() const { return beta_; }

private:
    template <Combiner C>
    static double comb(double a, double b) noexcept
    {
        if constexpr (C == Combiner::log_map)
            return max_star(a, b);
        else
            return a > b ? a : b;
    }

    template <Combiner C>
    void run(const SisoInput& in)
    {
        const Trellis& tr = *trellis_;
        const std::size_t k = detail::check_siso_input(tr, in);
        const std::size_t n = in.sys.size();
        const int states = tr.num_states();
        const std::size_t stride = static_cast<std::size_t>(states);

        // gamma[t][state][input]
        gamma_.resize(n * stride * 2);
        for (std::size_t t = 0; t < n; ++t) {
            const double apr = t < k ? in.apriori[t] : 0.0;
            for (int s = 0; s < states; ++s)
                for (Bit u = 0; u < 2; ++u)
                    gamma_[(t * stride + s) * 2 + u] = branch_metric(in.sys[t], in.par[t], apr, u, tr.parity(s, u));
        }

        alpha_.assign((n + 1) * stride, kLogZero);
        beta_.assign((n + 1) * stride, kLogZero);
        alpha_[0] = 0.0;
        beta_[n * stride] = 0.0;

        for (std::size_t t = 0; t < n; ++t) {
            const double* a = &alpha_[t * stride];
            double* next = &alpha_[(t + 1) * stride];
            double top = kLogZero;
            for (int s = 0; s < states; ++s) {
                const auto inc = tr.incoming(s);
                const double m0 = a[inc[0].prev_state] + gamma_[(t * stride + inc[0].prev_state) * 2 + inc[0].input];
                const double m1 = a[inc[1].prev_state] + gamma_[(t * stride + inc[1].prev_state) * 2 + inc[1].input];
                next[s] = std::max(comb<C>(m0, m1), kLogZero);
                top = std::max(top, next[s]);
            }
            if (options_.normalize)
                for (int s = 0; s < states; ++s)
                    next[s] -= top;
        }

        for (std::size_t t = n; t-- > 0;) {
            const double* b = &beta_[(t + 1) * stride];
            double* cur = &beta_[t * stride];
            double top = kLogZero;
            for (int s = 0; s < states; ++s) {
                const double m0 = gamma_[(t * stride + s) * 2 + 0] + b[tr.next_state(s, 0)];
                const double m1 = gamma_[(t * stride + s) * 2 + 1] + b[tr.next_state(s, 1)];
                cur[s] = std::max(comb<C>(m0, m1), kLogZero);
                top = std::max(top, cur[s]);
            }
            if (options_.normalize)
                for (int s = 0; s < states; ++s)
                    cur[s] -= top;
        }

        out_.sys_post.resize(k);
        out_.par_post.resize(k);
        out_.extrinsic.resize(k);
        for (std::size_t t = 0; t < k; ++t) {
            const double* a = &alpha_[t * stride];
            const double* b = &beta_[(t + 1) * stride];
            double sys_acc[2] = {kLogZero, kLogZero};
            double par_acc[2] = {kLogZero, kLogZero};
            for (int s = 0; s < states; ++s) {
                for (Bit u = 0; u < 2; ++u) {
                    const double m = a[s] + gamma_[(t * stride + s) * 2 + u] + b[tr.next_state(s, u)];
                    sys_acc[u] = comb<C>(sys_acc[u], m);
                    const Bit p = tr.parity(s, u);
                    par_acc[p] = comb<C>(par_acc[p], m);
                }
            }
            out_.sys_post[t] = sys_acc[0] - sys_acc[1];
            out_.par_post[t] = par_acc[0] - par_acc[1];
            out_.extrinsic[t] = out_.sys_post[t] - in.sys[t] - in.apriori[t];
        }
    }

    const Trellis* trellis_;
    SisoOptions options_;
    std::vector<double> gamma_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
    SisoOutput out_;
};

inline SisoOutput siso_decode(const Trellis& trellis, const SisoInput& input, Combiner combiner,
                              SisoOptions options = {})
{
    SisoDecoder dec(trellis, options);
    return dec.decode(input, combiner);
}

/// Exact posterior LLRs by enumerating every terminated codeword. Cost 2^k.
inline SisoOutput brute_force_marginals(const Trellis& trellis, const SisoInput& input)
{
    const std::size_t k = detail::check_siso_input(trellis, input);
    if (k > 16)
        throw std::invalid_argument("brute_force_marginals supports k <= 16, got " + std::to_string(k));

    using Acc = long double;
    auto log_add = [](Acc a, Acc b) {
        if (a < b)
            std::swap(a, b);
        return a + std::log1p(std::exp(b - a));
    };
    constexpr Acc empty = -1e300L;
    std::vector<Acc> sys0(k, empty), sys1(k, empty), par0(k, empty), par1(k, empty);

    Bits info(k);
    const std::size_t n = input.sys.size();
    for (std::uint32_t word = 0; word < (1u << k); ++word) {
        for (std::size_t i = 0; i < k; ++i)
            info[i] = static_cast<Bit>((word >> i) & 1u);
        const EncodedBlock cw = rsc_encode(trellis, info, true);
        Acc metric = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const bool in_info = t < k;
            const Bit s = in_info ? cw.systematic[t] : cw.tail_systematic[t - k];
            const Bit p = in_info ? cw.parity[t] : cw.tail_parity[t - k];
            metric += branch_metric(input.sys[t], input.par[t], in_info ? input.apriori[t] : 0.0, s, p);
        }
        for (std::size_t t = 0; t < k; ++t) {
            Acc& sa = cw.systematic[t] ? sys1[t] : sys0[t];
            sa = log_add(sa, metric);
            Acc& pa = cw.parity[t] ? par1[t] : par0[t];
            pa = log_add(pa, metric);
        }
    }

    SisoOutput out;
    out.sys_post.resize(k);
    out.par_post.resize(k);
    out.extrinsic.resize(k);
    for (std::size_t t = 0; t < k; ++t) {
        out.sys_post[t] = static_cast<double>(sys0[t] - sys1[t]);
        out.par_post[t] = static_cast<double>(par0[t] - par1[t]);
        out.extrinsic[t] = out.sys_post[t] - input.sys[t] - input.apriori[t];
    }
    return out;
}

struct HardDecisions {
    Bits bits;
    bool tie = false; // some LLR was exactly zero
};

/// Negative LLR decides bit 1. A zero LLR decides bit 0 and raises `tie`.
inline HardDecisions hard_decide(std::span<const double> llr)
{
    HardDecisions hd;
    hd.bits.resize(llr.size());
    for (std::size_t i = 0; i < llr.size(); ++i) {
        hd.bits[i] = llr[i] < 0.0 ? 1 : 0;
        if (llr[i] == 0.0)
            hd.tie = true;
    }
    return hd;
}

} // namespace turbo
