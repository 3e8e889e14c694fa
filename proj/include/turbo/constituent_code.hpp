#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "turbo/types.hpp"

namespace turbo {

/// Rate-1/2 recursive systematic convolutional code.
///
/// Polynomials are coefficient bitmasks with the constant term in bit 0, so
/// 1+D^2+D^3 is 0b1101. The default instance is the UMTS constituent code.
struct RscSpec {
    unsigned feedback_poly = 0b1101; // 1 + D^2 + D^3
    unsigned forward_poly = 0b1011;  // 1 + D + D^3
    int memory = 3;

    static RscSpec umts() { return {}; }
};

struct Transition {
    int prev_state;
    Bit input;
};

/// Dense state-transition tables of an RSC code.
///
/// A state holds the last `memory` feedback register values, most recent in
/// bit 0. Every state has two outgoing and two incoming transitions.
class Trellis {
public:
    int memory() const noexcept { return memory_; }
    int num_states() const noexcept { return num_states_; }
    const RscSpec& spec() const noexcept { return spec_; }

    int next_state(int state, Bit input) const { return next_[2 * state + input]; }
    Bit parity(int state, Bit input) const { return parity_[2 * state + input]; }

    /// The input that drives the feedback register to zero from `state`.
    Bit tail_input(int state) const { return tail_[state]; }

    std::span<const Transition, 2> incoming(int state) const
    {
        return std::span<const Transition, 2>(prev_.data() + 2 * state, 2);
    }

    friend Trellis build_trellis(const RscSpec& spec);

private:
    Trellis() = default;

    RscSpec spec_;
    int memory_ = 0;
    int num_states_ = 0;
    std::vector<int> next_;
    std::vector<Bit> parity_;
    std::vector<Bit> tail_;
    std::vector<Transition> prev_;
};

namespace detail {

inline Bit parity_of(unsigned v) { return static_cast<Bit>(std::popcount(v) & 1); }

inline int poly_degree(unsigned poly) { return poly == 0 ? -1 : std::bit_width(poly) - 1; }

} // namespace detail

inline Trellis build_trellis(const RscSpec& spec)
{
    if ((spec.feedback_poly & 1u) == 0)
        throw std::invalid_argument("feedback polynomial must have a constant term");
    const int degree = std::max(detail::poly_degree(spec.feedback_poly), detail::poly_degree(spec.forward_poly));
    if (spec.memory < 1 || spec.memory > 16)
        throw std::invalid_argument("RSC memory must be in [1, 16]");
    if (degree != spec.memory)
        throw std::invalid_argument("RSC memory " + std::to_string(spec.memory) +
                                    " does not match polynomial degree " + std::to_string(degree));

    Trellis t;
    t.spec_ = spec;
    t.memory_ = spec.memory;
    t.num_states_ = 1 << spec.memory;
    const int n = t.num_states_;
    const unsigned mask = static_cast<unsigned>(n - 1);
    const unsigned feedback_taps = spec.feedback_poly >> 1;
    const unsigned forward_taps = spec.forward_poly >> 1;
    const Bit forward_now = static_cast<Bit>(spec.forward_poly & 1u);

    t.next_.resize(2 * n);
    t.parity_.resize(2 * n);
    t.tail_.resize(n);
    t.prev_.assign(2 * n, Transition{-1, 0});
    std::vector<int> fill(n, 0);

    for (int s = 0; s < n; ++s) {
        const Bit fb = detail::parity_of(feedback_taps & static_cast<unsigned>(s));
        t.tail_[s] = fb;
        for (Bit u = 0; u < 2; ++u) {
            const Bit reg = u ^ fb;
            const int next = static_cast<int>(((static_cast<unsigned>(s) << 1) | reg) & mask);
            t.next_[2 * s + u] = next;
            t.parity_[2 * s + u] = (forward_now & reg) ^ detail::parity_of(forward_taps & static_cast<unsigned>(s));
            t.prev_[2 * next + fill[next]++] = Transition{s, u};
        }
    }
    return t;
}

struct EncodedBlock {
    Bits systematic;
    Bits parity;
    Bits tail_systematic;
    Bits tail_parity;
    int final_state_before_tail = 0;
};

/// Encodes from state 0. With `terminate`, appends `memory` tail pairs that
/// return the encoder to state 0.
inline EncodedBlock rsc_encode(const Trellis& trellis, std::span<const Bit> info, bool terminate)
{
    if (info.empty())
        throw std::invalid_argument("rsc_encode: empty information block");

    EncodedBlock out;
    out.systematic.assign(info.begin(), info.end());
    out.parity.resize(info.size());
    int state = 0;
    for (std::size_t i = 0; i < info.size(); ++i) {
        out.parity[i] = trellis.parity(state, info[i]);
        state = trellis.next_state(state, info[i]);
    }
    out.final_state_before_tail = state;
    if (terminate) {
        for (int i = 0; i < trellis.memory(); ++i) {
            const Bit u = trellis.tail_input(state);
            out.tail_systematic.push_back(u);
            out.tail_parity.push_back(trellis.parity(state, u));
            state = trellis.next_state(state, u);
        }
    }
    return out;
}

/// Per-position, per-transition additive metrics, laid out [position][state][input].
class BranchMetrics {
public:
    BranchMetrics(std::size_t positions, int num_states)
        : positions_(positions), states_(num_states), values_(positions * num_states * 2, 0.0)
    {
    }

    std::size_t positions() const noexcept { return positions_; }
    int num_states() const noexcept { return states_; }

    double& operator()(std::size_t pos, int state, Bit input) { return values_[(pos * states_ + state) * 2 + input]; }
    double operator()(std::size_t pos, int state, Bit input) const
    {
        return values_[(pos * states_ + state) * 2 + input];
    }

private:
    std::size_t positions_;
    int states_;
    std::vector<double> values_;
};

struct ViterbiPath {
    Bits info;
    Bits parity;
    double metric = 0.0;
    bool tied = false; // some add-compare-select saw two equal finite candidates
};

/// Maximum-metric path through the trellis starting at state 0. When
/// `terminated`, the path must also end at state 0.
inline ViterbiPath viterbi_ml_path(const Trellis& trellis, const BranchMetrics& metrics, bool terminated)
{
    if (metrics.num_states() != trellis.num_states())
        throw std::invalid_argument("viterbi_ml_path: metric table does not match trellis");

    constexpr double unreachable = -std::numeric_limits<double>::infinity();
    const std::size_t n = metrics.positions();
    const int states = trellis.num_states();

    std::vector<double> score(states, unreachable);
    std::vector<double> next_score(states);
    std::vector<Transition> survivor(n * states, Transition{-1, 0});
    score[0] = 0.0;
    bool tied = false;

    for (std::size_t t = 0; t < n; ++t) {
        for (int s = 0; s < states; ++s) {
            const auto in = trellis.incoming(s);
            const double a = score[in[0].prev_state] + metrics(t, in[0].prev_state, in[0].input);
            const double b = score[in[1].prev_state] + metrics(t, in[1].prev_state, in[1].input);
            if (a == b && a != unreachable)
                tied = true;
            const int pick = b > a ? 1 : 0;
            next_score[s] = pick ? b : a;
            survivor[t * states + s] = in[pick];
        }
        score.swap(next_score);
    }

    int state = 0;
    if (!terminated) {
        for (int s = 1; s < states; ++s) {
            if (score[s] == score[state])
                tied = true;
            if (score[s] > score[state])
                state = s;
        }
    }

    ViterbiPath path;
    path.metric = score[state];
    path.tied = tied;
    path.info.resize(n);
    path.parity.resize(n);
    for (std::size_t t = n; t-- > 0;) {
        const Transition& tr = survivor[t * states + state];
        path.info[t] = tr.input;
        path.parity[t] = trellis.parity(tr.prev_state, tr.input);
        state = tr.prev_state;
    }
    return path;
}

} // namespace turbo
