#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "turbo/constituent_code.hpp"
#include "turbo/interleaver.hpp"
#include "turbo/types.hpp"

namespace turbo {

enum class Criterion { fixed, hda, pcs, crc, genie };

enum class StopReason { none, pcs_a, pcs_b, hda, crc, genie, max_iters };

inline std::string_view to_string(Criterion c)
{
    switch (c) {
    case Criterion::fixed: return "fixed";
    case Criterion::hda: return "hda";
    case Criterion::pcs: return "pcs";
    case Criterion::crc: return "crc";
    case Criterion::genie: return "genie";
    }
    return "?";
}

inline std::string_view to_string(StopReason r)
{
    switch (r) {
    case StopReason::none: return "none";
    case StopReason::pcs_a: return "pcs_a";
    case StopReason::pcs_b: return "pcs_b";
    case StopReason::hda: return "hda";
    case StopReason::crc: return "crc";
    case StopReason::genie: return "genie";
    case StopReason::max_iters: return "max_iters";
    }
    return "?";
}

inline Criterion parse_criterion(std::string_view s)
{
    for (Criterion c : {Criterion::fixed, Criterion::hda, Criterion::pcs, Criterion::crc, Criterion::genie})
        if (to_string(c) == s)
            return c;
    throw std::invalid_argument("unknown stopping criterion '" + std::string(s) + "'");
}

/// Hard decisions of one SISO pass, in that SISO's own index order.
/// SISO 1 works in natural order, SISO 2 in interleaved order.
struct HalfIterationSnapshot {
    int half_index = 0; // 1 = SISO1 of iteration 1, 2 = SISO2 of iteration 1, ...
    int which_siso = 1;
    Bits sys_hard;
    Bits par_hard;
    bool sys_tie = false;
    bool par_tie = false;
};

struct StopDecision {
    bool stop = false; // a criterion fired before the iteration budget ran out
    int half_index = 0;
    StopReason reason = StopReason::none;
    bool deferred_by_tie = false; // a matching check was vetoed by the tie guard
};

namespace detail {

inline void check_pair(const HalfIterationSnapshot& current, const HalfIterationSnapshot& other,
                       const Permutation& perm)
{
    if (current.which_siso == other.which_siso)
        throw std::invalid_argument("stopping check needs snapshots from opposite SISOs");
    const std::size_t k = perm.size();
    if (current.sys_hard.size() != k || current.par_hard.size() != k || other.sys_hard.size() != k)
        throw std::invalid_argument("stopping check: snapshot length does not match interleaver length " +
                                    std::to_string(k));
}

/// Moves the other SISO's systematic decisions into the current SISO's order.
inline Bits to_current_domain(const HalfIterationSnapshot& current, const HalfIterationSnapshot& other,
                              const Permutation& perm)
{
    return current.which_siso == 2 ? perm.apply(other.sys_hard) : perm.apply_inverse(other.sys_hard);
}

} // namespace detail

/// Parity-check stopping: re-encode the other SISO's systematic decisions
/// with the current constituent code and compare with the current parity
/// decisions over the k information positions. which_siso == 2 is flag (a),
/// which_siso == 1 is flag (b).
inline bool pcs_check(const HalfIterationSnapshot& current, const HalfIterationSnapshot& other_prev,
                      const Permutation& perm, const Trellis& trellis)
{
    detail::check_pair(current, other_prev, perm);
    const Bits mapped = detail::to_current_domain(current, other_prev, perm);
    int state = 0;
    for (std::size_t i = 0; i < mapped.size(); ++i) {
        if (trellis.parity(state, mapped[i]) != current.par_hard[i])
            return false;
        state = trellis.next_state(state, mapped[i]);
    }
    return true;
}

/// Hard-decision-aided stopping: the two SISOs agree on every systematic bit.
inline bool hda_check(const HalfIterationSnapshot& current, const HalfIterationSnapshot& other_prev,
                      const Permutation& perm)
{
    detail::check_pair(current, other_prev, perm);
    return detail::to_current_domain(current, other_prev, perm) == current.sys_hard;
}

/// Vetoes an early stop when any LLR the criterion reads was exactly zero.
inline bool tie_guard(const HalfIterationSnapshot& current, const HalfIterationSnapshot& other_prev,
                      Criterion criterion)
{
    switch (criterion) {
    case Criterion::hda:
    case Criterion::crc:
        return !current.sys_tie;
    case Criterion::pcs:
        return !(current.par_tie || other_prev.sys_tie);
    case Criterion::fixed:
    case Criterion::genie:
        return true;
    }
    return true;
}

/// Decisions in natural order equal the transmitted information.
inline bool genie_check(const HalfIterationSnapshot& current, std::span<const Bit> truth, const Permutation& perm)
{
    if (current.sys_hard.size() != truth.size() || truth.size() != perm.size())
        throw std::invalid_argument("genie_check: length mismatch");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const std::size_t natural = current.which_siso == 2 ? static_cast<std::size_t>(perm.forward()[i]) : i;
        if (current.sys_hard[i] != truth[natural])
            return false;
    }
    return true;
}

/// CRC with generator D^24 + D^23 + D^6 + D^5 + D + 1, zero initial register,
/// no reflection, no output xor. Bits are processed highest degree first.
struct CrcSpec {
    int width = 24;
    std::uint32_t poly = 0x800063; // generator without its leading D^24 term
};

namespace detail {

inline std::uint32_t crc_register(std::span<const Bit> bits, const CrcSpec& spec)
{
    const std::uint32_t top = 1u << (spec.width - 1);
    const std::uint32_t mask = (spec.width == 32) ? ~0u : ((1u << spec.width) - 1);
    std::uint32_t reg = 0;
    for (Bit b : bits) {
        const bool feedback = ((reg & top) != 0) != (b != 0);
        reg = (reg << 1) & mask;
        if (feedback)
            reg ^= spec.poly;
    }
    return reg;
}

} // namespace detail

inline Bits crc_attach(std::span<const Bit> payload, const CrcSpec& spec = {})
{
    if (payload.empty())
        throw std::invalid_argument("crc_attach: empty payload");
    const std::uint32_t rem = detail::crc_register(payload, spec);
    Bits msg(payload.begin(), payload.end());
    for (int i = spec.width - 1; i >= 0; --i)
        msg.push_back(static_cast<Bit>((rem >> i) & 1u));
    return msg;
}

inline bool crc_check(std::span<const Bit> message, const CrcSpec& spec = {})
{
    if (message.size() <= static_cast<std::size_t>(spec.width))
        throw std::invalid_argument("crc_check: message must be longer than the CRC");
    return detail::crc_register(message, spec) == 0;
}

} // namespace turbo
