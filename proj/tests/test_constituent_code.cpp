#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "turbo/constituent_code.hpp"
#include "turbo/random.hpp"

using namespace turbo;

namespace {

Bits bits_of(std::uint32_t word, std::size_t k)
{
    Bits b(k);
    for (std::size_t i = 0; i < k; ++i)
        b[i] = (word >> i) & 1u;
    return b;
}

BranchMetrics codeword_metrics(const Trellis& t, const EncodedBlock& cw)
{
    // +1 for agreeing with the transmitted label, -1 otherwise
    const std::size_t k = cw.systematic.size();
    BranchMetrics bm(k + cw.tail_systematic.size(), t.num_states());
    for (std::size_t pos = 0; pos < bm.positions(); ++pos) {
        const Bit s = pos < k ? cw.systematic[pos] : cw.tail_systematic[pos - k];
        const Bit p = pos < k ? cw.parity[pos] : cw.tail_parity[pos - k];
        for (int st = 0; st < t.num_states(); ++st)
            for (Bit u = 0; u < 2; ++u)
                bm(pos, st, u) = (u == s ? 1.0 : -1.0) + (t.parity(st, u) == p ? 1.0 : -1.0);
    }
    return bm;
}

} // namespace

TEST(Trellis, UmtsHasEightStatesTwoInTwoOut)
{
    const Trellis t = build_trellis(RscSpec::umts());
    ASSERT_EQ(t.num_states(), 8);
    std::vector<int> in_degree(8, 0);
    for (int s = 0; s < 8; ++s) {
        EXPECT_NE(t.next_state(s, 0), t.next_state(s, 1));
        ++in_degree[t.next_state(s, 0)];
        ++in_degree[t.next_state(s, 1)];
    }
    for (int s = 0; s < 8; ++s) {
        EXPECT_EQ(in_degree[s], 2);
        for (const Transition& tr : t.incoming(s))
            EXPECT_EQ(t.next_state(tr.prev_state, tr.input), s);
    }
}

TEST(Trellis, ZeroStateZeroInputStaysAtZero)
{
    const Trellis t = build_trellis(RscSpec::umts());
    EXPECT_EQ(t.next_state(0, 0), 0);
    EXPECT_EQ(t.parity(0, 0), 0);
}

TEST(Trellis, MemoryOneCodeHasTwoStates)
{
    const Trellis t = build_trellis(RscSpec{0b11, 0b11, 1});
    EXPECT_EQ(t.num_states(), 2);
}

TEST(Trellis, RejectsFeedbackWithoutConstantTerm)
{
    EXPECT_THROW(build_trellis(RscSpec{0b1100, 0b1011, 3}), std::invalid_argument);
}

TEST(Trellis, RejectsMemoryDegreeMismatch)
{
    EXPECT_THROW(build_trellis(RscSpec{0b1101, 0b1011, 4}), std::invalid_argument);
}

TEST(RscEncode, AllZeroInfoGivesAllZeroParity)
{
    const Trellis t = build_trellis(RscSpec::umts());
    for (std::size_t k : {1u, 7u, 40u}) {
        const EncodedBlock e = rsc_encode(t, Bits(k, 0), true);
        EXPECT_EQ(e.parity, Bits(k, 0));
        EXPECT_EQ(e.final_state_before_tail, 0);
        EXPECT_EQ(e.tail_systematic, Bits(3, 0));
        EXPECT_EQ(e.tail_parity, Bits(3, 0));
    }
}

TEST(RscEncode, ImpulseResponseMatchesSeriesDivision)
{
    // (1 + D + D^3) / (1 + D^2 + D^3) over GF(2)
    const std::vector<int> expected = oracle::gf2_series({1, 1, 0, 1}, {1, 0, 1, 1}, 8);
    ASSERT_EQ(expected, (std::vector<int>{1, 1, 1, 1, 0, 0, 1, 0}));

    const Trellis t = build_trellis(RscSpec::umts());
    const EncodedBlock e = rsc_encode(t, Bits{1, 0, 0, 0, 0, 0, 0, 0}, false);
    for (std::size_t i = 0; i < 8; ++i)
        EXPECT_EQ(e.parity[i], expected[i]) << "position " << i;
    EXPECT_TRUE(e.tail_parity.empty());
}

TEST(RscEncode, LongerImpulseResponseMatchesSeriesDivision)
{
    const Trellis t = build_trellis(RscSpec::umts());
    Bits impulse(64, 0);
    impulse[0] = 1;
    const EncodedBlock e = rsc_encode(t, impulse, false);
    const std::vector<int> expected = oracle::gf2_series({1, 1, 0, 1}, {1, 0, 1, 1}, 64);
    for (std::size_t i = 0; i < 64; ++i)
        EXPECT_EQ(e.parity[i], expected[i]);
}

TEST(RscEncode, TerminationReturnsToZeroState)
{
    const Trellis t = build_trellis(RscSpec::umts());
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Bits info = rng.random_bits(1 + rng.below(60));
        const EncodedBlock e = rsc_encode(t, info, true);
        EXPECT_EQ(e.systematic, info);
        int state = e.final_state_before_tail;
        for (Bit u : e.tail_systematic)
            state = t.next_state(state, u);
        EXPECT_EQ(state, 0);
    }
}

TEST(RscEncode, RejectsEmptyInfo)
{
    const Trellis t = build_trellis(RscSpec::umts());
    EXPECT_THROW(rsc_encode(t, Bits{}, true), std::invalid_argument);
}

TEST(RscEncode, IsAPureFunction)
{
    const Trellis t = build_trellis(RscSpec::umts());
    Rng rng(3);
    const Bits info = rng.random_bits(100);
    const EncodedBlock a = rsc_encode(t, info, true);
    const EncodedBlock b = rsc_encode(t, info, true);
    EXPECT_EQ(a.parity, b.parity);
    EXPECT_EQ(a.tail_systematic, b.tail_systematic);
    EXPECT_EQ(a.tail_parity, b.tail_parity);
}

// Distinct info words give distinct parity prefixes (the info -> parity map is one-to-one).
TEST(RscEncode, ParityMapIsInjectiveExhaustively)
{
    const Trellis t = build_trellis(RscSpec::umts());
    for (std::size_t k = 1; k <= 12; ++k) {
        std::set<Bits> seen;
        for (std::uint32_t w = 0; w < (1u << k); ++w)
            seen.insert(rsc_encode(t, bits_of(w, k), false).parity);
        EXPECT_EQ(seen.size(), std::size_t{1} << k) << "k=" << k;
    }
}

TEST(RscEncode, ParityMapIsInjectiveSampled)
{
    const Trellis t = build_trellis(RscSpec::umts());
    Rng rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t k = 13 + rng.below(200);
        const Bits a = rng.random_bits(k);
        Bits b = rng.random_bits(k);
        if (a == b)
            b[rng.below(k)] ^= 1;
        EXPECT_NE(rsc_encode(t, a, false).parity, rsc_encode(t, b, false).parity);
    }
}

TEST(Viterbi, StrongAllZeroMetricsGiveAllZeroPath)
{
    const Trellis t = build_trellis(RscSpec::umts());
    const EncodedBlock zero = rsc_encode(t, Bits(20, 0), true);
    const ViterbiPath p = viterbi_ml_path(t, codeword_metrics(t, zero), true);
    EXPECT_EQ(p.info, Bits(23, 0));
    EXPECT_EQ(p.parity, Bits(23, 0));
    EXPECT_DOUBLE_EQ(p.metric, 2.0 * 23);
}

TEST(Viterbi, RecoversNoiselessCodewords)
{
    const Trellis t = build_trellis(RscSpec::umts());
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = 1 + rng.below(64);
        const Bits info = rng.random_bits(k);
        const EncodedBlock cw = rsc_encode(t, info, true);
        const ViterbiPath p = viterbi_ml_path(t, codeword_metrics(t, cw), true);
        ASSERT_EQ(Bits(p.info.begin(), p.info.begin() + k), info);
        ASSERT_EQ(Bits(p.parity.begin(), p.parity.begin() + k), cw.parity);
        ASSERT_EQ(Bits(p.info.begin() + k, p.info.end()), cw.tail_systematic);
    }
}

TEST(Viterbi, AllEqualMetricsSignalTie)
{
    const Trellis t = build_trellis(RscSpec::umts());
    const BranchMetrics flat(16, t.num_states());
    EXPECT_TRUE(viterbi_ml_path(t, flat, true).tied);
    EXPECT_TRUE(viterbi_ml_path(t, flat, false).tied);
}

TEST(Viterbi, UnterminatedPathMayEndAnywhere)
{
    const Trellis t = build_trellis(RscSpec::umts());
    const Bits info{1, 0, 1, 1, 0};
    const EncodedBlock cw = rsc_encode(t, info, false);
    BranchMetrics bm(info.size(), t.num_states());
    for (std::size_t pos = 0; pos < info.size(); ++pos)
        for (int st = 0; st < 8; ++st)
            for (Bit u = 0; u < 2; ++u)
                bm(pos, st, u) = (u == info[pos]) + (t.parity(st, u) == cw.parity[pos]);
    const ViterbiPath p = viterbi_ml_path(t, bm, false);
    EXPECT_EQ(p.info, info);
    EXPECT_DOUBLE_EQ(p.metric, 10.0);
}
