#include <gtest/gtest.h>

#include <cmath>

#include "turbo/siso.hpp"
#include "turbo/verify.hpp"

using namespace turbo;

namespace {

const Trellis& umts()
{
    static const Trellis t = build_trellis(RscSpec::umts());
    return t;
}

SisoInput zero_input(std::size_t k)
{
    return SisoInput{Llrs(k + 3, 0.0), Llrs(k + 3, 0.0), Llrs(k, 0.0)};
}

} // namespace

TEST(MaxStar, KnownValues)
{
    EXPECT_NEAR(max_star(0.0, 0.0), std::log(2.0), 1e-15);
    EXPECT_EQ(max_star(3.5, kLogZero), 3.5);
    EXPECT_EQ(max_star(kLogZero, -2.0), -2.0);
    const long double ref = std::log(std::exp(5.0L) + 1.0L);
    EXPECT_NEAR(max_star(5.0, 0.0), static_cast<double>(ref), 1e-12);
    EXPECT_NEAR(max_star(5.0, 0.0), 5.0067153, 1e-7);
}

TEST(MaxStar, NeverBelowMaxAndSymmetric)
{
    Rng rng(8);
    for (int i = 0; i < 10000; ++i) {
        const double a = 20 * rng.gaussian(), b = 20 * rng.gaussian();
        EXPECT_GE(max_star(a, b), std::max(a, b));
        EXPECT_LE(max_star(a, b), std::max(a, b) + std::log(2.0) + 1e-15);
        EXPECT_EQ(max_star(a, b), max_star(b, a));
    }
}

TEST(Siso, ZeroInputGivesZeroOutput)
{
    for (Combiner c : {Combiner::log_map, Combiner::max_log_map}) {
        const SisoOutput out = siso_decode(umts(), zero_input(12), c);
        for (std::size_t i = 0; i < 12; ++i) {
            EXPECT_NEAR(out.sys_post[i], 0.0, 1e-12);
            EXPECT_NEAR(out.par_post[i], 0.0, 1e-12);
            EXPECT_NEAR(out.extrinsic[i], 0.0, 1e-12);
        }
    }
}

TEST(Siso, NearNoiselessInputRecoversCodeword)
{
    Rng rng(21);
    for (Combiner c : {Combiner::log_map, Combiner::max_log_map}) {
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t k = 1 + rng.below(100);
            const Bits info = rng.random_bits(k);
            const EncodedBlock cw = rsc_encode(umts(), info, true);
            SisoInput in;
            for (std::size_t i = 0; i < k + 3; ++i) {
                const Bit s = i < k ? cw.systematic[i] : cw.tail_systematic[i - k];
                const Bit p = i < k ? cw.parity[i] : cw.tail_parity[i - k];
                in.sys.push_back(s ? -50.0 : 50.0);
                in.par.push_back(p ? -50.0 : 50.0);
            }
            in.apriori.assign(k, 0.0);
            const SisoOutput out = siso_decode(umts(), in, c);
            EXPECT_EQ(hard_decide(out.sys_post).bits, info);
            EXPECT_EQ(hard_decide(out.par_post).bits, cw.parity);
        }
    }
}

TEST(Siso, LogMapMatchesBruteForceK4)
{
    const verify::MarginalsReport r = verify::log_map_vs_brute_force(4, 100, 31);
    EXPECT_EQ(r.trials, 100u);
    EXPECT_LE(r.max_sys_error, 1e-6);
    EXPECT_LE(r.max_par_error, 1e-6);
}

TEST(Siso, LogMapMatchesBruteForceK8)
{
    const verify::MarginalsReport r = verify::log_map_vs_brute_force(8, 100, 32);
    EXPECT_LE(r.max_sys_error, 1e-6);
    EXPECT_LE(r.max_par_error, 1e-6);
}

// Memory-1 accumulator 1/(1+D), k = 1: the two terminated codewords are
// (u=0: s=0 p=0 | tail s=0 p=0) and (u=1: s=1 p=1 | tail s=1 p=0).
TEST(Siso, TwoCodewordHandComputation)
{
    const Trellis t = build_trellis(RscSpec{0b11, 0b01, 1});
    const EncodedBlock one = rsc_encode(t, Bits{1}, true);
    ASSERT_EQ(one.parity, Bits{1});
    ASSERT_EQ(one.tail_systematic, Bits{1});
    ASSERT_EQ(one.tail_parity, Bits{0});

    const SisoInput in{{0.7, -0.4}, {1.1, 0.3}, {-0.2}};
    // log P(c) up to a constant: 1/2 * sum of x * L over the codeword labels
    const double m0 = 0.5 * ((0.7 - 0.2) + 1.1 + (-0.4) + 0.3);
    const double m1 = 0.5 * (-(0.7 - 0.2) - 1.1 - (-0.4) + 0.3);
    for (Combiner c : {Combiner::log_map, Combiner::max_log_map}) {
        const SisoOutput out = siso_decode(t, in, c);
        EXPECT_NEAR(out.sys_post[0], m0 - m1, 1e-12);
        EXPECT_NEAR(out.par_post[0], m0 - m1, 1e-12);
        EXPECT_NEAR(out.extrinsic[0], m0 - m1 - 0.7 + 0.2, 1e-12);
    }
}

TEST(Siso, MaxLogDecisionsFollowMlPathK8)
{
    const verify::MlPathReport r = verify::max_log_map_vs_viterbi(8, 10000, 41);
    EXPECT_EQ(r.mismatches, 0u);
    EXPECT_EQ(r.inconsistent, 0u);
    EXPECT_LT(r.ties * 100, r.trials);
}

TEST(Siso, MaxLogDecisionsFollowMlPathK40)
{
    const verify::MlPathReport r = verify::max_log_map_vs_viterbi(40, 10000, 42);
    EXPECT_EQ(r.mismatches, 0u);
    EXPECT_EQ(r.inconsistent, 0u);
    EXPECT_LT(r.ties * 100, r.trials);
}

TEST(Siso, StrongLlrsAgreeAcrossCombiners)
{
    Rng rng(51);
    std::size_t compared = 0, agreed = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const SisoInput in = verify::random_siso_input(umts(), 40, rng, 4.0, 0.5);
        const SisoOutput a = siso_decode(umts(), in, Combiner::log_map);
        const SisoOutput b = siso_decode(umts(), in, Combiner::max_log_map);
        for (std::size_t i = 0; i < 40; ++i) {
            if (std::abs(a.sys_post[i]) < 20)
                continue;
            ++compared;
            agreed += (a.sys_post[i] < 0) == (b.sys_post[i] < 0);
        }
    }
    ASSERT_GT(compared, 0u);
    EXPECT_EQ(agreed, compared);
}

TEST(Siso, NormalizationDoesNotChangeOutputs)
{
    Rng rng(61);
    for (Combiner c : {Combiner::log_map, Combiner::max_log_map}) {
        for (int trial = 0; trial < 200; ++trial) {
            const SisoInput in = verify::random_siso_input(umts(), 100, rng);
            const SisoOutput a = siso_decode(umts(), in, c, SisoOptions{true});
            const SisoOutput b = siso_decode(umts(), in, c, SisoOptions{false});
            for (std::size_t i = 0; i < 100; ++i) {
                ASSERT_NEAR(a.sys_post[i], b.sys_post[i], 1e-9);
                ASSERT_NEAR(a.par_post[i], b.par_post[i], 1e-9);
            }
        }
    }
}

TEST(Siso, ExtrinsicExcludesChannelAndPrior)
{
    Rng rng(71);
    const SisoInput in = verify::random_siso_input(umts(), 50, rng);
    const SisoOutput out = siso_decode(umts(), in, Combiner::log_map);
    for (std::size_t i = 0; i < 50; ++i)
        EXPECT_DOUBLE_EQ(out.extrinsic[i], out.sys_post[i] - in.sys[i] - in.apriori[i]);
}

TEST(Siso, DecoderInstanceIsReusable)
{
    Rng rng(72);
    SisoDecoder dec(umts());
    const SisoInput a = verify::random_siso_input(umts(), 60, rng);
    const SisoInput b = verify::random_siso_input(umts(), 25, rng);
    const SisoOutput first = dec.decode(a, Combiner::log_map);
    dec.decode(b, Combiner::max_log_map);
    EXPECT_EQ(dec.decode(a, Combiner::log_map).sys_post, first.sys_post);
}

TEST(Siso, RejectsMismatchedLengths)
{
    SisoInput in = zero_input(10);
    in.par.pop_back();
    EXPECT_THROW(siso_decode(umts(), in, Combiner::log_map), std::invalid_argument);
    EXPECT_THROW(siso_decode(umts(), SisoInput{}, Combiner::log_map), std::invalid_argument);
}

TEST(Siso, BruteForceRefusesLongBlocks)
{
    EXPECT_THROW(brute_force_marginals(umts(), zero_input(17)), std::invalid_argument);
}

TEST(HardDecide, SignConventionAndTies)
{
    const HardDecisions a = hard_decide(std::vector<double>{2.0, -0.1, 1e-300, -3.0});
    EXPECT_EQ(a.bits, (Bits{0, 1, 0, 1}));
    EXPECT_FALSE(a.tie);
    const HardDecisions b = hard_decide(std::vector<double>{1.0, 0.0, -1.0});
    EXPECT_EQ(b.bits, (Bits{0, 0, 1}));
    EXPECT_TRUE(b.tie);
    EXPECT_TRUE(hard_decide(std::vector<double>{-0.0}).tie);
}
