// Copyright 2026 The ldpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpc/randcore.h"

#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace ldpc {
namespace {

Seed TestMaster(uint64_t v = 42) { return Seed::FromIndex(v, 64); }

BitStream Stream(uint64_t client = 0) {
  return DeriveStream(TestMaster(), 7, client);
}

// Stream whose bits are the binary expansion of `bits` (LSB first).
BitStream CountingStream(uint64_t bits, uint64_t nbits) {
  return BitStream::FromBits(Seed::FromIndex(bits, nbits).bytes(), nbits);
}

int Hamming(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
  int d = 0;
  for (size_t i = 0; i < a.size(); ++i) d += std::popcount<uint8_t>(a[i] ^ b[i]);
  return d;
}

TEST(SeedTest, HexRoundTrip) {
  const Seed s = Seed::FromIndex(0xabcdef, 24);
  EXPECT_EQ(s.ToHex(), "efcdab");
  EXPECT_EQ(Seed::FromHex(s.ToHex(), 24), s);
  EXPECT_EQ(s.ToIndex(), 0xabcdefu);
}

TEST(SeedTest, RejectsBadWidthsAndPadding) {
  EXPECT_THROW(Seed({0x01, 0x02}, 24), std::invalid_argument);
  // Bit 4 set but only 4 bits allowed.
  EXPECT_THROW(Seed({0x10}, 4), std::invalid_argument);
  EXPECT_THROW(Seed::FromIndex(16, 4), std::invalid_argument);
}

TEST(SeedTest, BitAccessorMatchesIndex) {
  const Seed s = Seed::FromIndex(0b1011, 4);
  EXPECT_TRUE(s.bit(0));
  EXPECT_TRUE(s.bit(1));
  EXPECT_FALSE(s.bit(2));
  EXPECT_TRUE(s.bit(3));
}

TEST(BitStreamTest, ReadsLsbFirstAndThrowsWhenExhausted) {
  BitStream s = CountingStream(0b110, 3);
  EXPECT_FALSE(s.ReadBit());
  EXPECT_TRUE(s.ReadBit());
  EXPECT_TRUE(s.ReadBit());
  EXPECT_EQ(s.consumed(), 3u);
  EXPECT_THROW(s.ReadBit(), StreamExhausted);
}

TEST(BitStreamTest, MultiBitReadMatchesSingleReads) {
  BitStream a = Stream(1);
  BitStream b = Stream(1);
  for (int w : {1, 3, 8, 13, 64, 53, 7}) {
    uint64_t v = 0;
    for (int i = 0; i < w; ++i) v |= static_cast<uint64_t>(b.ReadBit()) << i;
    EXPECT_EQ(a.ReadBits(w), v) << w;
  }
}

TEST(BitStreamTest, KeystreamLimitIsEnforced) {
  std::array<uint8_t, 32> key{};
  std::array<uint8_t, 12> nonce{};
  BitStream s = BitStream::FromKey(key, nonce, 10);
  s.ReadBits(10);
  EXPECT_THROW(s.ReadBit(), StreamExhausted);
}

TEST(BitStreamTest, RecordingCapturesConsumedBits) {
  BitStream s = Stream(2);
  s.ReadBits(5);
  s.StartRecording();
  const uint64_t v = s.ReadBits(20);
  uint64_t n = 0;
  const auto rec = s.TakeRecording(&n);
  EXPECT_EQ(n, 20u);
  BitStream replay = BitStream::FromBits(rec, n);
  EXPECT_EQ(replay.ReadBits(20), v);
}

TEST(GeneratorTest, ExpansionIsDeterministic) {
  ChaChaGenerator g(256, 4096);
  BitStream e = Stream(3);
  const Seed s = g.DrawSeed(e);
  EXPECT_EQ(g.Expand(s), g.Expand(s));
  EXPECT_EQ(g.Expand(s).size(), 512u);
}

TEST(GeneratorTest, IdentityOutputsTheSeed) {
  IdentityGenerator g(12);
  for (uint64_t i : {0ULL, 1ULL, 0xabcULL, 0xfffULL}) {
    const Seed s = Seed::FromIndex(i, 12);
    EXPECT_EQ(g.Expand(s), s.bytes());
    BitStream b = g.Open(s);
    EXPECT_EQ(b.ReadBits(12), i);
    EXPECT_THROW(b.ReadBit(), StreamExhausted);
  }
}

TEST(GeneratorTest, WidthMismatchThrows) {
  ChaChaGenerator g(128, 1024);
  EXPECT_THROW(g.Open(Seed::FromIndex(1, 64)), std::invalid_argument);
}

TEST(GeneratorTest, DistinctSeedsDifferInAboutHalfTheBits) {
  ChaChaGenerator g(256, 256);
  BitStream e = Stream(4);
  double total = 0;
  const int pairs = 1000;
  for (int i = 0; i < pairs; ++i) {
    total += Hamming(g.Expand(g.DrawSeed(e)), g.Expand(g.DrawSeed(e)));
  }
  // Mean of Bin(256, 1/2) averaged over 1000 pairs: sd 8 / sqrt(1000).
  EXPECT_NEAR(total / pairs, 128.0, 1.5);
}

TEST(GeneratorTest, SeedWidthsBelowAByteArePadded) {
  ChaChaGenerator g(10, 64);
  BitStream e = Stream(5);
  for (int i = 0; i < 100; ++i) {
    const Seed s = g.DrawSeed(e);
    EXPECT_EQ(s.bits(), 10u);
    EXPECT_LT(s.ToIndex(), 1024u);
  }
}

TEST(GeneratorTest, TableGeneratorReplaysRecordedSamples) {
  std::vector<uint64_t> draws;
  auto sampler = [&](BitStream& s) { draws.push_back(UniformMod(s, 1000)); };
  auto table = TableGenerator::Record(sampler, 50, TestMaster());
  ASSERT_EQ(draws.size(), 50u);
  EXPECT_EQ(table->seed_count(), 50u);
  for (uint64_t i = 0; i < 50; ++i) {
    BitStream s = table->Open(Seed::FromIndex(i, table->spec().seed_bits));
    EXPECT_EQ(UniformMod(s, 1000), draws[i]);
  }
}

TEST(DeriveStreamTest, LabelsGiveIndependentStreams) {
  BitStream a = DeriveStream(TestMaster(), 1, 0);
  BitStream b = DeriveStream(TestMaster(), 1, 1);
  BitStream c = DeriveStream(TestMaster(), 2, 0);
  BitStream a2 = DeriveStream(TestMaster(), 1, 0);
  const uint64_t va = a.ReadBits(64);
  EXPECT_EQ(va, a2.ReadBits(64));
  EXPECT_NE(va, b.ReadBits(64));
  EXPECT_NE(va, c.ReadBits(64));
}

TEST(BernoulliTest, Degenerate) {
  BitStream s = Stream(6);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(Bernoulli(s, 0.0));
    EXPECT_TRUE(Bernoulli(s, 1.0));
    EXPECT_FALSE(BernoulliRational(s, 0, 7));
    EXPECT_TRUE(BernoulliRational(s, 7, 7));
  }
}

TEST(BernoulliTest, DyadicProbabilitiesAreExactByEnumeration) {
  // A probability with k binary digits reads at most k bits.
  for (auto [num, k] : {std::pair{3, 2}, {5, 3}, {1, 4}, {11, 4}}) {
    const double prob = std::ldexp(num, -k);
    int ones = 0;
    for (uint64_t bits = 0; bits < (1u << k); ++bits) {
      BitStream s = CountingStream(bits, k);
      ones += Bernoulli(s, prob);
      BitStream r = CountingStream(bits, k);
      BitStream t = CountingStream(bits, k);
      EXPECT_EQ(BernoulliRational(r, num, uint64_t{1} << k),
                Bernoulli(t, prob));
    }
    EXPECT_EQ(ones, num) << num << "/2^" << k;
  }
}

TEST(BernoulliTest, ThreeQuartersMonteCarlo) {
  BitStream s = Stream(7);
  const int n = 100000;
  int a = 0, b = 0;
  for (int i = 0; i < n; ++i) {
    a += Bernoulli(s, 0.75);
    b += BernoulliRational(s, 3, 4);
  }
  EXPECT_NEAR(a / double(n), 0.75, 0.01);
  EXPECT_NEAR(b / double(n), 0.75, 0.01);
}

TEST(BernoulliTest, NonDyadicRationalMonteCarlo) {
  BitStream s = Stream(8);
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += BernoulliRational(s, 77, 307);
  EXPECT_NEAR(ones / double(n), 77.0 / 307.0, 0.01);
}

TEST(BernoulliTest, RejectsBadProbabilities) {
  BitStream s = Stream(9);
  EXPECT_THROW(Bernoulli(s, -0.1), std::invalid_argument);
  EXPECT_THROW(Bernoulli(s, 1.5), std::invalid_argument);
  EXPECT_THROW(Bernoulli(s, std::nan("")), std::invalid_argument);
  EXPECT_THROW(BernoulliRational(s, 3, 2), std::invalid_argument);
}

TEST(UniformModTest, SingletonConsumesNothing) {
  BitStream s = CountingStream(0, 0);
  EXPECT_EQ(UniformMod(s, 1), 0u);
  EXPECT_EQ(s.consumed(), 0u);
}

TEST(UniformModTest, PowerOfTwoIsARawRead) {
  BitStream a = Stream(10);
  BitStream b = Stream(10);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(UniformMod(a, 1 << 16), b.ReadBits(16));
}

TEST(UniformModTest, ZeroModuloBiasByEnumeration) {
  // Every accepted word appears once; the rest are rejected and would read
  // further bits.
  for (uint64_t m : {3ULL, 5ULL, 12ULL, 100ULL, 307ULL, 4095ULL}) {
    const int w = std::bit_width(m - 1);
    std::vector<int> hits(m, 0);
    int rejected = 0;
    for (uint64_t bits = 0; bits < (uint64_t{1} << w); ++bits) {
      BitStream s = CountingStream(bits, w);
      try {
        ++hits[UniformMod(s, m)];
      } catch (const StreamExhausted&) {
        ++rejected;
      }
    }
    for (uint64_t v = 0; v < m; ++v) EXPECT_EQ(hits[v], 1) << m << " " << v;
    EXPECT_EQ(rejected, (1 << w) - static_cast<int>(m));
  }
}

TEST(UniformModTest, FiveMonteCarlo) {
  BitStream s = Stream(11);
  const int n = 100000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < n; ++i) ++counts[UniformMod(s, 5)];
  double chi2 = 0;
  for (int c : counts) {
    EXPECT_NEAR(c / double(n), 0.2, 0.02);
    chi2 += (c - n / 5.0) * (c - n / 5.0) / (n / 5.0);
  }
  // 4 degrees of freedom; 18.47 is the 0.999 quantile.
  EXPECT_LT(chi2, 18.47);
}

TEST(UniformModTest, ZeroModulusThrows) {
  BitStream s = Stream(12);
  EXPECT_THROW(UniformMod(s, 0), std::invalid_argument);
}

TEST(UnitVectorTest, NormIsOne) {
  BitStream s = Stream(13);
  for (size_t d : {1u, 2u, 3u, 10u, 1000u}) {
    for (int i = 0; i < 20; ++i) {
      const auto v = UniformUnitVector(s, d);
      double n2 = 0;
      for (double x : v) n2 += x * x;
      EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-12);
    }
  }
}

TEST(UnitVectorTest, OneDimensionalIsAFairSign) {
  BitStream s = Stream(14);
  const int n = 20000;
  int plus = 0;
  for (int i = 0; i < n; ++i) {
    const double v = UniformUnitVector(s, 1)[0];
    ASSERT_TRUE(v == 1.0 || v == -1.0);
    plus += v > 0;
  }
  EXPECT_NEAR(plus / double(n), 0.5, 0.015);
}

TEST(UnitVectorTest, ThreeDimensionalMeanIsZero) {
  BitStream s = Stream(15);
  const int n = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const auto v = UniformUnitVector(s, 3);
    sum += v[0];
    sq += v[0] * v[0];
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  // E[v_1^2] = 1/d.
  EXPECT_NEAR(sq / n, 1.0 / 3, 0.01);
}

TEST(UnitVectorTest, ZeroDimensionThrows) {
  BitStream s = Stream(16);
  EXPECT_THROW(UniformUnitVector(s, 0), std::invalid_argument);
}

TEST(UnitVectorTest, ClientAndServerAgreeBitForBit) {
  ChaChaGenerator g;
  BitStream e = Stream(17);
  const Seed s = g.DrawSeed(e);
  BitStream client = g.Open(s);
  BitStream server = g.Open(s);
  EXPECT_EQ(UniformUnitVector(client, 500), UniformUnitVector(server, 500));
}

TEST(NormalTest, MomentsMatchStandardNormal) {
  BitStream s = Stream(18);
  std::vector<double> x(200000);
  FillStandardNormal(s, x);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.01);
}

}  // namespace
}  // namespace ldpc
