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

#include "ldpc/freq.h"

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ldpc/compress.h"
#include "ldpc/field.h"
#include "ldpc/randcore.h"

namespace ldpc::freq {
namespace {

constexpr auto kSym = RapporVariant::kDeletionSymmetric;
constexpr auto kAsym = RapporVariant::kReplacementAsymmetric;

BitStream Stream(uint64_t label) {
  return DeriveStream(Seed::FromIndex(2024, 64), 11, label);
}

// k = 4, p = 5, alpha0 = 2/5, alpha1 = 3/5.
RapporParams SmallParams() { return ParamsForField(4, 5, 1, std::log(1.5), kSym); }

// Independent evaluation of phi(z(j)) with base-q digits of j.
uint64_t OracleEval(const AffineFn& phi, uint64_t j, uint64_t q, uint32_t dim) {
  std::vector<uint64_t> digits(dim);
  for (uint32_t u = dim; u-- > 0;) {
    digits[u] = j % q;
    j /= q;
  }
  uint64_t acc = phi.coeffs[0] % q;
  for (uint32_t u = 0; u < dim; ++u) {
    acc = (acc + digits[u] * phi.coeffs[u + 1]) % q;
  }
  return acc;
}

std::vector<double> OracleHistogram(const std::vector<AffineFn>& reports,
                                    const RapporParams& params) {
  std::vector<double> est(params.k);
  const double a0 = double(params.alpha0_count) / params.p;
  const double a1 = double(params.alpha1_num) / params.alpha1_den;
  for (uint64_t j = 1; j <= params.k; ++j) {
    double sum = 0;
    for (const auto& phi : reports) {
      sum += OracleEval(phi, j, params.p, params.dim) < params.alpha0_count;
    }
    est[j - 1] = (sum - a0 * reports.size()) / (a1 - a0);
  }
  return est;
}

TEST(ParamsTest, LnThreeWithTenItems) {
  const auto params = ChooseParams(10, std::log(3.0), kSym);
  // max(3, 1/ln 3) / 0.01 = 300; next prime 307; ceil(307 / 4) = 77.
  EXPECT_EQ(params.p, 307u);
  EXPECT_EQ(params.alpha0_count, 77u);
  EXPECT_EQ(params.alpha1_num, 230u);
  EXPECT_EQ(params.alpha1_den, 307u);
  EXPECT_DOUBLE_EQ(params.realized_eps, std::log(230.0 / 77.0));
  EXPECT_LE(params.realized_eps, std::log(3.0));
  EXPECT_EQ(MessageBits(params), 18u);
}

TEST(ParamsTest, KFloorsTheField) {
  const auto params = ChooseParams(1000, std::log(3.0), kSym);
  EXPECT_EQ(params.p, 1009u);
  EXPECT_EQ(params.alpha0_count, 253u);  // ceil(1009 / 4)
}

TEST(ParamsTest, SmallEpsUsesInverseEps) {
  // max(e^0.1, 10) / 0.1 = 100; next prime 101.
  const auto params = ChooseParams(5, 0.1, kSym, 0.1);
  EXPECT_EQ(params.p, 101u);
}

TEST(ParamsTest, AsymmetricHasHalf) {
  const auto params = ChooseParams(10, std::log(3.0), kAsym);
  EXPECT_EQ(params.alpha1_num, 1u);
  EXPECT_EQ(params.alpha1_den, 2u);
  EXPECT_DOUBLE_EQ(params.alpha1(), 0.5);
}

TEST(ParamsTest, ExactRoundingOnSmallField) {
  const auto params = SmallParams();
  EXPECT_EQ(params.alpha0_count, 2u);
  EXPECT_EQ(params.alpha1_num, 3u);
  EXPECT_DOUBLE_EQ(DeletionRatioBound(params), 1.5);
  EXPECT_DOUBLE_EQ(ReplacementRatioBound(params), 2.25);
}

TEST(ParamsTest, ClosestEpsNeverWorseThanDefault) {
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    const auto base = ChooseParams(50, eps, kSym);
    const auto best = ChooseParamsClosestEps(50, eps, kSym);
    EXPECT_GE(best.realized_eps, base.realized_eps);
    EXPECT_LE(best.realized_eps, eps + 1e-12);
    EXPECT_TRUE(field::IsPrime(best.p));
  }
}

TEST(ParamsTest, GeneralizedDimension) {
  EXPECT_EQ(DimensionFor(8, 3), 2u);
  EXPECT_EQ(DimensionFor(9, 3), 3u);
  EXPECT_EQ(DimensionFor(2, 3), 1u);
  const auto params = ChooseGeneralizedParams(100000, std::log(3.0), kSym);
  EXPECT_EQ(params.p, 307u);
  EXPECT_EQ(params.dim, 3u);
  EXPECT_EQ(MessageBits(params), 36u);
}

TEST(ParamsTest, ValidationErrors) {
  EXPECT_THROW(ChooseParams(1, 1.0, kSym), std::invalid_argument);
  EXPECT_THROW(ChooseParams(10, 0.0, kSym), std::invalid_argument);
  EXPECT_THROW(ChooseParams(10, 1.0, kSym, 0.0), std::invalid_argument);
  EXPECT_THROW(ChooseParams(10, 50.0, kSym), std::overflow_error);
  EXPECT_THROW(ParamsForField(10, 9, 1, 1.0, kSym), std::invalid_argument);
  EXPECT_THROW(ParamsForField(10, 5, 1, 1.0, kSym), std::invalid_argument);
  RapporParams bad = SmallParams();
  bad.alpha1_num = 2;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(ParamsTest, Noiseless) {
  const auto params = NoiselessParams(10);
  EXPECT_EQ(params.alpha0_count, 0u);
  EXPECT_DOUBLE_EQ(params.alpha1(), 1.0);
  BitStream s = Stream(1);
  for (uint64_t j = 1; j <= 10; ++j) {
    const auto bits = RapporEncode(j, params, s);
    for (uint64_t i = 1; i <= 10; ++i) EXPECT_EQ(bits[i - 1], i == j);
  }
}

TEST(IndexVectorTest, MostSignificantDigitFirst) {
  RapporParams params = ParamsForField(8, 3, 2, std::log(2.0), kSym);
  EXPECT_EQ(IndexVector(1, params), (std::vector<uint64_t>{0, 1}));
  EXPECT_EQ(IndexVector(5, params), (std::vector<uint64_t>{1, 2}));
  EXPECT_EQ(IndexVector(8, params), (std::vector<uint64_t>{2, 2}));
  EXPECT_THROW(IndexVector(0, params), std::out_of_range);
  EXPECT_THROW(IndexVector(9, params), std::out_of_range);
}

TEST(ConditionedSamplerTest, PartitionSizes) {
  // Over GF(5) with a = 2: |Phi_{j,1}| = 2 * 5 and |Phi_{j,0}| = 3 * 5.
  const auto params = SmallParams();
  for (uint64_t j = 1; j <= 4; ++j) {
    int ones = 0;
    for (uint64_t i = 0; i < 25; ++i) {
      ones += DecodeBit(AffineFromIndex(i, params), j, params);
    }
    EXPECT_EQ(ones, 10);
  }
}

TEST(ConditionedSamplerTest, UniformOnItsPartition) {
  const auto params = SmallParams();
  BitStream s = Stream(2);
  const int n = 60000;
  for (bool b : {true, false}) {
    std::map<uint64_t, int> counts;
    for (int i = 0; i < n; ++i) {
      const auto phi = SamplePhiConditioned(3, b, params, s);
      ASSERT_EQ(DecodeBit(phi, 3, params), b);
      ++counts[AffineIndex(phi, params)];
    }
    const size_t support = b ? 10 : 15;
    ASSERT_EQ(counts.size(), support);
    for (const auto& [idx, c] : counts) {
      EXPECT_NEAR(c / double(n), 1.0 / support, 0.01) << idx;
    }
  }
}

TEST(ConditionedSamplerTest, EmptyPartitionThrows) {
  auto params = NoiselessParams(4);
  BitStream s = Stream(3);
  EXPECT_THROW(SamplePhiConditioned(1, true, params, s), std::domain_error);
}

TEST(ExactLawTest, UniformPhiPairsFactorize) {
  const auto params = SmallParams();
  for (uint64_t i = 1; i <= 4; ++i) {
    for (uint64_t i2 = i + 1; i2 <= 4; ++i2) {
      int joint[2][2] = {};
      for (uint64_t f = 0; f < 25; ++f) {
        const auto phi = AffineFromIndex(f, params);
        ++joint[DecodeBit(phi, i, params)][DecodeBit(phi, i2, params)];
      }
      // Counts out of 25: 2 and 3 values per coordinate.
      EXPECT_EQ(joint[1][1], 4);
      EXPECT_EQ(joint[1][0], 6);
      EXPECT_EQ(joint[0][1], 6);
      EXPECT_EQ(joint[0][0], 9);
    }
  }
}

TEST(ExactLawTest, EncoderMarginalsAndPairsWithInput) {
  const auto params = SmallParams();
  for (uint64_t j = 1; j <= 4; ++j) {
    const auto law = PiRapporExactLaw(j, params);
    EXPECT_NEAR(std::accumulate(law.begin(), law.end(), 0.0), 1.0, 1e-15);
    for (uint64_t i = 1; i <= 4; ++i) {
      double p1 = 0, pj = 0;
      for (uint64_t f = 0; f < law.size(); ++f) {
        const auto phi = AffineFromIndex(f, params);
        p1 += law[f] * DecodeBit(phi, i, params);
        pj += law[f] * (DecodeBit(phi, i, params) && DecodeBit(phi, j, params));
      }
      EXPECT_NEAR(p1, i == j ? 0.6 : 0.4, 1e-15);
      // bool(phi(i)) is independent of bool(phi(j)) for i != j.
      if (i != j) EXPECT_NEAR(pj, 0.24, 1e-15);
    }
  }
}

TEST(ExactLawTest, EncoderMatchesExactLaw) {
  const auto params = SmallParams();
  const auto law = PiRapporExactLaw(2, params);
  BitStream s = Stream(4);
  const int n = 100000;
  std::vector<int> counts(25, 0);
  for (int i = 0; i < n; ++i) {
    ++counts[AffineIndex(PiRapporEncode(2, params, s), params)];
  }
  for (int f = 0; f < 25; ++f) {
    const double sd = std::sqrt(law[f] * (1 - law[f]) / n);
    EXPECT_NEAR(counts[f] / double(n), law[f], 5 * sd) << f;
  }
}

TEST(AffineIndexTest, RoundTrip) {
  auto params = ParamsForField(8, 3, 2, std::log(2.0), kSym);
  for (uint64_t i = 0; i < 27; ++i) {
    EXPECT_EQ(AffineIndex(AffineFromIndex(i, params), params), i);
  }
  EXPECT_THROW(AffineFromIndex(27, params), std::out_of_range);
  EXPECT_THROW(AffineIndex(AffineFn{{0, 3, 0}}, params), std::invalid_argument);
}

TEST(HistogramTest, FastEqualsNaiveAndOracle) {
  for (auto params : {ParamsForField(8, 3, 2, std::log(2.0), kSym),
                      ChooseParams(40, 1.0, kAsym),
                      ChooseGeneralizedParams(500, 2.0, kSym)}) {
    BitStream s = Stream(5);
    std::vector<AffineFn> reports;
    for (int i = 0; i < 300; ++i) {
      reports.push_back(GenPiRapporEncode(1 + i % params.k, params, s));
    }
    const auto naive = Histogram(reports, params).estimates;
    const auto fast = GenHistogramFast(reports, params).estimates;
    EXPECT_EQ(naive, fast);
    const auto oracle = OracleHistogram(reports, params);
    for (uint64_t j = 0; j < params.k; ++j) {
      EXPECT_NEAR(naive[j], oracle[j], 1e-9);
      EXPECT_DOUBLE_EQ(FrequencyOracle(reports, j + 1, params), naive[j]);
    }
  }
}

TEST(HistogramTest, EmptyInputThrows) {
  const auto params = SmallParams();
  EXPECT_THROW(Histogram({}, params), std::invalid_argument);
  EXPECT_THROW(GenHistogramFast({}, params), std::invalid_argument);
}

TEST(VarianceTest, ClosedForms) {
  // Hand-built alpha0 = 1/4 (theoretical formulas ignore primality).
  RapporParams params;
  params.k = 10;
  params.p = 8;
  params.alpha0_count = 2;
  params.alpha1_num = 3;
  params.alpha1_den = 4;
  EXPECT_DOUBLE_EQ(TheoreticalVariance(params, 1000, 300), 750.0);
  params.alpha1_num = 1;
  params.alpha1_den = 2;
  // c + 3 n.
  EXPECT_DOUBLE_EQ(TheoreticalVariance(params, 1000, 300), 3300.0);
  EXPECT_DOUBLE_EQ(ExpectedSquaredError(params, 1000), 1000 + 3 * 10 * 1000.0);
}

TEST(VarianceTest, MonteCarloMatchesTheory) {
  const auto params = ChooseParams(5, std::log(3.0), kSym);
  const int n = 2000, trials = 300;
  double sum_sq = 0;
  BitStream s = Stream(6);
  for (int t = 0; t < trials; ++t) {
    std::vector<AffineFn> reports;
    for (int i = 0; i < n; ++i) reports.push_back(PiRapporEncode(1, params, s));
    const double est = Histogram(reports, params).estimates[0];
    sum_sq += (est - n) * (est - n);
  }
  const double predicted = TheoreticalVariance(params, n, n);
  EXPECT_NEAR(sum_sq / trials / predicted, 1.0, 0.2);
}

TEST(RapporTest, MeansMatchAlphas) {
  const auto params = ChooseParams(6, 1.0, kSym);
  BitStream s = Stream(7);
  const int n = 50000;
  std::vector<int> ones(6, 0);
  std::vector<std::vector<uint8_t>> reports;
  for (int i = 0; i < n; ++i) {
    reports.push_back(RapporEncode(4, params, s));
    for (int b = 0; b < 6; ++b) ones[b] += reports.back()[b];
  }
  for (int b = 0; b < 6; ++b) {
    const double target = b == 3 ? params.alpha1() : params.alpha0();
    EXPECT_NEAR(ones[b] / double(n), target, 0.01);
  }
  const auto est = RapporHistogram(reports, params).estimates;
  EXPECT_NEAR(est[3] / n, 1.0, 0.05);
  EXPECT_NEAR(est[0] / n, 0.0, 0.05);
}

TEST(ReferenceSpecTest, PiRapporGeneratorGivesPairwiseIndependentMasks) {
  const auto params = SmallParams();
  const auto spec = RapporReferenceSpec(params);
  const auto prg = PiRapporGenerator(params);
  EXPECT_EQ(prg->seed_count(), 25u);
  const std::vector<uint64_t> probes = {1, 2, 3, 4};
  // Every coordinate has the reference marginal.
  std::vector<double> thetas = {std::exp(spec.eps)};
  const auto gap = EstimateFoolingGap<uint64_t, uint64_t>(spec, *prg, probes,
                                                          thetas);
  EXPECT_TRUE(gap.exact);
  EXPECT_NEAR(gap.beta, 0.0, 1e-12);
  // Decoded seeds agree with direct evaluation of the affine function.
  for (uint64_t idx = 0; idx < 25; ++idx) {
    const uint64_t mask = Decompress(Seed::FromIndex(idx, prg->spec().seed_bits),
                                     spec, *prg);
    const AffineFn phi{{idx % 5, idx / 5}};
    for (uint64_t j = 1; j <= 4; ++j) {
      EXPECT_EQ((mask >> (j - 1)) & 1, DecodeBit(phi, j, params)) << idx;
    }
  }
}

TEST(ReferenceSpecTest, CompressedRapporMatchesPiRapporLaw) {
  const auto params = SmallParams();
  const auto spec = RapporReferenceSpec(params);
  const auto prg = PiRapporGenerator(params);
  const auto law = ExactOutputDistribution<uint64_t, uint64_t>(2, spec, *prg, 1);
  const auto exact = PiRapporExactLaw(2, params);
  for (uint64_t idx = 0; idx < 25; ++idx) {
    EXPECT_NEAR(law.stationary[idx], exact[idx], 1e-15) << idx;
  }
}

}  // namespace
}  // namespace ldpc::freq
