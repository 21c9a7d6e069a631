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

// Frequency estimation over the domain [k] = {1, ..., k}.
//
// RAPPOR flips each bit of the one-hot encoding of the input: a 0 becomes 1
// with probability alpha0 and a 1 stays 1 with probability alpha1.
//
// PI-RAPPOR derives all k noisy bits from a single random affine function
// phi over GF(q)^dim: bit j is bool(phi(z(j))) = [phi(z(j)) < alpha0 * q],
// where z(j) is the j-th nonzero vector of GF(q)^dim in lexicographic order
// (for dim = 1, simply z(j) = j). Values of phi at distinct nonzero points
// are pairwise independent, so every per-coordinate statistic matches
// RAPPOR while the report is dim + 1 field elements.

#ifndef LDPC_FREQ_H_
#define LDPC_FREQ_H_

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ldpc/compress.h"
#include "ldpc/randcore.h"

namespace ldpc::freq {

enum class RapporVariant : uint8_t {
  // alpha1 = 1 - alpha0; deletion eps-DP.
  kDeletionSymmetric = 0,
  // alpha1 = 1/2; replacement eps-DP.
  kReplacementAsymmetric = 1,
};

struct RapporParams {
  uint64_t k = 0;
  // Field size q (prime). Called p when dim == 1.
  uint64_t p = 0;
  uint32_t dim = 1;
  // alpha0 * p, an integer by construction.
  uint64_t alpha0_count = 0;
  uint64_t alpha1_num = 0;
  uint64_t alpha1_den = 1;
  RapporVariant variant = RapporVariant::kDeletionSymmetric;
  // Requested budget and the budget actually met after rounding alpha0.
  double eps = 0;
  double realized_eps = 0;

  double alpha0() const;
  double alpha1() const;

  // Throws std::invalid_argument on any broken invariant.
  void Validate() const;
};

// Rounding rule: p = smallest prime >= max(k + 1, ceil(max(e^eps, 1/eps) /
// delta)), alpha0 = ceil(p / (e^eps + 1)) / p.
RapporParams ChooseParams(uint64_t k, double eps, RapporVariant variant,
                          double delta = 0.01);

// Same rounding rule on a caller-chosen prime field of dimension dim.
RapporParams ParamsForField(uint64_t k, uint64_t q, uint32_t dim, double eps,
                            RapporVariant variant);

// Scans the first `window` primes allowed by ChooseParams and keeps the one
// whose realized eps is closest to eps.
RapporParams ChooseParamsClosestEps(uint64_t k, double eps,
                                    RapporVariant variant, double delta = 0.01,
                                    int window = 64);

// Generalized form: q chosen by the ChooseParams rule without the k + 1
// floor, dim = ceil(log_q(k + 1)).
RapporParams ChooseGeneralizedParams(uint64_t k, double eps,
                                     RapporVariant variant,
                                     double delta = 0.01);

// Smallest dim with q^dim >= k + 1.
uint32_t DimensionFor(uint64_t k, uint64_t q);

// alpha0 = 0, alpha1 = 1: RAPPOR degenerates to the exact one-hot vector.
RapporParams NoiselessParams(uint64_t k);

struct AffineFn {
  // (phi_0, phi_1, ..., phi_dim).
  std::vector<uint64_t> coeffs;

  friend bool operator==(const AffineFn&, const AffineFn&) = default;
  friend auto operator<=>(const AffineFn&, const AffineFn&) = default;
};

struct CountEstimate {
  std::vector<double> estimates;
  uint64_t n = 0;
  RapporParams params;
};

// z(j) as dim digits, most significant first. Requires 1 <= j <= k.
std::vector<uint64_t> IndexVector(uint64_t j, const RapporParams& params);

// bool(phi(z(j))).
bool DecodeBit(const AffineFn& phi, uint64_t j, const RapporParams& params);

// One-hot RAPPOR: k bits, bit i ~ Bern(alpha1) if i == j else Bern(alpha0).
// Entry i - 1 of the result holds bit i.
std::vector<uint8_t> RapporEncode(uint64_t j, const RapporParams& params,
                                  BitStream& stream);

// Uniform element of Phi_{j,b} = {phi : bool(phi(j)) == b}: the slope
// coefficients are uniform and phi_0 is drawn from the (at most two)
// contiguous ranges that put phi(z(j)) on the requested side.
AffineFn SamplePhiConditioned(uint64_t j, bool b, const RapporParams& params,
                              BitStream& stream);

// PI-RAPPOR over GF(p) (dim == 1).
AffineFn PiRapporEncode(uint64_t j, const RapporParams& params,
                        BitStream& stream);

// PI-RAPPOR over GF(q)^dim.
AffineFn GenPiRapporEncode(uint64_t j, const RapporParams& params,
                           BitStream& stream);

// (sum - alpha0 * n) / (alpha1 - alpha0).
double Debias(double sum, uint64_t n, const RapporParams& params);

// Debiased count of j from PI-RAPPOR reports.
double FrequencyOracle(std::span<const AffineFn> reports, uint64_t j,
                       const RapporParams& params);

// Per-report decoding of every coordinate; O(n k).
CountEstimate Histogram(std::span<const AffineFn> reports,
                        const RapporParams& params);

// Decodes each distinct report once, weighted by its multiplicity. Same
// result as Histogram, exactly.
CountEstimate GenHistogramFast(std::span<const AffineFn> reports,
                               const RapporParams& params);

// Debiased counts from one-hot RAPPOR reports.
CountEstimate RapporHistogram(std::span<const std::vector<uint8_t>> reports,
                              const RapporParams& params);

// c_j (1 - alpha0 - alpha1) / (alpha1 - alpha0)
//   + n alpha0 (1 - alpha0) / (alpha1 - alpha0)^2
double TheoreticalVariance(const RapporParams& params, uint64_t n,
                           uint64_t count_j);

// Expected squared l2 error of the whole histogram over n reports.
double ExpectedSquaredError(const RapporParams& params, uint64_t n);

// Report size before byte packing: (dim + 1) * ceil(log2 q) bits.
uint64_t MessageBits(const RapporParams& params);

// Deletion and replacement privacy ratios of PI-RAPPOR/RAPPOR:
// max(alpha1/alpha0, (1-alpha0)/(1-alpha1)) and
// alpha1 (1-alpha0) / (alpha0 (1-alpha1)).
double DeletionRatioBound(const RapporParams& params);
double ReplacementRatioBound(const RapporParams& params);

// Index of phi in the enumeration phi_0 + q phi_1 + q^2 phi_2 + ...
uint64_t AffineIndex(const AffineFn& phi, const RapporParams& params);
AffineFn AffineFromIndex(uint64_t index, const RapporParams& params);

// Exact law of (Gen)PiRapporEncode(j) over all q^(dim+1) functions, indexed
// by AffineIndex. Throws std::length_error above 2^24 functions.
std::vector<double> PiRapporExactLaw(uint64_t j, const RapporParams& params);

// RAPPOR as a generic randomizer for the compression engine: outputs are
// k-bit masks (bit i - 1 for coordinate i, so k <= 64), the reference
// sampler draws k uniform field elements and maps them through bool, and
// the density ratio on input j is alpha1/alpha0 or (1-alpha1)/(1-alpha0)
// depending on bit j.
RandomizerSpec<uint64_t, uint64_t> RapporReferenceSpec(
    const RapporParams& params);

// Generator whose seeds are the p^2 affine functions and whose expansion is
// (phi(1), ..., phi(k)) written as ceil(log2 p)-bit words. Feeding it to
// RapporReferenceSpec realises PI-RAPPOR as a compressed RAPPOR.
std::shared_ptr<Generator> PiRapporGenerator(const RapporParams& params);

}  // namespace ldpc::freq

#endif  // LDPC_FREQ_H_
