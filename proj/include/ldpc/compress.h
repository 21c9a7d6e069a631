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

// Seed compression of local randomizers.
//
// A randomizer is described by a reference sampler, which turns t uniform
// bits into an output y, together with its density ratio pi_x(y): the
// probability of y on input x divided by its reference probability. The
// client runs rejection sampling over generator seeds, accepting a seed s
// with probability min(1, pi_x(ref(G(s))) / e^eps), and sends only the
// accepted seed. The server recovers the report as ref(G(s)).
//
// The enumeration helpers compute exact seed and output laws for generators
// with at most 2^20 seeds and are the basis of the privacy checks.

#ifndef LDPC_COMPRESS_H_
#define LDPC_COMPRESS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldpc/randcore.h"

namespace ldpc {

enum class PrivacyVariant { kDeletion, kReplacement };

inline constexpr int kMaxEnumerableBits = 20;

// Absolute slack allowed on density ratios before they count as exceeding
// e^eps.
inline constexpr double kRatioTolerance = 1e-12;

template <class X, class Y>
struct RandomizerSpec {
  // Upper bound on the bits ref_sample reads.
  uint64_t t_bits = 0;
  std::function<Y(BitStream&)> ref_sample;
  std::function<double(const X&, const Y&)> density_ratio;
  double eps = 0;
  double delta = 0;
  PrivacyVariant variant = PrivacyVariant::kDeletion;
  // Exact reference law as (output, probability) pairs. Optional; without it
  // the law is enumerated from all 2^t_bits strings when t_bits <= 20.
  std::function<std::vector<std::pair<Y, double>>()> reference_law;
};

// J = ceil(e^eps ln(1/gamma)).
uint64_t PureIterations(double eps, double gamma);
// J = ceil(e^eps ln(1/gamma) / (1 - delta)).
uint64_t ApproxIterations(double eps, double delta, double gamma);

struct CompressionConfig {
  double gamma = 0.01;
  std::shared_ptr<const Generator> prg;
  uint64_t max_iters = 0;

  static CompressionConfig Pure(double eps, double gamma,
                                std::shared_ptr<const Generator> prg);
  static CompressionConfig Approx(double eps, double delta, double gamma,
                                  std::shared_ptr<const Generator> prg);
};

struct CompressionStats {
  uint64_t iterations = 0;
  bool accepted = false;
};

// Acceptance probability for one loop iteration. With `truncate` false a
// ratio above e^eps (beyond kRatioTolerance) is a contract violation and
// throws std::domain_error; with `truncate` true it is clamped to 1.
double AcceptanceProbability(double ratio, double eps, bool truncate);

template <class Y>
double TotalVariation(const std::map<Y, double>& a,
                      const std::map<Y, double>& b) {
  double tv = 0;
  for (const auto& [y, pa] : a) {
    auto it = b.find(y);
    tv += std::abs(pa - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [y, pb] : b) {
    if (!a.contains(y)) tv += std::abs(pb);
  }
  return tv / 2;
}

namespace internal {

template <class X, class Y>
Seed CompressLoop(const X& x, const RandomizerSpec<X, Y>& spec,
                  const CompressionConfig& cfg, BitStream& entropy,
                  bool truncate, CompressionStats* stats) {
  if (!cfg.prg) throw std::invalid_argument("Compress: no generator");
  if (cfg.max_iters == 0) {
    throw std::invalid_argument("Compress: max_iters must be >= 1");
  }
  Seed seed;
  for (uint64_t it = 1; it <= cfg.max_iters; ++it) {
    seed = cfg.prg->DrawSeed(entropy);
    BitStream expanded = cfg.prg->Open(seed);
    const Y y = spec.ref_sample(expanded);
    const double accept =
        AcceptanceProbability(spec.density_ratio(x, y), spec.eps, truncate);
    if (Bernoulli(entropy, accept)) {
      if (stats) *stats = {it, true};
      return seed;
    }
  }
  // Exhausted: the last seed drawn is a draw from the generator's reference.
  if (stats) *stats = {cfg.max_iters, false};
  return seed;
}

}  // namespace internal

// Rejection loop for a pure (delta = 0) randomizer.
template <class X, class Y>
Seed CompressPure(const X& x, const RandomizerSpec<X, Y>& spec,
                  const CompressionConfig& cfg, BitStream& entropy,
                  CompressionStats* stats = nullptr) {
  if (spec.delta != 0) {
    throw std::invalid_argument("CompressPure: spec has delta != 0");
  }
  return internal::CompressLoop(x, spec, cfg, entropy, false, stats);
}

// Rejection loop with acceptance truncated at 1, for (eps, delta) specs.
template <class X, class Y>
Seed CompressApprox(const X& x, const RandomizerSpec<X, Y>& spec,
                    const CompressionConfig& cfg, BitStream& entropy,
                    CompressionStats* stats = nullptr) {
  if (!(spec.delta >= 0 && spec.delta < 1)) {
    throw std::invalid_argument("CompressApprox: delta must be in [0, 1)");
  }
  return internal::CompressLoop(x, spec, cfg, entropy, true, stats);
}

template <class X, class Y>
Y Decompress(const Seed& seed, const RandomizerSpec<X, Y>& spec,
             const Generator& prg) {
  BitStream expanded = prg.Open(seed);
  return spec.ref_sample(expanded);
}

// Exact law of ref_sample(r) for uniform r.
template <class X, class Y>
std::map<Y, double> ReferenceLaw(const RandomizerSpec<X, Y>& spec) {
  std::map<Y, double> law;
  if (spec.reference_law) {
    for (auto& [y, p] : spec.reference_law()) law[y] += p;
    return law;
  }
  if (spec.t_bits > kMaxEnumerableBits) {
    throw std::length_error("ReferenceLaw: t = " +
                            std::to_string(spec.t_bits) +
                            " bits is too many to enumerate");
  }
  const uint64_t count = uint64_t{1} << spec.t_bits;
  const double w = 1.0 / static_cast<double>(count);
  for (uint64_t r = 0; r < count; ++r) {
    Seed bits = Seed::FromIndex(r, spec.t_bits);
    BitStream s = BitStream::FromBits(bits.bytes(), spec.t_bits);
    law[spec.ref_sample(s)] += w;
  }
  return law;
}

// Law of R(x): reference law reweighted by pi_x.
template <class X, class Y>
std::map<Y, double> TargetLaw(const X& x, const RandomizerSpec<X, Y>& spec) {
  std::map<Y, double> law = ReferenceLaw(spec);
  for (auto& [y, p] : law) p *= spec.density_ratio(x, y);
  return law;
}

template <class Y>
struct ExactSeedLaw {
  std::vector<Y> outputs;          // ref(G(s)) per seed index
  std::vector<double> ratio;       // pi_x(ref(G(s)))
  std::vector<double> acceptance;  // per-seed acceptance probability
  double mean_acceptance = 0;      // per-iteration acceptance probability
  std::vector<double> stationary;  // law of R[G](x) over seeds
  std::vector<double> truncated;   // law of the J-iteration loop over seeds
  std::map<Y, double> decoded_stationary;
  std::map<Y, double> decoded_truncated;
};

// Enumerates every seed of `prg` and returns the exact seed and decoded laws
// of the ideal compressed randomizer and of the rejection loop capped at
// max_iters iterations. Throws std::length_error for more than 2^20 seeds.
template <class X, class Y>
ExactSeedLaw<Y> ExactOutputDistribution(const X& x,
                                        const RandomizerSpec<X, Y>& spec,
                                        const Generator& prg,
                                        uint64_t max_iters) {
  if (prg.spec().seed_bits > kMaxEnumerableBits) {
    throw std::length_error("ExactOutputDistribution: seed space of 2^" +
                            std::to_string(prg.spec().seed_bits) +
                            " is too large");
  }
  if (max_iters == 0) {
    throw std::invalid_argument("ExactOutputDistribution: max_iters >= 1");
  }
  const bool truncate = spec.delta > 0;
  const uint64_t n = prg.seed_count();
  const double w = 1.0 / static_cast<double>(n);
  ExactSeedLaw<Y> law;
  law.outputs.reserve(n);
  law.ratio.reserve(n);
  law.acceptance.reserve(n);
  double accept_sum = 0;
  for (uint64_t s = 0; s < n; ++s) {
    BitStream expanded = prg.Open(Seed::FromIndex(s, prg.spec().seed_bits));
    Y y = spec.ref_sample(expanded);
    const double r = spec.density_ratio(x, y);
    const double a = AcceptanceProbability(r, spec.eps, truncate);
    law.outputs.push_back(std::move(y));
    law.ratio.push_back(r);
    law.acceptance.push_back(a);
    accept_sum += a;
  }
  if (accept_sum <= 0) {
    throw std::domain_error("ExactOutputDistribution: no seed is accepted");
  }
  law.mean_acceptance = accept_sum * w;

  // Iteration j is reached with probability (1 - A)^(j-1); it accepts seed s
  // with probability a_s / N, and the final iteration also emits its rejected
  // seed, with probability (1 - a_s) / N.
  double reach = 1.0;
  double accept_weight = 0.0;
  double fallback_weight = 0.0;
  for (uint64_t j = 1; j <= max_iters; ++j) {
    accept_weight += reach;
    if (j == max_iters) fallback_weight = reach;
    reach *= 1.0 - law.mean_acceptance;
  }

  law.stationary.resize(n);
  law.truncated.resize(n);
  for (uint64_t s = 0; s < n; ++s) {
    const double a = law.acceptance[s];
    law.stationary[s] = a / accept_sum;
    law.truncated[s] = w * (a * accept_weight + (1.0 - a) * fallback_weight);
    law.decoded_stationary[law.outputs[s]] += law.stationary[s];
    law.decoded_truncated[law.outputs[s]] += law.truncated[s];
  }
  return law;
}

struct FoolingGap {
  double beta = 0;
  // Zero when exact; otherwise a 95% simultaneous half-width.
  double half_width = 0;
  bool exact = false;
  size_t probe_index = 0;
  double theta = 0;
};

// 256 evenly spaced thresholds on [0, e^eps].
std::vector<double> UniformThetaGrid(double eps);

namespace internal {

// Fraction of `values` (weighted) that are >= theta, for each theta.
std::vector<double> TailMass(const std::vector<std::pair<double, double>>&
                                 weighted_values,
                             const std::vector<double>& thetas);

std::vector<double> Breakpoints(
    const std::vector<std::pair<double, double>>& a,
    const std::vector<std::pair<double, double>>& b);

}  // namespace internal

// Largest advantage of the density-ratio threshold tests
// [pi_x(ref(r)) >= theta] in telling G(s) from uniform r, over probe inputs
// x and thresholds theta. Exact when both the seed space and the reference
// law are enumerable; otherwise Monte Carlo with `samples` draws per side
// from `entropy`. With no thetas given, the exact path uses every
// breakpoint of the two tail functions and Monte Carlo uses
// UniformThetaGrid.
template <class X, class Y>
FoolingGap EstimateFoolingGap(const RandomizerSpec<X, Y>& spec,
                              const Generator& prg, std::span<const X> probes,
                              std::optional<std::vector<double>> thetas,
                              uint64_t samples = 0,
                              BitStream* entropy = nullptr) {
  if (thetas && thetas->empty()) {
    throw std::invalid_argument("EstimateFoolingGap: empty theta grid");
  }
  const bool enumerable =
      prg.spec().seed_bits <= kMaxEnumerableBits &&
      (spec.reference_law || spec.t_bits <= kMaxEnumerableBits);

  FoolingGap best;
  best.exact = enumerable;
  std::vector<Y> seed_outputs;
  std::vector<std::pair<Y, double>> ref_outputs;
  double seed_w = 0;
  if (enumerable) {
    const uint64_t n = prg.seed_count();
    seed_w = 1.0 / static_cast<double>(n);
    for (uint64_t s = 0; s < n; ++s) {
      BitStream e = prg.Open(Seed::FromIndex(s, prg.spec().seed_bits));
      seed_outputs.push_back(spec.ref_sample(e));
    }
    for (auto& [y, p] : ReferenceLaw(spec)) ref_outputs.emplace_back(y, p);
  } else {
    if (entropy == nullptr || samples == 0) {
      throw std::invalid_argument(
          "EstimateFoolingGap: Monte Carlo needs entropy and samples > 0");
    }
    seed_w = 1.0 / static_cast<double>(samples);
    for (uint64_t i = 0; i < samples; ++i) {
      BitStream e = prg.Open(prg.DrawSeed(*entropy));
      seed_outputs.push_back(spec.ref_sample(e));
    }
    for (uint64_t i = 0; i < samples; ++i) {
      ref_outputs.emplace_back(spec.ref_sample(*entropy), seed_w);
    }
  }

  size_t tests = 0;
  for (size_t xi = 0; xi < probes.size(); ++xi) {
    std::vector<std::pair<double, double>> seed_vals, ref_vals;
    seed_vals.reserve(seed_outputs.size());
    for (const Y& y : seed_outputs) {
      seed_vals.emplace_back(spec.density_ratio(probes[xi], y), seed_w);
    }
    for (const auto& [y, p] : ref_outputs) {
      ref_vals.emplace_back(spec.density_ratio(probes[xi], y), p);
    }
    std::vector<double> grid =
        thetas ? *thetas
               : (enumerable ? internal::Breakpoints(seed_vals, ref_vals)
                             : UniformThetaGrid(spec.eps));
    tests += grid.size();
    const auto seed_tail = internal::TailMass(seed_vals, grid);
    const auto ref_tail = internal::TailMass(ref_vals, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
      const double gap = std::abs(seed_tail[i] - ref_tail[i]);
      if (gap > best.beta) {
        best.beta = gap;
        best.probe_index = xi;
        best.theta = grid[i];
      }
    }
  }
  if (!enumerable && tests > 0) {
    // Hoeffding per side with a union bound over all tests, 95% overall.
    best.half_width =
        2.0 * std::sqrt(std::log(4.0 * static_cast<double>(tests) / 0.05) /
                        (2.0 * static_cast<double>(samples)));
  }
  return best;
}

// Finite generator made of N reference samples: seed i expands to exactly
// the bits the reference sampler consumed when producing sample i.
template <class X, class Y>
std::shared_ptr<TableGenerator> EmpiricalPrg(const RandomizerSpec<X, Y>& spec,
                                             uint64_t n,
                                             const Seed& master_seed) {
  return TableGenerator::Record(
      [&spec](BitStream& s) { (void)spec.ref_sample(s); }, n, master_seed);
}

}  // namespace ldpc

#endif  // LDPC_COMPRESS_H_
