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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "ldpc/field.h"

namespace ldpc::freq {
namespace {

using field::AddMod;
using field::MulMod;

// ceil() that ignores relative float noise of order 1e-12, so that quantities
// such as 5 / (e^{ln 1.5} + 1) = 2.0000000000000004 round to 2.
uint64_t CeilTolerant(double x) {
  return static_cast<uint64_t>(std::ceil(x * (1 - 1e-12)));
}

uint64_t LowerPrimeBound(double eps, double delta) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be finite and > 0");
  }
  if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
  const double bound = std::max(std::exp(eps), 1 / eps) / delta;
  if (!(bound < static_cast<double>(field::kMaxModulus))) {
    throw std::overflow_error("parameters require a field of size >= 2^62");
  }
  return std::max<uint64_t>(2, CeilTolerant(bound));
}

void CheckDomain(uint64_t j, const RapporParams& params) {
  if (j < 1 || j > params.k) {
    throw std::out_of_range("index " + std::to_string(j) + " outside [1, " +
                            std::to_string(params.k) + "]");
  }
}

void CheckReport(const AffineFn& phi, const RapporParams& params) {
  if (phi.coeffs.size() != params.dim + 1) {
    throw std::invalid_argument("report has " +
                                std::to_string(phi.coeffs.size()) +
                                " coefficients, expected " +
                                std::to_string(params.dim + 1));
  }
  for (uint64_t c : phi.coeffs) {
    if (c >= params.p) {
      throw std::invalid_argument("report coefficient outside the field");
    }
  }
}

uint64_t EvalAt(const AffineFn& phi, std::span<const uint64_t> z,
                uint64_t q) {
  uint64_t acc = phi.coeffs[0];
  for (size_t u = 0; u < z.size(); ++u) {
    acc = AddMod(acc, MulMod(z[u], phi.coeffs[u + 1], q), q);
  }
  return acc;
}

// All index vectors z(1..k), row-major.
std::vector<uint64_t> AllIndexVectors(const RapporParams& params) {
  std::vector<uint64_t> out;
  out.reserve(params.k * params.dim);
  for (uint64_t j = 1; j <= params.k; ++j) {
    auto z = IndexVector(j, params);
    out.insert(out.end(), z.begin(), z.end());
  }
  return out;
}

std::vector<double> DebiasAll(const std::vector<uint64_t>& sums, uint64_t n,
                              const RapporParams& params) {
  std::vector<double> est(sums.size());
  for (size_t i = 0; i < sums.size(); ++i) {
    est[i] = Debias(static_cast<double>(sums[i]), n, params);
  }
  return est;
}

uint64_t IntPow(uint64_t base, uint32_t e) {
  unsigned __int128 r = 1;
  for (uint32_t i = 0; i < e; ++i) {
    r *= base;
    if (r > std::numeric_limits<uint64_t>::max()) {
      throw std::overflow_error("q^dim overflows 64 bits");
    }
  }
  return static_cast<uint64_t>(r);
}

}  // namespace

double RapporParams::alpha0() const {
  return static_cast<double>(alpha0_count) / static_cast<double>(p);
}

double RapporParams::alpha1() const {
  return static_cast<double>(alpha1_num) / static_cast<double>(alpha1_den);
}

void RapporParams::Validate() const {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (p >= field::kMaxModulus || !field::IsPrime(p)) {
    throw std::invalid_argument("field size " + std::to_string(p) +
                                " is not a prime below 2^62");
  }
  if (IntPow(p, dim) - 1 < k) {
    throw std::invalid_argument("GF(" + std::to_string(p) + ")^" +
                                std::to_string(dim) + " has fewer than k = " +
                                std::to_string(k) + " nonzero points");
  }
  if (alpha0_count >= p) throw std::invalid_argument("alpha0 must be < 1");
  if (alpha1_den == 0 || alpha1_num > alpha1_den) {
    throw std::invalid_argument("alpha1 must lie in [0, 1]");
  }
  // alpha1 > alpha0  <=>  num * p > alpha0_count * den.
  if (static_cast<unsigned __int128>(alpha1_num) * p <=
      static_cast<unsigned __int128>(alpha0_count) * alpha1_den) {
    throw std::invalid_argument("alpha1 must exceed alpha0");
  }
}

RapporParams ParamsForField(uint64_t k, uint64_t q, uint32_t dim, double eps,
                            RapporVariant variant) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be finite and > 0");
  }
  RapporParams params;
  params.k = k;
  params.p = q;
  params.dim = dim;
  params.variant = variant;
  params.eps = eps;
  params.alpha0_count = std::max<uint64_t>(
      1, CeilTolerant(static_cast<double>(q) / (std::exp(eps) + 1)));
  if (variant == RapporVariant::kDeletionSymmetric) {
    params.alpha1_num = q - std::min(q, params.alpha0_count);
    params.alpha1_den = q;
  } else {
    params.alpha1_num = 1;
    params.alpha1_den = 2;
  }
  params.Validate();
  params.realized_eps =
      std::log(static_cast<double>(q - params.alpha0_count) /
               static_cast<double>(params.alpha0_count));
  return params;
}

RapporParams ChooseParams(uint64_t k, double eps, RapporVariant variant,
                          double delta) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  const uint64_t lower = std::max(k + 1, LowerPrimeBound(eps, delta));
  if (lower >= field::kMaxModulus) {
    throw std::overflow_error("parameters require a field of size >= 2^62");
  }
  return ParamsForField(k, field::FindPrime(lower), 1, eps, variant);
}

RapporParams ChooseParamsClosestEps(uint64_t k, double eps,
                                    RapporVariant variant, double delta,
                                    int window) {
  RapporParams best = ChooseParams(k, eps, variant, delta);
  uint64_t p = best.p;
  for (int i = 1; i < window; ++i) {
    p = field::FindPrime(p + 1);
    RapporParams cand = ParamsForField(k, p, 1, eps, variant);
    if (cand.realized_eps > best.realized_eps) best = cand;
  }
  return best;
}

uint32_t DimensionFor(uint64_t k, uint64_t q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  uint32_t dim = 1;
  unsigned __int128 pw = q;
  while (pw < static_cast<unsigned __int128>(k) + 1) {
    pw *= q;
    ++dim;
  }
  return dim;
}

RapporParams ChooseGeneralizedParams(uint64_t k, double eps,
                                     RapporVariant variant, double delta) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  const uint64_t q =
      field::FindPrime(std::max<uint64_t>(3, LowerPrimeBound(eps, delta)));
  return ParamsForField(k, q, DimensionFor(k, q), eps, variant);
}

RapporParams NoiselessParams(uint64_t k) {
  RapporParams params;
  params.k = k;
  params.p = field::FindPrime(std::max<uint64_t>(k + 1, 3));
  params.alpha0_count = 0;
  params.alpha1_num = 1;
  params.alpha1_den = 1;
  params.eps = std::numeric_limits<double>::infinity();
  params.realized_eps = params.eps;
  params.Validate();
  return params;
}

std::vector<uint64_t> IndexVector(uint64_t j, const RapporParams& params) {
  CheckDomain(j, params);
  std::vector<uint64_t> z(params.dim);
  for (size_t u = params.dim; u-- > 0;) {
    z[u] = j % params.p;
    j /= params.p;
  }
  return z;
}

bool DecodeBit(const AffineFn& phi, uint64_t j, const RapporParams& params) {
  CheckReport(phi, params);
  return EvalAt(phi, IndexVector(j, params), params.p) < params.alpha0_count;
}

std::vector<uint8_t> RapporEncode(uint64_t j, const RapporParams& params,
                                  BitStream& stream) {
  CheckDomain(j, params);
  std::vector<uint8_t> bits(params.k);
  for (uint64_t i = 1; i <= params.k; ++i) {
    bits[i - 1] =
        i == j ? BernoulliRational(stream, params.alpha1_num, params.alpha1_den)
               : BernoulliRational(stream, params.alpha0_count, params.p);
  }
  return bits;
}

AffineFn SamplePhiConditioned(uint64_t j, bool b, const RapporParams& params,
                              BitStream& stream) {
  const auto z = IndexVector(j, params);
  const uint64_t q = params.p;
  const uint64_t a = params.alpha0_count;
  if (a == 0 || a >= q) {
    throw std::domain_error("Phi_{j,b} is empty unless 0 < alpha0 < 1");
  }
  AffineFn phi;
  phi.coeffs.assign(params.dim + 1, 0);
  uint64_t inner = 0;
  for (uint32_t u = 0; u < params.dim; ++u) {
    phi.coeffs[u + 1] = UniformMod(stream, q);
    inner = AddMod(inner, MulMod(z[u], phi.coeffs[u + 1], q), q);
  }
  // phi(z(j)) = phi_0 + inner, so phi_0 = r - inner puts phi(z(j)) at r.
  const uint64_t r = b ? UniformMod(stream, a) : a + UniformMod(stream, q - a);
  phi.coeffs[0] = AddMod(field::SubMod(0, inner, q), r, q);
  return phi;
}

AffineFn GenPiRapporEncode(uint64_t j, const RapporParams& params,
                           BitStream& stream) {
  CheckDomain(j, params);
  const bool b =
      BernoulliRational(stream, params.alpha1_num, params.alpha1_den);
  return SamplePhiConditioned(j, b, params, stream);
}

AffineFn PiRapporEncode(uint64_t j, const RapporParams& params,
                        BitStream& stream) {
  if (params.dim != 1) {
    throw std::invalid_argument("PiRapporEncode needs dim == 1");
  }
  return GenPiRapporEncode(j, params, stream);
}

double Debias(double sum, uint64_t n, const RapporParams& params) {
  const double gap = params.alpha1() - params.alpha0();
  if (!(gap > 0)) throw std::domain_error("alpha1 must exceed alpha0");
  return (sum - params.alpha0() * static_cast<double>(n)) / gap;
}

double FrequencyOracle(std::span<const AffineFn> reports, uint64_t j,
                       const RapporParams& params) {
  const auto z = IndexVector(j, params);
  uint64_t sum = 0;
  for (const auto& phi : reports) {
    CheckReport(phi, params);
    sum += EvalAt(phi, z, params.p) < params.alpha0_count;
  }
  return Debias(static_cast<double>(sum), reports.size(), params);
}

CountEstimate Histogram(std::span<const AffineFn> reports,
                        const RapporParams& params) {
  if (reports.empty()) throw std::invalid_argument("Histogram: no reports");
  std::vector<uint64_t> sums(params.k, 0);
  const uint64_t q = params.p;
  const uint64_t a = params.alpha0_count;
  if (params.dim == 1) {
    for (const auto& phi : reports) {
      CheckReport(phi, params);
      // phi(j) for consecutive j differs by phi_1.
      uint64_t v = AddMod(phi.coeffs[0], phi.coeffs[1], q);
      for (uint64_t j = 0; j < params.k; ++j) {
        sums[j] += v < a;
        v = AddMod(v, phi.coeffs[1], q);
      }
    }
  } else {
    const auto zs = AllIndexVectors(params);
    for (const auto& phi : reports) {
      CheckReport(phi, params);
      for (uint64_t j = 0; j < params.k; ++j) {
        std::span<const uint64_t> z(zs.data() + j * params.dim, params.dim);
        sums[j] += EvalAt(phi, z, q) < a;
      }
    }
  }
  return {DebiasAll(sums, reports.size(), params), reports.size(), params};
}

CountEstimate GenHistogramFast(std::span<const AffineFn> reports,
                               const RapporParams& params) {
  if (reports.empty()) throw std::invalid_argument("Histogram: no reports");
  std::map<std::vector<uint64_t>, uint64_t> multiplicity;
  for (const auto& phi : reports) {
    CheckReport(phi, params);
    ++multiplicity[phi.coeffs];
  }
  const auto zs = AllIndexVectors(params);
  std::vector<uint64_t> sums(params.k, 0);
  AffineFn phi;
  for (const auto& [coeffs, count] : multiplicity) {
    phi.coeffs = coeffs;
    for (uint64_t j = 0; j < params.k; ++j) {
      std::span<const uint64_t> z(zs.data() + j * params.dim, params.dim);
      if (EvalAt(phi, z, params.p) < params.alpha0_count) sums[j] += count;
    }
  }
  return {DebiasAll(sums, reports.size(), params), reports.size(), params};
}

CountEstimate RapporHistogram(std::span<const std::vector<uint8_t>> reports,
                              const RapporParams& params) {
  if (reports.empty()) throw std::invalid_argument("Histogram: no reports");
  std::vector<uint64_t> sums(params.k, 0);
  for (const auto& bits : reports) {
    if (bits.size() != params.k) {
      throw std::invalid_argument("RAPPOR report has wrong length");
    }
    for (uint64_t j = 0; j < params.k; ++j) sums[j] += bits[j] != 0;
  }
  return {DebiasAll(sums, reports.size(), params), reports.size(), params};
}

double TheoreticalVariance(const RapporParams& params, uint64_t n,
                           uint64_t count_j) {
  const double a0 = params.alpha0();
  const double a1 = params.alpha1();
  const double gap = a1 - a0;
  if (!(gap > 0)) throw std::domain_error("alpha1 must exceed alpha0");
  return static_cast<double>(count_j) * (1 - a0 - a1) / gap +
         static_cast<double>(n) * a0 * (1 - a0) / (gap * gap);
}

double ExpectedSquaredError(const RapporParams& params, uint64_t n) {
  const double a0 = params.alpha0();
  const double a1 = params.alpha1();
  const double gap = a1 - a0;
  if (!(gap > 0)) throw std::domain_error("alpha1 must exceed alpha0");
  const double nd = static_cast<double>(n);
  return nd * (1 - a0 - a1) / gap +
         nd * static_cast<double>(params.k) * a0 * (1 - a0) / (gap * gap);
}

uint64_t MessageBits(const RapporParams& params) {
  return static_cast<uint64_t>(params.dim + 1) * field::BitWidth(params.p);
}

double DeletionRatioBound(const RapporParams& params) {
  const double a0 = params.alpha0();
  const double a1 = params.alpha1();
  return std::max(a1 / a0, (1 - a0) / (1 - a1));
}

double ReplacementRatioBound(const RapporParams& params) {
  const double a0 = params.alpha0();
  const double a1 = params.alpha1();
  return a1 * (1 - a0) / (a0 * (1 - a1));
}

uint64_t AffineIndex(const AffineFn& phi, const RapporParams& params) {
  CheckReport(phi, params);
  uint64_t index = 0;
  for (size_t u = phi.coeffs.size(); u-- > 0;) {
    index = index * params.p + phi.coeffs[u];
  }
  return index;
}

AffineFn AffineFromIndex(uint64_t index, const RapporParams& params) {
  AffineFn phi;
  phi.coeffs.resize(params.dim + 1);
  for (auto& c : phi.coeffs) {
    c = index % params.p;
    index /= params.p;
  }
  if (index != 0) throw std::out_of_range("AffineFromIndex: index too large");
  return phi;
}

std::vector<double> PiRapporExactLaw(uint64_t j, const RapporParams& params) {
  CheckDomain(j, params);
  const uint64_t slopes = IntPow(params.p, params.dim);
  const uint64_t total = slopes * params.p;
  if (total > (uint64_t{1} << 24)) {
    throw std::length_error("PiRapporExactLaw: too many affine functions");
  }
  const double a1 = static_cast<double>(params.alpha1_num) /
                    static_cast<double>(params.alpha1_den);
  const double ones = static_cast<double>(params.alpha0_count * slopes);
  const double zeros =
      static_cast<double>((params.p - params.alpha0_count) * slopes);
  std::vector<double> law(total);
  for (uint64_t i = 0; i < total; ++i) {
    const bool bit = DecodeBit(AffineFromIndex(i, params), j, params);
    law[i] = bit ? a1 / ones : (1 - a1) / zeros;
  }
  return law;
}

RandomizerSpec<uint64_t, uint64_t> RapporReferenceSpec(
    const RapporParams& params) {
  if (params.k > 64) {
    throw std::invalid_argument("RapporReferenceSpec supports k <= 64");
  }
  const double a0 = params.alpha0();
  const double a1 = params.alpha1();
  const uint64_t k = params.k;
  const uint64_t p = params.p;
  const uint64_t a = params.alpha0_count;
  RandomizerSpec<uint64_t, uint64_t> spec;
  spec.t_bits = k * field::BitWidth(p);
  spec.eps = std::log(DeletionRatioBound(params));
  spec.ref_sample = [k, p, a](BitStream& s) {
    uint64_t mask = 0;
    for (uint64_t i = 0; i < k; ++i) {
      if (UniformMod(s, p) < a) mask |= uint64_t{1} << i;
    }
    return mask;
  };
  spec.density_ratio = [a0, a1](const uint64_t& j, const uint64_t& mask) {
    return ((mask >> (j - 1)) & 1) ? a1 / a0 : (1 - a1) / (1 - a0);
  };
  if (k <= 20) {
    spec.reference_law = [k, a0]() {
      std::vector<std::pair<uint64_t, double>> law;
      for (uint64_t mask = 0; mask < (uint64_t{1} << k); ++mask) {
        const int ones = std::popcount(mask);
        law.emplace_back(mask, std::pow(a0, ones) *
                                   std::pow(1 - a0, static_cast<double>(k) -
                                                        ones));
      }
      return law;
    };
  }
  return spec;
}

std::shared_ptr<Generator> PiRapporGenerator(const RapporParams& params) {
  if (params.dim != 1) {
    throw std::invalid_argument("PiRapporGenerator needs dim == 1");
  }
  const uint64_t p = params.p;
  const uint64_t k = params.k;
  const int width = field::BitWidth(p);
  const uint64_t seeds = p * p;
  const size_t seed_bits = static_cast<size_t>(field::BitWidth(seeds));
  return std::make_shared<FunctionGenerator>(
      seed_bits, k * width,
      [p, k, width](uint64_t index) {
        const uint64_t phi0 = index % p;
        const uint64_t phi1 = index / p;
        std::vector<uint8_t> out((k * width + 7) / 8, 0);
        uint64_t pos = 0;
        for (uint64_t i = 1; i <= k; ++i) {
          const uint64_t v = AddMod(phi0, MulMod(i % p, phi1, p), p);
          for (int b = 0; b < width; ++b, ++pos) {
            if ((v >> b) & 1) out[pos / 8] |= static_cast<uint8_t>(1u << (pos % 8));
          }
        }
        return out;
      },
      seeds);
}

}  // namespace ldpc::freq
