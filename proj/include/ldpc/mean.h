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

// l2 mean estimation for unit vectors.
//
// PrivHS sends a seed and a sign: the seed expands to a uniform unit vector
// v and the sign picks the hemisphere of x with probability
// e^eps / (e^eps + 1). The server decodes B(d, eps) * sign * v.
//
// PrivUnit samples uniformly from the cap {v : <x, v> >= gamma} with
// probability p_cap and from its complement otherwise, and the server
// decodes v / m. The budget eps is split as eps0 = theta * eps (cap
// probability) and eps1 = eps - eps0 (cap size).

#ifndef LDPC_MEAN_H_
#define LDPC_MEAN_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ldpc/compress.h"
#include "ldpc/randcore.h"

namespace ldpc::mean {

using Vector = std::vector<double>;

// Norm of a decoded PrivHS report:
// ((e^eps + 1) / (e^eps - 1)) * sqrt(pi) * Gamma((d + 1)/2) / Gamma(d/2).
double PrivHsNorm(size_t d, double eps);

// Fraction of the unit sphere in R^d with <x, v> >= gamma, by adaptive
// quadrature of the marginal density (1 - t^2)^((d-3)/2). Requires d >= 2.
double CapFraction(size_t d, double gamma);

struct MeanParams {
  size_t d = 0;
  double eps = 0;
  // PrivUnit budget split.
  double theta = 0;
  double eps0 = 0;
  double eps1 = 0;
  double p_cap = 0;
  // Cap measure 1 / (1 + e^eps1) and its threshold.
  double cap_mass = 0;
  double gamma_cap = 0;
  // Debias constant; decoded PrivUnit reports have norm 1/m.
  double m = 0;
  // PrivHS decoded norm B(d, eps).
  double hs_norm = 0;

  // Squared norm of a decoded PrivUnit report, 1 / m^2.
  double proxy() const { return 1.0 / (m * m); }
};

MeanParams MakePrivHsParams(size_t d, double eps);

// Solves cap_fraction(d, gamma_cap) = 1/(1 + e^eps1) by bisection and
// computes m by quadrature. Requires d >= 2, eps > 0, theta in [0, 1].
MeanParams MakePrivUnitParams(size_t d, double eps, double theta);

struct SplitChoice {
  double theta = 0;
  double proxy = 0;
  MeanParams params;
};

// Minimises the proxy 1/m^2 over theta in {0.00, 0.01, ..., 1.00}.
SplitChoice OptimizeSplit(double eps, size_t d);

// Throws std::invalid_argument unless |x|_2 = 1 within 1e-9.
void CheckUnit(std::span<const double> x);

// Lifts x with |x| <= 1 to the unit vector (x, sqrt(1 - |x|^2)) in R^(d+1).
Vector LiftToSphere(std::span<const double> x);

struct HsReport {
  Seed seed;
  // +1 or -1.
  int sign = 1;

  friend bool operator==(const HsReport&, const HsReport&) = default;
};

// Uniform unit vector expanded from a PrivHS seed.
Vector HsDirection(const Seed& seed, const Generator& prg, size_t d);

HsReport PrivHsEncode(std::span<const double> x, double eps,
                      const Generator& prg, BitStream& stream);
Vector PrivHsDecode(const HsReport& report, const MeanParams& params,
                    const Generator& prg);

// Uniform draw from the cap (cap == true) or its complement, around x.
Vector SampleCap(std::span<const double> x, const MeanParams& params,
                 bool cap, BitStream& stream);

// Uncompressed PrivUnit: returns the unit vector v.
Vector PrivUnitEncode(std::span<const double> x, const MeanParams& params,
                      BitStream& stream);
Vector PrivUnitDecode(std::span<const double> v, const MeanParams& params);

// PrivUnit as a generic randomizer: reference is the uniform sphere and the
// density ratio is p_cap/q on the cap and (1-p_cap)/(1-q) off it. eps is
// the log of the larger of the two.
RandomizerSpec<Vector, Vector> PrivUnitRandomizerSpec(
    const MeanParams& params);

Seed CompressPrivUnit(std::span<const double> x, const MeanParams& params,
                      const CompressionConfig& cfg, BitStream& entropy,
                      CompressionStats* stats = nullptr);
// v / m for v expanded from the seed.
Vector DecompressPrivUnit(const Seed& seed, const MeanParams& params,
                          const Generator& prg);

// Runs `encode` m_reps times on the same stream.
template <class R>
std::vector<R> RepeatEncode(const std::function<R(BitStream&)>& encode,
                            int m_reps, BitStream& stream) {
  if (m_reps < 1) throw std::invalid_argument("m_reps must be >= 1");
  std::vector<R> out;
  out.reserve(m_reps);
  for (int i = 0; i < m_reps; ++i) out.push_back(encode(stream));
  return out;
}

// Coordinatewise average; all vectors must share one dimension.
Vector Average(std::span<const Vector> vectors);

template <class R>
Vector RepeatDecode(std::span<const R> reports,
                    const std::function<Vector(const R&)>& decode) {
  std::vector<Vector> decoded;
  decoded.reserve(reports.size());
  for (const R& r : reports) decoded.push_back(decode(r));
  return Average(decoded);
}

double SquaredDistance(std::span<const double> a, std::span<const double> b);

}  // namespace ldpc::mean

#endif  // LDPC_MEAN_H_
