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

#include "ldpc/mean.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace ldpc::mean {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr double kQuadratureTolerance = 1e-11;

void CheckEps(double eps) {
  if (!(eps > 0) || std::isnan(eps)) {
    throw std::invalid_argument("eps must be > 0");
  }
}

// Integrates f over [a, b] in the angle phi = asin(t), where the marginal
// density becomes cos(phi)^(d-2) and has no endpoint singularity. The range
// is cut around the peak at 0, whose width is about 1/sqrt(d).
template <class F>
double IntegrateAngle(F f, double a, double b, size_t d) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> cuts = {a, b};
  // Interior cuts only; slivers next to an endpoint spoil the error estimate.
  const auto add = [&](double c) {
    if (c > a + scale / 4 && c < b - scale / 4) cuts.push_back(c);
  };
  add(0.0);
  for (double k : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    add(k * scale);
    add(-k * scale);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0;
  double total_error = 0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    double error = 0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, lo, hi, 15, 1e-12, &error);
    total_error += error;
  }
  if (!(total_error <= kQuadratureTolerance) || !std::isfinite(total)) {
    throw std::runtime_error("quadrature did not converge on [" +
                             std::to_string(a) + ", " + std::to_string(b) +
                             "], d = " + std::to_string(d) + ", error " +
                             std::to_string(total_error));
  }
  return total;
}

// cos(phi)^(d-2), evaluated in log space with log cos(phi) written as
// log1p(-2 sin^2(phi/2)), which stays accurate near the peak for large d.
double AngleWeight(double phi, size_t d) {
  if (d == 2) return 1.0;
  const double h = std::sin(phi / 2);
  return std::exp(static_cast<double>(d - 2) * std::log1p(-2 * h * h));
}

double AngleOf(double t) { return std::asin(std::clamp(t, -1.0, 1.0)); }

// Normaliser of the marginal density.
double MarginalMass(size_t d) {
  return IntegrateAngle([d](double phi) { return AngleWeight(phi, d); },
                        -kHalfPi, kHalfPi, d);
}

// Integral of t over [gamma, 1] under the unnormalised density.
double UpperFirstMoment(size_t d, double gamma) {
  return IntegrateAngle(
      [d](double phi) { return std::sin(phi) * AngleWeight(phi, d); },
      AngleOf(gamma), kHalfPi, d);
}

// P[<x, v> >= t] for uniform v, through the regularised incomplete beta
// function: for t >= 0 it equals I_{1-t^2}((d-1)/2, 1/2) / 2.
double UpperTail(size_t d, double t) {
  const double a = (static_cast<double>(d) - 1) / 2;
  const double half = 0.5 * boost::math::ibeta(a, 0.5, 1 - t * t);
  return t >= 0 ? half : 1 - half;
}

// Inverse of UpperTail for s in [0, 1].
double InverseUpperTail(size_t d, double s) {
  const double a = (static_cast<double>(d) - 1) / 2;
  const bool upper = s <= 0.5;
  const double mass = upper ? 2 * s : 2 * (1 - s);
  if (mass <= 0) return upper ? 1.0 : -1.0;
  double one_minus_x = 0;
  boost::math::ibeta_inv(a, 0.5, std::min(mass, 1.0), &one_minus_x);
  const double t = std::sqrt(std::clamp(one_minus_x, 0.0, 1.0));
  return upper ? t : -t;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double PrivHsNorm(size_t d, double eps) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  CheckEps(eps);
  const double flip = 1.0 / std::tanh(eps / 2);
  const double half_d = static_cast<double>(d) / 2;
  return flip * std::sqrt(std::numbers::pi) *
         std::exp(std::lgamma(half_d + 0.5) - std::lgamma(half_d));
}

double CapFraction(size_t d, double gamma) {
  if (d < 2) throw std::invalid_argument("CapFraction needs d >= 2");
  if (!(gamma >= -1 && gamma <= 1)) {
    throw std::invalid_argument("gamma must lie in [-1, 1]");
  }
  const auto weight = [d](double phi) { return AngleWeight(phi, d); };
  const double upper = IntegrateAngle(weight, AngleOf(gamma), kHalfPi, d);
  return std::clamp(upper / MarginalMass(d), 0.0, 1.0);
}

MeanParams MakePrivHsParams(size_t d, double eps) {
  MeanParams params;
  params.d = d;
  params.eps = eps;
  params.hs_norm = PrivHsNorm(d, eps);
  return params;
}

MeanParams MakePrivUnitParams(size_t d, double eps, double theta) {
  if (d < 2) throw std::invalid_argument("PrivUnit needs d >= 2");
  CheckEps(eps);
  if (!(theta >= 0 && theta <= 1)) {
    throw std::invalid_argument("theta must lie in [0, 1]");
  }
  MeanParams params;
  params.d = d;
  params.eps = eps;
  params.theta = theta;
  params.eps0 = theta * eps;
  params.eps1 = eps - params.eps0;
  params.p_cap = 1 / (1 + std::exp(-params.eps0));
  params.cap_mass = 1 / (1 + std::exp(params.eps1));
  params.hs_norm = PrivHsNorm(d, eps);

  const double z = MarginalMass(d);
  const auto weight = [d](double phi) { return AngleWeight(phi, d); };
  const auto cap = [&](double g) {
    return IntegrateAngle(weight, AngleOf(g), kHalfPi, d) / z;
  };
  // cap_mass <= 1/2, so gamma_cap lies in [0, 1) where cap() decreases.
  // Newton steps on the quadrature from the incomplete-beta inverse, which
  // is already close; bisection is the fallback.
  const auto density = [&](double g) {
    return std::exp((static_cast<double>(d) - 3) / 2 * std::log1p(-g * g)) / z;
  };
  double gamma = std::clamp(InverseUpperTail(d, params.cap_mass), 0.0, 1.0);
  double q = cap(gamma);
  for (int i = 0; i < 8 && std::abs(q - params.cap_mass) > 1e-13; ++i) {
    const double slope = density(gamma);
    if (!(slope > 0) || !std::isfinite(slope)) break;
    gamma = std::clamp(gamma + (q - params.cap_mass) / slope, 0.0, 1.0);
    q = cap(gamma);
  }
  if (std::abs(q - params.cap_mass) > 1e-10) {
    double lo = 0, hi = 1;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      const double mid = (lo + hi) / 2;
      (cap(mid) > params.cap_mass ? lo : hi) = mid;
    }
    gamma = (lo + hi) / 2;
    q = cap(gamma);
  }
  params.gamma_cap = gamma;
  if (std::abs(q - params.cap_mass) > 1e-9) {
    throw std::runtime_error("cap threshold did not converge");
  }

  const double first = UpperFirstMoment(d, params.gamma_cap) / z;
  // E[t | t >= gamma] q + E[t | t < gamma] (1 - q) = E[t] = 0.
  params.m = params.p_cap * first / q - (1 - params.p_cap) * first / (1 - q);
  if (!(params.m > 0)) {
    throw std::domain_error("PrivUnit debias constant is not positive");
  }
  return params;
}

SplitChoice OptimizeSplit(double eps, size_t d) {
  CheckEps(eps);
  SplitChoice best;
  for (int i = 0; i <= 100; ++i) {
    const double theta = i / 100.0;
    MeanParams params = MakePrivUnitParams(d, eps, theta);
    if (i == 0 || params.proxy() < best.proxy) {
      best = {theta, params.proxy(), params};
    }
  }
  return best;
}

void CheckUnit(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("empty input vector");
  const double norm = std::sqrt(Dot(x, x));
  if (!(std::abs(norm - 1) <= 1e-9)) {
    throw std::invalid_argument("input must be a unit vector, got norm " +
                                std::to_string(norm));
  }
}

Vector LiftToSphere(std::span<const double> x) {
  const double sq = Dot(x, x);
  if (!(sq <= 1 + 1e-12)) {
    throw std::invalid_argument("LiftToSphere: input outside the unit ball");
  }
  Vector out(x.begin(), x.end());
  out.push_back(std::sqrt(std::max(0.0, 1 - sq)));
  return out;
}

Vector HsDirection(const Seed& seed, const Generator& prg, size_t d) {
  BitStream expanded = prg.Open(seed);
  return UniformUnitVector(expanded, d);
}

HsReport PrivHsEncode(std::span<const double> x, double eps,
                      const Generator& prg, BitStream& stream) {
  CheckUnit(x);
  CheckEps(eps);
  HsReport report;
  report.seed = prg.DrawSeed(stream);
  const Vector v = HsDirection(report.seed, prg, x.size());
  const int agree = Dot(x, v) >= 0 ? 1 : -1;
  const bool keep = Bernoulli(stream, 1 / (1 + std::exp(-eps)));
  report.sign = keep ? agree : -agree;
  return report;
}

Vector PrivHsDecode(const HsReport& report, const MeanParams& params,
                    const Generator& prg) {
  if (report.sign != 1 && report.sign != -1) {
    throw std::invalid_argument("PrivHS sign must be +1 or -1");
  }
  Vector v = HsDirection(report.seed, prg, params.d);
  const double scale = params.hs_norm * report.sign;
  for (double& c : v) c *= scale;
  return v;
}

Vector SampleCap(std::span<const double> x, const MeanParams& params,
                 bool cap, BitStream& stream) {
  const size_t d = params.d;
  if (x.size() != d) throw std::invalid_argument("dimension mismatch");
  // t from the marginal restricted to [gamma, 1] or [-1, gamma).
  const double tail = UpperTail(d, params.gamma_cap);
  const double u = UniformDouble(stream);
  const double s = cap ? tail * (1 - u) : tail + (1 - tail) * u;
  const double t =
      cap ? std::max(InverseUpperTail(d, s), params.gamma_cap)
          : std::min(InverseUpperTail(d, s), params.gamma_cap);

  // u_perp uniform on the unit sphere orthogonal to x.
  Vector perp(d);
  double norm = 0;
  while (!(norm > 1e-12)) {
    FillStandardNormal(stream, perp);
    const double proj = Dot(perp, x);
    for (size_t i = 0; i < d; ++i) perp[i] -= proj * x[i];
    norm = std::sqrt(Dot(perp, perp));
  }
  const double r = std::sqrt(std::max(0.0, 1 - t * t)) / norm;
  Vector v(d);
  for (size_t i = 0; i < d; ++i) v[i] = t * x[i] + r * perp[i];
  const double vn = std::sqrt(Dot(v, v));
  for (double& c : v) c /= vn;
  return v;
}

Vector PrivUnitEncode(std::span<const double> x, const MeanParams& params,
                      BitStream& stream) {
  CheckUnit(x);
  const bool cap = Bernoulli(stream, params.p_cap);
  return SampleCap(x, params, cap, stream);
}

Vector PrivUnitDecode(std::span<const double> v, const MeanParams& params) {
  if (v.size() != params.d) throw std::invalid_argument("dimension mismatch");
  if (!(params.m > 0)) throw std::domain_error("invalid debias constant");
  Vector out(v.begin(), v.end());
  for (double& c : out) c /= params.m;
  return out;
}

RandomizerSpec<Vector, Vector> PrivUnitRandomizerSpec(
    const MeanParams& params) {
  const double in_cap = params.p_cap / params.cap_mass;
  const double off_cap = (1 - params.p_cap) / (1 - params.cap_mass);
  const double gamma = params.gamma_cap;
  const size_t d = params.d;
  RandomizerSpec<Vector, Vector> spec;
  spec.t_bits = uint64_t{1} << 40;
  spec.eps = std::log(std::max(in_cap, off_cap));
  spec.ref_sample = [d](BitStream& s) { return UniformUnitVector(s, d); };
  spec.density_ratio = [=](const Vector& x, const Vector& v) {
    return Dot(x, v) >= gamma ? in_cap : off_cap;
  };
  return spec;
}

Seed CompressPrivUnit(std::span<const double> x, const MeanParams& params,
                      const CompressionConfig& cfg, BitStream& entropy,
                      CompressionStats* stats) {
  CheckUnit(x);
  const Vector input(x.begin(), x.end());
  return CompressPure(input, PrivUnitRandomizerSpec(params), cfg, entropy,
                      stats);
}

Vector DecompressPrivUnit(const Seed& seed, const MeanParams& params,
                          const Generator& prg) {
  BitStream expanded = prg.Open(seed);
  return PrivUnitDecode(UniformUnitVector(expanded, params.d), params);
}

Vector Average(std::span<const Vector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("Average: no vectors");
  Vector sum(vectors.front().size(), 0.0);
  for (const Vector& v : vectors) {
    if (v.size() != sum.size()) {
      throw std::invalid_argument("Average: dimension mismatch");
    }
    for (size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
  }
  for (double& c : sum) c /= static_cast<double>(vectors.size());
  return sum;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("SquaredDistance: dimension mismatch");
  }
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace ldpc::mean
