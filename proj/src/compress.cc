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

#include "ldpc/compress.h"

namespace ldpc {
namespace {

uint64_t CeilIterations(double x) {
  if (!(x > 0) || !std::isfinite(x)) {
    throw std::invalid_argument("iteration bound must be finite and positive");
  }
  // Shave float noise so that e.g. e^{ln 3} * k does not round up a step.
  return std::max<uint64_t>(1, static_cast<uint64_t>(std::ceil(x * (1 - 1e-12))));
}

void CheckGamma(double gamma) {
  if (!(gamma > 0 && gamma < 1)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
}

}  // namespace

uint64_t PureIterations(double eps, double gamma) {
  CheckGamma(gamma);
  return CeilIterations(std::exp(eps) * std::log(1 / gamma));
}

uint64_t ApproxIterations(double eps, double delta, double gamma) {
  CheckGamma(gamma);
  if (!(delta >= 0 && delta < 1)) {
    throw std::invalid_argument("delta must lie in [0, 1)");
  }
  return CeilIterations(std::exp(eps) * std::log(1 / gamma) / (1 - delta));
}

CompressionConfig CompressionConfig::Pure(
    double eps, double gamma, std::shared_ptr<const Generator> prg) {
  return {gamma, std::move(prg), PureIterations(eps, gamma)};
}

CompressionConfig CompressionConfig::Approx(
    double eps, double delta, double gamma,
    std::shared_ptr<const Generator> prg) {
  return {gamma, std::move(prg), ApproxIterations(eps, delta, gamma)};
}

double AcceptanceProbability(double ratio, double eps, bool truncate) {
  if (!(ratio >= 0) || std::isnan(ratio)) {
    throw std::domain_error("density ratio must be nonnegative");
  }
  const double bound = std::exp(eps);
  if (!truncate && ratio > bound + kRatioTolerance) {
    throw std::domain_error("density ratio " + std::to_string(ratio) +
                            " exceeds e^eps = " + std::to_string(bound));
  }
  return std::clamp(ratio / bound, 0.0, 1.0);
}

std::vector<double> UniformThetaGrid(double eps) {
  const double top = std::exp(eps);
  std::vector<double> grid(256);
  for (int i = 0; i < 256; ++i) grid[i] = top * i / 255.0;
  return grid;
}

namespace internal {

std::vector<double> TailMass(
    const std::vector<std::pair<double, double>>& weighted_values,
    const std::vector<double>& thetas) {
  auto sorted = weighted_values;
  std::sort(sorted.begin(), sorted.end());
  // suffix[i] = total weight of sorted[i..].
  std::vector<double> suffix(sorted.size() + 1, 0.0);
  for (size_t i = sorted.size(); i-- > 0;) {
    suffix[i] = suffix[i + 1] + sorted[i].second;
  }
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double theta : thetas) {
    auto it = std::lower_bound(
        sorted.begin(), sorted.end(), theta,
        [](const std::pair<double, double>& v, double t) { return v.first < t; });
    out.push_back(suffix[it - sorted.begin()]);
  }
  return out;
}

std::vector<double> Breakpoints(
    const std::vector<std::pair<double, double>>& a,
    const std::vector<std::pair<double, double>>& b) {
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  for (const auto& v : a) grid.push_back(v.first);
  for (const auto& v : b) grid.push_back(v.first);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace internal
}  // namespace ldpc
