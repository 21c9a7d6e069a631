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

#include "ldpc/field.h"

#include <array>
#include <bit>
#include <stdexcept>
#include <string>

namespace ldpc::field {

uint64_t PowMod(uint64_t base, uint64_t exp, uint64_t p) {
  uint64_t result = 1 % p;
  base %= p;
  while (exp > 0) {
    if (exp & 1) result = MulMod(result, base, p);
    base = MulMod(base, base, p);
    exp >>= 1;
  }
  return result;
}

bool IsPrime(uint64_t n) {
  if (n < 2) return false;
  // These twelve bases are a complete witness set below 3.3 * 10^24.
  static constexpr std::array<uint64_t, 12> kWitnesses = {
      2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (uint64_t w : kWitnesses) {
    if (n % w == 0) return n == w;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (uint64_t a : kWitnesses) {
    uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

uint64_t FindPrime(uint64_t min) {
  if (min < 2 || min >= kMaxModulus) {
    throw std::invalid_argument("FindPrime: min must lie in [2, 2^62), got " +
                                std::to_string(min));
  }
  for (uint64_t n = min; n < kMaxModulus; ++n) {
    if (IsPrime(n)) return n;
  }
  throw std::overflow_error("FindPrime: no prime in [" + std::to_string(min) +
                            ", 2^62)");
}

int BitWidth(uint64_t p) {
  if (p <= 1) return 0;
  return std::bit_width(p - 1);
}

FieldElem::FieldElem(uint64_t value, uint64_t modulus)
    : value_(value), modulus_(modulus) {
  if (modulus < 2 || value >= modulus) {
    throw std::invalid_argument("FieldElem: value " + std::to_string(value) +
                                " not in [0, " + std::to_string(modulus) + ")");
  }
}

BoolThreshold::BoolThreshold(uint64_t threshold, uint64_t modulus)
    : threshold_(threshold), modulus_(modulus) {
  if (threshold < 1 || threshold >= modulus) {
    throw std::invalid_argument("BoolThreshold: threshold " +
                                std::to_string(threshold) + " not in [1, " +
                                std::to_string(modulus) + ")");
  }
}

bool BoolMap(const FieldElem& z, const BoolThreshold& thr) {
  if (z.modulus() != thr.modulus()) {
    throw std::invalid_argument("BoolMap: modulus mismatch");
  }
  return z.value() < thr.threshold();
}

uint64_t AffineEval(std::span<const uint64_t> phi, std::span<const uint64_t> z,
                    uint64_t p) {
  if (phi.size() != z.size() + 1) {
    throw std::invalid_argument(
        "AffineEval: expected " + std::to_string(z.size() + 1) +
        " coefficients, got " + std::to_string(phi.size()));
  }
  if (phi[0] >= p) throw std::invalid_argument("AffineEval: coefficient >= p");
  uint64_t acc = phi[0];
  for (size_t u = 0; u < z.size(); ++u) {
    if (phi[u + 1] >= p || z[u] >= p) {
      throw std::invalid_argument("AffineEval: value outside [0, p)");
    }
    acc = AddMod(acc, MulMod(z[u], phi[u + 1], p), p);
  }
  return acc;
}

uint64_t AffineEval(std::span<const uint64_t> phi, uint64_t z, uint64_t p) {
  return AffineEval(phi, std::span<const uint64_t>(&z, 1), p);
}

}  // namespace ldpc::field
