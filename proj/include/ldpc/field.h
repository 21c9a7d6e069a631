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

#ifndef LDPC_FIELD_H_
#define LDPC_FIELD_H_

#include <cstdint>
#include <span>

namespace ldpc::field {

// Largest modulus supported by the field helpers. Products are formed in
// 128 bits, so anything below 2^62 is safe with room to spare.
inline constexpr uint64_t kMaxModulus = uint64_t{1} << 62;

inline uint64_t AddMod(uint64_t a, uint64_t b, uint64_t p) {
  uint64_t s = a + b;
  return s >= p ? s - p : s;
}

inline uint64_t SubMod(uint64_t a, uint64_t b, uint64_t p) {
  return a >= b ? a - b : a + p - b;
}

inline uint64_t MulMod(uint64_t a, uint64_t b, uint64_t p) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

uint64_t PowMod(uint64_t base, uint64_t exp, uint64_t p);

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool IsPrime(uint64_t n);

// Smallest prime >= min. Requires 2 <= min < 2^62; throws
// std::overflow_error when no prime below 2^62 is >= min.
uint64_t FindPrime(uint64_t min);

// Number of bits needed to write any element of [0, p), i.e. ceil(log2 p).
int BitWidth(uint64_t p);

// An element of GF(p).
class FieldElem {
 public:
  // Throws std::invalid_argument unless value < modulus.
  FieldElem(uint64_t value, uint64_t modulus);

  uint64_t value() const { return value_; }
  uint64_t modulus() const { return modulus_; }

  friend bool operator==(const FieldElem&, const FieldElem&) = default;

 private:
  uint64_t value_;
  uint64_t modulus_;
};

// Threshold map bool(z) = [z < threshold] turning a uniform field element
// into a Bernoulli(threshold / p) bit.
class BoolThreshold {
 public:
  // Throws std::invalid_argument unless 1 <= threshold < modulus.
  BoolThreshold(uint64_t threshold, uint64_t modulus);

  uint64_t threshold() const { return threshold_; }
  uint64_t modulus() const { return modulus_; }
  double probability() const {
    return static_cast<double>(threshold_) / static_cast<double>(modulus_);
  }

 private:
  uint64_t threshold_;
  uint64_t modulus_;
};

// Throws std::invalid_argument if the moduli differ.
bool BoolMap(const FieldElem& z, const BoolThreshold& thr);

// phi[0] + sum_u z[u] * phi[u + 1] mod p. Throws std::invalid_argument when
// phi.size() != z.size() + 1 or a value is outside [0, p).
uint64_t AffineEval(std::span<const uint64_t> phi, std::span<const uint64_t> z,
                    uint64_t p);

// Scalar form phi[0] + z * phi[1].
uint64_t AffineEval(std::span<const uint64_t> phi, uint64_t z, uint64_t p);

}  // namespace ldpc::field

#endif  // LDPC_FIELD_H_
