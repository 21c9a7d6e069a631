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

// Binary report files.
//
// Layout (all integers little-endian):
//
//   "LDPC"                magic
//   u8                    format version (1)
//   u8                    scheme tag
//   u64                   k (frequency) or d (mean)
//   u64                   field size q (0 for mean schemes)
//   u32                   field dimension
//   u64 u64 u64           alpha0 * q, alpha1 numerator, alpha1 denominator
//   u8                    RAPPOR variant
//   f64                   eps (IEEE-754 binary64)
//   f64                   PrivUnit split theta
//   u32                   repetitions per client
//   u32                   seed width in bits
//   u8                    generator family
//   u64                   record count
//   records               fixed width, see RecordBytes()
//
// Records: PI-RAPPOR stores dim + 1 u64 coefficients, RAPPOR stores k bits
// packed into ceil(k/8) bytes, PrivHS stores the seed bytes then one sign
// byte (0x01 or 0xff), compressed PrivUnit stores the seed bytes, and raw
// PrivUnit stores d binary64 values.

#ifndef LDPC_WIRE_H_
#define LDPC_WIRE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldpc/freq.h"
#include "ldpc/mean.h"
#include "ldpc/randcore.h"

namespace ldpc::wire {

inline constexpr uint8_t kFormatVersion = 1;

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme : uint8_t {
  kPiRappor = 1,
  kRappor = 2,
  kPrivHs = 3,
  kPrivUnitRaw = 4,
  kPrivUnitSeed = 5,
};

std::string SchemeName(Scheme scheme);

struct Header {
  Scheme scheme = Scheme::kPiRappor;
  uint64_t size = 0;
  uint64_t field = 0;
  uint32_t dim = 1;
  uint64_t alpha0_count = 0;
  uint64_t alpha1_num = 0;
  uint64_t alpha1_den = 1;
  uint8_t variant = 0;
  double eps = 0;
  double theta = 0;
  uint32_t reps = 1;
  uint32_t seed_bits = 0;
  uint8_t prg_family = 0;

  friend bool operator==(const Header&, const Header&) = default;
};

Header FreqHeader(Scheme scheme, const freq::RapporParams& params);
freq::RapporParams ParamsFromHeader(const Header& header);

// One mean report. Which fields are used depends on the scheme.
struct MeanRecord {
  Seed seed;
  int sign = 1;
  std::vector<double> vec;

  friend bool operator==(const MeanRecord&, const MeanRecord&) = default;
};

struct Batch {
  Header header;
  std::vector<freq::AffineFn> affine;
  std::vector<std::vector<uint8_t>> bits;
  std::vector<MeanRecord> mean;

  uint64_t record_count() const;

  friend bool operator==(const Batch&, const Batch&) = default;
};

// Size of one record in the file.
uint64_t RecordBytes(const Header& header);

// Information content of one report: (dim + 1) * ceil(log2 q) bits for
// PI-RAPPOR, k bits for RAPPOR, the seed width (plus a sign byte for PrivHS)
// for compressed mean reports, 64 d bits for raw vectors. Multiplied by the
// repetition count.
uint64_t MessageBits(const Header& header);
// ceil(MessageBits / 8); equals the size PackReport produces.
uint64_t MessageBytes(const Header& header);

// Dense bit packing of a single report, for byte accounting and transport.
std::vector<uint8_t> PackAffine(const freq::AffineFn& phi,
                                const Header& header);
freq::AffineFn UnpackAffine(std::span<const uint8_t> packed,
                            const Header& header);

std::vector<uint8_t> Serialize(const Batch& batch);
// Throws WireError on malformed input.
Batch Deserialize(std::span<const uint8_t> bytes);

// File helpers; throw WireError on I/O failure.
void WriteFile(const std::string& path, const Batch& batch);
Batch ReadFile(const std::string& path);

}  // namespace ldpc::wire

#endif  // LDPC_WIRE_H_
