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

// Deterministic seeded randomness shared by clients and the server.
//
// A Seed is expanded by a Generator into a BitStream. Every sampler in this
// library consumes bits from a BitStream in a fixed, documented order, so a
// server holding (seed, generator) reproduces the client's sampled object bit
// for bit. Bits are read least-significant-first within each byte, and a
// multi-bit read places the first bit read in the least significant position.

#ifndef LDPC_RANDCORE_H_
#define LDPC_RANDCORE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldpc {

// Thrown when a stream backed by a finite bit string runs out.
class StreamExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-width opaque seed. Width is in bits; storage is ceil(bits / 8) bytes
// with unused high bits of the last byte required to be zero.
class Seed {
 public:
  Seed() = default;
  Seed(std::vector<uint8_t> bytes, size_t bits);

  // Seed whose bits are the binary expansion of `index` (bit i of the seed is
  // bit i of the index). Requires bits <= 64 and index < 2^bits.
  static Seed FromIndex(uint64_t index, size_t bits);

  // Parses a hex string of exactly ceil(bits/8) bytes.
  static Seed FromHex(const std::string& hex, size_t bits);

  size_t bits() const { return bits_; }
  size_t byte_size() const { return bytes_.size(); }
  const std::vector<uint8_t>& bytes() const { return bytes_; }
  bool bit(size_t i) const { return (bytes_[i / 8] >> (i % 8)) & 1; }

  // Inverse of FromIndex; requires bits <= 64.
  uint64_t ToIndex() const;
  std::string ToHex() const;

  friend bool operator==(const Seed&, const Seed&) = default;
  friend auto operator<=>(const Seed&, const Seed&) = default;

 private:
  std::vector<uint8_t> bytes_;
  size_t bits_ = 0;
};

// Identifier of a seed expansion function. The numeric value is written into
// wire headers, so existing values must never be renumbered.
enum class PrgFamily : uint8_t {
  kChaCha20 = 1,
  kIdentity = 2,
  kConstant = 3,
  kTable = 4,
  kCustom = 0xff,
};

std::string PrgFamilyName(PrgFamily family);

struct PrgSpec {
  size_t seed_bits = 256;
  uint64_t output_bits = uint64_t{1} << 40;
  PrgFamily family = PrgFamily::kChaCha20;
  // Assumed (T, beta) strength. Documentation only; never enforced.
  double assumed_time = 0;
  double assumed_beta = 0;
};

// Sequential reader over either a finite packed bit string or a ChaCha20
// keystream. Single owner; not safe to share between threads.
class BitStream {
 public:
  static BitStream FromBits(std::vector<uint8_t> packed, uint64_t nbits);
  // IETF ChaCha20 keystream under (key, nonce), truncated to limit_bits.
  static BitStream FromKey(const std::array<uint8_t, 32>& key,
                           const std::array<uint8_t, 12>& nonce,
                           uint64_t limit_bits = UINT64_MAX);

  BitStream(BitStream&&) noexcept;
  BitStream& operator=(BitStream&&) noexcept;
  ~BitStream();

  bool ReadBit();
  // Reads n <= 64 bits; the first bit read is the least significant.
  uint64_t ReadBits(int n);

  uint64_t consumed() const { return consumed_; }
  uint64_t limit() const { return limit_; }

  // While recording, every consumed bit is also appended to a side buffer.
  void StartRecording();
  std::vector<uint8_t> TakeRecording(uint64_t* nbits);

 private:
  BitStream() = default;
  void Refill();

  // Finite mode.
  std::vector<uint8_t> data_;
  // Keystream mode.
  bool keyed_ = false;
  std::array<uint8_t, 32> key_{};
  std::array<uint8_t, 12> nonce_{};
  uint32_t next_block_ = 0;
  std::array<uint8_t, 64> block_{};
  uint64_t block_start_bit_ = 0;

  uint64_t limit_ = 0;
  uint64_t consumed_ = 0;
  bool recording_ = false;
  std::vector<uint8_t> record_;
  uint64_t record_bits_ = 0;
};

// Seed expansion G: seeds -> bit strings. Implementations are immutable and
// may be shared across threads.
class Generator {
 public:
  explicit Generator(PrgSpec spec) : spec_(spec) {}
  virtual ~Generator() = default;

  const PrgSpec& spec() const { return spec_; }

  // Size of the seed domain; seeds are the indices [0, seed_count()) when
  // seed_bits <= 64. Defaults to 2^seed_bits.
  virtual uint64_t seed_count() const;

  // Uniform seed from the domain.
  virtual Seed DrawSeed(BitStream& entropy) const;

  // Lazily yields expand(seed). Throws std::invalid_argument on width
  // mismatch.
  virtual BitStream Open(const Seed& seed) const = 0;

  // Materialises the first n bits (default: the whole output) packed
  // least-significant-bit first.
  std::vector<uint8_t> Expand(const Seed& seed) const;
  std::vector<uint8_t> Expand(const Seed& seed, uint64_t nbits) const;

 protected:
  void CheckWidth(const Seed& seed) const;

 private:
  PrgSpec spec_;
};

// Keyed ChaCha20 counter-mode expansion. The seed bytes are zero-padded into
// the 256-bit key and the seed width is folded into the nonce.
class ChaChaGenerator : public Generator {
 public:
  explicit ChaChaGenerator(size_t seed_bits = 256,
                           uint64_t output_bits = uint64_t{1} << 40);
  BitStream Open(const Seed& seed) const override;
};

// G(s) = s, so t == seed width.
class IdentityGenerator : public Generator {
 public:
  explicit IdentityGenerator(size_t bits);
  BitStream Open(const Seed& seed) const override;
};

// Every seed expands to the same fixed bit string.
class ConstantGenerator : public Generator {
 public:
  ConstantGenerator(size_t seed_bits, std::vector<uint8_t> packed,
                    uint64_t nbits);
  BitStream Open(const Seed& seed) const override;

 private:
  std::vector<uint8_t> packed_;
};

// Finite lookup table: seed i expands to stored bit string i. Seeds are
// ceil(log2 N) bits wide and the domain is [0, N).
class TableGenerator : public Generator {
 public:
  struct Entry {
    std::vector<uint8_t> packed;
    uint64_t nbits = 0;
  };

  explicit TableGenerator(std::vector<Entry> entries);

  // Runs `sampler` on N independent keystreams derived from master_seed and
  // records the exact bits each run consumed. Expanding seed i and re-running
  // the sampler therefore reproduces the i-th sample exactly.
  static std::shared_ptr<TableGenerator> Record(
      const std::function<void(BitStream&)>& sampler, uint64_t n,
      const Seed& master_seed);

  uint64_t seed_count() const override { return entries_.size(); }
  Seed DrawSeed(BitStream& entropy) const override;
  BitStream Open(const Seed& seed) const override;

 private:
  std::vector<Entry> entries_;
};

// Arbitrary function of the seed index, for experiments with toy or
// adversarial generators. Seeds are at most 64 bits wide.
class FunctionGenerator : public Generator {
 public:
  using Fn = std::function<std::vector<uint8_t>(uint64_t seed_index)>;
  FunctionGenerator(size_t seed_bits, uint64_t output_bits, Fn fn,
                    uint64_t seed_count = 0);

  uint64_t seed_count() const override { return count_; }
  Seed DrawSeed(BitStream& entropy) const override;
  BitStream Open(const Seed& seed) const override;

 private:
  Fn fn_;
  uint64_t count_;
};

std::shared_ptr<Generator> MakeGenerator(const PrgSpec& spec);

// Independent stream for (master seed, trial, client). Distinct labels give
// disjoint nonces under the same key.
BitStream DeriveStream(const Seed& master_seed, uint32_t trial,
                       uint64_t client);

// Stream keyed from the operating system's entropy source.
BitStream SystemEntropy();

// ---- Primitive samplers ----------------------------------------------------

// Bern(prob) by lazy comparison of a uniform binary fraction with the binary
// expansion of prob. Uses 2 bits in expectation. Throws std::invalid_argument
// unless 0 <= prob <= 1.
bool Bernoulli(BitStream& stream, double prob);

// Bern(num / den) exactly. Requires num <= den and den >= 1.
bool BernoulliRational(BitStream& stream, uint64_t num, uint64_t den);

// Exactly uniform over [0, m) by rejecting out-of-range ceil(log2 m)-bit
// words. For m a power of two this is a single read of log2 m bits.
uint64_t UniformMod(BitStream& stream, uint64_t m);

// Uniform on [0, 1) with 53 bits of resolution.
double UniformDouble(BitStream& stream);

// Two independent standard normals by the Marsaglia polar method.
std::array<double, 2> StandardNormalPair(BitStream& stream);

// Fills `out` with standard normals, two per polar draw.
void FillStandardNormal(BitStream& stream, std::span<double> out);

// Uniform point on the unit sphere in R^d (normalised Gaussian vector).
std::vector<double> UniformUnitVector(BitStream& stream, size_t d);

}  // namespace ldpc

#endif  // LDPC_RANDCORE_H_
