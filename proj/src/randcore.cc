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

#include "ldpc/randcore.h"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <utility>

namespace ldpc {
namespace {

// IETF ChaCha20 has a 32-bit block counter of 64-byte blocks.
constexpr uint64_t kMaxKeystreamBits = (uint64_t{1} << 32) * 512;

void EnsureSodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

void AppendBits(std::vector<uint8_t>& buf, uint64_t& nbits, uint64_t value,
                int n) {
  for (int i = 0; i < n; ++i) {
    if (nbits % 8 == 0) buf.push_back(0);
    if ((value >> i) & 1) buf.back() |= static_cast<uint8_t>(1u << (nbits % 8));
    ++nbits;
  }
}

size_t BytesFor(uint64_t bits) { return static_cast<size_t>((bits + 7) / 8); }

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

// ---- Seed ------------------------------------------------------------------

Seed::Seed(std::vector<uint8_t> bytes, size_t bits)
    : bytes_(std::move(bytes)), bits_(bits) {
  if (bytes_.size() != BytesFor(bits_)) {
    throw std::invalid_argument("Seed: " + std::to_string(bytes_.size()) +
                                " bytes cannot hold exactly " +
                                std::to_string(bits_) + " bits");
  }
  if (bits_ % 8 != 0 && (bytes_.back() >> (bits_ % 8)) != 0) {
    throw std::invalid_argument("Seed: nonzero padding bits");
  }
}

Seed Seed::FromIndex(uint64_t index, size_t bits) {
  if (bits > 64 || (bits < 64 && (index >> bits) != 0)) {
    throw std::invalid_argument("Seed::FromIndex: index does not fit");
  }
  std::vector<uint8_t> bytes(BytesFor(bits));
  for (size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<uint8_t>(index >> (8 * i));
  }
  return Seed(std::move(bytes), bits);
}

Seed Seed::FromHex(const std::string& hex, size_t bits) {
  if (hex.size() != 2 * BytesFor(bits)) {
    throw std::invalid_argument("Seed::FromHex: expected " +
                                std::to_string(2 * BytesFor(bits)) +
                                " hex digits");
  }
  std::vector<uint8_t> bytes(BytesFor(bits));
  for (size_t i = 0; i < bytes.size(); ++i) {
    int hi = HexValue(hex[2 * i]);
    int lo = HexValue(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw std::invalid_argument("Seed::FromHex: invalid hex digit");
    }
    bytes[i] = static_cast<uint8_t>(hi * 16 + lo);
  }
  return Seed(std::move(bytes), bits);
}

uint64_t Seed::ToIndex() const {
  if (bits_ > 64) throw std::invalid_argument("Seed::ToIndex: seed too wide");
  uint64_t index = 0;
  for (size_t i = 0; i < bytes_.size(); ++i) {
    index |= static_cast<uint64_t>(bytes_[i]) << (8 * i);
  }
  return index;
}

std::string Seed::ToHex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * bytes_.size());
  for (uint8_t b : bytes_) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

std::string PrgFamilyName(PrgFamily family) {
  switch (family) {
    case PrgFamily::kChaCha20:
      return "chacha20";
    case PrgFamily::kIdentity:
      return "identity";
    case PrgFamily::kConstant:
      return "constant";
    case PrgFamily::kTable:
      return "table";
    case PrgFamily::kCustom:
      return "custom";
  }
  return "unknown";
}

// ---- BitStream -------------------------------------------------------------

BitStream BitStream::FromBits(std::vector<uint8_t> packed, uint64_t nbits) {
  if (packed.size() < BytesFor(nbits)) {
    throw std::invalid_argument("BitStream::FromBits: buffer too short");
  }
  BitStream s;
  s.data_ = std::move(packed);
  s.limit_ = nbits;
  return s;
}

BitStream BitStream::FromKey(const std::array<uint8_t, 32>& key,
                             const std::array<uint8_t, 12>& nonce,
                             uint64_t limit_bits) {
  EnsureSodium();
  BitStream s;
  s.keyed_ = true;
  s.key_ = key;
  s.nonce_ = nonce;
  s.limit_ = std::min(limit_bits, kMaxKeystreamBits);
  s.block_start_bit_ = UINT64_MAX;
  return s;
}

BitStream::BitStream(BitStream&&) noexcept = default;
BitStream& BitStream::operator=(BitStream&&) noexcept = default;

BitStream::~BitStream() { sodium_memzero(key_.data(), key_.size()); }

void BitStream::Refill() {
  const uint64_t block = consumed_ / 512;
  static constexpr std::array<uint8_t, 64> kZeros{};
  crypto_stream_chacha20_ietf_xor_ic(block_.data(), kZeros.data(),
                                     kZeros.size(), nonce_.data(),
                                     static_cast<uint32_t>(block), key_.data());
  block_start_bit_ = block * 512;
}

bool BitStream::ReadBit() { return ReadBits(1) != 0; }

uint64_t BitStream::ReadBits(int n) {
  if (n < 0 || n > 64) throw std::invalid_argument("ReadBits: n > 64");
  if (limit_ - consumed_ < static_cast<uint64_t>(n)) {
    throw StreamExhausted("BitStream exhausted after " +
                          std::to_string(consumed_) + " bits");
  }
  uint64_t result = 0;
  int got = 0;
  while (got < n) {
    const uint64_t pos = consumed_;
    const int offset = static_cast<int>(pos % 8);
    const int take = std::min(8 - offset, n - got);
    uint8_t byte;
    if (keyed_) {
      if (pos < block_start_bit_ || pos >= block_start_bit_ + 512) Refill();
      byte = block_[(pos - block_start_bit_) / 8];
    } else {
      byte = data_[pos / 8];
    }
    const uint64_t chunk = (byte >> offset) & ((1u << take) - 1);
    result |= chunk << got;
    got += take;
    consumed_ += take;
  }
  if (recording_) AppendBits(record_, record_bits_, result, n);
  return result;
}

void BitStream::StartRecording() {
  recording_ = true;
  record_.clear();
  record_bits_ = 0;
}

std::vector<uint8_t> BitStream::TakeRecording(uint64_t* nbits) {
  recording_ = false;
  *nbits = record_bits_;
  record_bits_ = 0;
  return std::exchange(record_, {});
}

// ---- Generators ------------------------------------------------------------

uint64_t Generator::seed_count() const {
  return spec_.seed_bits >= 64 ? UINT64_MAX : uint64_t{1} << spec_.seed_bits;
}

Seed Generator::DrawSeed(BitStream& entropy) const {
  std::vector<uint8_t> bytes(BytesFor(spec_.seed_bits));
  size_t remaining = spec_.seed_bits;
  for (auto& b : bytes) {
    const int take = static_cast<int>(std::min<size_t>(8, remaining));
    b = static_cast<uint8_t>(entropy.ReadBits(take));
    remaining -= take;
  }
  return Seed(std::move(bytes), spec_.seed_bits);
}

void Generator::CheckWidth(const Seed& seed) const {
  if (seed.bits() != spec_.seed_bits) {
    throw std::invalid_argument(
        "seed width " + std::to_string(seed.bits()) + " does not match " +
        PrgFamilyName(spec_.family) + " generator width " +
        std::to_string(spec_.seed_bits));
  }
}

std::vector<uint8_t> Generator::Expand(const Seed& seed) const {
  return Expand(seed, spec_.output_bits);
}

std::vector<uint8_t> Generator::Expand(const Seed& seed, uint64_t nbits) const {
  BitStream s = Open(seed);
  std::vector<uint8_t> out;
  uint64_t written = 0;
  while (written < nbits) {
    const int take = static_cast<int>(std::min<uint64_t>(64, nbits - written));
    AppendBits(out, written, s.ReadBits(take), take);
  }
  return out;
}

ChaChaGenerator::ChaChaGenerator(size_t seed_bits, uint64_t output_bits)
    : Generator(PrgSpec{.seed_bits = seed_bits,
                        .output_bits = output_bits,
                        .family = PrgFamily::kChaCha20}) {
  if (seed_bits == 0 || seed_bits > 256) {
    throw std::invalid_argument("ChaChaGenerator: seed width must be 1..256");
  }
  if (output_bits < seed_bits) {
    throw std::invalid_argument("ChaChaGenerator: output shorter than seed");
  }
}

BitStream ChaChaGenerator::Open(const Seed& seed) const {
  CheckWidth(seed);
  std::array<uint8_t, 32> key{};
  std::copy(seed.bytes().begin(), seed.bytes().end(), key.begin());
  std::array<uint8_t, 12> nonce = {'l', 'd', 'p', 'c', 'e', 'x', 'p', 0};
  const uint32_t width = static_cast<uint32_t>(spec().seed_bits);
  std::memcpy(nonce.data() + 8, &width, sizeof(width));
  return BitStream::FromKey(key, nonce, spec().output_bits);
}

IdentityGenerator::IdentityGenerator(size_t bits)
    : Generator(PrgSpec{.seed_bits = bits,
                        .output_bits = bits,
                        .family = PrgFamily::kIdentity}) {}

BitStream IdentityGenerator::Open(const Seed& seed) const {
  CheckWidth(seed);
  return BitStream::FromBits(seed.bytes(), seed.bits());
}

ConstantGenerator::ConstantGenerator(size_t seed_bits,
                                     std::vector<uint8_t> packed,
                                     uint64_t nbits)
    : Generator(PrgSpec{.seed_bits = seed_bits,
                        .output_bits = nbits,
                        .family = PrgFamily::kConstant}),
      packed_(std::move(packed)) {
  if (packed_.size() < BytesFor(nbits)) {
    throw std::invalid_argument("ConstantGenerator: buffer too short");
  }
}

BitStream ConstantGenerator::Open(const Seed& seed) const {
  CheckWidth(seed);
  return BitStream::FromBits(packed_, spec().output_bits);
}

namespace {

size_t TableSeedBits(uint64_t n) {
  return n <= 1 ? 0 : static_cast<size_t>(std::bit_width(n - 1));
}

uint64_t MaxBits(const std::vector<TableGenerator::Entry>& entries) {
  uint64_t m = 0;
  for (const auto& e : entries) m = std::max(m, e.nbits);
  return m;
}

}  // namespace

TableGenerator::TableGenerator(std::vector<Entry> entries)
    : Generator(PrgSpec{.seed_bits = TableSeedBits(entries.size()),
                        .output_bits = MaxBits(entries),
                        .family = PrgFamily::kTable}),
      entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw std::invalid_argument("TableGenerator: table must be nonempty");
  }
}

std::shared_ptr<TableGenerator> TableGenerator::Record(
    const std::function<void(BitStream&)>& sampler, uint64_t n,
    const Seed& master_seed) {
  if (n == 0) throw std::invalid_argument("TableGenerator: N must be >= 1");
  std::vector<Entry> entries;
  entries.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    BitStream s = DeriveStream(master_seed, 0x7ab1e, i);
    s.StartRecording();
    sampler(s);
    Entry e;
    e.packed = s.TakeRecording(&e.nbits);
    entries.push_back(std::move(e));
  }
  return std::make_shared<TableGenerator>(std::move(entries));
}

Seed TableGenerator::DrawSeed(BitStream& entropy) const {
  return Seed::FromIndex(UniformMod(entropy, entries_.size()),
                         spec().seed_bits);
}

BitStream TableGenerator::Open(const Seed& seed) const {
  CheckWidth(seed);
  const uint64_t index = seed.ToIndex();
  if (index >= entries_.size()) {
    throw std::invalid_argument("TableGenerator: seed index out of range");
  }
  return BitStream::FromBits(entries_[index].packed, entries_[index].nbits);
}

FunctionGenerator::FunctionGenerator(size_t seed_bits, uint64_t output_bits,
                                     Fn fn, uint64_t seed_count)
    : Generator(PrgSpec{.seed_bits = seed_bits,
                        .output_bits = output_bits,
                        .family = PrgFamily::kCustom}),
      fn_(std::move(fn)),
      count_(seed_count != 0 ? seed_count : uint64_t{1} << seed_bits) {
  if (seed_bits > 63) {
    throw std::invalid_argument("FunctionGenerator: seeds must be < 64 bits");
  }
  if (count_ > (uint64_t{1} << seed_bits)) {
    throw std::invalid_argument("FunctionGenerator: seed count too large");
  }
}

Seed FunctionGenerator::DrawSeed(BitStream& entropy) const {
  return Seed::FromIndex(UniformMod(entropy, count_), spec().seed_bits);
}

BitStream FunctionGenerator::Open(const Seed& seed) const {
  CheckWidth(seed);
  const uint64_t index = seed.ToIndex();
  if (index >= count_) {
    throw std::invalid_argument("FunctionGenerator: seed index out of range");
  }
  return BitStream::FromBits(fn_(index), spec().output_bits);
}

std::shared_ptr<Generator> MakeGenerator(const PrgSpec& spec) {
  switch (spec.family) {
    case PrgFamily::kChaCha20:
      return std::make_shared<ChaChaGenerator>(spec.seed_bits,
                                               spec.output_bits);
    case PrgFamily::kIdentity:
      return std::make_shared<IdentityGenerator>(spec.seed_bits);
    default:
      throw std::invalid_argument("MakeGenerator: family " +
                                  PrgFamilyName(spec.family) +
                                  " needs explicit construction");
  }
}

BitStream DeriveStream(const Seed& master_seed, uint32_t trial,
                       uint64_t client) {
  EnsureSodium();
  static constexpr char kLabel[] = "ldpc/derive-stream/v1";
  std::array<uint8_t, 32> key;
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, key.size());
  crypto_generichash_update(&st, reinterpret_cast<const uint8_t*>(kLabel),
                            sizeof(kLabel) - 1);
  const uint64_t width = master_seed.bits();
  crypto_generichash_update(&st, reinterpret_cast<const uint8_t*>(&width),
                            sizeof(width));
  crypto_generichash_update(&st, master_seed.bytes().data(),
                            master_seed.bytes().size());
  crypto_generichash_final(&st, key.data(), key.size());
  std::array<uint8_t, 12> nonce{};
  std::memcpy(nonce.data(), &trial, sizeof(trial));
  std::memcpy(nonce.data() + 4, &client, sizeof(client));
  return BitStream::FromKey(key, nonce);
}

BitStream SystemEntropy() {
  EnsureSodium();
  std::array<uint8_t, 32> key;
  randombytes_buf(key.data(), key.size());
  return BitStream::FromKey(key, std::array<uint8_t, 12>{});
}

// ---- Samplers --------------------------------------------------------------

bool Bernoulli(BitStream& stream, double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("Bernoulli: probability outside [0, 1]");
  }
  if (prob == 1.0) return true;
  // Digits of prob are produced by exact doubling; terminates once the
  // remaining fraction is zero.
  double rest = prob;
  while (rest > 0.0) {
    rest *= 2.0;
    const int digit = rest >= 1.0 ? 1 : 0;
    if (digit) rest -= 1.0;
    const int u = stream.ReadBit() ? 1 : 0;
    if (u != digit) return u < digit;
  }
  return false;
}

bool BernoulliRational(BitStream& stream, uint64_t num, uint64_t den) {
  if (den == 0 || num > den) {
    throw std::invalid_argument("BernoulliRational: need 0 <= num <= den");
  }
  if (num == den) return true;
  unsigned __int128 rest = num;
  while (rest != 0) {
    rest *= 2;
    const int digit = rest >= den ? 1 : 0;
    if (digit) rest -= den;
    const int u = stream.ReadBit() ? 1 : 0;
    if (u != digit) return u < digit;
  }
  return false;
}

uint64_t UniformMod(BitStream& stream, uint64_t m) {
  if (m == 0) throw std::invalid_argument("UniformMod: m must be >= 1");
  if (m == 1) return 0;
  const int width = std::bit_width(m - 1);
  if (std::has_single_bit(m)) return stream.ReadBits(width);
  while (true) {
    const uint64_t v = stream.ReadBits(width);
    if (v < m) return v;
  }
}

double UniformDouble(BitStream& stream) {
  return static_cast<double>(stream.ReadBits(53)) * 0x1.0p-53;
}

std::array<double, 2> StandardNormalPair(BitStream& stream) {
  double u, v, s;
  do {
    u = 2.0 * UniformDouble(stream) - 1.0;
    v = 2.0 * UniformDouble(stream) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  return {u * f, v * f};
}

void FillStandardNormal(BitStream& stream, std::span<double> out) {
  size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    const auto [a, b] = StandardNormalPair(stream);
    out[i] = a;
    out[i + 1] = b;
  }
  if (i < out.size()) out[i] = StandardNormalPair(stream)[0];
}

std::vector<double> UniformUnitVector(BitStream& stream, size_t d) {
  if (d == 0) throw std::invalid_argument("UniformUnitVector: d must be >= 1");
  std::vector<double> v(d);
  double norm2 = 0.0;
  do {
    FillStandardNormal(stream, v);
    norm2 = 0.0;
    for (double x : v) norm2 += x * x;
  } while (norm2 == 0.0);
  if (d == 1) {
    v[0] = v[0] < 0 ? -1.0 : 1.0;
    return v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

}  // namespace ldpc
