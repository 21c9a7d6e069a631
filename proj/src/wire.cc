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

#include "ldpc/wire.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ldpc/field.h"

namespace ldpc::wire {
namespace {

constexpr char kMagic[4] = {'L', 'D', 'P', 'C'};

class Writer {
 public:
  void Bytes(std::span<const uint8_t> b) {
    out_.insert(out_.end(), b.begin(), b.end());
  }
  void U8(uint8_t v) { out_.push_back(v); }
  void U32(uint32_t v) { Le(v, 4); }
  void U64(uint64_t v) { Le(v, 8); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  std::vector<uint8_t> Take() { return std::move(out_); }

 private:
  void Le(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> in) : in_(in) {}
  std::span<const uint8_t> Bytes(size_t n) {
    Need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  uint8_t U8() { return Bytes(1)[0]; }
  uint32_t U32() { return static_cast<uint32_t>(Le(4)); }
  uint64_t U64() { return Le(8); }
  double F64() { return std::bit_cast<double>(U64()); }
  size_t remaining() const { return in_.size() - pos_; }

 private:
  void Need(size_t n) const {
    if (in_.size() - pos_ < n) throw WireError("truncated report file");
  }
  uint64_t Le(int n) {
    auto b = Bytes(n);
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

bool IsFreq(Scheme s) { return s == Scheme::kPiRappor || s == Scheme::kRappor; }

uint64_t SeedBytes(const Header& h) { return (uint64_t{h.seed_bits} + 7) / 8; }

// Bits of a single report, without repetition.
uint64_t ReportBits(const Header& h) {
  switch (h.scheme) {
    case Scheme::kPiRappor:
      return uint64_t{h.dim + 1} * field::BitWidth(h.field);
    case Scheme::kRappor:
      return h.size;
    case Scheme::kPrivHs:
      return 8 * SeedBytes(h) + 8;
    case Scheme::kPrivUnitSeed:
      return 8 * SeedBytes(h);
    case Scheme::kPrivUnitRaw:
      return 64 * h.size;
  }
  throw WireError("unknown scheme");
}

void CheckHeader(const Header& h) {
  if (h.size == 0) throw WireError("header: size must be positive");
  if (h.reps == 0) throw WireError("header: reps must be positive");
  switch (h.scheme) {
    case Scheme::kPiRappor:
    case Scheme::kRappor:
      try {
        ParamsFromHeader(h).Validate();
      } catch (const std::invalid_argument& e) {
        throw WireError(std::string("header: ") + e.what());
      }
      if (h.reps != 1) throw WireError("header: frequency reports use reps 1");
      break;
    case Scheme::kPrivHs:
    case Scheme::kPrivUnitSeed:
      if (h.seed_bits == 0) throw WireError("header: seed width is zero");
      break;
    case Scheme::kPrivUnitRaw:
      break;
    default:
      throw WireError("header: unknown scheme tag " +
                      std::to_string(static_cast<int>(h.scheme)));
  }
}

}  // namespace

std::string SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kPiRappor:
      return "pi_rappor";
    case Scheme::kRappor:
      return "rappor";
    case Scheme::kPrivHs:
      return "privhs";
    case Scheme::kPrivUnitRaw:
      return "privunit";
    case Scheme::kPrivUnitSeed:
      return "privunit_compressed";
  }
  return "unknown";
}

Header FreqHeader(Scheme scheme, const freq::RapporParams& params) {
  Header h;
  h.scheme = scheme;
  h.size = params.k;
  h.field = params.p;
  h.dim = params.dim;
  h.alpha0_count = params.alpha0_count;
  h.alpha1_num = params.alpha1_num;
  h.alpha1_den = params.alpha1_den;
  h.variant = static_cast<uint8_t>(params.variant);
  h.eps = params.eps;
  return h;
}

freq::RapporParams ParamsFromHeader(const Header& h) {
  if (!IsFreq(h.scheme)) throw WireError("not a frequency scheme");
  if (h.variant > 1) throw WireError("header: unknown variant");
  freq::RapporParams p;
  p.k = h.size;
  p.p = h.field;
  p.dim = h.dim;
  p.alpha0_count = h.alpha0_count;
  p.alpha1_num = h.alpha1_num;
  p.alpha1_den = h.alpha1_den;
  p.variant = static_cast<freq::RapporVariant>(h.variant);
  p.eps = h.eps;
  if (p.alpha0_count > 0 && p.alpha0_count < p.p) {
    p.realized_eps = std::log(static_cast<double>(p.p - p.alpha0_count) /
                              static_cast<double>(p.alpha0_count));
  } else {
    p.realized_eps = h.eps;
  }
  return p;
}

uint64_t Batch::record_count() const {
  switch (header.scheme) {
    case Scheme::kPiRappor:
      return affine.size();
    case Scheme::kRappor:
      return bits.size();
    default:
      return mean.size();
  }
}

uint64_t RecordBytes(const Header& h) {
  switch (h.scheme) {
    case Scheme::kPiRappor:
      return 8 * uint64_t{h.dim + 1};
    case Scheme::kRappor:
      return (h.size + 7) / 8;
    case Scheme::kPrivHs:
      return SeedBytes(h) + 1;
    case Scheme::kPrivUnitSeed:
      return SeedBytes(h);
    case Scheme::kPrivUnitRaw:
      return 8 * h.size;
  }
  throw WireError("unknown scheme");
}

uint64_t MessageBits(const Header& h) { return ReportBits(h) * h.reps; }

uint64_t MessageBytes(const Header& h) {
  return (ReportBits(h) + 7) / 8 * h.reps;
}

std::vector<uint8_t> PackAffine(const freq::AffineFn& phi,
                                const Header& h) {
  if (h.scheme != Scheme::kPiRappor) throw WireError("not a PI-RAPPOR header");
  if (phi.coeffs.size() != h.dim + 1) {
    throw WireError("coefficient count does not match header");
  }
  const int w = field::BitWidth(h.field);
  std::vector<uint8_t> out((ReportBits(h) + 7) / 8, 0);
  uint64_t pos = 0;
  for (uint64_t c : phi.coeffs) {
    if (c >= h.field) throw WireError("coefficient outside the field");
    for (int b = 0; b < w; ++b, ++pos) {
      if ((c >> b) & 1) out[pos / 8] |= static_cast<uint8_t>(1u << (pos % 8));
    }
  }
  return out;
}

freq::AffineFn UnpackAffine(std::span<const uint8_t> packed,
                            const Header& h) {
  if (h.scheme != Scheme::kPiRappor) throw WireError("not a PI-RAPPOR header");
  if (packed.size() != (ReportBits(h) + 7) / 8) {
    throw WireError("packed report has the wrong size");
  }
  const int w = field::BitWidth(h.field);
  freq::AffineFn phi;
  phi.coeffs.resize(h.dim + 1);
  uint64_t pos = 0;
  for (uint64_t& c : phi.coeffs) {
    c = 0;
    for (int b = 0; b < w; ++b, ++pos) {
      c |= static_cast<uint64_t>((packed[pos / 8] >> (pos % 8)) & 1) << b;
    }
    if (c >= h.field) throw WireError("coefficient outside the field");
  }
  for (; pos < 8 * packed.size(); ++pos) {
    if ((packed[pos / 8] >> (pos % 8)) & 1) {
      throw WireError("nonzero padding in packed report");
    }
  }
  return phi;
}

std::vector<uint8_t> Serialize(const Batch& batch) {
  const Header& h = batch.header;
  CheckHeader(h);
  Writer w;
  w.Bytes(std::span(reinterpret_cast<const uint8_t*>(kMagic), 4));
  w.U8(kFormatVersion);
  w.U8(static_cast<uint8_t>(h.scheme));
  w.U64(h.size);
  w.U64(h.field);
  w.U32(h.dim);
  w.U64(h.alpha0_count);
  w.U64(h.alpha1_num);
  w.U64(h.alpha1_den);
  w.U8(h.variant);
  w.F64(h.eps);
  w.F64(h.theta);
  w.U32(h.reps);
  w.U32(h.seed_bits);
  w.U8(h.prg_family);
  w.U64(batch.record_count());
  switch (h.scheme) {
    case Scheme::kPiRappor:
      for (const auto& phi : batch.affine) {
        if (phi.coeffs.size() != h.dim + 1) {
          throw WireError("coefficient count does not match header");
        }
        for (uint64_t c : phi.coeffs) {
          if (c >= h.field) throw WireError("coefficient outside the field");
          w.U64(c);
        }
      }
      break;
    case Scheme::kRappor:
      for (const auto& bits : batch.bits) {
        if (bits.size() != h.size) throw WireError("RAPPOR report length");
        std::vector<uint8_t> packed(RecordBytes(h), 0);
        for (uint64_t i = 0; i < h.size; ++i) {
          if (bits[i] > 1) throw WireError("RAPPOR bits must be 0 or 1");
          packed[i / 8] |= static_cast<uint8_t>(bits[i] << (i % 8));
        }
        w.Bytes(packed);
      }
      break;
    case Scheme::kPrivHs:
    case Scheme::kPrivUnitSeed:
      for (const auto& r : batch.mean) {
        if (r.seed.bits() != h.seed_bits) throw WireError("seed width");
        w.Bytes(r.seed.bytes());
        if (h.scheme == Scheme::kPrivHs) {
          if (r.sign != 1 && r.sign != -1) throw WireError("sign must be +-1");
          w.U8(r.sign == 1 ? 0x01 : 0xff);
        }
      }
      break;
    case Scheme::kPrivUnitRaw:
      for (const auto& r : batch.mean) {
        if (r.vec.size() != h.size) throw WireError("vector dimension");
        for (double v : r.vec) w.F64(v);
      }
      break;
  }
  return w.Take();
}

Batch Deserialize(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.Bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw WireError("bad magic");
  }
  const uint8_t version = r.U8();
  if (version != kFormatVersion) {
    throw WireError("unsupported format version " + std::to_string(version));
  }
  Batch batch;
  Header& h = batch.header;
  h.scheme = static_cast<Scheme>(r.U8());
  h.size = r.U64();
  h.field = r.U64();
  h.dim = r.U32();
  h.alpha0_count = r.U64();
  h.alpha1_num = r.U64();
  h.alpha1_den = r.U64();
  h.variant = r.U8();
  h.eps = r.F64();
  h.theta = r.F64();
  h.reps = r.U32();
  h.seed_bits = r.U32();
  h.prg_family = r.U8();
  CheckHeader(h);
  const uint64_t count = r.U64();
  const uint64_t width = RecordBytes(h);
  if (width == 0 || count > r.remaining() / width ||
      count * width != r.remaining()) {
    throw WireError("record section does not match the record count");
  }
  for (uint64_t i = 0; i < count; ++i) {
    switch (h.scheme) {
      case Scheme::kPiRappor: {
        freq::AffineFn phi;
        phi.coeffs.resize(h.dim + 1);
        for (uint64_t& c : phi.coeffs) {
          c = r.U64();
          if (c >= h.field) throw WireError("coefficient outside the field");
        }
        batch.affine.push_back(std::move(phi));
        break;
      }
      case Scheme::kRappor: {
        auto packed = r.Bytes(width);
        std::vector<uint8_t> bits(h.size);
        for (uint64_t j = 0; j < h.size; ++j) {
          bits[j] = (packed[j / 8] >> (j % 8)) & 1;
        }
        for (uint64_t j = h.size; j < 8 * width; ++j) {
          if ((packed[j / 8] >> (j % 8)) & 1) {
            throw WireError("nonzero padding in RAPPOR record");
          }
        }
        batch.bits.push_back(std::move(bits));
        break;
      }
      case Scheme::kPrivHs:
      case Scheme::kPrivUnitSeed: {
        MeanRecord rec;
        auto seed = r.Bytes(SeedBytes(h));
        try {
          rec.seed = Seed({seed.begin(), seed.end()}, h.seed_bits);
        } catch (const std::invalid_argument& e) {
          throw WireError(std::string("bad seed: ") + e.what());
        }
        if (h.scheme == Scheme::kPrivHs) {
          const uint8_t s = r.U8();
          if (s != 0x01 && s != 0xff) throw WireError("bad sign byte");
          rec.sign = s == 0x01 ? 1 : -1;
        }
        batch.mean.push_back(std::move(rec));
        break;
      }
      case Scheme::kPrivUnitRaw: {
        MeanRecord rec;
        rec.vec.resize(h.size);
        for (double& v : rec.vec) v = r.F64();
        batch.mean.push_back(std::move(rec));
        break;
      }
    }
  }
  return batch;
}

void WriteFile(const std::string& path, const Batch& batch) {
  const auto bytes = Serialize(batch);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WireError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WireError("write to " + path + " failed");
}

Batch ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WireError("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return Deserialize(bytes);
}

}  // namespace ldpc::wire
