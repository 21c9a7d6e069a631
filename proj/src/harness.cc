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

#include "ldpc/harness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>

#include "json.hpp"
#include "ldpc/freq.h"
#include "ldpc/mean.h"
#include "ldpc/wire.h"

namespace ldpc::harness {
namespace {

constexpr uint32_t kDatasetTrial = 0xda7a5e7;

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad value for '" + key + "': '" + value + "'");
  }
  return out;
}

Seed MasterSeed(uint64_t master_seed) {
  return Seed::FromIndex(master_seed, 64);
}

bool IsFreqScheme(const std::string& s) {
  return s == "pi_rappor" || s == "gen_pi_rappor" || s == "rappor" ||
         s == "noiseless";
}

bool IsMeanScheme(const std::string& s) {
  return s == "privhs" || s == "privunit" || s == "privunit_opt" ||
         s == "privunit_compressed";
}

freq::RapporVariant VariantOf(const ExperimentConfig& c) {
  return c.variant == "asymmetric" ? freq::RapporVariant::kReplacementAsymmetric
                                   : freq::RapporVariant::kDeletionSymmetric;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void Score(std::span<const double> estimate, std::span<const double> truth,
           ResultRow& row) {
  row.sq_error = 0;
  row.linf_error = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const double e = estimate[i] - truth[i];
    row.sq_error += e * e;
    row.linf_error = std::max(row.linf_error, std::abs(e));
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (task != "freq" && task != "mean") {
    throw ConfigError("task must be 'freq' or 'mean', got '" + task + "'");
  }
  if (task == "freq" && !IsFreqScheme(scheme)) {
    throw ConfigError("scheme '" + scheme + "' is not a frequency scheme");
  }
  if (task == "mean" && !IsMeanScheme(scheme)) {
    throw ConfigError("scheme '" + scheme + "' is not a mean scheme");
  }
  if (n == 0) throw ConfigError("n must be positive");
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw ConfigError("eps must be finite and positive");
  }
  if (trials == 0) throw ConfigError("trials must be positive");
  if (task == "freq") {
    if (k < 2) throw ConfigError("k must be at least 2");
    if (!(zipf_s >= 0)) throw ConfigError("zipf_s must be >= 0");
    if (variant != "symmetric" && variant != "asymmetric") {
      throw ConfigError("variant must be 'symmetric' or 'asymmetric'");
    }
    if (!(delta > 0)) throw ConfigError("delta must be positive");
    if (q != 0 && scheme != "gen_pi_rappor") {
      throw ConfigError("q applies to gen_pi_rappor only");
    }
    if (reps != 1) throw ConfigError("reps applies to mean schemes only");
  } else {
    if (d < 1) throw ConfigError("d must be positive");
    if (scheme != "privhs" && d < 2) {
      throw ConfigError("PrivUnit needs d >= 2");
    }
    if (!(theta >= 0 && theta <= 1)) {
      throw ConfigError("theta must lie in [0, 1]");
    }
    if (reps == 0) throw ConfigError("reps must be positive");
    if (seed_bits == 0 || seed_bits > 256) {
      throw ConfigError("seed_bits must lie in [1, 256]");
    }
    if (!(gamma > 0 && gamma < 1)) throw ConfigError("gamma must lie in (0, 1)");
  }
}

ExperimentConfig ParseConfig(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key == "task") {
      c.task = value;
    } else if (key == "scheme") {
      c.scheme = value;
    } else if (key == "k") {
      c.k = ParseNumber<uint64_t>(key, value);
    } else if (key == "d") {
      c.d = ParseNumber<uint64_t>(key, value);
    } else if (key == "n") {
      c.n = ParseNumber<uint64_t>(key, value);
    } else if (key == "eps") {
      c.eps = ParseNumber<double>(key, value);
    } else if (key == "trials") {
      c.trials = ParseNumber<uint32_t>(key, value);
    } else if (key == "zipf_s") {
      c.zipf_s = ParseNumber<double>(key, value);
    } else if (key == "seed") {
      c.master_seed = ParseNumber<uint64_t>(key, value);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "summary") {
      c.summary = value;
    } else if (key == "variant") {
      c.variant = value;
    } else if (key == "delta") {
      c.delta = ParseNumber<double>(key, value);
    } else if (key == "q") {
      c.q = ParseNumber<uint64_t>(key, value);
    } else if (key == "theta") {
      c.theta = ParseNumber<double>(key, value);
    } else if (key == "reps") {
      c.reps = ParseNumber<uint32_t>(key, value);
    } else if (key == "seed_bits") {
      c.seed_bits = ParseNumber<uint32_t>(key, value);
    } else if (key == "gamma") {
      c.gamma = ParseNumber<double>(key, value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return ParseConfig(in);
}

freq::RapporParams MakeFreqParams(const std::string& scheme, uint64_t k,
                                  double eps, freq::RapporVariant variant,
                                  double delta, uint64_t q) {
  if (scheme == "noiseless") return freq::NoiselessParams(k);
  if (scheme == "gen_pi_rappor") {
    if (q != 0) {
      return freq::ParamsForField(k, q, freq::DimensionFor(k, q), eps,
                                  variant);
    }
    return freq::ChooseGeneralizedParams(k, eps, variant, delta);
  }
  if (scheme == "pi_rappor" || scheme == "rappor") {
    return freq::ChooseParams(k, eps, variant, delta);
  }
  throw std::invalid_argument("unknown frequency scheme '" + scheme + "'");
}

double MeanScheme::decoded_norm_sq() const {
  return header.scheme == wire::Scheme::kPrivHs
             ? params.hs_norm * params.hs_norm
             : params.proxy();
}

namespace {

MeanScheme BuildMeanScheme(wire::Scheme tag, size_t d, double eps,
                           double theta, uint32_t reps, uint32_t seed_bits,
                           double gamma) {
  if (reps == 0) throw std::invalid_argument("reps must be positive");
  const double eps_each = eps / reps;
  MeanScheme out;
  wire::Header& h = out.header;
  h.scheme = tag;
  h.size = d;
  h.eps = eps;
  h.reps = reps;
  if (tag == wire::Scheme::kPrivHs) {
    out.params = mean::MakePrivHsParams(d, eps_each);
  } else {
    out.params = mean::MakePrivUnitParams(d, eps_each, theta);
    h.theta = theta;
  }
  if (tag != wire::Scheme::kPrivUnitRaw) {
    h.seed_bits = seed_bits;
    h.prg_family = static_cast<uint8_t>(PrgFamily::kChaCha20);
    out.prg = std::make_shared<ChaChaGenerator>(seed_bits);
  }
  if (tag == wire::Scheme::kPrivUnitSeed) {
    const auto spec = mean::PrivUnitRandomizerSpec(out.params);
    out.compression = CompressionConfig::Pure(spec.eps, gamma, out.prg);
  }
  return out;
}

}  // namespace

MeanScheme MakeMeanScheme(const std::string& scheme, size_t d, double eps,
                          double theta, uint32_t reps, uint32_t seed_bits,
                          double gamma) {
  if (!IsMeanScheme(scheme)) {
    throw std::invalid_argument("unknown mean scheme '" + scheme + "'");
  }
  if (reps == 0) throw std::invalid_argument("reps must be positive");
  wire::Scheme tag = wire::Scheme::kPrivUnitRaw;
  if (scheme == "privhs") {
    tag = wire::Scheme::kPrivHs;
  } else if (scheme != "privunit") {
    theta = mean::OptimizeSplit(eps / reps, d).theta;
    if (scheme == "privunit_compressed") tag = wire::Scheme::kPrivUnitSeed;
  }
  return BuildMeanScheme(tag, d, eps, theta, reps, seed_bits, gamma);
}

MeanScheme MeanSchemeFromHeader(const wire::Header& header, double gamma) {
  if (header.scheme != wire::Scheme::kPrivHs &&
      header.scheme != wire::Scheme::kPrivUnitRaw &&
      header.scheme != wire::Scheme::kPrivUnitSeed) {
    throw std::invalid_argument("not a mean report file");
  }
  if (header.scheme != wire::Scheme::kPrivUnitRaw &&
      header.prg_family != static_cast<uint8_t>(PrgFamily::kChaCha20)) {
    throw std::invalid_argument("unsupported generator family");
  }
  return BuildMeanScheme(header.scheme, header.size, header.eps, header.theta,
                         header.reps, header.seed_bits, gamma);
}

std::vector<wire::MeanRecord> EncodeMeanClient(const MeanScheme& scheme,
                                               std::span<const double> x,
                                               BitStream& stream) {
  std::vector<wire::MeanRecord> out(scheme.header.reps);
  for (auto& rec : out) {
    switch (scheme.header.scheme) {
      case wire::Scheme::kPrivHs: {
        auto rep = mean::PrivHsEncode(x, scheme.params.eps, *scheme.prg,
                                      stream);
        rec.seed = std::move(rep.seed);
        rec.sign = rep.sign;
        break;
      }
      case wire::Scheme::kPrivUnitSeed:
        rec.seed = mean::CompressPrivUnit(x, scheme.params, scheme.compression,
                                          stream);
        break;
      default:
        rec.vec = mean::PrivUnitEncode(x, scheme.params, stream);
        break;
    }
  }
  return out;
}

mean::Vector DecodeMeanRecord(const MeanScheme& scheme,
                              const wire::MeanRecord& record) {
  switch (scheme.header.scheme) {
    case wire::Scheme::kPrivHs:
      return mean::PrivHsDecode({record.seed, record.sign}, scheme.params,
                                *scheme.prg);
    case wire::Scheme::kPrivUnitSeed:
      return mean::DecompressPrivUnit(record.seed, scheme.params,
                                      *scheme.prg);
    default:
      return mean::PrivUnitDecode(record.vec, scheme.params);
  }
}

std::vector<uint64_t> GenZipfDataset(uint64_t k, uint64_t n, double s,
                                     uint64_t master_seed) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (!(s >= 0)) throw std::invalid_argument("zipf exponent must be >= 0");
  std::vector<double> cumulative(k);
  double total = 0;
  for (uint64_t j = 1; j <= k; ++j) {
    total += std::exp(-s * std::log(static_cast<double>(j)));
    cumulative[j - 1] = total;
  }
  BitStream stream = DeriveStream(MasterSeed(master_seed), kDatasetTrial, 0);
  std::vector<uint64_t> out(n);
  for (auto& x : out) {
    const double u = UniformDouble(stream) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    x = std::min<uint64_t>(k, static_cast<uint64_t>(it - cumulative.begin()) + 1);
  }
  return out;
}

std::vector<std::vector<double>> GenSphereDataset(uint64_t d, uint64_t n,
                                                  uint64_t master_seed) {
  if (d < 1) throw std::invalid_argument("d must be positive");
  BitStream stream = DeriveStream(MasterSeed(master_seed), kDatasetTrial, 1);
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (uint64_t i = 0; i < n; ++i) out.push_back(UniformUnitVector(stream, d));
  return out;
}

BitStream ClientStream(uint64_t master_seed, uint32_t trial, uint64_t client) {
  // Trial labels start at 1; the dataset owns its own label.
  return DeriveStream(MasterSeed(master_seed), trial + 1, client);
}

std::vector<ResultRow> RunFreqExperiment(const ExperimentConfig& config,
                                         Trace* trace) {
  config.Validate();
  if (config.task != "freq") throw ConfigError("not a frequency config");
  const freq::RapporParams params = MakeFreqParams(
      config.scheme, config.k, config.eps, VariantOf(config), config.delta,
      config.q);
  const bool affine =
      config.scheme == "pi_rappor" || config.scheme == "gen_pi_rappor";
  const wire::Header header = wire::FreqHeader(
      affine ? wire::Scheme::kPiRappor : wire::Scheme::kRappor, params);

  const auto data =
      GenZipfDataset(config.k, config.n, config.zipf_s, config.master_seed);
  std::vector<double> truth(config.k, 0.0);
  for (uint64_t j : data) truth[j - 1] += 1;
  if (trace) trace->truth = truth;

  double predicted = 0;
  if (config.scheme != "noiseless") {
    for (uint64_t j = 0; j < config.k; ++j) {
      predicted += freq::TheoreticalVariance(
          params, config.n, static_cast<uint64_t>(truth[j]));
    }
  }

  std::vector<ResultRow> rows;
  for (uint32_t t = 0; t < config.trials; ++t) {
    const auto start = std::chrono::steady_clock::now();
    wire::Batch batch;
    batch.header = header;
    for (uint64_t i = 0; i < config.n; ++i) {
      BitStream s = ClientStream(config.master_seed, t, i);
      if (affine) {
        batch.affine.push_back(freq::GenPiRapporEncode(data[i], params, s));
      } else {
        batch.bits.push_back(freq::RapporEncode(data[i], params, s));
      }
    }
    const wire::Batch received = wire::Deserialize(wire::Serialize(batch));

    freq::CountEstimate est;
    uint64_t bytes = wire::MessageBytes(header);
    if (affine) {
      est = params.dim == 1 ? freq::Histogram(received.affine, params)
                            : freq::GenHistogramFast(received.affine, params);
      // The closed-form size must match what packing actually produces.
      if (wire::PackAffine(received.affine.front(), header).size() != bytes) {
        throw std::logic_error("packed PI-RAPPOR size mismatch");
      }
    } else {
      est = freq::RapporHistogram(received.bits, params);
    }

    ResultRow row;
    row.scheme = config.scheme;
    row.eps = config.eps;
    row.n = config.n;
    row.size = config.k;
    row.trial = t;
    row.bytes_per_message = bytes;
    row.predicted_sq_error = predicted;
    Score(est.estimates, truth, row);
    row.wall_time = Seconds(start);
    rows.push_back(row);
    if (trace) trace->estimates.push_back(std::move(est.estimates));
  }
  return rows;
}

std::vector<ResultRow> RunMeanExperiment(const ExperimentConfig& config,
                                         Trace* trace) {
  config.Validate();
  if (config.task != "mean") throw ConfigError("not a mean config");
  const size_t d = config.d;
  const MeanScheme scheme =
      MakeMeanScheme(config.scheme, d, config.eps, config.theta, config.reps,
                     config.seed_bits, config.gamma);
  const double predicted = (scheme.decoded_norm_sq() - 1) /
                           (static_cast<double>(config.reps) * config.n);

  const auto data = GenSphereDataset(d, config.n, config.master_seed);
  std::vector<double> truth(d, 0.0);
  for (const auto& x : data) {
    for (size_t i = 0; i < d; ++i) truth[i] += x[i];
  }
  for (double& v : truth) v /= static_cast<double>(config.n);
  if (trace) trace->truth = truth;

  std::vector<ResultRow> rows;
  for (uint32_t t = 0; t < config.trials; ++t) {
    const auto start = std::chrono::steady_clock::now();
    wire::Batch batch;
    batch.header = scheme.header;
    for (uint64_t i = 0; i < config.n; ++i) {
      BitStream s = ClientStream(config.master_seed, t, i);
      for (auto& rec : EncodeMeanClient(scheme, data[i], s)) {
        batch.mean.push_back(std::move(rec));
      }
    }
    const wire::Batch received = wire::Deserialize(wire::Serialize(batch));

    std::vector<double> sum(d, 0.0);
    for (const auto& rec : received.mean) {
      const mean::Vector v = DecodeMeanRecord(scheme, rec);
      for (size_t i = 0; i < d; ++i) sum[i] += v[i];
    }
    for (double& v : sum) v /= static_cast<double>(received.mean.size());

    ResultRow row;
    row.scheme = config.scheme;
    row.eps = config.eps;
    row.n = config.n;
    row.size = d;
    row.trial = t;
    row.bytes_per_message = wire::MessageBytes(scheme.header);
    row.predicted_sq_error = predicted;
    Score(sum, truth, row);
    row.wall_time = Seconds(start);
    rows.push_back(row);
    if (trace) trace->estimates.push_back(std::move(sum));
  }
  return rows;
}

std::vector<ResultRow> RunExperiment(const ExperimentConfig& config,
                                     Trace* trace) {
  config.Validate();
  return config.task == "freq" ? RunFreqExperiment(config, trace)
                               : RunMeanExperiment(config, trace);
}

void WriteCsv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "scheme,eps,n,size,trial,sq_error,linf_error,bytes_per_message,"
         "wall_time_s,predicted_sq_error\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%.17g,%llu,%llu,%u,%.17g,%.17g,%llu,%.6f,%.17g\n",
                  r.scheme.c_str(), r.eps,
                  static_cast<unsigned long long>(r.n),
                  static_cast<unsigned long long>(r.size), r.trial, r.sq_error,
                  r.linf_error,
                  static_cast<unsigned long long>(r.bytes_per_message),
                  r.wall_time, r.predicted_sq_error);
    out << buf;
  }
}

std::string SummaryJson(const std::vector<ResultRow>& rows) {
  std::map<std::string, std::vector<const ResultRow*>> by_scheme;
  for (const auto& r : rows) by_scheme[r.scheme].push_back(&r);
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [scheme, group] : by_scheme) {
    double mean = 0, linf = 0, predicted = 0, time = 0;
    for (const auto* r : group) {
      mean += r->sq_error;
      linf += r->linf_error;
      predicted += r->predicted_sq_error;
      time += r->wall_time;
    }
    const double count = static_cast<double>(group.size());
    mean /= count;
    double var = 0;
    for (const auto* r : group) var += (r->sq_error - mean) * (r->sq_error - mean);
    var = group.size() > 1 ? var / (count - 1) : 0;
    doc[scheme] = {
        {"trials", group.size()},
        {"eps", group.front()->eps},
        {"n", group.front()->n},
        {"size", group.front()->size},
        {"bytes_per_message", group.front()->bytes_per_message},
        {"mean_sq_error", mean},
        {"stddev_sq_error", std::sqrt(var)},
        {"mean_linf_error", linf / count},
        {"predicted_sq_error", predicted / count},
        {"total_wall_time_s", time},
    };
  }
  return doc.dump(2);
}

std::string CsvPath(const ExperimentConfig& config) {
  if (!config.output.empty()) return config.output;
  const char* dir = std::getenv(kOutputDirEnv);
  std::filesystem::path base = (dir && *dir) ? dir : ".";
  return (base / "results.csv").string();
}

std::string SummaryPath(const ExperimentConfig& config) {
  if (!config.summary.empty()) return config.summary;
  std::filesystem::path p = CsvPath(config);
  p.replace_extension(".json");
  return p.string();
}

}  // namespace ldpc::harness
