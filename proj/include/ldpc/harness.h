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

// Simulated end-to-end runs: generate a dataset, encode every client on its
// own derived stream, push the reports through the wire format, aggregate,
// and score against the truth.

#ifndef LDPC_HARNESS_H_
#define LDPC_HARNESS_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldpc/compress.h"
#include "ldpc/freq.h"
#include "ldpc/mean.h"
#include "ldpc/randcore.h"
#include "ldpc/wire.h"

namespace ldpc::harness {

// Environment variable naming the default output directory.
inline constexpr char kOutputDirEnv[] = "LDPC_OUTPUT_DIR";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // "freq" or "mean".
  std::string task = "freq";
  // freq: pi_rappor, gen_pi_rappor, rappor, noiseless.
  // mean: privhs, privunit, privunit_opt, privunit_compressed.
  std::string scheme = "pi_rappor";
  uint64_t k = 0;
  uint64_t d = 0;
  uint64_t n = 0;
  double eps = 0;
  uint32_t trials = 20;
  double zipf_s = 1.0;
  uint64_t master_seed = 0;
  // CSV path; empty means <$LDPC_OUTPUT_DIR or .>/results.csv.
  std::string output;
  // JSON summary path; empty means the CSV path with a .json extension.
  std::string summary;

  // freq: "symmetric" or "asymmetric"; delta of the prime-size rule; an
  // optional field size for gen_pi_rappor.
  std::string variant = "symmetric";
  double delta = 0.01;
  uint64_t q = 0;

  // mean: PrivUnit split, repetitions per client, seed width, and the
  // rejection failure probability for compressed PrivUnit.
  double theta = 0.5;
  uint32_t reps = 1;
  uint32_t seed_bits = 256;
  double gamma = 0.01;

  // Throws ConfigError.
  void Validate() const;
};

// Flat "key = value" lines; '#' starts a comment. Throws ConfigError on
// unknown keys or malformed values. Does not validate.
ExperimentConfig ParseConfig(std::istream& in);
// Throws ConfigError if the file cannot be read.
ExperimentConfig LoadConfig(const std::string& path);

struct ResultRow {
  std::string scheme;
  double eps = 0;
  uint64_t n = 0;
  // k (freq) or d (mean).
  uint64_t size = 0;
  uint32_t trial = 0;
  double sq_error = 0;
  double linf_error = 0;
  uint64_t bytes_per_message = 0;
  double wall_time = 0;
  // Closed-form expected squared error for comparison.
  double predicted_sq_error = 0;
};

// Per-trial estimates, for callers that need more than the summary rows.
struct Trace {
  std::vector<double> truth;
  std::vector<std::vector<double>> estimates;
};

// Parameters for a frequency scheme name (see ExperimentConfig::scheme).
freq::RapporParams MakeFreqParams(const std::string& scheme, uint64_t k,
                                  double eps, freq::RapporVariant variant,
                                  double delta = 0.01, uint64_t q = 0);

// Everything a client or server needs for one mean scheme.
struct MeanScheme {
  wire::Header header;
  // Parameters of a single repetition (budget eps / reps).
  mean::MeanParams params;
  // Seed expansion for the seeded schemes; null for raw PrivUnit.
  std::shared_ptr<const Generator> prg;
  CompressionConfig compression;

  // Squared norm of one decoded report.
  double decoded_norm_sq() const;
};

// scheme is a mean scheme name; theta is used by "privunit" only.
MeanScheme MakeMeanScheme(const std::string& scheme, size_t d, double eps,
                          double theta = 0.5, uint32_t reps = 1,
                          uint32_t seed_bits = 256, double gamma = 0.01);
// Rebuilds the scheme a report file was written with.
MeanScheme MeanSchemeFromHeader(const wire::Header& header,
                                double gamma = 0.01);

// The reps records of one client.
std::vector<wire::MeanRecord> EncodeMeanClient(const MeanScheme& scheme,
                                               std::span<const double> x,
                                               BitStream& stream);
mean::Vector DecodeMeanRecord(const MeanScheme& scheme,
                              const wire::MeanRecord& record);

// i.i.d. draws from [k] with P[j] proportional to j^-s.
std::vector<uint64_t> GenZipfDataset(uint64_t k, uint64_t n, double s,
                                     uint64_t master_seed);

// i.i.d. uniform unit vectors in R^d.
std::vector<std::vector<double>> GenSphereDataset(uint64_t d, uint64_t n,
                                                  uint64_t master_seed);

// Stream of client `client` in trial `trial` (trials count from 0).
BitStream ClientStream(uint64_t master_seed, uint32_t trial, uint64_t client);

std::vector<ResultRow> RunFreqExperiment(const ExperimentConfig& config,
                                         Trace* trace = nullptr);
std::vector<ResultRow> RunMeanExperiment(const ExperimentConfig& config,
                                         Trace* trace = nullptr);
// Dispatches on config.task.
std::vector<ResultRow> RunExperiment(const ExperimentConfig& config,
                                     Trace* trace = nullptr);

void WriteCsv(std::ostream& out, const std::vector<ResultRow>& rows);
// Per-scheme aggregates as a JSON document.
std::string SummaryJson(const std::vector<ResultRow>& rows);

// Resolved output paths for a config.
std::string CsvPath(const ExperimentConfig& config);
std::string SummaryPath(const ExperimentConfig& config);

}  // namespace ldpc::harness

#endif  // LDPC_HARNESS_H_
