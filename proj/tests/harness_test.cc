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
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include "json.hpp"

namespace ldpc::harness {
namespace {

ExperimentConfig FreqConfig(const std::string& scheme) {
  ExperimentConfig c;
  c.task = "freq";
  c.scheme = scheme;
  c.k = 20;
  c.n = 500;
  c.eps = 2.0;
  c.trials = 3;
  c.master_seed = 12;
  return c;
}

ExperimentConfig MeanConfig(const std::string& scheme) {
  ExperimentConfig c;
  c.task = "mean";
  c.scheme = scheme;
  c.d = 8;
  c.n = 300;
  c.eps = 3.0;
  c.trials = 2;
  c.master_seed = 5;
  c.seed_bits = 64;
  return c;
}

// Removes wall time so runs can be compared bit for bit.
std::vector<ResultRow> Stable(std::vector<ResultRow> rows) {
  for (auto& r : rows) r.wall_time = 0;
  return rows;
}

bool SameRows(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.scheme != y.scheme || x.eps != y.eps || x.n != y.n ||
        x.size != y.size || x.trial != y.trial || x.sq_error != y.sq_error ||
        x.linf_error != y.linf_error ||
        x.bytes_per_message != y.bytes_per_message ||
        x.predicted_sq_error != y.predicted_sq_error) {
      return false;
    }
  }
  return true;
}

TEST(ZipfTest, ThreeItemsUnitExponent) {
  const int n = 110000;
  const auto data = GenZipfDataset(3, n, 1.0, 9);
  std::vector<int> counts(3, 0);
  for (uint64_t x : data) {
    ASSERT_GE(x, 1u);
    ASSERT_LE(x, 3u);
    ++counts[x - 1];
  }
  // Weights 1, 1/2, 1/3 normalize to 6/11, 3/11, 2/11.
  const double expect[3] = {6.0 / 11, 3.0 / 11, 2.0 / 11};
  for (int j = 0; j < 3; ++j) {
    const double sd = std::sqrt(expect[j] * (1 - expect[j]) / n);
    EXPECT_NEAR(counts[j] / double(n), expect[j], 5 * sd) << j;
  }
}

TEST(ZipfTest, ZeroExponentIsUniform) {
  const int n = 50000;
  const auto data = GenZipfDataset(5, n, 0.0, 1);
  std::vector<int> counts(5, 0);
  for (uint64_t x : data) ++counts[x - 1];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.2, 0.01);
}

TEST(ZipfTest, HugeExponentConcentratesOnFirstItem) {
  for (uint64_t x : GenZipfDataset(10, 1000, 80.0, 1)) EXPECT_EQ(x, 1u);
}

TEST(ZipfTest, DeterministicPerSeed) {
  EXPECT_EQ(GenZipfDataset(50, 100, 1.1, 3), GenZipfDataset(50, 100, 1.1, 3));
  EXPECT_NE(GenZipfDataset(50, 100, 1.1, 3), GenZipfDataset(50, 100, 1.1, 4));
  EXPECT_THROW(GenZipfDataset(0, 10, 1.0, 1), std::invalid_argument);
}

TEST(SphereTest, UnitNorms) {
  const auto data = GenSphereDataset(7, 50, 2);
  ASSERT_EQ(data.size(), 50u);
  for (const auto& v : data) {
    double n2 = 0;
    for (double c : v) n2 += c * c;
    EXPECT_NEAR(n2, 1.0, 1e-12);
  }
}

TEST(ConfigTest, ParsesAllKeys) {
  std::istringstream in(R"(# comment line
task = mean
scheme = privunit_compressed   # trailing comment
k = 3
d = 100
n = 1000
eps = 4.5
trials = 7
zipf_s = 1.25
seed = 99
output = out.csv
summary = out.json
variant = asymmetric
delta = 0.05
q = 0
theta = 0.25
reps = 2
seed_bits = 128
gamma = 0.001
)");
  const auto c = ParseConfig(in);
  EXPECT_EQ(c.task, "mean");
  EXPECT_EQ(c.scheme, "privunit_compressed");
  EXPECT_EQ(c.d, 100u);
  EXPECT_EQ(c.n, 1000u);
  EXPECT_DOUBLE_EQ(c.eps, 4.5);
  EXPECT_EQ(c.trials, 7u);
  EXPECT_DOUBLE_EQ(c.zipf_s, 1.25);
  EXPECT_EQ(c.master_seed, 99u);
  EXPECT_EQ(c.output, "out.csv");
  EXPECT_EQ(c.summary, "out.json");
  EXPECT_EQ(c.variant, "asymmetric");
  EXPECT_DOUBLE_EQ(c.delta, 0.05);
  EXPECT_DOUBLE_EQ(c.theta, 0.25);
  EXPECT_EQ(c.reps, 2u);
  EXPECT_EQ(c.seed_bits, 128u);
  EXPECT_DOUBLE_EQ(c.gamma, 0.001);
  EXPECT_NO_THROW(c.Validate());
}

TEST(ConfigTest, DefaultTrials) { EXPECT_EQ(ExperimentConfig{}.trials, 20u); }

TEST(ConfigTest, ParseErrors) {
  for (const char* text : {"bogus = 1\n", "k 10\n", "k = ten\n", "k = -3\n",
                           "eps = 1.0x\n", "n = \n"}) {
    std::istringstream in(text);
    EXPECT_THROW(ParseConfig(in), ConfigError) << text;
  }
  EXPECT_THROW(LoadConfig("/nonexistent/config.txt"), ConfigError);
}

TEST(ConfigTest, ValidationErrors) {
  auto check = [](ExperimentConfig c) {
    EXPECT_THROW(c.Validate(), ConfigError);
  };
  auto c = FreqConfig("pi_rappor");
  EXPECT_NO_THROW(c.Validate());
  c.task = "other";
  check(c);
  c = FreqConfig("privhs");
  check(c);
  c = FreqConfig("pi_rappor");
  c.k = 1;
  check(c);
  c = FreqConfig("pi_rappor");
  c.eps = 0;
  check(c);
  c = FreqConfig("pi_rappor");
  c.variant = "other";
  check(c);
  c = FreqConfig("pi_rappor");
  c.q = 7;
  check(c);
  c = MeanConfig("privunit");
  c.d = 1;
  check(c);
  c = MeanConfig("privunit");
  c.theta = 1.5;
  check(c);
  c = MeanConfig("privhs");
  c.seed_bits = 300;
  check(c);
  c = MeanConfig("privhs");
  c.n = 0;
  check(c);
}

TEST(FreqExperimentTest, NoiselessIsExact) {
  const auto rows = RunFreqExperiment(FreqConfig("noiseless"));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.sq_error, 0.0);
    EXPECT_EQ(r.linf_error, 0.0);
    EXPECT_EQ(r.predicted_sq_error, 0.0);
    EXPECT_EQ(r.bytes_per_message, 3u);  // 20 bits
  }
}

TEST(FreqExperimentTest, SchemesRunAndReportSizes) {
  for (const char* s : {"pi_rappor", "gen_pi_rappor", "rappor"}) {
    Trace trace;
    const auto rows = RunFreqExperiment(FreqConfig(s), &trace);
    ASSERT_EQ(rows.size(), 3u) << s;
    ASSERT_EQ(trace.estimates.size(), 3u);
    double total = 0;
    for (double t : trace.truth) total += t;
    EXPECT_EQ(total, 500.0);
    for (const auto& r : rows) {
      EXPECT_EQ(r.scheme, s);
      EXPECT_GT(r.sq_error, 0.0);
      EXPECT_GT(r.predicted_sq_error, 0.0);
      // Within a generous factor of the prediction.
      EXPECT_LT(r.sq_error, 5 * r.predicted_sq_error);
    }
  }
}

TEST(FreqExperimentTest, ReproducibleUpToWallTime) {
  const auto a = RunFreqExperiment(FreqConfig("pi_rappor"));
  const auto b = RunFreqExperiment(FreqConfig("pi_rappor"));
  EXPECT_TRUE(SameRows(Stable(a), Stable(b)));
  auto other = FreqConfig("pi_rappor");
  other.master_seed = 13;
  EXPECT_FALSE(SameRows(Stable(a), Stable(RunFreqExperiment(other))));
}

TEST(MeanExperimentTest, SchemesRun) {
  for (const char* s :
       {"privhs", "privunit", "privunit_opt", "privunit_compressed"}) {
    const auto rows = RunMeanExperiment(MeanConfig(s));
    ASSERT_EQ(rows.size(), 2u) << s;
    for (const auto& r : rows) {
      EXPECT_GT(r.sq_error, 0.0);
      EXPECT_LT(r.sq_error, 5 * r.predicted_sq_error) << s;
    }
  }
}

TEST(MeanExperimentTest, BytesPerMessage) {
  EXPECT_EQ(RunMeanExperiment(MeanConfig("privhs"))[0].bytes_per_message, 9u);
  EXPECT_EQ(
      RunMeanExperiment(MeanConfig("privunit_compressed"))[0].bytes_per_message,
      8u);
  EXPECT_EQ(RunMeanExperiment(MeanConfig("privunit"))[0].bytes_per_message,
            64u);
}

TEST(MeanExperimentTest, Reproducible) {
  const auto c = MeanConfig("privunit");
  EXPECT_TRUE(SameRows(Stable(RunMeanExperiment(c)),
                       Stable(RunMeanExperiment(c))));
}

TEST(MeanSchemeTest, HeaderRoundTrip) {
  const auto s = MakeMeanScheme("privunit_compressed", 16, 4.0, 0.5, 2, 64);
  const auto back = MeanSchemeFromHeader(s.header);
  EXPECT_EQ(back.header, s.header);
  EXPECT_DOUBLE_EQ(back.params.m, s.params.m);
  EXPECT_DOUBLE_EQ(s.params.eps, 2.0);
  EXPECT_EQ(s.compression.max_iters, back.compression.max_iters);
}

TEST(OutputTest, CsvAndSummary) {
  std::vector<ResultRow> rows = {{"a", 1.0, 10, 5, 0, 2.0, 1.0, 3, 0.1, 2.5},
                                 {"a", 1.0, 10, 5, 1, 4.0, 2.0, 3, 0.1, 2.5}};
  std::ostringstream out;
  WriteCsv(out, rows);
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "scheme,eps,n,size,trial,sq_error,linf_error,bytes_per_message,"
            "wall_time_s,predicted_sq_error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const auto json = nlohmann::json::parse(SummaryJson(rows));
  EXPECT_FALSE(json.empty());
  EXPECT_NE(SummaryJson(rows).find("\"a\""), std::string::npos);
}

TEST(OutputTest, DefaultPathsUseEnvironment) {
  ExperimentConfig c;
  ::setenv(kOutputDirEnv, "/tmp/ldpc_out", 1);
  EXPECT_EQ(CsvPath(c), "/tmp/ldpc_out/results.csv");
  EXPECT_EQ(SummaryPath(c), "/tmp/ldpc_out/results.json");
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(CsvPath(c), "./results.csv");
  c.output = "x/y.csv";
  c.summary = "";
  EXPECT_EQ(SummaryPath(c), "x/y.json");
}

}  // namespace
}  // namespace ldpc::harness
