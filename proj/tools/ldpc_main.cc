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

// Command-line front end.
//
//   ldpc params --k 100 --eps 1.0986 --variant symmetric
//   ldpc freq encode --k 100 --eps 1.0986 --input items.txt --output r.ldpc
//   ldpc freq aggregate --input r.ldpc
//   ldpc mean encode --eps 4 --scheme privhs --input vecs.txt --output r.ldpc
//   ldpc mean aggregate --input r.ldpc
//   ldpc simulate --config experiment.cfg
//
// Exit codes: 0 success, 2 bad arguments or config, 3 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldpc/field.h"
#include "ldpc/freq.h"
#include "ldpc/harness.h"
#include "ldpc/mean.h"
#include "ldpc/wire.h"

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ldpc::freq::RapporVariant ParseVariant(const std::string& v) {
  if (v == "symmetric") return ldpc::freq::RapporVariant::kDeletionSymmetric;
  if (v == "asymmetric") {
    return ldpc::freq::RapporVariant::kReplacementAsymmetric;
  }
  throw std::invalid_argument("variant must be 'symmetric' or 'asymmetric'");
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

// Output to a file, or stdout when path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw IoError("cannot open " + path + " for writing");
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<uint64_t> ReadIndices(const std::string& path) {
  auto in = OpenInput(path);
  std::vector<uint64_t> out;
  std::string tok;
  while (in >> tok) {
    size_t used = 0;
    const uint64_t v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad item '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(path + " holds no items");
  return out;
}

std::vector<std::vector<double>> ReadVectors(const std::string& path) {
  auto in = OpenInput(path);
  std::vector<std::vector<double>> out;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream row(line);
    std::vector<double> v;
    double x;
    while (row >> x) v.push_back(x);
    if (!row.eof()) throw std::invalid_argument("bad number in " + path);
    if (v.empty()) continue;
    if (!out.empty() && v.size() != out.front().size()) {
      throw std::invalid_argument("vectors in " + path +
                                  " differ in dimension");
    }
    out.push_back(std::move(v));
  }
  if (out.empty()) throw std::invalid_argument(path + " holds no vectors");
  return out;
}

int Params(uint64_t k, double eps, const std::string& variant, double delta,
           bool closest) {
  const auto v = ParseVariant(variant);
  const auto p = closest ? ldpc::freq::ChooseParamsClosestEps(k, eps, v, delta)
                         : ldpc::freq::ChooseParams(k, eps, v, delta);
  std::printf("k = %llu\n", static_cast<unsigned long long>(p.k));
  std::printf("p = %llu\n", static_cast<unsigned long long>(p.p));
  std::printf("alpha0 = %llu/%llu = %.12g\n",
              static_cast<unsigned long long>(p.alpha0_count),
              static_cast<unsigned long long>(p.p), p.alpha0());
  std::printf("alpha1 = %llu/%llu = %.12g\n",
              static_cast<unsigned long long>(p.alpha1_num),
              static_cast<unsigned long long>(p.alpha1_den), p.alpha1());
  std::printf("requested_eps = %.12g\n", p.eps);
  std::printf("realized_eps = %.12g\n", p.realized_eps);
  std::printf("message_bits = %llu\n",
              static_cast<unsigned long long>(ldpc::freq::MessageBits(p)));
  return 0;
}

struct FreqEncodeArgs {
  std::string scheme = "pi_rappor";
  uint64_t k = 0;
  double eps = 0;
  std::string variant = "symmetric";
  double delta = 0.01;
  uint64_t q = 0;
  std::string input;
  std::string output;
  uint64_t seed = 0;
  uint32_t trial = 0;
};

int FreqEncode(const FreqEncodeArgs& a) {
  namespace w = ldpc::wire;
  if (a.scheme == "noiseless") {
    throw std::invalid_argument("noiseless is a simulation baseline only");
  }
  const auto params = ldpc::harness::MakeFreqParams(
      a.scheme, a.k, a.eps, ParseVariant(a.variant), a.delta, a.q);
  const bool affine = a.scheme != "rappor";
  w::Batch batch;
  batch.header =
      w::FreqHeader(affine ? w::Scheme::kPiRappor : w::Scheme::kRappor, params);
  const auto items = ReadIndices(a.input);
  for (uint64_t i = 0; i < items.size(); ++i) {
    auto s = ldpc::harness::ClientStream(a.seed, a.trial, i);
    if (affine) {
      batch.affine.push_back(ldpc::freq::GenPiRapporEncode(items[i], params, s));
    } else {
      batch.bits.push_back(ldpc::freq::RapporEncode(items[i], params, s));
    }
  }
  w::WriteFile(a.output, batch);
  std::fprintf(stderr, "wrote %zu reports (%llu bits each) to %s\n",
               items.size(),
               static_cast<unsigned long long>(w::MessageBits(batch.header)),
               a.output.c_str());
  return 0;
}

int FreqAggregate(const std::string& input, const std::string& output) {
  namespace w = ldpc::wire;
  const w::Batch batch = w::ReadFile(input);
  const auto params = w::ParamsFromHeader(batch.header);
  ldpc::freq::CountEstimate est;
  if (batch.header.scheme == w::Scheme::kPiRappor) {
    est = params.dim == 1 ? ldpc::freq::Histogram(batch.affine, params)
                          : ldpc::freq::GenHistogramFast(batch.affine, params);
  } else {
    est = ldpc::freq::RapporHistogram(batch.bits, params);
  }
  Output out(output);
  out.get() << "item,estimate\n";
  char buf[64];
  for (size_t j = 0; j < est.estimates.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", j + 1, est.estimates[j]);
    out.get() << buf;
  }
  return 0;
}

struct MeanEncodeArgs {
  std::string scheme = "privhs";
  double eps = 0;
  double theta = 0.5;
  uint32_t reps = 1;
  uint32_t seed_bits = 256;
  double gamma = 0.01;
  std::string input;
  std::string output;
  uint64_t seed = 0;
  uint32_t trial = 0;
  bool lift = false;
};

int MeanEncode(const MeanEncodeArgs& a) {
  auto vectors = ReadVectors(a.input);
  if (a.lift) {
    for (auto& v : vectors) v = ldpc::mean::LiftToSphere(v);
  }
  const auto scheme = ldpc::harness::MakeMeanScheme(
      a.scheme, vectors.front().size(), a.eps, a.theta, a.reps, a.seed_bits,
      a.gamma);
  ldpc::wire::Batch batch;
  batch.header = scheme.header;
  for (uint64_t i = 0; i < vectors.size(); ++i) {
    auto s = ldpc::harness::ClientStream(a.seed, a.trial, i);
    for (auto& r : ldpc::harness::EncodeMeanClient(scheme, vectors[i], s)) {
      batch.mean.push_back(std::move(r));
    }
  }
  ldpc::wire::WriteFile(a.output, batch);
  std::fprintf(stderr, "wrote %zu clients (%llu bytes each) to %s\n",
               vectors.size(),
               static_cast<unsigned long long>(
                   ldpc::wire::MessageBytes(batch.header)),
               a.output.c_str());
  return 0;
}

int MeanAggregate(const std::string& input, const std::string& output,
                  double gamma) {
  const auto batch = ldpc::wire::ReadFile(input);
  const auto scheme =
      ldpc::harness::MeanSchemeFromHeader(batch.header, gamma);
  std::vector<ldpc::mean::Vector> decoded;
  decoded.reserve(batch.mean.size());
  for (const auto& r : batch.mean) {
    decoded.push_back(ldpc::harness::DecodeMeanRecord(scheme, r));
  }
  const auto avg = ldpc::mean::Average(decoded);
  Output out(output);
  char buf[64];
  for (double v : avg) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out.get() << buf;
  }
  return 0;
}

int Simulate(const std::string& path) {
  namespace h = ldpc::harness;
  if (!std::ifstream(path)) throw IoError("cannot open " + path);
  const auto config = h::LoadConfig(path);
  config.Validate();
  const auto rows = h::RunExperiment(config);
  const std::string csv = h::CsvPath(config);
  {
    std::ofstream out(csv);
    if (!out) throw IoError("cannot open " + csv + " for writing");
    h::WriteCsv(out, rows);
    if (!out) throw IoError("write to " + csv + " failed");
  }
  const std::string summary_path = h::SummaryPath(config);
  const std::string summary = h::SummaryJson(rows);
  {
    std::ofstream out(summary_path);
    if (!out) throw IoError("cannot open " + summary_path + " for writing");
    out << summary << "\n";
  }
  std::cout << summary << "\n";
  std::fprintf(stderr, "wrote %s and %s\n", csv.c_str(), summary_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally private frequency and mean estimation tools"};
  app.require_subcommand(1);

  uint64_t pk = 0;
  double peps = 0, pdelta = 0.01;
  std::string pvariant = "symmetric";
  bool pclosest = false;
  auto* params = app.add_subcommand("params", "Print PI-RAPPOR parameters");
  params->add_option("--k", pk, "Domain size")->required();
  params->add_option("--eps", peps, "Privacy budget")->required();
  params->add_option("--variant", pvariant, "symmetric or asymmetric");
  params->add_option("--delta", pdelta, "Prime-size slack (default 0.01)");
  params->add_flag("--closest", pclosest,
                   "Scan nearby primes for the realized eps closest to eps");

  auto* freq = app.add_subcommand("freq", "Frequency estimation");
  freq->require_subcommand(1);
  FreqEncodeArgs fe;
  auto* fenc = freq->add_subcommand("encode", "Encode items (one per line)");
  fenc->add_option("--scheme", fe.scheme, "pi_rappor, gen_pi_rappor, rappor");
  fenc->add_option("--k", fe.k, "Domain size")->required();
  fenc->add_option("--eps", fe.eps, "Privacy budget")->required();
  fenc->add_option("--variant", fe.variant, "symmetric or asymmetric");
  fenc->add_option("--delta", fe.delta, "Prime-size slack");
  fenc->add_option("--q", fe.q, "Field size for gen_pi_rappor");
  fenc->add_option("--input", fe.input, "Item file")->required();
  fenc->add_option("--output", fe.output, "Report file")->required();
  fenc->add_option("--seed", fe.seed, "Master seed");
  fenc->add_option("--trial", fe.trial, "Trial label for stream derivation");
  std::string fa_in, fa_out;
  auto* fagg = freq->add_subcommand("aggregate", "Debiased counts as CSV");
  fagg->add_option("--input", fa_in, "Report file")->required();
  fagg->add_option("--output", fa_out, "CSV path (default stdout)");

  auto* mean = app.add_subcommand("mean", "Mean estimation");
  mean->require_subcommand(1);
  MeanEncodeArgs me;
  auto* menc = mean->add_subcommand("encode", "Encode vectors (one per line)");
  menc->add_option("--scheme", me.scheme,
                   "privhs, privunit, privunit_opt, privunit_compressed");
  menc->add_option("--eps", me.eps, "Privacy budget")->required();
  menc->add_option("--theta", me.theta, "Budget split for privunit");
  menc->add_option("--reps", me.reps, "Repetitions per client");
  menc->add_option("--seed-bits", me.seed_bits, "Seed width in bits");
  menc->add_option("--gamma", me.gamma, "Rejection failure probability");
  menc->add_option("--input", me.input, "Vector file")->required();
  menc->add_option("--output", me.output, "Report file")->required();
  menc->add_option("--seed", me.seed, "Master seed");
  menc->add_option("--trial", me.trial, "Trial label for stream derivation");
  menc->add_flag("--lift", me.lift, "Lift vectors in the unit ball to R^(d+1)");
  std::string ma_in, ma_out;
  double ma_gamma = 0.01;
  auto* magg = mean->add_subcommand("aggregate", "Average of decoded reports");
  magg->add_option("--input", ma_in, "Report file")->required();
  magg->add_option("--output", ma_out, "Output path (default stdout)");
  magg->add_option("--gamma", ma_gamma, "Rejection failure probability");

  std::string config_path;
  auto* sim = app.add_subcommand("simulate", "Run a configured experiment");
  sim->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (params->parsed()) return Params(pk, peps, pvariant, pdelta, pclosest);
    if (fenc->parsed()) return FreqEncode(fe);
    if (fagg->parsed()) return FreqAggregate(fa_in, fa_out);
    if (menc->parsed()) return MeanEncode(me);
    if (magg->parsed()) return MeanAggregate(ma_in, ma_out, ma_gamma);
    if (sim->parsed()) return Simulate(config_path);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  } catch (const ldpc::wire::WireError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
  return kConfigError;
}
