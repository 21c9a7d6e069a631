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

// Python bindings for the core operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ldpc/field.h"
#include "ldpc/freq.h"
#include "ldpc/harness.h"
#include "ldpc/mean.h"
#include "ldpc/randcore.h"
#include "ldpc/wire.h"

namespace py = pybind11;

namespace ldpc {
namespace {

freq::RapporVariant ParseVariant(const std::string& name) {
  if (name == "symmetric") return freq::RapporVariant::kDeletionSymmetric;
  if (name == "asymmetric") return freq::RapporVariant::kReplacementAsymmetric;
  throw py::value_error("variant must be 'symmetric' or 'asymmetric'");
}

BitStream StreamFor(uint64_t seed, uint32_t trial, uint64_t client) {
  return harness::ClientStream(seed, trial, client);
}

std::vector<std::vector<uint64_t>> EncodeItems(
    const std::vector<uint64_t>& items, const freq::RapporParams& params,
    uint64_t seed, uint32_t trial) {
  std::vector<std::vector<uint64_t>> out;
  out.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    BitStream s = StreamFor(seed, trial, i);
    out.push_back(freq::GenPiRapporEncode(items[i], params, s).coeffs);
  }
  return out;
}

std::vector<freq::AffineFn> ToReports(
    const std::vector<std::vector<uint64_t>>& coeffs) {
  std::vector<freq::AffineFn> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back({c});
  return out;
}

harness::ExperimentConfig ConfigFromText(const std::string& text) {
  std::istringstream in(text);
  auto config = harness::ParseConfig(in);
  config.Validate();
  return config;
}

py::dict RowToDict(const harness::ResultRow& r) {
  py::dict d;
  d["scheme"] = r.scheme;
  d["eps"] = r.eps;
  d["n"] = r.n;
  d["size"] = r.size;
  d["trial"] = r.trial;
  d["sq_error"] = r.sq_error;
  d["linf_error"] = r.linf_error;
  d["bytes_per_message"] = r.bytes_per_message;
  d["wall_time_s"] = r.wall_time;
  d["predicted_sq_error"] = r.predicted_sq_error;
  return d;
}

}  // namespace
}  // namespace ldpc

PYBIND11_MODULE(_ldpc, m) {
  using namespace ldpc;
  m.doc() = "Locally private frequency and mean estimation";

  py::register_exception<harness::ConfigError>(m, "ConfigError",
                                               PyExc_ValueError);
  py::register_exception<wire::WireError>(m, "WireError", PyExc_IOError);

  m.def("is_prime", &field::IsPrime, py::arg("n"));
  m.def("find_prime", &field::FindPrime, py::arg("min"));

  py::class_<freq::RapporParams>(m, "RapporParams")
      .def_readonly("k", &freq::RapporParams::k)
      .def_readonly("p", &freq::RapporParams::p)
      .def_readonly("dim", &freq::RapporParams::dim)
      .def_readonly("alpha0_count", &freq::RapporParams::alpha0_count)
      .def_readonly("alpha1_num", &freq::RapporParams::alpha1_num)
      .def_readonly("alpha1_den", &freq::RapporParams::alpha1_den)
      .def_readonly("eps", &freq::RapporParams::eps)
      .def_readonly("realized_eps", &freq::RapporParams::realized_eps)
      .def_property_readonly("alpha0", &freq::RapporParams::alpha0)
      .def_property_readonly("alpha1", &freq::RapporParams::alpha1)
      .def_property_readonly("message_bits",
                             [](const freq::RapporParams& p) {
                               return freq::MessageBits(p);
                             })
      .def("__repr__", [](const freq::RapporParams& p) {
        return "RapporParams(k=" + std::to_string(p.k) +
               ", p=" + std::to_string(p.p) +
               ", dim=" + std::to_string(p.dim) +
               ", alpha0_count=" + std::to_string(p.alpha0_count) + ")";
      });

  m.def(
      "choose_params",
      [](uint64_t k, double eps, const std::string& variant, double delta,
         bool closest) {
        const auto v = ParseVariant(variant);
        return closest ? freq::ChooseParamsClosestEps(k, eps, v, delta)
                       : freq::ChooseParams(k, eps, v, delta);
      },
      py::arg("k"), py::arg("eps"), py::arg("variant") = "symmetric",
      py::arg("delta") = 0.01, py::arg("closest") = false);
  m.def(
      "choose_generalized_params",
      [](uint64_t k, double eps, const std::string& variant, double delta) {
        return freq::ChooseGeneralizedParams(k, eps, ParseVariant(variant),
                                             delta);
      },
      py::arg("k"), py::arg("eps"), py::arg("variant") = "symmetric",
      py::arg("delta") = 0.01);
  m.def(
      "params_for_field",
      [](uint64_t k, uint64_t q, uint32_t dim, double eps,
         const std::string& variant) {
        return freq::ParamsForField(k, q, dim, eps, ParseVariant(variant));
      },
      py::arg("k"), py::arg("q"), py::arg("dim"), py::arg("eps"),
      py::arg("variant") = "symmetric");

  m.def("pi_rappor_encode", &EncodeItems, py::arg("items"), py::arg("params"),
        py::arg("seed") = 0, py::arg("trial") = 0,
        "Encodes items in [1, k]; returns one coefficient list per item.");
  m.def(
      "histogram",
      [](const std::vector<std::vector<uint64_t>>& reports,
         const freq::RapporParams& params) {
        return freq::GenHistogramFast(ToReports(reports), params).estimates;
      },
      py::arg("reports"), py::arg("params"));
  m.def(
      "frequency_oracle",
      [](const std::vector<std::vector<uint64_t>>& reports, uint64_t j,
         const freq::RapporParams& params) {
        return freq::FrequencyOracle(ToReports(reports), j, params);
      },
      py::arg("reports"), py::arg("j"), py::arg("params"));
  m.def("theoretical_variance", &freq::TheoreticalVariance, py::arg("params"),
        py::arg("n"), py::arg("count"));
  m.def(
      "pack_report",
      [](const std::vector<uint64_t>& coeffs, const freq::RapporParams& p) {
        const auto h = wire::FreqHeader(wire::Scheme::kPiRappor, p);
        const auto packed = wire::PackAffine({coeffs}, h);
        return py::bytes(reinterpret_cast<const char*>(packed.data()),
                         packed.size());
      },
      py::arg("coeffs"), py::arg("params"));

  py::class_<mean::MeanParams>(m, "MeanParams")
      .def_readonly("d", &mean::MeanParams::d)
      .def_readonly("eps", &mean::MeanParams::eps)
      .def_readonly("theta", &mean::MeanParams::theta)
      .def_readonly("p_cap", &mean::MeanParams::p_cap)
      .def_readonly("cap_mass", &mean::MeanParams::cap_mass)
      .def_readonly("gamma_cap", &mean::MeanParams::gamma_cap)
      .def_readonly("m", &mean::MeanParams::m)
      .def_readonly("hs_norm", &mean::MeanParams::hs_norm)
      .def_property_readonly("proxy", &mean::MeanParams::proxy);

  m.def("privhs_norm", &mean::PrivHsNorm, py::arg("d"), py::arg("eps"));
  m.def("cap_fraction", &mean::CapFraction, py::arg("d"), py::arg("gamma"));
  m.def("privunit_params", &mean::MakePrivUnitParams, py::arg("d"),
        py::arg("eps"), py::arg("theta") = 0.5);
  m.def(
      "optimize_split",
      [](double eps, size_t d) {
        const auto s = mean::OptimizeSplit(eps, d);
        return py::make_tuple(s.theta, s.proxy);
      },
      py::arg("eps"), py::arg("d"),
      "Returns (theta, proxy) minimising the PrivUnit norm proxy.");
  m.def(
      "estimate_mean",
      [](const std::vector<std::vector<double>>& xs, const std::string& scheme,
         double eps, double theta, uint32_t reps, uint32_t seed_bits,
         uint64_t seed) {
        if (xs.empty()) throw py::value_error("no vectors");
        const auto s = harness::MakeMeanScheme(scheme, xs[0].size(), eps,
                                               theta, reps, seed_bits);
        std::vector<mean::Vector> decoded;
        for (size_t i = 0; i < xs.size(); ++i) {
          BitStream stream = StreamFor(seed, 0, i);
          for (const auto& r : harness::EncodeMeanClient(s, xs[i], stream)) {
            decoded.push_back(harness::DecodeMeanRecord(s, r));
          }
        }
        return mean::Average(decoded);
      },
      py::arg("xs"), py::arg("scheme") = "privunit", py::arg("eps") = 4.0,
      py::arg("theta") = 0.5, py::arg("reps") = 1, py::arg("seed_bits") = 256,
      py::arg("seed") = 0,
      "Encodes every unit vector, decodes, and returns the average.");

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        py::list rows;
        for (const auto& r :
             harness::RunExperiment(ConfigFromText(config_text))) {
          rows.append(RowToDict(r));
        }
        return rows;
      },
      py::arg("config_text"),
      "Runs an experiment from key = value config text; returns row dicts.");
}
