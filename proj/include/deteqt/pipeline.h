// Copyright 2026 The deteqt Authors
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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deteqt/graph.h"
#include "deteqt/hypergraph.h"
#include "deteqt/qsp.h"
#include "deteqt/qsvt.h"
#include "deteqt/readout.h"
#include "deteqt/spectral.h"
#include "json.hpp"

namespace deteqt::pipeline {

/// Rejected configuration; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A failure inside one pipeline stage, tagged with the stage name.
class StageError : public std::runtime_error {
   public:
    StageError(std::string stage, const std::string &what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string &stage() const { return stage_; }

   private:
    std::string stage_;
};

enum class Backend { Circuit, Oracle };
enum class SignSource { Optimize, Recursive, File, Exact };
enum class EncodingKind { Lcu, Dilation };

Backend parse_backend(const std::string &s);
SignSource parse_sign_source(const std::string &s);
EncodingKind parse_encoding(const std::string &s);
const char *backend_name(Backend b);
const char *sign_source_name(SignSource s);
const char *encoding_name(EncodingKind e);

struct RunConfig {
    std::string command = "detect";
    /// Edge list or JSON network; when empty the generator parameters are used.
    std::string network_file;
    std::optional<graph::PlantedParams> generator;
    /// Known botnet size; estimated from the signed state when absent.
    std::optional<uint32_t> k;
    /// Zero-overlap for even N, small-overlap otherwise, when absent.
    std::optional<hypergraph::OverlapMode> mode;
    std::optional<uint32_t> k_lcu;
    uint32_t k_range = 0;
    SignSource sign = SignSource::Optimize;
    uint32_t degree = 29;
    /// When set, the degree is raised along a fixed ladder until epsilon meets it.
    std::optional<double> epsilon_target;
    int recursive_order = 3;
    std::string angles_file;
    Backend backend = Backend::Circuit;
    EncodingKind encoding = EncodingKind::Lcu;
    /// Circuit shots drawn to validate the sampler against the closed form; 0 disables.
    uint64_t shots = 0;
    std::optional<uint64_t> trials;
    std::optional<uint32_t> budget;
    uint64_t seed = 0;
    uint32_t threads = 0;
    std::string output;
    std::string csv;
};

nlohmann::json to_json(const RunConfig &c);
RunConfig config_from_json(const nlohmann::json &j);

struct Instance {
    graph::Network network;
    std::optional<std::vector<uint32_t>> planted;
};

/// Reads `network_file` (JSON when it ends in .json) or runs the generator.
Instance load_instance(const RunConfig &config);

/// Signed max vector lambda' = f(alpha c)|+> (unnormalized) and, for the circuit backend,
/// the circuit whose block realizes f.
struct SignStage {
    std::vector<double> signed_state;
    std::optional<qsvt::QsvtCircuit> circuit;
    std::optional<qsp::AngleFit> fit;
    std::string source;
    uint32_t degree = 0;
    double x_min = 0;
    double epsilon = 0;
    double alpha = 1;
};

/// x_min used for angle fitting: 0.9 min |c_i| over active entries, floored at 1e-3.
double fitting_x_min(const spectral::MaxVector &v);

/// Optimized angles, cached per (degree, quantized x_min) for the process lifetime.
qsp::AngleFit fit_sign_angles(uint32_t degree, double x_min);

/// Degrees tried when an epsilon target is set.
std::vector<uint32_t> degree_ladder(uint32_t start);

SignStage build_sign_stage(const spectral::MaxVector &v, const RunConfig &config);

/// Runs the QSVT circuit on |+>^n and postselects its ancillas, returning lambda'.
std::vector<double> simulate_signed_state(const qsvt::QsvtCircuit &circuit);

struct DetectResult {
    nlohmann::json report;
    std::string csv;
    bool failed = false;
};

/// ingest -> modularity -> eigenvector -> sign -> LCU -> projection -> elimination -> aggregation.
DetectResult run_detect(const RunConfig &config);

/// Resource counts; analytic where enumeration would be infeasible.
nlohmann::json run_resources(const RunConfig &config);

/// Postselection success probability for exact signs, from N, k and the LCU sizes alone.
double exact_postselect_probability(uint32_t node_count, uint32_t k, const std::vector<uint32_t> &k_lcu,
                                    uint32_t ancillas);

}  // namespace deteqt::pipeline
