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
#include <string>
#include <vector>

#include "deteqt/graph.h"
#include "deteqt/pipeline.h"
#include "deteqt/qsp.h"
#include "json.hpp"

namespace deteqt::oracle {

/// Full 2^N enumeration is limited to this many nodes.
inline constexpr uint32_t kBruteForceLimit = 24;

struct ModularityOptimum {
    graph::Partition partition;
    double q = 0;
    /// Number of distinct partitions attaining q (within 1e-12).
    uint64_t ties = 1;
};

/// Exhaustive maximizer of s^T B s / (4m): over all bipartitions (N <= 24), or over all
/// botnets of exactly k nodes. Ties go to the lexicographically smallest botnet.
ModularityOptimum brute_force_modularity(const graph::Network &net, std::optional<uint32_t> k = std::nullopt);

enum class StageStatus { Pass, Fail, Skipped };

const char *status_name(StageStatus s);

struct StageCheck {
    std::string name;
    double deviation = 0;
    double tolerance = 0;
    StageStatus status = StageStatus::Skipped;
    std::string note;
};

struct OracleReport {
    graph::Partition best_partition;
    double best_q = 0;
    double spectral_q = 0;
    double planted_q = 0;
    std::vector<StageCheck> stages;

    bool passed() const;
    const StageCheck &stage(const std::string &name) const;
};

struct VerifyOptions {
    /// Stage configuration; the generator or file in it is ignored.
    pipeline::RunConfig run;
    /// Angles injected in place of the optimized ones (fault injection).
    std::optional<qsp::QspAngles> angles;
    uint64_t shots = 100000;
    double eigen_tolerance = 1e-9;
    double sign_tolerance = 0.05;
    double block_tolerance = 1e-8;
    double tv_tolerance = 0.05;
};

/// Checks, in order: eigen-residual, QSVT sign agreement with the classical partition,
/// block-encoding deviation, sampler TV distance, elimination winner vs. planted. A failed
/// stage marks every later stage skipped.
OracleReport verify_pipeline(const graph::Network &net, const std::vector<uint32_t> &planted,
                             const VerifyOptions &options);

nlohmann::json to_json(const OracleReport &r);

}  // namespace deteqt::oracle
