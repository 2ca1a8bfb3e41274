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

#include <Eigen/Dense>

#include "deteqt/circuit.h"
#include "deteqt/node_mask.h"
#include "json.hpp"

namespace deteqt::hypergraph {

/// REW sign pattern over 2^n basis states: -1 exactly on `botnet`.
struct SignPattern {
    uint32_t n = 0;
    std::vector<uint32_t> botnet;

    static SignPattern from_mask(uint32_t n, const NodeMask &mask);
    std::vector<int> signs() const;
    /// Amplitudes sign(x) / sqrt(2^n).
    Eigen::VectorXd state() const;
};

/// Hyperedges as qubit bitmasks (bit i = qubit i). `global_flip` records the constant ANF
/// term, present exactly when basis state 0 carries a -1.
struct HyperedgeSet {
    uint32_t n = 0;
    std::vector<uint32_t> edges;
    bool global_flip = false;

    static HyperedgeSet from_qubit_lists(uint32_t n, const std::vector<std::vector<uint32_t>> &lists);
};

/// Algebraic normal form (Moebius transform over GF(2)) of the indicator of the botnet.
HyperedgeSet anf_hyperedges(const SignPattern &pattern);

/// One multi-controlled Z per hyperedge (plain Z for single-qubit edges); `global_flip`
/// adds a -I realized as (ZX)^2 on qubit 0. `controls` are added to every gate.
sim::Circuit hypergraph_circuit(const HyperedgeSet &edges, const std::vector<sim::Control> &controls = {});

/// |+>^n, then the hypergraph gates.
Eigen::VectorXcd hypergraph_state(const HyperedgeSet &edges);

enum class OverlapMode { ZeroOverlap, SmallOverlap };

OverlapMode parse_mode(const std::string &s);
const char *mode_name(OverlapMode m);

uint64_t binomial(uint32_t n, uint32_t k);
/// log2 C(n, k), usable when the binomial overflows 64 bits.
double log2_binomial(uint32_t n, uint32_t k);

/// All size-k subsets of [0, n) in lexicographic order.
std::vector<NodeMask> k_subsets(uint32_t n, uint32_t k);

/// Default k_LCU: zero-overlap N/2 - k (2 when k = N/2), small-overlap 1.
uint32_t default_k_lcu(uint32_t node_count, uint32_t k, OverlapMode mode);
/// Throws std::invalid_argument unless k_lcu is legal for the mode.
void validate_k_lcu(uint32_t node_count, uint32_t k, OverlapMode mode, uint32_t k_lcu);

/// Candidate sizes k +- k_range (clamped to legal values) and the matching k_LCU values.
struct SizePlan {
    std::vector<uint32_t> candidate_sizes;
    std::vector<uint32_t> lcu_sizes;
};

SizePlan plan_sizes(uint32_t node_count, uint32_t k, OverlapMode mode,
                    std::optional<uint32_t> k_lcu_override = std::nullopt, uint32_t k_range = 0);

struct LcuSelection {
    uint32_t node_count = 0;
    uint32_t k = 0;
    OverlapMode mode = OverlapMode::ZeroOverlap;
    std::vector<uint32_t> k_lcu;
    uint64_t size = 0;
    uint32_t ancillas = 0;
    /// Subset x is selected by ancilla value x.
    std::vector<NodeMask> subsets;
};

struct EnumeratedSets {
    std::vector<NodeMask> candidates;
    LcuSelection selection;
};

/// `ancillas` for an LCU of `size` terms: ceil(log2 size), at least 1.
uint32_t ancillas_for(uint64_t size);

/// Candidates are all size-k subsets of [0, N), keeping only those holding node 0 when
/// 2k = N; the LCU holds all size-k_LCU subsets.
/// `k_range` > 0 widens both to candidate sizes k +- k_range.
EnumeratedSets enumerate_sets(uint32_t node_count, uint32_t k, OverlapMode mode,
                              std::optional<uint32_t> k_lcu_override = std::nullopt,
                              uint32_t k_range = 0);

/// Selection built from explicit subsets (mode and k recorded as given).
LcuSelection selection_from_subsets(uint32_t node_count, uint32_t k, OverlapMode mode,
                                    std::vector<NodeMask> subsets);

/// Truncated LCU on n system qubits [0, n) and the ancilla register [n, n + a): Hadamards on
/// both registers then SELECT; ancilla values >= M leave the system in |+>^n.
sim::Circuit build_lcu_circuit(const LcuSelection &selection, uint32_t n);

nlohmann::json to_json(const LcuSelection &selection, bool include_subsets = false);

}  // namespace deteqt::hypergraph
