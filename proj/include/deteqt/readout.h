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
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deteqt/circuit.h"
#include "deteqt/hypergraph.h"
#include "deteqt/node_mask.h"
#include "deteqt/qsvt.h"
#include "deteqt/statevector.h"
#include "json.hpp"

namespace deteqt::readout {

using hypergraph::OverlapMode;

/// |<lambda~|G(x)>| for exact signs: |N - 2d| / sqrt(N 2^n) with d = k + k_LCU - 2|c & x|.
double overlap(const NodeMask &candidate, const NodeMask &lcu_subset, uint32_t node_count, uint32_t n);

/// <lambda|G(x)> for a general real signed state over 2^n entries (unnormalized allowed):
/// (sum_i lambda_i - 2 sum_{i in S_x} lambda_i) / sqrt(2^n).
double signed_overlap(std::span<const double> lambda, const NodeMask &subset);

class IdentifiabilityError : public std::runtime_error {
   public:
    IdentifiabilityError(uint64_t a, uint64_t b);
    uint64_t first, second;
};

/// Candidate/LCU incidence through the elimination sets X2(c). Membership is decided on
/// integers: zero-overlap X2(c) = {x : N = 2d}; small-overlap
/// X2(c) = {x : |N - 2d| = |N - 2|c| - 2|S_x||}. Ancilla values x >= M never eliminate.
class OverlapTables {
   public:
    OverlapTables(std::vector<NodeMask> candidates, hypergraph::LcuSelection selection);

    const std::vector<NodeMask> &candidates() const { return candidates_; }
    const hypergraph::LcuSelection &selection() const { return selection_; }
    uint32_t node_count() const { return selection_.node_count; }
    OverlapMode mode() const { return selection_.mode; }
    size_t candidate_count() const { return candidates_.size(); }
    uint64_t lcu_size() const { return selection_.size; }

    bool eliminates(size_t candidate, uint64_t x) const;
    /// Candidates not in X2 for the ancilla value x.
    /// Null when x >= M or the lists were too large to precompute.
    const std::vector<uint32_t> *first_survivors(uint64_t x) const;

    /// Sorted X2(c) for one candidate.
    std::vector<uint64_t> elimination_set(size_t candidate) const;

    /// Throws IdentifiabilityError naming two candidates with identical X2 rows.
    void check_identifiability() const;

   private:
    std::vector<NodeMask> candidates_;
    hypergraph::LcuSelection selection_;
    std::vector<std::vector<uint32_t>> survivors_;
    std::vector<uint8_t> candidate_sizes_;
    std::vector<uint8_t> subset_sizes_;
};

/// Builds the tables and verifies that c -> X2(c) is injective.
OverlapTables build_tables(std::vector<NodeMask> candidates, hypergraph::LcuSelection selection);

/// The reflection-based readout U_lambda = U_QSVT^dagger H^n (I - V)/2 H^n U_QSVT with the
/// zero projector realized as an LCU over one extra ancilla. Postselecting every ancilla on
/// |0> leaves the system proportional to P(A)|+><+|P(A)^dagger applied to the input.
struct ProjectionCircuit {
    sim::Circuit circuit;
    std::vector<uint32_t> system_qubits;
    std::vector<uint32_t> ancilla_qubits;
};

ProjectionCircuit build_projection_circuit(const qsvt::QsvtCircuit &qsvt);

/// LCU state preparation followed by the projection. Layout: system [0, n), QSVT ancillas,
/// projector ancilla, then the LCU register.
struct ProtocolCircuit {
    sim::Circuit circuit;
    std::vector<uint32_t> system_qubits;
    std::vector<uint32_t> postselect_qubits;
    std::vector<uint32_t> lcu_qubits;
};

ProtocolCircuit build_protocol_circuit(const hypergraph::LcuSelection &selection,
                                       const qsvt::QsvtCircuit &qsvt);

/// Distribution of the LCU register after successful postselection.
struct LcuDistribution {
    std::vector<double> probabilities;
    double postselect_probability = 0;
    std::string backend;
};

/// Runs the protocol circuit through the state-vector simulator.
LcuDistribution circuit_distribution(const hypergraph::LcuSelection &selection,
                                     const qsvt::QsvtCircuit &qsvt);

/// Closed form from the signed state lambda' = P(A)|+> (length 2^n, unnormalized):
/// p(x) proportional to <lambda'|G(x)>^2, with G(x) = |+>^n for x >= M.
LcuDistribution oracle_distribution(const hypergraph::LcuSelection &selection,
                                    std::span<const double> signed_state);

/// lambda' = sign(c_i) / sqrt(2^n) on active entries, 0 on padding.
std::vector<double> exact_signed_state(std::span<const double> amplitudes, uint32_t active);

struct SizeEstimate {
    uint32_t k = 0;
    double raw = 0;
    double residual = 0;
    bool low_confidence = false;
};

/// k = (N - sqrt(N) sqrt(2^n) |<+|lambda~>|) / 2, rounded into [0, N/2]; `lambda` is
/// normalized internally.
SizeEstimate estimate_botnet_size(std::span<const double> lambda, uint32_t node_count);

enum class TrialOutcome { Winner, AllEliminated, BudgetExhausted };

const char *outcome_name(TrialOutcome o);

struct EliminationState {
    std::vector<uint32_t> survivors;
    uint32_t samples_used = 0;
    TrialOutcome outcome = TrialOutcome::BudgetExhausted;
    std::vector<uint64_t> samples;
    /// Candidates removed by each sample.
    std::vector<uint32_t> eliminated;

    std::optional<uint32_t> winner() const;
};

/// Draws register values until exactly one candidate survives, none does, or `budget`
/// samples are spent.
EliminationState sample_and_eliminate(const sim::DiscreteSampler &sampler, const OverlapTables &tables,
                                      uint32_t budget, std::mt19937_64 &rng);

/// Default per-trial budget 4 ceil(log2 |G_cand|), at least 4.
uint32_t default_budget(size_t candidate_count);

/// Default trials: ceil(sqrt N) for zero-overlap, ceil(N (N/2 - k - k_LCU)) for small-overlap.
uint64_t default_trials(uint32_t node_count, uint32_t k, uint32_t k_lcu, OverlapMode mode);

struct TrialConfig {
    uint64_t trials = 1;
    uint32_t budget = 0;
    uint64_t seed = 0;
    uint32_t threads = 0;
    /// Size of the reported botnet; 0 uses the most common winner size.
    uint32_t report_size = 0;
};

struct TrialRecord {
    std::optional<uint32_t> winner;
    uint32_t samples_used = 0;
    TrialOutcome outcome = TrialOutcome::BudgetExhausted;
};

struct BotnetDistribution {
    std::vector<TrialRecord> trials;
    /// Fraction of successful trials whose winner contains each node.
    std::vector<double> node_frequency;
    std::vector<uint64_t> node_counts;
    uint64_t successes = 0;
    std::vector<uint32_t> detected;

    bool failed() const { return successes == 0; }
};

/// Independent trials seeded by child_seed(seed, t); identical output for any thread count.
BotnetDistribution run_trials(const sim::DiscreteSampler &sampler, const OverlapTables &tables,
                              const TrialConfig &config);

nlohmann::json to_json(const BotnetDistribution &d, const OverlapTables &tables);
std::string node_frequency_csv(const BotnetDistribution &d);

}  // namespace deteqt::readout
