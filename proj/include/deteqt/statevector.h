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
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "deteqt/circuit.h"
#include "json.hpp"

namespace deteqt::sim {

/// Simulator qubit cap; overridable through the DETEQT_MAX_QUBITS environment variable.
uint32_t max_qubits();

class ProjectionImpossible : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Dense amplitude vector over q qubits; qubit 0 is the least significant index bit.
class StateVector {
   public:
    static StateVector zero(uint32_t qubit_count);
    static StateVector basis(uint32_t qubit_count, uint64_t index);
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    uint32_t qubit_count() const { return qubit_count_; }
    size_t dimension() const { return amplitudes_.size(); }
    const std::vector<Complex> &amplitudes() const { return amplitudes_; }
    std::vector<Complex> &amplitudes() { return amplitudes_; }
    const Complex &operator[](size_t i) const { return amplitudes_[i]; }

    double norm_squared() const;

    void apply(const Gate &gate);
    void apply(const Circuit &circuit);

   private:
    StateVector(uint32_t q, std::vector<Complex> amps) : qubit_count_(q), amplitudes_(std::move(amps)) {}

    uint32_t qubit_count_;
    std::vector<Complex> amplitudes_;
};

StateVector apply_circuit(StateVector state, const Circuit &circuit);

struct Projection {
    StateVector state;
    double success_probability;
};

/// Zeroes every amplitude with a 1 on any `register_qubits` bit and renormalizes.
/// Throws ProjectionImpossible when the kept mass is below 1e-14.
Projection project_zero(const StateVector &state, std::span<const uint32_t> register_qubits);

/// Born-rule marginal over `register_qubits`; entry x packs register bit i into bit i of x.
std::vector<double> marginal(const StateVector &state, std::span<const uint32_t> register_qubits);

/// I.i.d. register samples, deterministic per seed.
std::vector<uint64_t> sample_register(const StateVector &state,
                                      std::span<const uint32_t> register_qubits, size_t shots,
                                      uint64_t seed);

/// Inverse-CDF sampler over a fixed discrete distribution.
class DiscreteSampler {
   public:
    explicit DiscreteSampler(std::span<const double> weights);

    template <typename Engine>
    uint64_t operator()(Engine &rng) const;

    size_t size() const { return cdf_.size(); }
    double probability(size_t i) const;

   private:
    uint64_t draw(double u) const;
    std::vector<double> cdf_;
};

/// (<0|_anc (x) I) U (|0>_anc (x) I): the block of `circuit` on `system` qubits with the
/// remaining qubits fixed to |0>. Used for block encodings and QSVT sequences alike.
Eigen::MatrixXcd extract_block(const Circuit &circuit, std::span<const uint32_t> system_qubits);

nlohmann::json to_json(const StateVector &state);

}  // namespace deteqt::sim

#include "deteqt/random.h"

template <typename Engine>
uint64_t deteqt::sim::DiscreteSampler::operator()(Engine &rng) const {
    return draw(uniform01(rng));
}
