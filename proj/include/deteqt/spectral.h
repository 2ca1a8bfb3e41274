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
#include <vector>

#include <Eigen/Dense>

#include "deteqt/graph.h"
#include "json.hpp"

namespace deteqt::spectral {

/// Leading eigenvector of B, zero-padded to 2^n entries with n = ceil(log2 N).
struct MaxVector {
    Eigen::VectorXd amplitudes;
    uint32_t active = 0;
    double eigenvalue = 0;
    /// Set when the top eigenvalue is degenerate within 1e-9.
    bool degenerate = false;

    uint32_t qubits() const;
};

struct PreparationUnitary {
    Eigen::MatrixXcd matrix;

    uint32_t qubits() const;
};

struct SignPartition {
    graph::Partition partition;
    /// Active amplitudes with |v_i| < 1e-12; these are assigned -1.
    std::vector<uint32_t> unstable;
};

/// Number of qubits needed to index `count` basis states (at least 1).
uint32_t qubits_for(uint32_t count);

/// Dense symmetric eigendecomposition up to this size; shifted power iteration above it.
inline constexpr uint32_t kDenseEigenLimit = 512;

MaxVector max_eigenvector(const graph::ModularityMatrix &b);

/// Wraps a given real vector as a MaxVector (normalized, gauge fixed, padded).
MaxVector max_vector_from_amplitudes(const std::vector<double> &values);

/// Majority of active entries positive; on a tie entry 0 is made non-negative.
void fix_gauge(Eigen::VectorXd &v, uint32_t active);

/// Adds Gaussian noise of scale `epsilon` to the active block and renormalizes.
MaxVector perturb(const MaxVector &v, double epsilon, uint64_t seed);

SignPartition classical_sign_partition(const MaxVector &v);

/// Householder completion: a real orthogonal matrix whose column 0 is `v.amplitudes`.
PreparationUnitary complete_unitary(const MaxVector &v);

nlohmann::json to_json(const MaxVector &v, const SignPartition &signs);

}  // namespace deteqt::spectral
