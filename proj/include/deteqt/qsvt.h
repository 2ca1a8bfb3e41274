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
#include <vector>

#include <Eigen/Dense>

#include "deteqt/circuit.h"
#include "deteqt/qsp.h"
#include "deteqt/spectral.h"

namespace deteqt::qsvt {

enum class Provenance { Dilation, ReflectionLcu };

/// A circuit whose block on `system_qubits` (all other qubits in |0>) is alpha * diag(c).
struct BlockEncoding {
    sim::Circuit circuit;
    std::vector<uint32_t> system_qubits;
    std::vector<uint32_t> ancilla_qubits;
    double alpha = 1.0;
    Provenance provenance = Provenance::Dilation;

    uint32_t qubit_count() const { return circuit.qubit_count(); }
};

class ConstructionFault : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// One controlled Ry dilation per diagonal entry; 1 ancilla, alpha = 1.
BlockEncoding build_diag_block_encoding_dilation(std::span<const double> amplitudes);

/// (2n+2)-qubit construction from W0/G0 components with six controlled-U_max calls.
/// Layout: system [0, n), preparation register [n, 2n), mixing qubit 2n, LCU qubit 2n+1.
/// Alpha is fitted against c = U_max column 0; throws ConstructionFault beyond 1e-8.
BlockEncoding build_diag_block_encoding_lcu(const spectral::PreparationUnitary &u_max);

/// The W0 component on (prep, mix, system) registers of a (2n+1)-qubit circuit.
sim::Circuit w0_circuit(const spectral::PreparationUnitary &u_max);

/// Projector-controlled phase: e^{i phi} where every `projector_register` qubit is |0>,
/// e^{-i phi} elsewhere, realized through the |0>-initialized `ancilla`.
sim::Circuit pcp_gate(double phi, std::span<const uint32_t> projector_register, uint32_t ancilla,
                      uint32_t qubit_count);

struct QsvtCircuit {
    sim::Circuit circuit;
    std::vector<uint32_t> system_qubits;
    /// Block-encoding ancillas followed by the PCP ancilla.
    std::vector<uint32_t> ancilla_qubits;
    uint32_t pcp_qubit = 0;
    uint32_t degree = 0;
};

/// Alternating PCP / U_BE / U_BE^dagger sequence on be.qubits + 1. The PCP ancilla is
/// Hadamard-sandwiched so the block equals diag(Re P(alpha c_x)) with P the Wx-convention
/// polynomial of `angles`. Requires odd degree.
QsvtCircuit assemble_qsvt(const BlockEncoding &be, const qsp::QspAngles &angles);

/// Block of a block encoding or QSVT sequence.
Eigen::MatrixXcd block_of(const BlockEncoding &be);
Eigen::MatrixXcd block_of(const QsvtCircuit &qsvt);

}  // namespace deteqt::qsvt
