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

#include "deteqt/qsvt.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "deteqt/statevector.h"

namespace deteqt::qsvt {

using sim::Circuit;
using sim::Control;

BlockEncoding build_diag_block_encoding_dilation(std::span<const double> amplitudes) {
    const size_t dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("amplitude count must be a power of two >= 2");
    }
    const uint32_t n = static_cast<uint32_t>(std::countr_zero(dim));
    BlockEncoding be{Circuit(n + 1), sim::qubit_range(0, n), {n}, 1.0, Provenance::Dilation};
    for (size_t j = 0; j < dim; j++) {
        const double c = amplitudes[j];
        if (!(std::abs(c) <= 1.0 + 1e-12)) {
            throw std::invalid_argument("diagonal amplitude outside [-1, 1]");
        }
        const double half = std::acos(std::clamp(c, -1.0, 1.0));
        Eigen::Matrix2cd ry;
        ry << std::cos(half), -std::sin(half), std::sin(half), std::cos(half);
        std::vector<Control> controls;
        for (uint32_t b = 0; b < n; b++) {
            controls.push_back({b, ((j >> b) & 1) == 0});
        }
        be.circuit.unitary({n}, ry, std::move(controls));
    }
    return be;
}

// Local layout of the (2n+1)-qubit W0/G0 register: system [0, n), prep [n, 2n), mix 2n.
Circuit w0_circuit(const spectral::PreparationUnitary &u_max) {
    const uint32_t n = u_max.qubits();
    const uint32_t mix = 2 * n;
    Circuit w(2 * n + 1);
    w.h(mix);
    w.unitary(sim::qubit_range(n, n), u_max.matrix, {{mix, true}});
    for (uint32_t b = 0; b < n; b++) {
        w.x(n + b, {{mix, false}, {b, false}});
    }
    w.h(mix);
    return w;
}

namespace {

// G0 = W0 R W0^dagger Z_mix, with R the reflection about |0> on (prep, mix).
Circuit g0_circuit(const Circuit &w0, uint32_t n) {
    const uint32_t mix = 2 * n;
    Circuit g(2 * n + 1);
    g.z(mix);
    g.append(w0.dagger());
    std::vector<Control> open;
    for (uint32_t b = 1; b < n; b++) {
        open.push_back({n + b, true});
    }
    open.push_back({mix, true});
    g.x(n);
    g.z(n, open);
    g.x(n);
    g.append(w0);
    return g;
}

}  // namespace

BlockEncoding build_diag_block_encoding_lcu(const spectral::PreparationUnitary &u_max) {
    const uint32_t n = u_max.qubits();
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (u_max.matrix.rows() != dim || u_max.matrix.cols() != dim) {
        throw std::invalid_argument("preparation unitary must be square with power-of-two size");
    }
    const uint32_t lcu = 2 * n + 1;
    const Circuit w0 = w0_circuit(u_max);
    const Circuit g0 = g0_circuit(w0, n);
    const auto inner = sim::qubit_range(0, 2 * n + 1);

    BlockEncoding be;
    be.circuit = Circuit(2 * n + 2);
    be.system_qubits = sim::qubit_range(0, n);
    be.ancilla_qubits = sim::qubit_range(n, n + 2);
    be.provenance = Provenance::ReflectionLcu;

    auto &c = be.circuit;
    c.append(w0, inner);
    c.h(lcu);
    c.append(g0, inner, {{lcu, true}});
    c.append(g0.dagger(), inner, {{lcu, false}});
    c.h(lcu);
    c.append(w0.dagger(), inner);
    c.x(lcu);
    c.z(lcu);
    c.x(lcu);

    Eigen::MatrixXcd block = block_of(be);
    Eigen::VectorXd expected = u_max.matrix.col(0).real();
    Eigen::VectorXd diag = block.diagonal().real();
    const double denom = expected.squaredNorm();
    be.alpha = denom > 0 ? expected.dot(diag) / denom : 1.0;
    Eigen::MatrixXcd reference = (be.alpha * expected).cast<std::complex<double>>().asDiagonal();
    const double dev = (block - reference).cwiseAbs().maxCoeff();
    const double imag = u_max.matrix.col(0).imag().cwiseAbs().maxCoeff();
    if (dev > 1e-8 || imag > 1e-12) {
        throw ConstructionFault("block encoding deviates from alpha * diag(c) by " +
                                std::to_string(dev));
    }
    return be;
}

Circuit pcp_gate(double phi, std::span<const uint32_t> projector_register, uint32_t ancilla,
                 uint32_t qubit_count) {
    if (projector_register.empty()) {
        throw std::invalid_argument("PCP projector register must be non-empty");
    }
    std::vector<Control> open;
    for (uint32_t q : projector_register) {
        open.push_back({q, true});
    }
    Circuit c(qubit_count);
    c.x(ancilla, open);
    c.rz(ancilla, 2 * phi);
    c.x(ancilla, open);
    return c;
}

QsvtCircuit assemble_qsvt(const BlockEncoding &be, const qsp::QspAngles &angles) {
    const uint32_t d = angles.degree();
    if (angles.phases.size() < 2 || d % 2 == 0) {
        throw std::invalid_argument("QSVT sign sequence needs odd degree (got " + std::to_string(d) + ")");
    }
    if (angles.convention != qsp::kWxConvention) {
        throw std::invalid_argument("unsupported QSP convention");
    }
    const uint32_t base = be.qubit_count();
    const uint32_t pcp = base;
    QsvtCircuit out;
    out.circuit = Circuit(base + 1);
    out.system_qubits = be.system_qubits;
    out.ancilla_qubits = be.ancilla_qubits;
    out.ancilla_qubits.push_back(pcp);
    out.pcp_qubit = pcp;
    out.degree = d;

    // Wx phases -> reflection-convention projector phases.
    std::vector<double> theta(d + 1);
    for (uint32_t j = 0; j <= d; j++) {
        double shift = (j == 0 || j == d) ? std::numbers::pi / 4 : std::numbers::pi / 2;
        theta[j] = angles.phases[j] - shift;
    }

    const auto map = sim::qubit_range(0, base);
    const Circuit be_dag = be.circuit.dagger();
    auto &c = out.circuit;
    c.h(pcp);
    c.append(pcp_gate(theta[d], be.ancilla_qubits, pcp, base + 1));
    for (uint32_t k = 1; k <= d; k++) {
        c.append(k % 2 == 1 ? be.circuit : be_dag, map);
        c.append(pcp_gate(theta[d - k], be.ancilla_qubits, pcp, base + 1));
    }
    // The reflection form carries a global (-i)^d; cancel it between the two PCP branches.
    c.rz(pcp, -std::numbers::pi * static_cast<double>(d % 4));
    c.h(pcp);
    return out;
}

Eigen::MatrixXcd block_of(const BlockEncoding &be) {
    return sim::extract_block(be.circuit, be.system_qubits);
}

Eigen::MatrixXcd block_of(const QsvtCircuit &qsvt) {
    return sim::extract_block(qsvt.circuit, qsvt.system_qubits);
}

}  // namespace deteqt::qsvt
