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

#include "deteqt/circuit.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace deteqt::sim {

namespace {

constexpr double kUnitaryTolerance = 1e-8;

}  // namespace

Gate Gate::inverse() const {
    Gate g = *this;
    switch (kind) {
        case GateKind::H:
        case GateKind::X:
        case GateKind::Z:
            break;
        case GateKind::Rz:
        case GateKind::Phase:
            g.angle = -angle;
            break;
        case GateKind::Unitary:
            g.matrix = std::make_shared<const Eigen::MatrixXcd>(matrix->adjoint());
            break;
    }
    return g;
}

Eigen::MatrixXcd Gate::target_matrix() const {
    const double r = 1.0 / std::numbers::sqrt2;
    Eigen::Matrix2cd m;
    switch (kind) {
        case GateKind::H:
            m << r, r, r, -r;
            return m;
        case GateKind::X:
            m << 0, 1, 1, 0;
            return m;
        case GateKind::Z:
            m << 1, 0, 0, -1;
            return m;
        case GateKind::Rz:
            m << std::polar(1.0, -angle / 2), 0, 0, std::polar(1.0, angle / 2);
            return m;
        case GateKind::Phase:
            m << 1, 0, 0, std::polar(1.0, angle);
            return m;
        case GateKind::Unitary:
            return *matrix;
    }
    return m;
}

void Circuit::push(Gate g, bool check_matrix) {
    if (g.targets.empty()) {
        throw std::invalid_argument("gate has no targets");
    }
    std::vector<uint32_t> seen;
    for (uint32_t t : g.targets) {
        seen.push_back(t);
    }
    for (const auto &c : g.controls) {
        seen.push_back(c.qubit);
    }
    for (uint32_t q : seen) {
        if (q >= qubit_count_) {
            throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range for " +
                                        std::to_string(qubit_count_) + "-qubit circuit");
        }
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw std::invalid_argument("gate control and target qubits must be distinct");
    }
    if (g.kind == GateKind::Unitary && check_matrix) {
        const Eigen::Index dim = Eigen::Index{1} << g.targets.size();
        if (!g.matrix || g.matrix->rows() != dim || g.matrix->cols() != dim) {
            throw std::invalid_argument("unitary matrix dimension does not match target count");
        }
        double dev = ((*g.matrix).adjoint() * (*g.matrix) - Eigen::MatrixXcd::Identity(dim, dim))
                         .cwiseAbs()
                         .maxCoeff();
        if (dev > kUnitaryTolerance) {
            throw std::invalid_argument("embedded matrix is not unitary (deviation " +
                                        std::to_string(dev) + ")");
        }
    }
    gates_.push_back(std::move(g));
}

Circuit &Circuit::h(uint32_t q) {
    push({GateKind::H, {q}, {}, 0, nullptr});
    return *this;
}

Circuit &Circuit::x(uint32_t q, std::vector<Control> controls) {
    push({GateKind::X, {q}, std::move(controls), 0, nullptr});
    return *this;
}

Circuit &Circuit::z(uint32_t q, std::vector<Control> controls) {
    push({GateKind::Z, {q}, std::move(controls), 0, nullptr});
    return *this;
}

Circuit &Circuit::cz(uint32_t a, uint32_t b) {
    return z(b, {{a, false}});
}

Circuit &Circuit::mcz(std::span<const uint32_t> qubits, std::vector<Control> extra_controls) {
    if (qubits.empty()) {
        throw std::invalid_argument("multi-controlled Z needs at least one qubit");
    }
    for (size_t i = 0; i + 1 < qubits.size(); i++) {
        extra_controls.push_back({qubits[i], false});
    }
    return z(qubits.back(), std::move(extra_controls));
}

Circuit &Circuit::rz(uint32_t q, double theta, std::vector<Control> controls) {
    push({GateKind::Rz, {q}, std::move(controls), theta, nullptr});
    return *this;
}

Circuit &Circuit::phase(uint32_t q, double theta, std::vector<Control> controls) {
    push({GateKind::Phase, {q}, std::move(controls), theta, nullptr});
    return *this;
}

Circuit &Circuit::unitary(std::vector<uint32_t> targets, Eigen::MatrixXcd matrix,
                          std::vector<Control> controls) {
    return unitary(std::move(targets), std::make_shared<const Eigen::MatrixXcd>(std::move(matrix)),
                   std::move(controls));
}

Circuit &Circuit::unitary(std::vector<uint32_t> targets,
                          std::shared_ptr<const Eigen::MatrixXcd> matrix,
                          std::vector<Control> controls) {
    push({GateKind::Unitary, std::move(targets), std::move(controls), 0, std::move(matrix)});
    return *this;
}

Circuit &Circuit::append(const Circuit &other, std::span<const uint32_t> qubit_map,
                         const std::vector<Control> &extra_controls) {
    if (qubit_map.size() != other.qubit_count()) {
        throw std::invalid_argument("qubit map size does not match appended circuit");
    }
    gates_.reserve(gates_.size() + other.gates_.size());
    for (const Gate &g : other.gates_) {
        Gate mapped = g;
        for (auto &t : mapped.targets) {
            t = qubit_map[t];
        }
        for (auto &c : mapped.controls) {
            c.qubit = qubit_map[c.qubit];
        }
        mapped.controls.insert(mapped.controls.end(), extra_controls.begin(), extra_controls.end());
        // Matrices were validated when first pushed.
        push(std::move(mapped), false);
    }
    return *this;
}

Circuit &Circuit::append(const Circuit &other) {
    auto map = qubit_range(0, other.qubit_count());
    return append(other, map);
}

Circuit Circuit::dagger() const {
    Circuit out(qubit_count_);
    out.gates_.reserve(gates_.size());
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
        out.gates_.push_back(it->inverse());
    }
    return out;
}

std::vector<uint32_t> qubit_range(uint32_t offset, uint32_t count) {
    std::vector<uint32_t> out(count);
    for (uint32_t i = 0; i < count; i++) {
        out[i] = offset + i;
    }
    return out;
}

}  // namespace deteqt::sim
