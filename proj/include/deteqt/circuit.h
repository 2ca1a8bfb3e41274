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

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace deteqt::sim {

using Complex = std::complex<double>;

struct Control {
    uint32_t qubit;
    /// Open controls fire on |0>, closed controls on |1>.
    bool open = false;

    bool operator==(const Control &) const = default;
};

enum class GateKind { H, X, Z, Rz, Phase, Unitary };

/// One (possibly multi-controlled) operation. For `Unitary`, targets[0] is the least
/// significant bit of the matrix index.
struct Gate {
    GateKind kind;
    std::vector<uint32_t> targets;
    std::vector<Control> controls;
    double angle = 0;
    std::shared_ptr<const Eigen::MatrixXcd> matrix;

    Gate inverse() const;
    /// The target-space action as a dense matrix (ignores controls).
    Eigen::MatrixXcd target_matrix() const;
};

class Circuit {
   public:
    explicit Circuit(uint32_t qubit_count = 0) : qubit_count_(qubit_count) {}

    uint32_t qubit_count() const { return qubit_count_; }
    const std::vector<Gate> &gates() const { return gates_; }
    size_t size() const { return gates_.size(); }

    Circuit &h(uint32_t q);
    Circuit &x(uint32_t q, std::vector<Control> controls = {});
    Circuit &z(uint32_t q, std::vector<Control> controls = {});
    Circuit &cz(uint32_t a, uint32_t b);
    /// Z on the last listed qubit, closed-controlled by the others.
    Circuit &mcz(std::span<const uint32_t> qubits, std::vector<Control> extra_controls = {});
    /// diag(e^{-i theta/2}, e^{i theta/2}).
    Circuit &rz(uint32_t q, double theta, std::vector<Control> controls = {});
    /// diag(1, e^{i theta}) on the target.
    Circuit &phase(uint32_t q, double theta, std::vector<Control> controls = {});
    Circuit &unitary(std::vector<uint32_t> targets, Eigen::MatrixXcd matrix,
                     std::vector<Control> controls = {});
    Circuit &unitary(std::vector<uint32_t> targets, std::shared_ptr<const Eigen::MatrixXcd> matrix,
                     std::vector<Control> controls = {});

    /// Appends `other`, mapping its qubit i to `qubit_map[i]` and adding `extra_controls`
    /// to every appended gate.
    Circuit &append(const Circuit &other, std::span<const uint32_t> qubit_map,
                    const std::vector<Control> &extra_controls = {});
    Circuit &append(const Circuit &other);

    Circuit dagger() const;

   private:
    void push(Gate g, bool check_matrix = true);

    uint32_t qubit_count_;
    std::vector<Gate> gates_;
};

/// Identity qubit map [offset, offset + count).
std::vector<uint32_t> qubit_range(uint32_t offset, uint32_t count);

}  // namespace deteqt::sim
