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

#include "deteqt/statevector.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>

namespace deteqt::sim {

uint32_t max_qubits() {
    constexpr uint32_t kDefault = 26;
    if (const char *env = std::getenv("DETEQT_MAX_QUBITS")) {
        char *end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 40) {
            return static_cast<uint32_t>(v);
        }
    }
    return kDefault;
}

StateVector StateVector::zero(uint32_t qubit_count) {
    return basis(qubit_count, 0);
}

StateVector StateVector::basis(uint32_t qubit_count, uint64_t index) {
    if (qubit_count > max_qubits()) {
        throw std::invalid_argument(std::to_string(qubit_count) + " qubits exceeds simulator cap of " +
                                    std::to_string(max_qubits()));
    }
    std::vector<Complex> amps(size_t{1} << qubit_count);
    if (index >= amps.size()) {
        throw std::invalid_argument("basis index out of range");
    }
    amps[index] = 1.0;
    return StateVector(qubit_count, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    size_t dim = amplitudes.size();
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("amplitude count must be a power of two");
    }
    uint32_t q = static_cast<uint32_t>(std::countr_zero(dim));
    return StateVector(q, std::move(amplitudes));
}

double StateVector::norm_squared() const {
    double s = 0;
    for (const auto &a : amplitudes_) {
        s += std::norm(a);
    }
    return s;
}

namespace {

// Inserts zero bits at each of the ascending positions in `fixed`.
inline uint64_t deposit(uint64_t i, std::span<const uint32_t> fixed) {
    for (uint32_t p : fixed) {
        uint64_t low = i & ((uint64_t{1} << p) - 1);
        i = ((i >> p) << (p + 1)) | low;
    }
    return i;
}

}  // namespace

void StateVector::apply(const Gate &gate) {
    std::vector<uint32_t> fixed;
    uint64_t control_on = 0;
    for (const auto &c : gate.controls) {
        fixed.push_back(c.qubit);
        if (!c.open) {
            control_on |= uint64_t{1} << c.qubit;
        }
    }
    for (uint32_t t : gate.targets) {
        fixed.push_back(t);
        if (t >= qubit_count_) {
            throw std::invalid_argument("gate target outside state");
        }
    }
    std::sort(fixed.begin(), fixed.end());
    if (!fixed.empty() && fixed.back() >= qubit_count_) {
        throw std::invalid_argument("gate qubit outside state");
    }
    const uint64_t free_count = uint64_t{1} << (qubit_count_ - fixed.size());
    auto &a = amplitudes_;

    if (gate.targets.size() == 1) {
        const uint64_t bit = uint64_t{1} << gate.targets[0];
        switch (gate.kind) {
            case GateKind::Z:
                for (uint64_t i = 0; i < free_count; i++) {
                    a[deposit(i, fixed) | control_on | bit] *= -1.0;
                }
                return;
            case GateKind::Phase: {
                const Complex ph = std::polar(1.0, gate.angle);
                for (uint64_t i = 0; i < free_count; i++) {
                    a[deposit(i, fixed) | control_on | bit] *= ph;
                }
                return;
            }
            case GateKind::Rz: {
                const Complex lo = std::polar(1.0, -gate.angle / 2);
                const Complex hi = std::polar(1.0, gate.angle / 2);
                for (uint64_t i = 0; i < free_count; i++) {
                    uint64_t base = deposit(i, fixed) | control_on;
                    a[base] *= lo;
                    a[base | bit] *= hi;
                }
                return;
            }
            case GateKind::X:
                for (uint64_t i = 0; i < free_count; i++) {
                    uint64_t base = deposit(i, fixed) | control_on;
                    std::swap(a[base], a[base | bit]);
                }
                return;
            default: {
                Eigen::MatrixXcd m = gate.target_matrix();
                const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
                for (uint64_t i = 0; i < free_count; i++) {
                    uint64_t base = deposit(i, fixed) | control_on;
                    Complex x0 = a[base];
                    Complex x1 = a[base | bit];
                    a[base] = m00 * x0 + m01 * x1;
                    a[base | bit] = m10 * x0 + m11 * x1;
                }
                return;
            }
        }
    }

    const Eigen::MatrixXcd m = gate.target_matrix();
    const size_t dim = size_t{1} << gate.targets.size();
    std::vector<uint64_t> offsets(dim, 0);
    for (size_t local = 0; local < dim; local++) {
        for (size_t b = 0; b < gate.targets.size(); b++) {
            if ((local >> b) & 1) {
                offsets[local] |= uint64_t{1} << gate.targets[b];
            }
        }
    }
    Eigen::VectorXcd in(dim);
    Eigen::VectorXcd out(dim);
    for (uint64_t i = 0; i < free_count; i++) {
        uint64_t base = deposit(i, fixed) | control_on;
        for (size_t local = 0; local < dim; local++) {
            in[local] = a[base | offsets[local]];
        }
        out.noalias() = m * in;
        for (size_t local = 0; local < dim; local++) {
            a[base | offsets[local]] = out[local];
        }
    }
}

void StateVector::apply(const Circuit &circuit) {
    if (circuit.qubit_count() != qubit_count_) {
        throw std::invalid_argument("circuit has " + std::to_string(circuit.qubit_count()) +
                                    " qubits but state has " + std::to_string(qubit_count_));
    }
    for (const Gate &g : circuit.gates()) {
        apply(g);
    }
}

StateVector apply_circuit(StateVector state, const Circuit &circuit) {
    state.apply(circuit);
    return state;
}

namespace {

uint64_t register_mask(std::span<const uint32_t> qubits, uint32_t qubit_count) {
    uint64_t mask = 0;
    for (uint32_t q : qubits) {
        if (q >= qubit_count) {
            throw std::invalid_argument("register qubit outside state");
        }
        mask |= uint64_t{1} << q;
    }
    return mask;
}

}  // namespace

Projection project_zero(const StateVector &state, std::span<const uint32_t> register_qubits) {
    if (register_qubits.empty()) {
        throw std::invalid_argument("projection register must be non-empty");
    }
    const uint64_t mask = register_mask(register_qubits, state.qubit_count());
    std::vector<Complex> amps = state.amplitudes();
    double kept = 0;
    for (uint64_t i = 0; i < amps.size(); i++) {
        if (i & mask) {
            amps[i] = 0;
        } else {
            kept += std::norm(amps[i]);
        }
    }
    const double total = state.norm_squared();
    const double p = total > 0 ? kept / total : 0.0;
    if (p < 1e-14) {
        throw ProjectionImpossible("projection onto |0...0> has success probability " +
                                   std::to_string(p));
    }
    const double scale = 1.0 / std::sqrt(kept);
    for (auto &x : amps) {
        x *= scale;
    }
    return {StateVector::from_amplitudes(std::move(amps)), p};
}

std::vector<double> marginal(const StateVector &state, std::span<const uint32_t> register_qubits) {
    register_mask(register_qubits, state.qubit_count());
    std::vector<double> out(size_t{1} << register_qubits.size(), 0.0);
    const auto &amps = state.amplitudes();
    for (uint64_t i = 0; i < amps.size(); i++) {
        double p = std::norm(amps[i]);
        if (p == 0) {
            continue;
        }
        uint64_t x = 0;
        for (size_t b = 0; b < register_qubits.size(); b++) {
            x |= ((i >> register_qubits[b]) & 1) << b;
        }
        out[x] += p;
    }
    double total = 0;
    for (double p : out) {
        total += p;
    }
    if (total > 0) {
        for (double &p : out) {
            p /= total;
        }
    }
    return out;
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights) {
    cdf_.reserve(weights.size());
    double acc = 0;
    for (double w : weights) {
        if (!(w >= 0)) {
            throw std::invalid_argument("sampling weights must be non-negative");
        }
        acc += w;
        cdf_.push_back(acc);
    }
    if (!(acc > 0)) {
        throw std::invalid_argument("sampling weights sum to zero");
    }
    for (double &c : cdf_) {
        c /= acc;
    }
}

double DiscreteSampler::probability(size_t i) const {
    return cdf_[i] - (i ? cdf_[i - 1] : 0.0);
}

uint64_t DiscreteSampler::draw(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) {
        --it;
    }
    // Skip zero-probability entries that share a CDF value with their successor.
    size_t idx = static_cast<size_t>(it - cdf_.begin());
    while (idx > 0 && probability(idx) == 0) {
        idx--;
    }
    return idx;
}

std::vector<uint64_t> sample_register(const StateVector &state,
                                      std::span<const uint32_t> register_qubits, size_t shots,
                                      uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("shots must be at least 1");
    }
    auto probs = marginal(state, register_qubits);
    DiscreteSampler sampler(probs);
    std::mt19937_64 rng(seed);
    std::vector<uint64_t> out(shots);
    for (auto &x : out) {
        x = sampler(rng);
    }
    return out;
}

Eigen::MatrixXcd extract_block(const Circuit &circuit, std::span<const uint32_t> system_qubits) {
    const uint32_t q = circuit.qubit_count();
    const size_t dim = size_t{1} << system_qubits.size();
    register_mask(system_qubits, q);
    auto embed = [&](size_t j) {
        uint64_t idx = 0;
        for (size_t b = 0; b < system_qubits.size(); b++) {
            idx |= uint64_t((j >> b) & 1) << system_qubits[b];
        }
        return idx;
    };
    Eigen::MatrixXcd block(dim, dim);
    for (size_t j = 0; j < dim; j++) {
        StateVector s = StateVector::basis(q, embed(j));
        s.apply(circuit);
        for (size_t i = 0; i < dim; i++) {
            block(i, j) = s[embed(i)];
        }
    }
    return block;
}

nlohmann::json to_json(const StateVector &state) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (const auto &a : state.amplitudes()) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    return {{"qubits", state.qubit_count()}, {"re", re}, {"im", im}};
}

}  // namespace deteqt::sim
