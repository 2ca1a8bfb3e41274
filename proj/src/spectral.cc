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

#include "deteqt/spectral.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace deteqt::spectral {

uint32_t qubits_for(uint32_t count) {
    if (count <= 2) {
        return 1;
    }
    return static_cast<uint32_t>(std::bit_width(count - 1));
}

uint32_t MaxVector::qubits() const {
    return static_cast<uint32_t>(std::countr_zero(static_cast<uint64_t>(amplitudes.size())));
}

uint32_t PreparationUnitary::qubits() const {
    return static_cast<uint32_t>(std::countr_zero(static_cast<uint64_t>(matrix.rows())));
}

void fix_gauge(Eigen::VectorXd &v, uint32_t active) {
    int positive = 0;
    int negative = 0;
    for (uint32_t i = 0; i < active; i++) {
        if (v[i] > 0) {
            positive++;
        } else if (v[i] < 0) {
            negative++;
        }
    }
    bool flip = negative > positive || (negative == positive && v[0] < 0);
    if (flip) {
        v = -v;
    }
}

namespace {

MaxVector pad(const Eigen::VectorXd &active_block, double eigenvalue) {
    const uint32_t n_active = static_cast<uint32_t>(active_block.size());
    const uint32_t dim = uint32_t{1} << qubits_for(n_active);
    MaxVector out;
    out.active = n_active;
    out.eigenvalue = eigenvalue;
    out.amplitudes = Eigen::VectorXd::Zero(dim);
    out.amplitudes.head(n_active) = active_block.normalized();
    fix_gauge(out.amplitudes, n_active);
    return out;
}

bool lexicographically_greater(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    for (Eigen::Index i = 0; i < a.size(); i++) {
        if (a[i] != b[i]) {
            return a[i] > b[i];
        }
    }
    return false;
}

// Power iteration on B + shift*I where shift bounds the spectrum from below.
std::pair<Eigen::VectorXd, double> power_iteration(const Eigen::MatrixXd &b) {
    const Eigen::Index n = b.rows();
    double shift = b.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::MatrixXd shifted = b + shift * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; i++) {
        v[i] = 1.0 + 0.01 * std::sin(static_cast<double>(i) + 1.0);
    }
    v.normalize();
    double lambda = 0;
    for (int iter = 0; iter < 100000; iter++) {
        Eigen::VectorXd w = shifted * v;
        double next = v.dot(w);
        w.normalize();
        double change = (w - v).norm();
        v = w;
        if (std::abs(next - lambda) < 1e-14 * std::max(1.0, std::abs(next)) && change < 1e-12) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return {v, v.dot(b * v)};
}

}  // namespace

MaxVector max_eigenvector(const graph::ModularityMatrix &b) {
    const Eigen::Index n = b.entries.rows();
    if (n == 0 || b.entries.cols() != n) {
        throw std::invalid_argument("modularity matrix must be square and non-empty");
    }
    if (!b.entries.isApprox(b.entries.transpose(), 1e-12)) {
        throw std::invalid_argument("modularity matrix must be symmetric");
    }
    if (n > kDenseEigenLimit) {
        auto [v, lambda] = power_iteration(b.entries);
        return pad(v, lambda);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b.entries);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigensolver failed");
    }
    const auto &values = solver.eigenvalues();
    const double top = values[n - 1];
    Eigen::Index first = n - 1;
    while (first > 0 && top - values[first - 1] < 1e-9) {
        first--;
    }
    MaxVector best = pad(solver.eigenvectors().col(n - 1), top);
    for (Eigen::Index c = first; c < n - 1; c++) {
        MaxVector other = pad(solver.eigenvectors().col(c), top);
        if (lexicographically_greater(other.amplitudes, best.amplitudes)) {
            best = std::move(other);
        }
    }
    best.degenerate = first < n - 1;
    return best;
}

MaxVector max_vector_from_amplitudes(const std::vector<double> &values) {
    if (values.empty()) {
        throw std::invalid_argument("empty amplitude vector");
    }
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
    if (v.norm() == 0) {
        throw std::invalid_argument("zero amplitude vector");
    }
    return pad(v, 0.0);
}

MaxVector perturb(const MaxVector &v, double epsilon, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, epsilon);
    Eigen::VectorXd block = v.amplitudes.head(v.active);
    for (Eigen::Index i = 0; i < block.size(); i++) {
        block[i] += noise(rng);
    }
    MaxVector out = pad(block, v.eigenvalue);
    out.degenerate = v.degenerate;
    return out;
}

SignPartition classical_sign_partition(const MaxVector &v) {
    SignPartition out;
    std::vector<int> signs(v.active);
    for (uint32_t i = 0; i < v.active; i++) {
        signs[i] = v.amplitudes[i] > 0 ? 1 : -1;
        if (std::abs(v.amplitudes[i]) < 1e-12) {
            out.unstable.push_back(i);
        }
    }
    out.partition = graph::Partition::from_signs(std::move(signs));
    return out;
}

PreparationUnitary complete_unitary(const MaxVector &v) {
    const Eigen::Index dim = v.amplitudes.size();
    if (std::abs(v.amplitudes.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("max vector must have unit norm");
    }
    Eigen::VectorXd w = v.amplitudes;
    w[0] -= 1.0;
    Eigen::MatrixXd u = Eigen::MatrixXd::Identity(dim, dim);
    double norm2 = w.squaredNorm();
    if (norm2 > 1e-30) {
        u -= (2.0 / norm2) * w * w.transpose();
    }
    return {u.cast<std::complex<double>>()};
}

nlohmann::json to_json(const MaxVector &v, const SignPartition &signs) {
    nlohmann::json j;
    j["eigenvalue"] = v.eigenvalue;
    j["amplitudes"] = std::vector<double>(v.amplitudes.data(), v.amplitudes.data() + v.amplitudes.size());
    j["signs"] = signs.partition.signs;
    j["botnet"] = signs.partition.botnet;
    j["degenerate"] = v.degenerate;
    if (!signs.unstable.empty()) {
        j["unstable_signs"] = signs.unstable;
    }
    return j;
}

}  // namespace deteqt::spectral
