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

#include <gtest/gtest.h>

#include <random>

#include "deteqt/statevector.h"
#include "test_util.h"

using namespace deteqt;
using namespace deteqt::spectral;

namespace {

graph::Network two_triangles() {
    return graph::Network::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
}

double rayleigh(const Eigen::MatrixXd &b, const Eigen::VectorXd &v) {
    return v.dot(b * v) / v.squaredNorm();
}

}  // namespace

TEST(spectral, qubits_for) {
    ASSERT_EQ(qubits_for(1), 1u);
    ASSERT_EQ(qubits_for(2), 1u);
    ASSERT_EQ(qubits_for(3), 2u);
    ASSERT_EQ(qubits_for(4), 2u);
    ASSERT_EQ(qubits_for(10), 4u);
    ASSERT_EQ(qubits_for(16), 4u);
    ASSERT_EQ(qubits_for(17), 5u);
    ASSERT_EQ(qubits_for(100), 7u);
}

TEST(spectral, triangles_separate) {
    auto b = graph::modularity_matrix(two_triangles());
    auto v = max_eigenvector(b);
    ASSERT_EQ(v.active, 6u);
    ASSERT_EQ(v.amplitudes.size(), 8);
    ASSERT_EQ(v.amplitudes[6], 0.0);
    ASSERT_EQ(v.amplitudes[7], 0.0);
    auto p = classical_sign_partition(v).partition;
    ASSERT_TRUE(p.botnet == (std::vector<uint32_t>{0, 1, 2}) || p.botnet == (std::vector<uint32_t>{3, 4, 5}));
}

TEST(spectral, eigen_residual_and_norm) {
    for (uint64_t seed = 0; seed < 10; seed++) {
        auto pn = graph::generate_planted_botnet({14, 4, 0.8, 0.15, graph::BotnetStyle::Hidden, 0, seed});
        auto b = graph::modularity_matrix(pn.network);
        auto v = max_eigenvector(b);
        Eigen::VectorXd a = v.amplitudes.head(v.active);
        ASSERT_NEAR(v.amplitudes.norm(), 1.0, 1e-12);
        ASSERT_LE((b.entries * a - v.eigenvalue * a).cwiseAbs().maxCoeff(), 1e-10);
        for (Eigen::Index i = v.active; i < v.amplitudes.size(); i++) {
            ASSERT_EQ(v.amplitudes[i], 0.0);
        }
        // Leading: beats random unit vectors.
        for (uint64_t r = 0; r < 100; r++) {
            auto u = deteqt_test::random_unit_vector(v.active, seed * 1000 + r);
            Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(u.data(), u.size());
            ASSERT_GE(v.eigenvalue + 1e-12, rayleigh(b.entries, w));
        }
    }
}

TEST(spectral, gauge_majority_positive) {
    auto v = max_vector_from_amplitudes({-0.5, -0.5, 0.5, -0.5});
    ASSERT_GT(v.amplitudes[0], 0);
    ASSERT_LT(v.amplitudes[2], 0);
    auto tie = max_vector_from_amplitudes({-0.5, 0.5, 0.5, -0.5});
    ASSERT_GE(tie.amplitudes[0], 0);
}

TEST(spectral, sign_partition_gauge_invariant) {
    std::vector<double> a{0.3, -0.1, 0.5, 0.2, -0.4, 0.6, 0.1};
    std::vector<double> b;
    for (double x : a) {
        b.push_back(-x);
    }
    auto pa = classical_sign_partition(max_vector_from_amplitudes(a)).partition;
    auto pb = classical_sign_partition(max_vector_from_amplitudes(b)).partition;
    ASSERT_EQ(pa.botnet, pb.botnet);
    ASSERT_EQ(pa.botnet, (std::vector<uint32_t>{1, 4}));
}

TEST(spectral, fixture_signs) {
    auto v = max_vector_from_amplitudes({0.602, 0.372, -0.602, 0.372});
    auto s = classical_sign_partition(v);
    ASSERT_EQ(s.partition.signs, (std::vector<int>{1, 1, -1, 1}));
    ASSERT_EQ(s.partition.botnet, (std::vector<uint32_t>{2}));
}

TEST(spectral, all_positive_has_empty_botnet) {
    auto s = classical_sign_partition(max_vector_from_amplitudes({0.2, 0.4, 0.1}));
    ASSERT_TRUE(s.partition.botnet.empty());
}

TEST(spectral, unstable_entries_flagged) {
    auto s = classical_sign_partition(max_vector_from_amplitudes({0.6, 0.0, -0.3, 0.5}));
    ASSERT_EQ(s.unstable, (std::vector<uint32_t>{1}));
    ASSERT_EQ(s.partition.signs[1], -1);
}

TEST(spectral, degenerate_flag_is_deterministic) {
    // Three disjoint triangles: every difference of two triangle indicators has eigenvalue 2.
    auto net = graph::Network::from_edges(9, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {6, 7}, {7, 8}, {6, 8}});
    auto b = graph::modularity_matrix(net);
    auto v1 = max_eigenvector(b);
    auto v2 = max_eigenvector(b);
    ASSERT_TRUE(v1.degenerate);
    ASSERT_EQ(v1.amplitudes, v2.amplitudes);
    auto single = max_eigenvector(graph::modularity_matrix(two_triangles()));
    ASSERT_FALSE(single.degenerate);
}

TEST(spectral, power_iteration_matches_dense_solver) {
    auto pn = graph::generate_planted_botnet({600, 60, 0.3, 0.02, graph::BotnetStyle::Hidden, 0, 4});
    auto b = graph::modularity_matrix(pn.network);
    auto v = max_eigenvector(b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.entries);
    ASSERT_NEAR(v.eigenvalue, es.eigenvalues()[599], 1e-8);
    Eigen::VectorXd ref = es.eigenvectors().col(599);
    ASSERT_NEAR(std::abs(ref.dot(v.amplitudes.head(600))), 1.0, 1e-8);
}

TEST(spectral, complete_unitary_identity_for_e0) {
    auto v = max_vector_from_amplitudes({1.0, 0.0, 0.0, 0.0});
    auto u = complete_unitary(v);
    ASSERT_LE((u.matrix - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(spectral, complete_unitary_properties) {
    std::vector<std::vector<double>> cases{{0.602, 0.372, -0.602, 0.372}};
    for (uint64_t seed = 0; seed < 10; seed++) {
        cases.push_back(deteqt_test::random_unit_vector(8, seed));
    }
    for (const auto &c : cases) {
        auto v = max_vector_from_amplitudes(c);
        auto u = complete_unitary(v);
        size_t dim = u.matrix.rows();
        ASSERT_LE((u.matrix.adjoint() * u.matrix - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-12);
        for (size_t i = 0; i < dim; i++) {
            ASSERT_NEAR(u.matrix(i, 0).real(), v.amplitudes[i], 1e-12);
        }
        // Through the simulator: U|0> = v.
        sim::Circuit circ(u.qubits());
        circ.unitary(sim::qubit_range(0, u.qubits()), u.matrix);
        auto s = sim::apply_circuit(sim::StateVector::zero(u.qubits()), circ);
        for (size_t i = 0; i < dim; i++) {
            ASSERT_NEAR(std::abs(s[i] - sim::Complex(v.amplitudes[i], 0)), 0.0, 1e-12);
        }
    }
}

TEST(spectral, perturb_is_seeded_and_normalized) {
    auto v = max_vector_from_amplitudes({0.6, 0.3, -0.5, 0.2, 0.4});
    auto a = perturb(v, 0.05, 9);
    auto b = perturb(v, 0.05, 9);
    ASSERT_EQ(a.amplitudes, b.amplitudes);
    ASSERT_NEAR(a.amplitudes.norm(), 1.0, 1e-12);
    ASSERT_EQ(a.amplitudes[5], 0.0);
    ASSERT_GT((a.amplitudes - v.amplitudes).norm(), 0.0);
}

TEST(spectral, json_dump_fields) {
    auto v = max_vector_from_amplitudes({0.602, 0.372, -0.602, 0.372});
    auto j = to_json(v, classical_sign_partition(v));
    ASSERT_EQ(j["botnet"], nlohmann::json({2}));
    ASSERT_EQ(j["amplitudes"].size(), 4u);
}
