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

#include "deteqt/oracle.h"

#include <gtest/gtest.h>

#include <random>

#include "deteqt/spectral.h"

using namespace deteqt;
using namespace deteqt::oracle;

namespace {

graph::Network two_triangles() {
    return graph::Network::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
}

graph::PlantedNetwork planted(uint32_t n, uint32_t k, uint64_t seed) {
    graph::PlantedParams p;
    p.node_count = n;
    p.botnet_size = k;
    p.p_intra = 0.9;
    p.p_inter = 0.05;
    p.seed = seed;
    return graph::generate_planted_botnet(p);
}

// Independent reference: direct double sum over every sign vector.
double reference_best_q(const graph::Network &net) {
    auto a = net.adjacency();
    auto deg = net.degrees();
    double m = net.edge_count();
    double best = -1e300;
    for (uint64_t bits = 0; bits < (uint64_t{1} << net.node_count); bits++) {
        double q = 0;
        for (uint32_t i = 0; i < net.node_count; i++) {
            for (uint32_t j = 0; j < net.node_count; j++) {
                double si = (bits >> i) & 1 ? -1 : 1;
                double sj = (bits >> j) & 1 ? -1 : 1;
                q += (a(i, j) - deg[i] * deg[j] / (2 * m)) * si * sj;
            }
        }
        best = std::max(best, q / (4 * m));
    }
    return best;
}

VerifyOptions default_options(uint64_t seed) {
    VerifyOptions o;
    o.run.seed = seed;
    o.shots = 20000;
    return o;
}

}  // namespace

TEST(oracle, two_triangles_optimum) {
    auto best = brute_force_modularity(two_triangles());
    // On a 3+3 split the botnet is the side without node 0.
    ASSERT_EQ(best.partition.botnet, (std::vector<uint32_t>{3, 4, 5}));
    ASSERT_NEAR(best.q, 5.0 / 14.0, 1e-12);
    ASSERT_NEAR(best.q, reference_best_q(two_triangles()), 1e-12);
}

TEST(oracle, complete_graph_ties) {
    std::vector<graph::Edge> e;
    for (uint32_t i = 0; i < 4; i++) {
        for (uint32_t j = i + 1; j < 4; j++) {
            e.push_back({i, j});
        }
    }
    auto k4 = graph::Network::from_edges(4, e);
    auto best = brute_force_modularity(k4);
    ASSERT_NEAR(best.q, reference_best_q(k4), 1e-12);
    // Every 2+2 split of K4 scores the same.
    auto two = brute_force_modularity(k4, 2);
    ASSERT_EQ(two.partition.botnet, (std::vector<uint32_t>{0, 1}));
    ASSERT_EQ(two.ties, 3u);
}

TEST(oracle, random_graphs_match_reference) {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 6; rep++) {
        uint32_t n = 5 + rep;
        std::vector<graph::Edge> e;
        std::bernoulli_distribution coin(0.4);
        for (uint32_t i = 0; i < n; i++) {
            for (uint32_t j = i + 1; j < n; j++) {
                if (coin(rng)) {
                    e.push_back({i, j});
                }
            }
        }
        if (e.empty()) {
            e.push_back({0, 1});
        }
        auto net = graph::Network::from_edges(n, e);
        auto best = brute_force_modularity(net);
        ASSERT_NEAR(best.q, reference_best_q(net), 1e-10);
        auto mm = graph::modularity_matrix(net);
        ASSERT_NEAR(graph::modularity_score(mm, best.partition), best.q, 1e-12);
    }
}

TEST(oracle, planted_twelve_nodes) {
    auto inst = planted(12, 3, 5);
    auto best = brute_force_modularity(inst.network, 3);
    ASSERT_EQ(best.partition.botnet, inst.planted);
    auto full = brute_force_modularity(inst.network);
    ASSERT_GE(full.q, best.q - 1e-12);
    auto mv = spectral::max_eigenvector(graph::modularity_matrix(inst.network));
    auto sp = spectral::classical_sign_partition(mv).partition;
    ASSERT_GE(graph::modularity_score(graph::modularity_matrix(inst.network), sp), 0.95 * full.q);
    ASSERT_THROW(brute_force_modularity(graph::Network::from_edges(25, {{0, 1}})), std::invalid_argument);
}

TEST(oracle, verify_planted_eight_nodes_passes) {
    auto inst = planted(8, 3, 1);
    auto r = verify_pipeline(inst.network, inst.planted, default_options(11));
    for (const auto &s : r.stages) {
        EXPECT_EQ(s.status, StageStatus::Pass) << s.name << " deviation " << s.deviation << " " << s.note;
    }
    ASSERT_TRUE(r.passed());
    ASSERT_EQ(r.stages.size(), 5u);
    ASSERT_LE(r.stage("block_encoding").deviation, 1e-8);
    ASSERT_LE(r.stage("sampler_tv").deviation, 0.05);
    ASSERT_GE(r.spectral_q, 0.95 * r.best_q);
    auto j = to_json(r);
    ASSERT_EQ(j["stages"].size(), 5u);
}

TEST(oracle, corrupted_angles_fail_sign_stage) {
    auto inst = planted(8, 3, 1);
    auto o = default_options(11);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    qsp::QspAngles bad;
    for (int i = 0; i < 30; i++) {
        bad.phases.push_back(u(rng));
    }
    o.angles = bad;
    auto r = verify_pipeline(inst.network, inst.planted, o);
    ASSERT_FALSE(r.passed());
    ASSERT_EQ(r.stage("eigen_residual").status, StageStatus::Pass);
    ASSERT_EQ(r.stage("sign_agreement").status, StageStatus::Fail);
    for (auto name : {"block_encoding", "sampler_tv", "elimination"}) {
        ASSERT_EQ(r.stage(name).status, StageStatus::Skipped) << name;
    }
    ASSERT_THROW(r.stage("nope"), std::out_of_range);
}
