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

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>
#include <random>

#include "deteqt/hypergraph.h"
#include "deteqt/qsvt.h"
#include "deteqt/readout.h"
#include "deteqt/spectral.h"
#include "deteqt/statevector.h"

namespace deteqt::oracle {

namespace {

constexpr double kTie = 1e-10;

ModularityOptimum enumerate_all(const graph::ModularityMatrix &b) {
    const Eigen::MatrixXd &m = b.entries;
    uint32_t n = b.size();
    std::vector<int> s(n, 1);
    Eigen::VectorXd y = m.rowwise().sum();
    double val = y.sum();
    double scale = 1.0 / (4.0 * static_cast<double>(b.m));

    ModularityOptimum best{graph::Partition::from_signs(s), val * scale, 1};
    // Node 0 stays +1: s and -s describe the same bipartition.
    uint64_t steps = uint64_t{1} << (n - 1);
    for (uint64_t i = 1; i < steps; i++) {
        uint32_t j = static_cast<uint32_t>(std::countr_zero(i)) + 1;
        val += -4.0 * s[j] * y[j] + 4.0 * m(j, j);
        y -= 2.0 * s[j] * m.col(j);
        s[j] = -s[j];
        double q = val * scale;
        if (q > best.q + kTie) {
            best = {graph::Partition::from_signs(s), q, 1};
        } else if (q > best.q - kTie) {
            best.ties++;
            auto p = graph::Partition::from_signs(s);
            if (p.botnet < best.partition.botnet) {
                best.partition = std::move(p);
            }
        }
    }
    best.q = graph::modularity_score(b, best.partition);
    return best;
}

ModularityOptimum enumerate_fixed(const graph::ModularityMatrix &b, uint32_t k) {
    const Eigen::MatrixXd &m = b.entries;
    uint32_t n = b.size();
    if (k == 0 || 2 * k > n) {
        throw std::invalid_argument("botnet size must satisfy 1 <= k <= N/2");
    }
    if (hypergraph::log2_binomial(n, k) > 26) {
        throw std::invalid_argument("C(N, k) too large for exhaustive enumeration");
    }
    Eigen::VectorXd r = m.rowwise().sum();
    double total = r.sum();
    double scale = 1.0 / (4.0 * static_cast<double>(b.m));
    ModularityOptimum best;
    bool first = true;
    for (const auto &mask : hypergraph::k_subsets(n, k)) {
        if (2 * k == n && !mask.test(0)) {
            continue;  // complement of a set already scored
        }
        auto idx = mask.indices();
        double val = total;
        for (uint32_t i : idx) {
            val -= 4.0 * r[i];
            for (uint32_t j : idx) {
                val += 4.0 * m(i, j);
            }
        }
        double q = val * scale;
        if (first || q > best.q + kTie) {
            best = {graph::Partition::from_botnet(n, idx), q, 1};
            first = false;
        } else if (q > best.q - kTie) {
            best.ties++;
        }
    }
    best.q = graph::modularity_score(b, best.partition);
    return best;
}

StageCheck judged(std::string name, double deviation, double tolerance, std::string note = "") {
    return {std::move(name), deviation, tolerance, deviation <= tolerance ? StageStatus::Pass : StageStatus::Fail,
            std::move(note)};
}

}  // namespace

ModularityOptimum brute_force_modularity(const graph::Network &net, std::optional<uint32_t> k) {
    auto b = graph::modularity_matrix(net);
    if (k) {
        return enumerate_fixed(b, *k);
    }
    if (net.node_count > kBruteForceLimit) {
        throw std::invalid_argument("exhaustive modularity search is limited to N <= 24 without a fixed k");
    }
    return enumerate_all(b);
}

const char *status_name(StageStatus s) {
    switch (s) {
        case StageStatus::Pass:
            return "pass";
        case StageStatus::Fail:
            return "fail";
        case StageStatus::Skipped:
            return "skipped";
    }
    return "unknown";
}

bool OracleReport::passed() const {
    return std::none_of(stages.begin(), stages.end(), [](const StageCheck &s) { return s.status == StageStatus::Fail; });
}

const StageCheck &OracleReport::stage(const std::string &name) const {
    for (const auto &s : stages) {
        if (s.name == name) {
            return s;
        }
    }
    throw std::out_of_range("no stage named " + name);
}

OracleReport verify_pipeline(const graph::Network &net, const std::vector<uint32_t> &planted,
                             const VerifyOptions &options) {
    const auto &run = options.run;
    OracleReport report;
    auto b = graph::modularity_matrix(net);
    uint32_t N = net.node_count;
    auto best = N <= kBruteForceLimit ? enumerate_all(b)
                                      : enumerate_fixed(b, static_cast<uint32_t>(planted.size()));
    report.best_partition = best.partition;
    report.best_q = best.q;
    auto mv = spectral::max_eigenvector(b);
    auto part = spectral::classical_sign_partition(mv);
    report.spectral_q = graph::modularity_score(b, part.partition);
    if (!planted.empty()) {
        report.planted_q = graph::modularity_score(b, graph::Partition::from_botnet(N, planted));
    }

    const char *names[] = {"eigen_residual", "sign_agreement", "block_encoding", "sampler_tv", "elimination"};
    auto skip_rest = [&](size_t from, const std::string &why) {
        for (size_t i = from; i < std::size(names); i++) {
            report.stages.push_back({names[i], 0, 0, StageStatus::Skipped, why});
        }
    };

    // Eigen residual on the active block.
    Eigen::VectorXd v = mv.amplitudes.head(N);
    double residual = (b.entries * v - mv.eigenvalue * v).cwiseAbs().maxCoeff();
    report.stages.push_back(judged("eigen_residual", residual, options.eigen_tolerance));
    if (report.stages.back().status == StageStatus::Fail) {
        skip_rest(1, "eigen_residual failed");
        return report;
    }

    uint32_t n = mv.qubits();
    double x_min = pipeline::fitting_x_min(mv);
    qsp::QspAngles angles;
    if (options.angles) {
        angles = *options.angles;
    } else {
        auto degrees = run.epsilon_target ? pipeline::degree_ladder(run.degree) : std::vector<uint32_t>{run.degree};
        for (uint32_t d : degrees) {
            angles = pipeline::fit_sign_angles(d, x_min).angles;
            double eps = qsp::sup_sign_error([&](double x) { return qsp::qsp_polynomial(angles, x).real(); }, x_min);
            if (!run.epsilon_target || eps <= *run.epsilon_target) {
                break;
            }
        }
    }
    qsvt::BlockEncoding be = run.encoding == pipeline::EncodingKind::Lcu
                                 ? qsvt::build_diag_block_encoding_lcu(spectral::complete_unitary(mv))
                                 : qsvt::build_diag_block_encoding_dilation(std::vector<double>(
                                       mv.amplitudes.data(), mv.amplitudes.data() + mv.amplitudes.size()));
    if (be.qubit_count() + 1 > sim::max_qubits()) {
        skip_rest(1, "QSVT circuit exceeds the simulator cap");
        return report;
    }
    auto qsvt_circuit = qsvt::assemble_qsvt(be, angles);
    auto lambda = pipeline::simulate_signed_state(qsvt_circuit);
    double root = std::sqrt(static_cast<double>(lambda.size()));
    double sign_dev = 0;
    for (size_t i = 0; i < lambda.size(); i++) {
        double target = i < N ? part.partition.signs[i] : 0.0;
        sign_dev = std::max(sign_dev, std::abs(lambda[i] * root - target));
    }
    report.stages.push_back(judged("sign_agreement", sign_dev, options.sign_tolerance));
    if (report.stages.back().status == StageStatus::Fail) {
        skip_rest(2, "sign_agreement failed");
        return report;
    }

    auto block = qsvt::block_of(be);
    double block_dev = 0;
    for (Eigen::Index i = 0; i < block.rows(); i++) {
        for (Eigen::Index j = 0; j < block.cols(); j++) {
            double target = i == j ? be.alpha * mv.amplitudes[i] : 0.0;
            block_dev = std::max(block_dev, std::abs(block(i, j) - target));
        }
    }
    report.stages.push_back(judged("block_encoding", block_dev, options.block_tolerance));
    if (report.stages.back().status == StageStatus::Fail) {
        skip_rest(3, "block_encoding failed");
        return report;
    }

    if (planted.empty()) {
        skip_rest(3, "no planted set");
        return report;
    }
    uint32_t k = static_cast<uint32_t>(planted.size());
    auto mode = run.mode ? *run.mode
                         : (N % 2 == 0 ? hypergraph::OverlapMode::ZeroOverlap : hypergraph::OverlapMode::SmallOverlap);
    auto sets = hypergraph::enumerate_sets(N, k, mode, run.k_lcu);
    if (qsvt_circuit.circuit.qubit_count() + 1 + sets.selection.ancillas > sim::max_qubits()) {
        skip_rest(3, "protocol circuit exceeds the simulator cap");
        return report;
    }
    auto dist = readout::circuit_distribution(sets.selection, qsvt_circuit);
    std::vector<double> closed(lambda.size());
    for (size_t i = 0; i < closed.size(); i++) {
        closed[i] = qsp::qsp_polynomial(angles, mv.amplitudes[i]).real() / root;
    }
    auto ref = readout::oracle_distribution(sets.selection, closed);
    sim::DiscreteSampler sampler(dist.probabilities);
    std::mt19937_64 rng(child_seed(run.seed, 3));
    std::vector<double> counts(dist.probabilities.size(), 0.0);
    for (uint64_t s = 0; s < options.shots; s++) {
        counts[sampler(rng)] += 1;
    }
    double tv = 0;
    for (size_t x = 0; x < counts.size(); x++) {
        tv += std::abs(counts[x] / static_cast<double>(options.shots) - ref.probabilities[x]);
    }
    report.stages.push_back(
        judged("sampler_tv", tv / 2, options.tv_tolerance, std::to_string(options.shots) + " shots"));
    if (report.stages.back().status == StageStatus::Fail) {
        skip_rest(4, "sampler_tv failed");
        return report;
    }

    auto tables = readout::build_tables(sets.candidates, sets.selection);
    readout::TrialConfig tc;
    tc.trials = run.trials ? *run.trials : readout::default_trials(N, k, sets.selection.k_lcu.front(), mode);
    tc.budget = run.budget ? *run.budget : 0;
    tc.seed = child_seed(run.seed, 4);
    tc.threads = run.threads;
    tc.report_size = k;
    auto bd = readout::run_trials(sampler, tables, tc);
    auto want = planted;
    std::sort(want.begin(), want.end());
    std::vector<uint32_t> diff;
    std::set_symmetric_difference(want.begin(), want.end(), bd.detected.begin(), bd.detected.end(),
                                  std::back_inserter(diff));
    double miss = bd.failed() ? 1.0 : static_cast<double>(diff.size()) / (2.0 * k);
    report.stages.push_back(
        judged("elimination", miss, 0.0, std::to_string(bd.successes) + "/" + std::to_string(tc.trials) + " trials won"));
    return report;
}

nlohmann::json to_json(const OracleReport &r) {
    auto stages = nlohmann::json::array();
    for (const auto &s : r.stages) {
        stages.push_back({{"name", s.name},
                          {"deviation", s.deviation},
                          {"tolerance", s.tolerance},
                          {"status", status_name(s.status)},
                          {"note", s.note}});
    }
    return {{"best_partition", r.best_partition.botnet},
            {"best_Q", r.best_q},
            {"spectral_Q", r.spectral_q},
            {"spectral_to_best_ratio", r.best_q > 0 ? r.spectral_q / r.best_q : 0.0},
            {"planted_Q", r.planted_q},
            {"passed", r.passed()},
            {"stages", stages}};
}

}  // namespace deteqt::oracle
