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

#include "deteqt/readout.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <iterator>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "deteqt/random.h"

namespace deteqt::readout {

namespace {

// Survivor lists are precomputed only below this many stored indices.
constexpr uint64_t kSurvivorBudget = uint64_t{1} << 26;

}  // namespace

double overlap(const NodeMask &candidate, const NodeMask &lcu_subset, uint32_t node_count, uint32_t n) {
    int d = candidate.count() + lcu_subset.count() - 2 * intersection_size(candidate, lcu_subset);
    double num = std::abs(static_cast<double>(node_count) - 2.0 * d);
    return num / std::sqrt(static_cast<double>(node_count) * std::ldexp(1.0, static_cast<int>(n)));
}

double signed_overlap(std::span<const double> lambda, const NodeMask &subset) {
    double total = 0;
    for (double v : lambda) {
        total += v;
    }
    double inside = 0;
    for (uint32_t i : subset.indices()) {
        if (i >= lambda.size()) {
            throw std::invalid_argument("LCU subset index outside the signed state");
        }
        inside += lambda[i];
    }
    return (total - 2 * inside) / std::sqrt(static_cast<double>(lambda.size()));
}

IdentifiabilityError::IdentifiabilityError(uint64_t a, uint64_t b)
    : std::runtime_error("candidates " + std::to_string(a) + " and " + std::to_string(b) +
                         " share the same elimination set"),
      first(a),
      second(b) {}

OverlapTables::OverlapTables(std::vector<NodeMask> candidates, hypergraph::LcuSelection selection)
    : candidates_(std::move(candidates)), selection_(std::move(selection)) {
    if (candidates_.empty()) {
        throw std::invalid_argument("no candidates");
    }
    if (candidates_.size() > UINT32_MAX) {
        throw std::invalid_argument("candidate set too large");
    }
    if (selection_.subsets.size() != selection_.size) {
        throw std::invalid_argument("LCU selection size does not match its subsets");
    }
    candidate_sizes_.reserve(candidates_.size());
    for (const auto &c : candidates_) {
        candidate_sizes_.push_back(static_cast<uint8_t>(c.count()));
    }
    for (const auto &x : selection_.subsets) {
        subset_sizes_.push_back(static_cast<uint8_t>(x.count()));
    }
    // Candidate-major order keeps the (large) candidate array streaming once.
    uint64_t stored = 0;
    std::vector<std::vector<uint32_t>> lists(selection_.size);
    for (size_t c = 0; c < candidates_.size() && stored <= kSurvivorBudget; c++) {
        for (uint64_t x = 0; x < selection_.size; x++) {
            if (!eliminates(c, x)) {
                lists[x].push_back(static_cast<uint32_t>(c));
                stored++;
            }
        }
    }
    if (stored <= kSurvivorBudget) {
        survivors_ = std::move(lists);
    }
}

bool OverlapTables::eliminates(size_t candidate, uint64_t x) const {
    if (x >= selection_.size) {
        return false;
    }
    int n = static_cast<int>(selection_.node_count);
    int kc = candidate_sizes_[candidate];
    int kx = subset_sizes_[x];
    int d = kc + kx - 2 * intersection_size(candidates_[candidate], selection_.subsets[x]);
    int value = std::abs(n - 2 * d);
    int threshold = selection_.mode == OverlapMode::ZeroOverlap ? 0 : std::abs(n - 2 * kc - 2 * kx);
    return value == threshold;
}

const std::vector<uint32_t> *OverlapTables::first_survivors(uint64_t x) const {
    if (survivors_.empty() || x >= selection_.size) {
        return nullptr;
    }
    return &survivors_[x];
}

std::vector<uint64_t> OverlapTables::elimination_set(size_t candidate) const {
    std::vector<uint64_t> out;
    for (uint64_t x = 0; x < selection_.size; x++) {
        if (eliminates(candidate, x)) {
            out.push_back(x);
        }
    }
    return out;
}

void OverlapTables::check_identifiability() const {
    size_t words = (selection_.size + 63) / 64;
    auto fill_row = [&](size_t c, std::vector<uint64_t> &r) {
        std::fill(r.begin(), r.end(), 0);
        for (uint64_t x = 0; x < selection_.size; x++) {
            if (eliminates(c, x)) {
                r[x >> 6] |= uint64_t{1} << (x & 63);
            }
        }
    };
    std::vector<uint64_t> row(words), other(words);
    std::unordered_multimap<uint64_t, size_t> seen;
    seen.reserve(candidates_.size());
    for (size_t c = 0; c < candidates_.size(); c++) {
        fill_row(c, row);
        uint64_t h = 0x51ED270B27A3C6F1ULL;
        for (uint64_t w : row) {
            h = splitmix64(h ^ w);
        }
        auto [lo, hi] = seen.equal_range(h);
        for (auto it = lo; it != hi; ++it) {
            fill_row(it->second, other);
            if (other == row) {
                throw IdentifiabilityError(it->second, c);
            }
        }
        seen.emplace(h, c);
    }
}

OverlapTables build_tables(std::vector<NodeMask> candidates, hypergraph::LcuSelection selection) {
    OverlapTables t(std::move(candidates), std::move(selection));
    t.check_identifiability();
    return t;
}

ProjectionCircuit build_projection_circuit(const qsvt::QsvtCircuit &qsvt) {
    uint32_t q = qsvt.circuit.qubit_count();
    uint32_t pa = q;
    sim::Circuit c(q + 1);
    auto inner = sim::qubit_range(0, q);
    c.append(qsvt.circuit.dagger(), inner);
    for (uint32_t s : qsvt.system_qubits) {
        c.h(s);
    }
    // (I - V)/2 with V = I - 2|0><0| on all q qubits, through the ancilla pa.
    c.h(pa);
    c.z(pa);
    for (uint32_t i = 0; i < q; i++) {
        c.x(i);
    }
    c.mcz(inner, {{pa, false}});
    for (uint32_t i = 0; i < q; i++) {
        c.x(i);
    }
    c.h(pa);
    for (uint32_t s : qsvt.system_qubits) {
        c.h(s);
    }
    c.append(qsvt.circuit, inner);

    ProjectionCircuit out{std::move(c), qsvt.system_qubits, {}};
    for (uint32_t i = 0; i <= q; i++) {
        if (std::find(qsvt.system_qubits.begin(), qsvt.system_qubits.end(), i) == qsvt.system_qubits.end()) {
            out.ancilla_qubits.push_back(i);
        }
    }
    return out;
}

ProtocolCircuit build_protocol_circuit(const hypergraph::LcuSelection &selection,
                                       const qsvt::QsvtCircuit &qsvt) {
    uint32_t n = static_cast<uint32_t>(qsvt.system_qubits.size());
    for (uint32_t i = 0; i < n; i++) {
        if (qsvt.system_qubits[i] != i) {
            throw std::invalid_argument("protocol circuit expects the system register at [0, n)");
        }
    }
    auto proj = build_projection_circuit(qsvt);
    uint32_t base = proj.circuit.qubit_count();
    uint32_t a = selection.ancillas;
    sim::Circuit c(base + a);

    auto lcu = hypergraph::build_lcu_circuit(selection, n);
    std::vector<uint32_t> map = sim::qubit_range(0, n);
    for (uint32_t b = 0; b < a; b++) {
        map.push_back(base + b);
    }
    c.append(lcu, map);
    c.append(proj.circuit, sim::qubit_range(0, base));
    return {std::move(c), proj.system_qubits, proj.ancilla_qubits, sim::qubit_range(base, a)};
}

LcuDistribution circuit_distribution(const hypergraph::LcuSelection &selection,
                                     const qsvt::QsvtCircuit &qsvt) {
    auto proto = build_protocol_circuit(selection, qsvt);
    auto state = sim::apply_circuit(sim::StateVector::zero(proto.circuit.qubit_count()), proto.circuit);
    auto projected = sim::project_zero(state, proto.postselect_qubits);
    return {sim::marginal(projected.state, proto.lcu_qubits), projected.success_probability, "circuit"};
}

LcuDistribution oracle_distribution(const hypergraph::LcuSelection &selection,
                                    std::span<const double> signed_state) {
    uint64_t dim = uint64_t{1} << selection.ancillas;
    double total = 0;
    double norm2 = 0;
    for (double v : signed_state) {
        total += v;
        norm2 += v * v;
    }
    double padding = total / std::sqrt(static_cast<double>(signed_state.size()));
    std::vector<double> p(dim);
    double sum = 0;
    for (uint64_t x = 0; x < dim; x++) {
        double c = x < selection.size ? signed_overlap(signed_state, selection.subsets[x]) : padding;
        p[x] = c * c;
        sum += p[x];
    }
    double success = sum * norm2 / static_cast<double>(dim);
    if (success < 1e-14) {
        throw sim::ProjectionImpossible("postselection probability vanishes for this instance");
    }
    for (double &v : p) {
        v /= sum;
    }
    return {std::move(p), success, "oracle"};
}

std::vector<double> exact_signed_state(std::span<const double> amplitudes, uint32_t active) {
    std::vector<double> out(amplitudes.size(), 0.0);
    double scale = 1.0 / std::sqrt(static_cast<double>(amplitudes.size()));
    for (uint32_t i = 0; i < active && i < amplitudes.size(); i++) {
        out[i] = amplitudes[i] < 0 ? -scale : scale;
    }
    return out;
}

SizeEstimate estimate_botnet_size(std::span<const double> lambda, uint32_t node_count) {
    double norm2 = 0;
    double total = 0;
    for (double v : lambda) {
        norm2 += v * v;
        total += v;
    }
    if (norm2 <= 0) {
        throw std::invalid_argument("signed state is zero");
    }
    double dim = static_cast<double>(lambda.size());
    double plus = std::abs(total / std::sqrt(norm2) / std::sqrt(dim));
    SizeEstimate e;
    e.raw = (node_count - std::sqrt(static_cast<double>(node_count)) * std::sqrt(dim) * plus) / 2;
    double rounded = std::clamp(std::round(e.raw), 0.0, std::floor(node_count / 2.0));
    e.k = static_cast<uint32_t>(rounded);
    e.residual = std::abs(e.raw - rounded);
    e.low_confidence = e.residual > 0.25;
    return e;
}

const char *outcome_name(TrialOutcome o) {
    switch (o) {
        case TrialOutcome::Winner:
            return "winner";
        case TrialOutcome::AllEliminated:
            return "all_eliminated";
        case TrialOutcome::BudgetExhausted:
            return "budget_exhausted";
    }
    return "unknown";
}

std::optional<uint32_t> EliminationState::winner() const {
    if (outcome == TrialOutcome::Winner) {
        return survivors.front();
    }
    return std::nullopt;
}

EliminationState sample_and_eliminate(const sim::DiscreteSampler &sampler, const OverlapTables &tables,
                                      uint32_t budget, std::mt19937_64 &rng) {
    EliminationState st;
    bool full = true;
    // Survivors still equal to one precomputed list; copied only when they change.
    const std::vector<uint32_t> *borrowed = nullptr;
    auto count = [&]() -> size_t {
        return full ? tables.candidate_count() : borrowed ? borrowed->size() : st.survivors.size();
    };
    auto release = [&] {
        if (borrowed) {
            st.survivors = *borrowed;
            borrowed = nullptr;
        }
    };
    auto settle = [&]() {
        size_t left = count();
        if (left > 1) {
            return false;
        }
        if (full) {
            st.survivors = {0};
        }
        release();
        st.outcome = left == 1 ? TrialOutcome::Winner : TrialOutcome::AllEliminated;
        return true;
    };
    if (settle()) {
        return st;
    }
    while (st.samples_used < budget) {
        uint64_t x = sampler(rng);
        st.samples.push_back(x);
        st.samples_used++;
        if (x < tables.lcu_size()) {
            size_t before = count();
            const auto *list = tables.first_survivors(x);
            if (full) {
                if (list) {
                    borrowed = list;
                } else {
                    for (size_t c = 0; c < tables.candidate_count(); c++) {
                        if (!tables.eliminates(c, x)) {
                            st.survivors.push_back(static_cast<uint32_t>(c));
                        }
                    }
                }
                full = false;
            } else if (borrowed && list) {
                st.survivors.clear();
                std::set_intersection(borrowed->begin(), borrowed->end(), list->begin(), list->end(),
                                      std::back_inserter(st.survivors));
                borrowed = nullptr;
            } else {
                release();
                std::erase_if(st.survivors, [&](uint32_t c) { return tables.eliminates(c, x); });
            }
            st.eliminated.push_back(static_cast<uint32_t>(before - count()));
        } else {
            st.eliminated.push_back(0);
        }
        if (settle()) {
            return st;
        }
    }
    release();
    if (full) {
        st.survivors.resize(tables.candidate_count());
        for (size_t c = 0; c < st.survivors.size(); c++) {
            st.survivors[c] = static_cast<uint32_t>(c);
        }
    }
    st.outcome = TrialOutcome::BudgetExhausted;
    return st;
}

uint32_t default_budget(size_t candidate_count) {
    uint32_t bits = candidate_count <= 1 ? 0 : static_cast<uint32_t>(std::bit_width(candidate_count - 1));
    return std::max<uint32_t>(4, 4 * bits);
}

uint64_t default_trials(uint32_t node_count, uint32_t k, uint32_t k_lcu, OverlapMode mode) {
    if (mode == OverlapMode::ZeroOverlap) {
        return static_cast<uint64_t>(std::ceil(std::sqrt(static_cast<double>(node_count))));
    }
    double gap = node_count / 2.0 - k - k_lcu;
    return static_cast<uint64_t>(std::max(1.0, std::ceil(node_count * gap)));
}

BotnetDistribution run_trials(const sim::DiscreteSampler &sampler, const OverlapTables &tables,
                              const TrialConfig &config) {
    if (config.trials == 0) {
        throw std::invalid_argument("trial count must be positive");
    }
    uint32_t budget = config.budget ? config.budget : default_budget(tables.candidate_count());
    BotnetDistribution out;
    out.trials.resize(config.trials);

    uint32_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<uint32_t>(std::min<uint64_t>(threads, config.trials));
    std::atomic<uint64_t> next{0};
    auto worker = [&]() {
        for (uint64_t t = next++; t < config.trials; t = next++) {
            std::mt19937_64 rng(child_seed(config.seed, t));
            auto st = sample_and_eliminate(sampler, tables, budget, rng);
            out.trials[t] = {st.winner(), st.samples_used, st.outcome};
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (uint32_t i = 0; i < threads; i++) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    uint32_t n = tables.node_count();
    out.node_counts.assign(n, 0);
    std::map<uint32_t, uint64_t> sizes;
    for (const auto &r : out.trials) {
        if (!r.winner) {
            continue;
        }
        out.successes++;
        const NodeMask &m = tables.candidates()[*r.winner];
        sizes[static_cast<uint32_t>(m.count())]++;
        for (uint32_t i : m.indices()) {
            out.node_counts[i]++;
        }
    }
    out.node_frequency.assign(n, 0.0);
    if (out.successes == 0) {
        return out;
    }
    for (uint32_t i = 0; i < n; i++) {
        out.node_frequency[i] = static_cast<double>(out.node_counts[i]) / static_cast<double>(out.successes);
    }
    uint32_t size = config.report_size;
    if (size == 0) {
        uint64_t best = 0;
        for (auto [s, cnt] : sizes) {
            if (cnt > best) {
                best = cnt;
                size = s;
            }
        }
    }
    std::vector<uint32_t> order(n);
    for (uint32_t i = 0; i < n; i++) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return out.node_counts[a] > out.node_counts[b]; });
    out.detected.assign(order.begin(), order.begin() + std::min(size, n));
    std::sort(out.detected.begin(), out.detected.end());
    return out;
}

nlohmann::json to_json(const BotnetDistribution &d, const OverlapTables &tables) {
    auto records = nlohmann::json::array();
    std::map<std::string, uint64_t> outcomes;
    uint64_t samples = 0;
    for (const auto &r : d.trials) {
        outcomes[outcome_name(r.outcome)]++;
        samples += r.samples_used;
        nlohmann::json j{{"outcome", outcome_name(r.outcome)}, {"samples", r.samples_used}};
        j["winner"] = r.winner ? nlohmann::json(tables.candidates()[*r.winner].indices()) : nlohmann::json();
        records.push_back(std::move(j));
    }
    return {{"trials", d.trials.size()},
            {"successes", d.successes},
            {"outcomes", outcomes},
            {"mean_samples", d.trials.empty() ? 0.0 : static_cast<double>(samples) / d.trials.size()},
            {"node_counts", d.node_counts},
            {"node_frequency", d.node_frequency},
            {"detected", d.detected},
            {"records", records}};
}

std::string node_frequency_csv(const BotnetDistribution &d) {
    std::ostringstream out;
    out << "node,count,frequency\n";
    for (size_t i = 0; i < d.node_counts.size(); i++) {
        out << i << ',' << d.node_counts[i] << ',' << d.node_frequency[i] << '\n';
    }
    return out.str();
}

}  // namespace deteqt::readout
