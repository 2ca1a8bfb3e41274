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

#include "deteqt/hypergraph.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deteqt::hypergraph {

SignPattern SignPattern::from_mask(uint32_t n, const NodeMask &mask) {
    SignPattern p{n, mask.indices()};
    for (uint32_t i : p.botnet) {
        if (i >= (uint32_t{1} << n)) {
            throw std::invalid_argument("botnet index outside the 2^n basis");
        }
    }
    return p;
}

std::vector<int> SignPattern::signs() const {
    std::vector<int> s(size_t{1} << n, 1);
    for (uint32_t i : botnet) {
        if (i >= s.size()) {
            throw std::invalid_argument("botnet index outside the 2^n basis");
        }
        s[i] = -1;
    }
    return s;
}

Eigen::VectorXd SignPattern::state() const {
    auto s = signs();
    Eigen::VectorXd v(s.size());
    double scale = 1.0 / std::sqrt(static_cast<double>(s.size()));
    for (size_t i = 0; i < s.size(); i++) {
        v[i] = s[i] * scale;
    }
    return v;
}

HyperedgeSet HyperedgeSet::from_qubit_lists(uint32_t n, const std::vector<std::vector<uint32_t>> &lists) {
    HyperedgeSet e{n, {}, false};
    for (const auto &l : lists) {
        uint32_t m = 0;
        for (uint32_t q : l) {
            if (q >= n) {
                throw std::invalid_argument("hyperedge qubit out of range");
            }
            m |= uint32_t{1} << q;
        }
        if (m == 0) {
            e.global_flip = !e.global_flip;
        } else {
            e.edges.push_back(m);
        }
    }
    return e;
}

HyperedgeSet anf_hyperedges(const SignPattern &pattern) {
    if (pattern.n > 24) {
        throw std::invalid_argument("pattern too large for ANF synthesis");
    }
    size_t dim = size_t{1} << pattern.n;
    std::vector<uint8_t> a(dim, 0);
    for (uint32_t i : pattern.botnet) {
        if (i >= dim) {
            throw std::invalid_argument("botnet index outside the 2^n basis");
        }
        a[i] = 1;
    }
    // In-place Moebius transform: a[m] becomes the XOR of the indicator over submasks of m.
    for (size_t bit = 1; bit < dim; bit <<= 1) {
        for (size_t m = 0; m < dim; m++) {
            if (m & bit) {
                a[m] ^= a[m ^ bit];
            }
        }
    }
    HyperedgeSet out{pattern.n, {}, a[0] != 0};
    for (size_t m = 1; m < dim; m++) {
        if (a[m]) {
            out.edges.push_back(static_cast<uint32_t>(m));
        }
    }
    return out;
}

sim::Circuit hypergraph_circuit(const HyperedgeSet &edges, const std::vector<sim::Control> &controls) {
    uint32_t total = edges.n;
    for (const auto &c : controls) {
        total = std::max(total, c.qubit + 1);
    }
    sim::Circuit c(total);
    for (uint32_t m : edges.edges) {
        std::vector<uint32_t> qubits;
        for (uint32_t q = 0; q < edges.n; q++) {
            if ((m >> q) & 1) {
                qubits.push_back(q);
            }
        }
        c.mcz(qubits, controls);
    }
    if (edges.global_flip) {
        for (int rep = 0; rep < 2; rep++) {
            c.x(0, controls);
            c.z(0, controls);
        }
    }
    return c;
}

Eigen::VectorXcd hypergraph_state(const HyperedgeSet &edges) {
    size_t dim = size_t{1} << edges.n;
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    for (size_t x = 0; x < dim; x++) {
        int parity = edges.global_flip ? 1 : 0;
        for (uint32_t m : edges.edges) {
            if ((x & m) == m) {
                parity ^= 1;
            }
        }
        if (parity) {
            v[x] = -v[x];
        }
    }
    return v;
}

OverlapMode parse_mode(const std::string &s) {
    if (s == "zero" || s == "zero-overlap") {
        return OverlapMode::ZeroOverlap;
    }
    if (s == "small" || s == "small-overlap") {
        return OverlapMode::SmallOverlap;
    }
    throw std::invalid_argument("unknown overlap mode '" + s + "' (expected zero or small)");
}

const char *mode_name(OverlapMode m) {
    return m == OverlapMode::ZeroOverlap ? "zero" : "small";
}

uint64_t binomial(uint32_t n, uint32_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (uint32_t i = 1; i <= k; i++) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<uint64_t>::max()) {
            throw std::overflow_error("binomial coefficient exceeds 64 bits");
        }
    }
    return static_cast<uint64_t>(r);
}

double log2_binomial(uint32_t n, uint32_t k) {
    if (k > n) {
        return -std::numeric_limits<double>::infinity();
    }
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
}

std::vector<NodeMask> k_subsets(uint32_t n, uint32_t k) {
    if (n > NodeMask::kCapacity) {
        throw std::invalid_argument("node count exceeds NodeMask capacity");
    }
    std::vector<NodeMask> out;
    if (k > n) {
        return out;
    }
    out.reserve(binomial(n, k));
    std::vector<uint32_t> idx(k);
    for (uint32_t i = 0; i < k; i++) {
        idx[i] = i;
    }
    while (true) {
        out.push_back(NodeMask::of(idx));
        int i = static_cast<int>(k) - 1;
        while (i >= 0 && idx[i] == n - k + static_cast<uint32_t>(i)) {
            i--;
        }
        if (i < 0) {
            break;
        }
        idx[i]++;
        for (uint32_t j = i + 1; j < k; j++) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

uint32_t default_k_lcu(uint32_t node_count, uint32_t k, OverlapMode mode) {
    if (mode == OverlapMode::SmallOverlap) {
        return 1;
    }
    if (node_count % 2) {
        throw std::invalid_argument("zero-overlap mode requires an even node count");
    }
    return k == node_count / 2 ? 2 : node_count / 2 - k;
}

void validate_k_lcu(uint32_t node_count, uint32_t k, OverlapMode mode, uint32_t k_lcu) {
    if (k == 0 || 2 * k > node_count) {
        throw std::invalid_argument("botnet size must satisfy 1 <= k <= N/2");
    }
    if (k_lcu == 0 || k_lcu > node_count) {
        throw std::invalid_argument("k_LCU must lie in [1, N]");
    }
    if (mode == OverlapMode::ZeroOverlap) {
        if (node_count % 2) {
            throw std::invalid_argument("zero-overlap mode requires an even node count");
        }
        if (k_lcu != default_k_lcu(node_count, k, mode)) {
            throw std::invalid_argument("zero-overlap mode fixes k_LCU = N/2 - k (2 when k = N/2)");
        }
    } else if (2 * (k + k_lcu) >= node_count) {
        throw std::invalid_argument("small-overlap mode requires k_LCU < N/2 - k");
    }
}

uint32_t ancillas_for(uint64_t size) {
    if (size <= 2) {
        return 1;
    }
    return static_cast<uint32_t>(std::bit_width(size - 1));
}

LcuSelection selection_from_subsets(uint32_t node_count, uint32_t k, OverlapMode mode,
                                    std::vector<NodeMask> subsets) {
    if (subsets.empty()) {
        throw std::invalid_argument("LCU needs at least one subset");
    }
    LcuSelection s;
    s.node_count = node_count;
    s.k = k;
    s.mode = mode;
    for (const auto &m : subsets) {
        uint32_t c = static_cast<uint32_t>(m.count());
        if (std::find(s.k_lcu.begin(), s.k_lcu.end(), c) == s.k_lcu.end()) {
            s.k_lcu.push_back(c);
        }
    }
    s.size = subsets.size();
    s.ancillas = ancillas_for(s.size);
    s.subsets = std::move(subsets);
    return s;
}

SizePlan plan_sizes(uint32_t node_count, uint32_t k, OverlapMode mode,
                    std::optional<uint32_t> k_lcu_override, uint32_t k_range) {
    if (node_count < 2 || node_count > NodeMask::kCapacity) {
        throw std::invalid_argument("node count must lie in [2, 128]");
    }
    if (k_range > 0 && k_lcu_override) {
        throw std::invalid_argument("k_LCU override is incompatible with a k range");
    }
    uint32_t lo = k > k_range ? k - k_range : 1;
    uint32_t hi = std::min(k + k_range, node_count / 2);
    SizePlan plan;
    for (uint32_t kk = lo; kk <= hi; kk++) {
        uint32_t kl = k_lcu_override ? *k_lcu_override : default_k_lcu(node_count, kk, mode);
        if (k_range == 0) {
            validate_k_lcu(node_count, kk, mode, kl);
        } else {
            try {
                validate_k_lcu(node_count, kk, mode, kl);
            } catch (const std::invalid_argument &) {
                continue;
            }
        }
        plan.candidate_sizes.push_back(kk);
        if (std::find(plan.lcu_sizes.begin(), plan.lcu_sizes.end(), kl) == plan.lcu_sizes.end()) {
            plan.lcu_sizes.push_back(kl);
        }
    }
    if (plan.candidate_sizes.empty()) {
        throw std::invalid_argument("no legal candidate size in the requested range");
    }
    std::sort(plan.lcu_sizes.begin(), plan.lcu_sizes.end());
    return plan;
}

EnumeratedSets enumerate_sets(uint32_t node_count, uint32_t k, OverlapMode mode,
                              std::optional<uint32_t> k_lcu_override, uint32_t k_range) {
    auto plan = plan_sizes(node_count, k, mode, k_lcu_override, k_range);
    EnumeratedSets out;
    for (uint32_t kk : plan.candidate_sizes) {
        if (log2_binomial(node_count, kk) > 26) {
            throw std::invalid_argument("candidate set too large to enumerate");
        }
        auto c = k_subsets(node_count, kk);
        if (2 * kk == node_count) {
            // A half-size set and its complement are the same bipartition and share every
            // overlap magnitude; keep the representative holding node 0.
            std::erase_if(c, [](const NodeMask &m) { return !m.test(0); });
        }
        out.candidates.insert(out.candidates.end(), c.begin(), c.end());
    }
    std::vector<NodeMask> subsets;
    for (uint32_t kl : plan.lcu_sizes) {
        if (log2_binomial(node_count, kl) > 26) {
            throw std::invalid_argument("LCU set too large to enumerate");
        }
        auto s = k_subsets(node_count, kl);
        subsets.insert(subsets.end(), s.begin(), s.end());
    }
    out.selection = selection_from_subsets(node_count, k, mode, std::move(subsets));
    return out;
}

sim::Circuit build_lcu_circuit(const LcuSelection &selection, uint32_t n) {
    if ((uint64_t{1} << n) < selection.node_count) {
        throw std::invalid_argument("system register too small for the node count");
    }
    uint32_t a = selection.ancillas;
    sim::Circuit c(n + a);
    for (uint32_t q = 0; q < n + a; q++) {
        c.h(q);
    }
    for (uint64_t x = 0; x < selection.subsets.size(); x++) {
        std::vector<sim::Control> controls;
        for (uint32_t b = 0; b < a; b++) {
            controls.push_back({n + b, ((x >> b) & 1) == 0});
        }
        auto edges = anf_hyperedges(SignPattern::from_mask(n, selection.subsets[x]));
        c.append(hypergraph_circuit(edges), sim::qubit_range(0, n), controls);
    }
    return c;
}

nlohmann::json to_json(const LcuSelection &selection, bool include_subsets) {
    nlohmann::json j{{"N", selection.node_count},   {"k", selection.k},
                     {"mode", mode_name(selection.mode)}, {"k_lcu", selection.k_lcu},
                     {"M", selection.size},         {"ancillas", selection.ancillas}};
    if (include_subsets) {
        auto arr = nlohmann::json::array();
        for (const auto &m : selection.subsets) {
            arr.push_back(m.indices());
        }
        j["subsets"] = arr;
    }
    return j;
}

}  // namespace deteqt::hypergraph
