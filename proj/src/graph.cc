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

#include "deteqt/graph.h"

#include <algorithm>
#include <charconv>
#include <optional>
#include <random>
#include <sstream>

#include "deteqt/random.h"

namespace deteqt::graph {

Network Network::from_edges(uint32_t node_count, std::vector<Edge> edges) {
    for (auto &[u, v] : edges) {
        if (u == v) {
            throw std::invalid_argument("self-loop at node " + std::to_string(u));
        }
        if (u >= node_count || v >= node_count) {
            throw std::invalid_argument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                        ") outside node range " + std::to_string(node_count));
        }
        if (u > v) {
            std::swap(u, v);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Network{node_count, std::move(edges)};
}

std::vector<uint32_t> Network::degrees() const {
    std::vector<uint32_t> deg(node_count, 0);
    for (auto [u, v] : edges) {
        deg[u]++;
        deg[v]++;
    }
    return deg;
}

Eigen::MatrixXd Network::adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(node_count, node_count);
    for (auto [u, v] : edges) {
        a(u, v) = 1;
        a(v, u) = 1;
    }
    return a;
}

Partition Partition::from_signs(std::vector<int> signs) {
    size_t negatives = std::count(signs.begin(), signs.end(), -1);
    int minority = (2 * negatives <= signs.size()) ? -1 : +1;
    Partition p;
    for (uint32_t i = 0; i < signs.size(); i++) {
        if (signs[i] != 1 && signs[i] != -1) {
            throw std::invalid_argument("partition signs must be +1 or -1");
        }
        if (signs[i] == minority) {
            p.botnet.push_back(i);
        }
    }
    p.signs = std::move(signs);
    return p;
}

Partition Partition::from_botnet(uint32_t node_count, std::vector<uint32_t> botnet) {
    std::vector<int> signs(node_count, 1);
    for (uint32_t i : botnet) {
        if (i >= node_count) {
            throw std::invalid_argument("botnet index out of range");
        }
        signs[i] = -1;
    }
    return from_signs(std::move(signs));
}

namespace {

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_uint(std::string_view tok, uint64_t &out) {
    if (tok.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace

Network load_edge_list(std::string_view text) {
    constexpr uint64_t kMaxIndex = (uint64_t{1} << 31) - 1;
    std::vector<Edge> edges;
    std::optional<uint64_t> header_n;
    uint64_t max_index = 0;
    bool any = false;

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        line_no++;

        if (size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (line.starts_with("N=")) {
            uint64_t n;
            if (header_n || !parse_uint(trim(line.substr(2)), n) || n == 0 || n > kMaxIndex) {
                throw ParseError(line_no, "malformed node-count header");
            }
            header_n = n;
            continue;
        }

        std::vector<std::string_view> tokens;
        size_t t = 0;
        while (t < line.size()) {
            size_t b = line.find_first_not_of(" \t", t);
            if (b == std::string_view::npos) {
                break;
            }
            size_t e = line.find_first_of(" \t", b);
            if (e == std::string_view::npos) {
                e = line.size();
            }
            tokens.push_back(line.substr(b, e - b));
            t = e;
        }
        uint64_t u, v;
        if (tokens.size() != 2 || !parse_uint(tokens[0], u) || !parse_uint(tokens[1], v)) {
            throw ParseError(line_no, "expected two non-negative integers");
        }
        if (u > kMaxIndex || v > kMaxIndex) {
            throw ParseError(line_no, "node index overflow");
        }
        if (u == v) {
            throw ParseError(line_no, "self-loop on node " + std::to_string(u));
        }
        if (header_n && (u >= *header_n || v >= *header_n)) {
            throw ParseError(line_no, "node index exceeds declared N=" + std::to_string(*header_n));
        }
        edges.emplace_back(static_cast<uint32_t>(u), static_cast<uint32_t>(v));
        max_index = std::max({max_index, u, v});
        any = true;
        if (end == text.size()) {
            break;
        }
    }

    uint64_t n = header_n ? *header_n : (any ? max_index + 1 : 0);
    return Network::from_edges(static_cast<uint32_t>(n), std::move(edges));
}

std::string to_edge_list(const Network &net) {
    std::ostringstream out;
    out << "N=" << net.node_count << "\n";
    for (auto [u, v] : net.edges) {
        out << u << " " << v << "\n";
    }
    return out.str();
}

BotnetStyle parse_style(std::string_view s) {
    if (s == "hidden") {
        return BotnetStyle::Hidden;
    }
    if (s == "isolated") {
        return BotnetStyle::Isolated;
    }
    throw std::invalid_argument("unknown botnet style '" + std::string(s) + "'");
}

const char *style_name(BotnetStyle s) {
    return s == BotnetStyle::Hidden ? "hidden" : "isolated";
}

PlantedNetwork generate_planted_botnet(const PlantedParams &params) {
    const uint32_t n = params.node_count;
    const uint32_t k = params.botnet_size;
    if (n < 2 || k < 1 || 2 * k > n) {
        throw std::invalid_argument("botnet size must satisfy 1 <= k <= N/2 (got N=" +
                                    std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    for (double p : {params.p_intra, params.p_inter}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("edge probabilities must lie in [0, 1]");
        }
    }

    std::mt19937_64 rng(params.seed);
    std::vector<uint32_t> order(n);
    for (uint32_t i = 0; i < n; i++) {
        order[i] = i;
    }
    for (uint32_t i = 0; i < k; i++) {
        uint32_t j = i + static_cast<uint32_t>(uniform01(rng) * (n - i));
        std::swap(order[i], order[j]);
    }
    std::vector<uint32_t> planted(order.begin(), order.begin() + k);
    std::sort(planted.begin(), planted.end());
    std::vector<char> in_bot(n, 0);
    for (uint32_t i : planted) {
        in_bot[i] = 1;
    }

    std::vector<Edge> edges;
    for (uint32_t u = 0; u < n; u++) {
        for (uint32_t v = u + 1; v < n; v++) {
            double draw = uniform01(rng);
            bool same_side = in_bot[u] == in_bot[v];
            if (same_side) {
                if (draw < params.p_intra) {
                    edges.emplace_back(u, v);
                }
            } else if (params.style == BotnetStyle::Hidden && draw < params.p_inter) {
                edges.emplace_back(u, v);
            }
        }
    }

    if (params.style == BotnetStyle::Isolated && params.bridges > 0) {
        uint64_t possible = uint64_t{k} * (n - k);
        uint32_t want = static_cast<uint32_t>(std::min<uint64_t>(params.bridges, possible));
        std::vector<uint32_t> rest;
        for (uint32_t i = 0; i < n; i++) {
            if (!in_bot[i]) {
                rest.push_back(i);
            }
        }
        std::vector<Edge> bridges;
        while (bridges.size() < want) {
            uint32_t b = planted[static_cast<uint32_t>(uniform01(rng) * k)];
            uint32_t r = rest[static_cast<uint32_t>(uniform01(rng) * rest.size())];
            Edge e{std::min(b, r), std::max(b, r)};
            if (std::find(bridges.begin(), bridges.end(), e) == bridges.end()) {
                bridges.push_back(e);
            }
        }
        edges.insert(edges.end(), bridges.begin(), bridges.end());
    }

    return {Network::from_edges(n, std::move(edges)), std::move(planted)};
}

ModularityMatrix modularity_matrix(const Network &net) {
    if (net.edges.empty()) {
        throw std::invalid_argument("modularity matrix requires at least one edge");
    }
    const double two_m = 2.0 * static_cast<double>(net.edge_count());
    auto deg = net.degrees();
    Eigen::VectorXd k(net.node_count);
    for (uint32_t i = 0; i < net.node_count; i++) {
        k[i] = deg[i];
    }
    ModularityMatrix b;
    b.entries = net.adjacency() - (k * k.transpose()) / two_m;
    b.m = net.edge_count();
    return b;
}

double modularity_score(const ModularityMatrix &b, const std::vector<int> &signs) {
    if (signs.size() != b.size()) {
        throw std::invalid_argument("sign vector length " + std::to_string(signs.size()) +
                                    " does not match matrix size " + std::to_string(b.size()));
    }
    Eigen::VectorXd s(signs.size());
    for (size_t i = 0; i < signs.size(); i++) {
        s[i] = signs[i];
    }
    return s.dot(b.entries * s) / (4.0 * static_cast<double>(b.m));
}

nlohmann::json to_json(const Network &net, const std::vector<uint32_t> *planted) {
    nlohmann::json j;
    j["n"] = net.node_count;
    auto edges = nlohmann::json::array();
    for (auto [u, v] : net.edges) {
        edges.push_back({u, v});
    }
    j["edges"] = std::move(edges);
    if (planted) {
        j["planted"] = *planted;
    }
    return j;
}

PlantedNetwork network_from_json(const nlohmann::json &j) {
    std::vector<Edge> edges;
    for (const auto &e : j.at("edges")) {
        edges.emplace_back(e.at(0).get<uint32_t>(), e.at(1).get<uint32_t>());
    }
    PlantedNetwork out{Network::from_edges(j.at("n").get<uint32_t>(), std::move(edges)), {}};
    if (j.contains("planted")) {
        out.planted = j.at("planted").get<std::vector<uint32_t>>();
    }
    return out;
}

}  // namespace deteqt::graph
