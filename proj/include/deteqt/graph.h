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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace deteqt::graph {

using Edge = std::pair<uint32_t, uint32_t>;

/// Undirected simple graph. Edges are stored with `first < second`, sorted and unique.
struct Network {
    uint32_t node_count = 0;
    std::vector<Edge> edges;

    size_t edge_count() const { return edges.size(); }
    std::vector<uint32_t> degrees() const;
    Eigen::MatrixXd adjacency() const;

    /// Builds a network, normalizing edge orientation and collapsing duplicates.
    /// Throws std::invalid_argument on self-loops or out-of-range indices.
    static Network from_edges(uint32_t node_count, std::vector<Edge> edges);

    bool operator==(const Network &) const = default;
};

struct ModularityMatrix {
    Eigen::MatrixXd entries;
    size_t m = 0;

    uint32_t size() const { return static_cast<uint32_t>(entries.rows()); }
};

/// A bipartition. `botnet` holds the indices of the smaller side; on a tie it is the -1 side.
struct Partition {
    std::vector<int> signs;
    std::vector<uint32_t> botnet;

    static Partition from_signs(std::vector<int> signs);
    static Partition from_botnet(uint32_t node_count, std::vector<uint32_t> botnet);
};

class ParseError : public std::runtime_error {
   public:
    ParseError(size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    size_t line() const { return line_; }

   private:
    size_t line_;
};

/// Parses "u v" lines with '#' comments and an optional "N=<int>" header.
Network load_edge_list(std::string_view text);
std::string to_edge_list(const Network &net);

enum class BotnetStyle { Hidden, Isolated };

BotnetStyle parse_style(std::string_view s);
const char *style_name(BotnetStyle s);

struct PlantedParams {
    uint32_t node_count = 0;
    uint32_t botnet_size = 0;
    double p_intra = 0.8;
    double p_inter = 0.1;
    BotnetStyle style = BotnetStyle::Hidden;
    /// Number of botnet-to-rest edges placed in the isolated style.
    uint32_t bridges = 0;
    uint64_t seed = 0;
};

struct PlantedNetwork {
    Network network;
    std::vector<uint32_t> planted;
};

/// Planted-partition generator. Both sides draw internal edges with `p_intra`. Cross edges use
/// `p_inter` in the hidden style; the isolated style replaces them with `bridges` random edges.
PlantedNetwork generate_planted_botnet(const PlantedParams &params);

ModularityMatrix modularity_matrix(const Network &net);

/// Q = s^T B s / (4m).
double modularity_score(const ModularityMatrix &b, const std::vector<int> &signs);
inline double modularity_score(const ModularityMatrix &b, const Partition &p) {
    return modularity_score(b, p.signs);
}

nlohmann::json to_json(const Network &net, const std::vector<uint32_t> *planted = nullptr);
PlantedNetwork network_from_json(const nlohmann::json &j);

}  // namespace deteqt::graph
