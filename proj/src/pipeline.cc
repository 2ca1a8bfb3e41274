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

#include "deteqt/pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "deteqt/random.h"
#include "deteqt/statevector.h"

namespace deteqt::pipeline {

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Runs one stage, converting argument errors to ConfigError and everything else to StageError.
template <typename F>
auto stage(const char *name, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError &) {
        throw;
    } catch (const StageError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string(name) + ": " + e.what());
    } catch (const std::exception &e) {
        throw StageError(name, e.what());
    }
}

nlohmann::json gate_summary(const sim::Circuit &c) {
    std::map<std::string, uint64_t> kinds;
    uint64_t multi = 0;
    size_t max_controls = 0;
    for (const auto &g : c.gates()) {
        const char *name = "U";
        switch (g.kind) {
            case sim::GateKind::H:
                name = "H";
                break;
            case sim::GateKind::X:
                name = "X";
                break;
            case sim::GateKind::Z:
                name = "Z";
                break;
            case sim::GateKind::Rz:
                name = "Rz";
                break;
            case sim::GateKind::Phase:
                name = "Phase";
                break;
            case sim::GateKind::Unitary:
                name = "U";
                break;
        }
        kinds[name]++;
        if (g.controls.size() >= 2) {
            multi++;
        }
        max_controls = std::max(max_controls, g.controls.size());
    }
    return {{"total", c.size()}, {"by_kind", kinds}, {"multi_controlled", multi}, {"max_controls", max_controls}};
}

qsvt::QsvtCircuit exact_sign_circuit(const std::vector<double> &values, uint32_t n) {
    auto be = qsvt::build_diag_block_encoding_dilation(values);
    qsvt::QsvtCircuit out;
    out.circuit = be.circuit;
    out.system_qubits = sim::qubit_range(0, n);
    out.ancilla_qubits = be.ancilla_qubits;
    out.pcp_qubit = be.ancilla_qubits.back();
    out.degree = 0;
    return out;
}

}  // namespace

Backend parse_backend(const std::string &s) {
    if (s == "circuit") {
        return Backend::Circuit;
    }
    if (s == "oracle") {
        return Backend::Oracle;
    }
    throw ConfigError("unknown backend '" + s + "' (expected circuit or oracle)");
}

SignSource parse_sign_source(const std::string &s) {
    if (s == "optimize") {
        return SignSource::Optimize;
    }
    if (s == "recursive") {
        return SignSource::Recursive;
    }
    if (s == "file") {
        return SignSource::File;
    }
    if (s == "exact") {
        return SignSource::Exact;
    }
    throw ConfigError("unknown sign source '" + s + "'");
}

EncodingKind parse_encoding(const std::string &s) {
    if (s == "lcu") {
        return EncodingKind::Lcu;
    }
    if (s == "dilation") {
        return EncodingKind::Dilation;
    }
    throw ConfigError("unknown block encoding '" + s + "' (expected lcu or dilation)");
}

const char *backend_name(Backend b) {
    return b == Backend::Circuit ? "circuit" : "oracle";
}

const char *sign_source_name(SignSource s) {
    switch (s) {
        case SignSource::Optimize:
            return "optimize";
        case SignSource::Recursive:
            return "recursive";
        case SignSource::File:
            return "file";
        case SignSource::Exact:
            return "exact";
    }
    return "unknown";
}

const char *encoding_name(EncodingKind e) {
    return e == EncodingKind::Lcu ? "lcu" : "dilation";
}

nlohmann::json to_json(const RunConfig &c) {
    nlohmann::json j{{"command", c.command},
                     {"network_file", c.network_file},
                     {"k_range", c.k_range},
                     {"sign", sign_source_name(c.sign)},
                     {"degree", c.degree},
                     {"recursive_order", c.recursive_order},
                     {"angles_file", c.angles_file},
                     {"backend", backend_name(c.backend)},
                     {"block_encoding", encoding_name(c.encoding)},
                     {"shots", c.shots},
                     {"seed", c.seed},
                     {"output", c.output},
                     {"csv", c.csv}};
    auto opt = [](const auto &o) { return o ? nlohmann::json(*o) : nlohmann::json(); };
    j["k"] = opt(c.k);
    j["k_lcu"] = opt(c.k_lcu);
    j["trials"] = opt(c.trials);
    j["budget"] = opt(c.budget);
    j["epsilon_target"] = opt(c.epsilon_target);
    j["mode"] = c.mode ? nlohmann::json(hypergraph::mode_name(*c.mode)) : nlohmann::json();
    if (c.generator) {
        const auto &g = *c.generator;
        j["generator"] = {{"n", g.node_count},       {"k", g.botnet_size}, {"p_intra", g.p_intra},
                          {"p_inter", g.p_inter},     {"style", graph::style_name(g.style)},
                          {"bridges", g.bridges},     {"seed", g.seed}};
    } else {
        j["generator"] = nullptr;
    }
    return j;
}

RunConfig config_from_json(const nlohmann::json &j) {
    RunConfig c;
    try {
        c.command = j.value("command", c.command);
        c.network_file = j.value("network_file", "");
        c.k_range = j.value("k_range", 0u);
        c.sign = parse_sign_source(j.value("sign", "optimize"));
        c.degree = j.value("degree", 29u);
        c.recursive_order = j.value("recursive_order", 3);
        c.angles_file = j.value("angles_file", "");
        c.backend = parse_backend(j.value("backend", "circuit"));
        c.encoding = parse_encoding(j.value("block_encoding", "lcu"));
        c.shots = j.value("shots", uint64_t{0});
        c.seed = j.at("seed").get<uint64_t>();
        c.output = j.value("output", "");
        c.csv = j.value("csv", "");
        auto get = [&](const char *key, auto &field) {
            if (j.contains(key) && !j.at(key).is_null()) {
                field = j.at(key).get<typename std::remove_reference_t<decltype(field)>::value_type>();
            }
        };
        get("k", c.k);
        get("k_lcu", c.k_lcu);
        get("trials", c.trials);
        get("budget", c.budget);
        get("epsilon_target", c.epsilon_target);
        if (j.contains("mode") && !j.at("mode").is_null()) {
            c.mode = hypergraph::parse_mode(j.at("mode").get<std::string>());
        }
        if (j.contains("generator") && !j.at("generator").is_null()) {
            const auto &g = j.at("generator");
            graph::PlantedParams p;
            p.node_count = g.at("n").get<uint32_t>();
            p.botnet_size = g.at("k").get<uint32_t>();
            p.p_intra = g.value("p_intra", p.p_intra);
            p.p_inter = g.value("p_inter", p.p_inter);
            p.style = graph::parse_style(g.value("style", "hidden"));
            p.bridges = g.value("bridges", 0u);
            p.seed = g.at("seed").get<uint64_t>();
            c.generator = p;
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

Instance load_instance(const RunConfig &config) {
    if (!config.network_file.empty()) {
        std::string text = read_file(config.network_file);
        try {
            if (ends_with(config.network_file, ".json")) {
                auto pn = graph::network_from_json(nlohmann::json::parse(text));
                Instance inst{std::move(pn.network), std::nullopt};
                if (!pn.planted.empty()) {
                    inst.planted = pn.planted;
                }
                return inst;
            }
            return {graph::load_edge_list(text), std::nullopt};
        } catch (const std::exception &e) {
            throw ConfigError(config.network_file + ": " + e.what());
        }
    }
    if (config.generator) {
        try {
            auto pn = graph::generate_planted_botnet(*config.generator);
            return {std::move(pn.network), pn.planted};
        } catch (const std::invalid_argument &e) {
            throw ConfigError(std::string("generator: ") + e.what());
        }
    }
    throw ConfigError("no network source: give a network file or generator parameters");
}

double fitting_x_min(const spectral::MaxVector &v) {
    double m = 1.0;
    for (uint32_t i = 0; i < v.active; i++) {
        m = std::min(m, std::abs(v.amplitudes[i]));
    }
    return std::clamp(0.9 * m, 1e-3, 0.9);
}

qsp::AngleFit fit_sign_angles(uint32_t degree, double x_min) {
    // Quantize x_min downward onto 16 steps per decade; a fit for a smaller x_min covers larger ones.
    int step = static_cast<int>(std::floor(std::log10(x_min) * 16.0));
    double grid_x = std::pow(10.0, step / 16.0);
    static std::mutex mu;
    static std::map<std::pair<uint32_t, int>, qsp::AngleFit> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({degree, step});
        if (it != cache.end()) {
            return it->second;
        }
    }
    qsp::OptimizationOptions o;
    o.degree = degree;
    o.x_min = grid_x;
    o.seed = child_seed(0x5167A9, degree);
    auto fit = qsp::find_angles_optimization(o);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(std::make_pair(degree, step), fit);
    return fit;
}

std::vector<uint32_t> degree_ladder(uint32_t start) {
    std::vector<uint32_t> out{start};
    for (uint32_t d : {49u, 79u, 119u, 159u, 199u}) {
        if (d > start) {
            out.push_back(d);
        }
    }
    return out;
}

std::vector<double> simulate_signed_state(const qsvt::QsvtCircuit &circuit) {
    uint32_t q = circuit.circuit.qubit_count();
    auto state = sim::StateVector::zero(q);
    for (uint32_t s : circuit.system_qubits) {
        state.apply(sim::Gate{sim::GateKind::H, {s}, {}, 0, nullptr});
    }
    state.apply(circuit.circuit);
    auto projected = sim::project_zero(state, circuit.ancilla_qubits);
    size_t dim = size_t{1} << circuit.system_qubits.size();
    std::vector<double> out(dim);
    double scale = std::sqrt(projected.success_probability);
    for (size_t i = 0; i < dim; i++) {
        size_t index = 0;
        for (size_t b = 0; b < circuit.system_qubits.size(); b++) {
            if ((i >> b) & 1) {
                index |= size_t{1} << circuit.system_qubits[b];
            }
        }
        out[i] = projected.state[index].real() * scale;
    }
    return out;
}

SignStage build_sign_stage(const spectral::MaxVector &v, const RunConfig &config) {
    uint32_t n = v.qubits();
    size_t dim = size_t{1} << n;
    double root = std::sqrt(static_cast<double>(dim));
    SignStage st;
    st.source = sign_source_name(config.sign);
    st.x_min = fitting_x_min(v);

    if (config.sign == SignSource::Exact) {
        auto part = spectral::classical_sign_partition(v);
        std::vector<double> values(dim, 0.0);
        for (uint32_t i = 0; i < v.active; i++) {
            values[i] = part.partition.signs[i];
        }
        st.signed_state.resize(dim);
        for (size_t i = 0; i < dim; i++) {
            st.signed_state[i] = values[i] / root;
        }
        if (config.backend == Backend::Circuit) {
            st.circuit = exact_sign_circuit(values, n);
        }
        return st;
    }

    if (config.sign == SignSource::Recursive) {
        if (config.backend == Backend::Circuit) {
            throw ConfigError("the recursive approximant has no phase sequence; use --backend oracle");
        }
        auto f = qsp::SignApproximant::recursive(config.recursive_order);
        st.degree = f.degree();
        st.epsilon = qsp::sup_sign_error(f, st.x_min);
        st.signed_state.resize(dim);
        for (size_t i = 0; i < dim; i++) {
            st.signed_state[i] = f(v.amplitudes[i]) / root;
        }
        return st;
    }

    qsp::AngleFit fit;
    if (config.sign == SignSource::File) {
        if (config.angles_file.empty()) {
            throw ConfigError("--sign file needs --angles");
        }
        try {
            fit = qsp::angle_fit_from_json(nlohmann::json::parse(read_file(config.angles_file)));
        } catch (const ConfigError &) {
            throw;
        } catch (const std::exception &e) {
            throw ConfigError(config.angles_file + ": " + e.what());
        }
    } else {
        std::vector<uint32_t> degrees = config.epsilon_target ? degree_ladder(config.degree)
                                                              : std::vector<uint32_t>{config.degree};
        for (uint32_t d : degrees) {
            fit = fit_sign_angles(d, st.x_min);
            double eps = qsp::sup_sign_error(
                [&](double x) { return qsp::qsp_polynomial(fit.angles, x).real(); }, st.x_min);
            if (!config.epsilon_target || eps <= *config.epsilon_target) {
                break;
            }
        }
    }
    auto poly = [&](double x) { return qsp::qsp_polynomial(fit.angles, x).real(); };
    st.degree = fit.angles.degree();
    st.epsilon = qsp::sup_sign_error(poly, st.x_min);
    st.fit = fit;

    if (config.backend == Backend::Oracle) {
        st.signed_state.resize(dim);
        for (size_t i = 0; i < dim; i++) {
            st.signed_state[i] = poly(v.amplitudes[i]) / root;
        }
        return st;
    }
    qsvt::BlockEncoding be;
    if (config.encoding == EncodingKind::Lcu) {
        be = qsvt::build_diag_block_encoding_lcu(spectral::complete_unitary(v));
    } else {
        std::vector<double> values(v.amplitudes.data(), v.amplitudes.data() + dim);
        be = qsvt::build_diag_block_encoding_dilation(values);
    }
    st.alpha = be.alpha;
    st.circuit = qsvt::assemble_qsvt(be, fit.angles);
    st.signed_state = simulate_signed_state(*st.circuit);
    return st;
}

double exact_postselect_probability(uint32_t node_count, uint32_t k, const std::vector<uint32_t> &k_lcu,
                                    uint32_t ancillas) {
    uint32_t n = spectral::qubits_for(node_count);
    double dim = std::ldexp(1.0, static_cast<int>(n));
    double norm2 = node_count / dim;
    auto choose = [](uint32_t a, uint32_t b) {
        return b > a ? 0.0 : std::exp(std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0));
    };
    double sum = 0;
    double used = 0;
    for (uint32_t kl : k_lcu) {
        for (uint32_t j = 0; j <= std::min(k, kl); j++) {
            double count = choose(k, j) * choose(node_count - k, kl - j);
            double d = static_cast<double>(k) + kl - 2.0 * j;
            double c = (node_count - 2.0 * d) / dim;
            sum += count * c * c;
        }
        used += choose(node_count, kl);
    }
    double slots = std::ldexp(1.0, static_cast<int>(ancillas));
    double pad = (node_count - 2.0 * k) / dim;
    sum += std::max(0.0, slots - used) * pad * pad;
    return sum * norm2 / slots;
}

DetectResult run_detect(const RunConfig &config) {
    auto inst = stage("ingest", [&] { return load_instance(config); });
    const auto &net = inst.network;
    uint32_t N = net.node_count;
    if (N < 2 || N > NodeMask::kCapacity) {
        throw ConfigError("ingest: node count must lie in [2, 128]");
    }
    auto b = stage("modularity", [&] { return graph::modularity_matrix(net); });
    auto mv = stage("eigenvector", [&] { return spectral::max_eigenvector(b); });
    auto part = spectral::classical_sign_partition(mv);
    auto sign = stage("sign", [&] { return build_sign_stage(mv, config); });
    auto est = stage("size-estimate", [&] { return readout::estimate_botnet_size(sign.signed_state, N); });
    uint32_t k = config.k ? *config.k : est.k;
    auto mode = config.mode ? *config.mode
                            : (N % 2 == 0 ? hypergraph::OverlapMode::ZeroOverlap : hypergraph::OverlapMode::SmallOverlap);

    nlohmann::json report;
    report["config"] = to_json(config);
    report["network"] = {{"N", N}, {"edges", net.edge_count()}, {"n", mv.qubits()}};
    report["spectral"] = {{"eigenvalue", mv.eigenvalue},
                          {"degenerate", mv.degenerate},
                          {"botnet", part.partition.botnet},
                          {"unstable", part.unstable},
                          {"modularity", graph::modularity_score(b, part.partition)}};
    report["sign_stage"] = {{"source", sign.source}, {"degree", sign.degree}, {"x_min", sign.x_min},
                            {"epsilon", sign.epsilon}, {"alpha", sign.alpha}};
    report["k_estimate"] = {{"k", est.k}, {"raw", est.raw}, {"residual", est.residual},
                            {"low_confidence", est.low_confidence}, {"used", k}};
    if (inst.planted) {
        report["planted"] = *inst.planted;
    }

    DetectResult result;
    if (k == 0) {
        report["status"] = "failed";
        report["failure"] = "signed state carries no minority community";
        result.report = std::move(report);
        result.failed = true;
        return result;
    }

    auto sets = stage("lcu", [&] { return hypergraph::enumerate_sets(N, k, mode, config.k_lcu, config.k_range); });
    report["lcu"] = hypergraph::to_json(sets.selection);
    report["candidates"] = sets.candidates.size();
    auto tables = stage("tables", [&] { return readout::build_tables(sets.candidates, sets.selection); });

    readout::LcuDistribution dist;
    if (config.backend == Backend::Circuit) {
        uint32_t q = sign.circuit->circuit.qubit_count() + 1 + sets.selection.ancillas;
        if (q > sim::max_qubits()) {
            throw ConfigError("projection: circuit backend needs " + std::to_string(q) + " qubits, cap is " +
                              std::to_string(sim::max_qubits()) + " (set DETEQT_MAX_QUBITS or use --backend oracle)");
        }
        report["qubits"] = q;
        dist = stage("projection", [&] { return readout::circuit_distribution(sets.selection, *sign.circuit); });
    } else {
        report["qubits"] = 2 * mv.qubits() + 4 + sets.selection.ancillas;
        dist = stage("projection", [&] { return readout::oracle_distribution(sets.selection, sign.signed_state); });
    }
    report["sampler"] = {{"backend", dist.backend},
                         {"postselect_probability", dist.postselect_probability},
                         {"expected_postselect_repetitions", 1.0 / dist.postselect_probability}};
    report["expected_postselect_repetitions"] = 1.0 / dist.postselect_probability;

    sim::DiscreteSampler sampler(dist.probabilities);
    if (config.shots > 0) {
        auto ref = readout::oracle_distribution(sets.selection, sign.signed_state);
        std::mt19937_64 rng(child_seed(config.seed, 2));
        std::vector<double> counts(dist.probabilities.size(), 0.0);
        for (uint64_t s = 0; s < config.shots; s++) {
            counts[sampler(rng)] += 1;
        }
        double tv = 0;
        for (size_t x = 0; x < counts.size(); x++) {
            tv += std::abs(counts[x] / config.shots - ref.probabilities[x]);
        }
        report["sampler"]["validation"] = {{"shots", config.shots}, {"tv_vs_closed_form", tv / 2}};
    }

    readout::TrialConfig tc;
    tc.trials = config.trials ? *config.trials : readout::default_trials(N, k, sets.selection.k_lcu.front(), mode);
    tc.budget = config.budget ? *config.budget : readout::default_budget(tables.candidate_count());
    tc.seed = child_seed(config.seed, 1);
    tc.threads = config.threads;
    tc.report_size = k;
    auto bd = stage("elimination", [&] { return readout::run_trials(sampler, tables, tc); });

    auto trials = readout::to_json(bd, tables);
    report["budget"] = tc.budget;
    report["trials"] = trials["records"];
    report["trial_summary"] = {{"count", trials["trials"]}, {"successes", trials["successes"]},
                               {"outcomes", trials["outcomes"]}, {"mean_samples", trials["mean_samples"]}};
    report["node_frequencies"] = bd.node_frequency;
    report["node_counts"] = bd.node_counts;
    report["detected_botnet"] = bd.detected;
    result.failed = bd.failed();
    report["status"] = result.failed ? "failed" : "detected";
    if (inst.planted) {
        auto planted = *inst.planted;
        std::sort(planted.begin(), planted.end());
        bool match = planted == bd.detected;
        if (!match && 2 * planted.size() == N && bd.detected.size() == planted.size()) {
            // Half-size botnets are only defined up to complement.
            std::vector<uint32_t> rest;
            for (uint32_t i = 0; i < N; i++) {
                if (!std::binary_search(planted.begin(), planted.end(), i)) {
                    rest.push_back(i);
                }
            }
            match = rest == bd.detected;
        }
        report["planted_recovered"] = !result.failed && match;
    }
    result.csv = readout::node_frequency_csv(bd);
    result.report = std::move(report);
    return result;
}

nlohmann::json run_resources(const RunConfig &config) {
    uint32_t N = 0;
    std::optional<uint32_t> k = config.k;
    if (!config.network_file.empty()) {
        auto inst = load_instance(config);
        N = inst.network.node_count;
        if (!k) {
            if (inst.planted) {
                k = static_cast<uint32_t>(inst.planted->size());
            } else {
                auto mv = spectral::max_eigenvector(graph::modularity_matrix(inst.network));
                k = static_cast<uint32_t>(spectral::classical_sign_partition(mv).partition.botnet.size());
            }
        }
    } else if (config.generator) {
        N = config.generator->node_count;
        if (!k) {
            k = config.generator->botnet_size;
        }
    } else {
        throw ConfigError("resources needs --n/--k or a network file");
    }
    if (!k) {
        throw ConfigError("resources needs a botnet size");
    }
    auto mode = config.mode ? *config.mode
                            : (N % 2 == 0 ? hypergraph::OverlapMode::ZeroOverlap : hypergraph::OverlapMode::SmallOverlap);
    hypergraph::SizePlan plan;
    try {
        plan = hypergraph::plan_sizes(N, *k, mode, config.k_lcu, config.k_range);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("resources: ") + e.what());
    }
    uint32_t n = spectral::qubits_for(N);
    double log2_cand = -INFINITY;
    double log2_lcu = -INFINITY;
    auto log2_add = [](double a, double b) {
        if (a == -INFINITY) {
            return b;
        }
        double hi = std::max(a, b);
        return hi + std::log2(std::exp2(a - hi) + std::exp2(b - hi));
    };
    for (uint32_t kk : plan.candidate_sizes) {
        // Half-size candidates are counted once per complementary pair.
        log2_cand = log2_add(log2_cand, hypergraph::log2_binomial(N, kk) - (2 * kk == N ? 1 : 0));
    }
    for (uint32_t kl : plan.lcu_sizes) {
        log2_lcu = log2_add(log2_lcu, hypergraph::log2_binomial(N, kl));
    }
    nlohmann::json cand_count = nullptr;
    nlohmann::json lcu_count = nullptr;
    uint64_t lcu_exact = 0;
    bool lcu_fits = log2_lcu < 62;
    if (log2_cand < 62) {
        uint64_t total = 0;
        for (uint32_t kk : plan.candidate_sizes) {
            total += hypergraph::binomial(N, kk) / (2 * kk == N ? 2 : 1);
        }
        cand_count = total;
    }
    uint32_t a = 0;
    if (lcu_fits) {
        for (uint32_t kl : plan.lcu_sizes) {
            lcu_exact += hypergraph::binomial(N, kl);
        }
        lcu_count = lcu_exact;
        a = hypergraph::ancillas_for(lcu_exact);
    } else {
        a = static_cast<uint32_t>(std::ceil(log2_lcu - 1e-12));
    }

    uint32_t d = config.sign == SignSource::Exact ? 0 : config.degree;
    // Gate structure is independent of the amplitudes, so a placeholder U_max suffices for counting.
    spectral::PreparationUnitary placeholder{Eigen::MatrixXcd::Identity(size_t{1} << n, size_t{1} << n)};
    auto be = qsvt::build_diag_block_encoding_lcu(placeholder);
    nlohmann::json gates;
    gates["block_encoding"] = gate_summary(be.circuit);
    gates["controlled_u_max_per_block_encoding"] = 6;
    if (d > 0) {
        qsp::QspAngles zero;
        zero.phases.assign(d + 1, 0.0);
        auto q = qsvt::assemble_qsvt(be, zero);
        auto proj = readout::build_projection_circuit(q);
        gates["qsvt"] = gate_summary(q.circuit);
        gates["projection"] = gate_summary(proj.circuit);
        gates["block_encoding_calls_qsvt"] = d;
        gates["pcp_gates_qsvt"] = d + 1;
        gates["controlled_u_max_total"] = 2 * 6 * d;
    }
    if (lcu_fits && lcu_exact <= (uint64_t{1} << 20)) {
        auto plan_subsets = hypergraph::enumerate_sets(N, *k, mode, config.k_lcu, config.k_range);
        uint64_t mcz = 0;
        uint64_t flips = 0;
        for (const auto &s : plan_subsets.selection.subsets) {
            auto e = hypergraph::anf_hyperedges(hypergraph::SignPattern::from_mask(n, s));
            mcz += e.edges.size();
            flips += e.global_flip ? 1 : 0;
        }
        gates["lcu"] = {{"hadamards", n + a}, {"controlled_z", mcz}, {"controlled_global_flips", flips}};
    } else {
        gates["lcu"] = nullptr;
    }

    double p = exact_postselect_probability(N, *k, plan.lcu_sizes, a);
    uint64_t trials = config.trials ? *config.trials : readout::default_trials(N, *k, plan.lcu_sizes.front(), mode);
    uint32_t budget = 0;
    if (config.budget) {
        budget = *config.budget;
    } else {
        budget = std::max<uint32_t>(4, 4 * static_cast<uint32_t>(std::ceil(log2_cand - 1e-12)));
    }
    return {{"N", N},
            {"n", n},
            {"k", *k},
            {"mode", hypergraph::mode_name(mode)},
            {"k_lcu", plan.lcu_sizes},
            {"candidates", cand_count},
            {"log2_candidates", log2_cand},
            {"lcu_size", lcu_count},
            {"log2_lcu_size", log2_lcu},
            {"ancillas", a},
            {"qubits", 2 * n + 4 + a},
            {"qubit_layout", {{"system", n}, {"block_encoding_ancillas", n + 2}, {"pcp", 1}, {"projector", 1}, {"lcu", a}}},
            {"degree", d},
            {"postselect_probability_exact_signs", p},
            {"expected_postselect_repetitions", p > 0 ? 1.0 / p : INFINITY},
            {"budget", budget},
            {"trials", trials},
            {"gate_counts", gates}};
}

}  // namespace deteqt::pipeline
