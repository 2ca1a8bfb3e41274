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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "deteqt/graph.h"
#include "deteqt/oracle.h"
#include "deteqt/pipeline.h"
#include "deteqt/qsp.h"
#include "json.hpp"

namespace {

using deteqt::pipeline::ConfigError;
using deteqt::pipeline::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitStage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDetectionFailed = 3;

// Writes through a temporary file and a rename so readers never see partial output.
void write_atomic(const std::string &path, const std::string &content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot write '" + path + "'");
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void emit(const std::string &path, const nlohmann::json &j) {
    std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_atomic(path, text);
    }
}

struct GeneratorFlags {
    uint32_t n = 0;
    uint32_t k = 0;
    std::string style = "hidden";
    double p_intra = 0.8;
    double p_inter = 0.1;
    uint32_t bridges = 0;
    uint64_t seed = 0;

    void add(CLI::App *app, bool seed_flag) {
        app->add_option("--n", n, "Number of nodes");
        app->add_option("--k", k, "Planted botnet size");
        app->add_option("--style", style, "hidden | isolated")->check(CLI::IsMember({"hidden", "isolated"}));
        app->add_option("--p-intra", p_intra, "Edge probability inside each community");
        app->add_option("--p-inter", p_inter, "Cross edge probability (hidden style)");
        app->add_option("--bridges", bridges, "Cross edges in the isolated style");
        if (seed_flag) {
            app->add_option("--gen-seed", seed, "Generator seed (defaults to --seed)");
        }
    }

    deteqt::graph::PlantedParams params(uint64_t fallback_seed, bool has_seed) const {
        deteqt::graph::PlantedParams p;
        p.node_count = n;
        p.botnet_size = k;
        p.style = deteqt::graph::parse_style(style);
        p.p_intra = p_intra;
        p.p_inter = p_inter;
        p.bridges = bridges;
        p.seed = has_seed ? seed : fallback_seed;
        return p;
    }
};

int cmd_generate(const GeneratorFlags &g, uint64_t seed, const std::string &out, const std::string &sidecar) {
    auto params = g.params(seed, false);
    deteqt::graph::PlantedNetwork pn;
    try {
        pn = deteqt::graph::generate_planted_botnet(params);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("generate: ") + e.what());
    }
    std::string side = sidecar.empty() ? out + ".json" : sidecar;
    auto meta = deteqt::graph::to_json(pn.network, &pn.planted);
    meta["generator"] = {{"n", params.node_count},  {"k", params.botnet_size}, {"style", g.style},
                         {"p_intra", params.p_intra}, {"p_inter", params.p_inter}, {"bridges", params.bridges},
                         {"seed", params.seed}};
    write_atomic(out, deteqt::graph::to_edge_list(pn.network));
    write_atomic(side, meta.dump(2) + "\n");
    std::cout << nlohmann::json{{"edge_list", out}, {"sidecar", side}, {"N", pn.network.node_count},
                                {"edges", pn.network.edge_count()}, {"planted", pn.planted}}
                     .dump()
              << "\n";
    return kExitOk;
}

int cmd_detect(const RunConfig &config) {
    auto result = deteqt::pipeline::run_detect(config);
    emit(config.output, result.report);
    if (!config.csv.empty()) {
        write_atomic(config.csv, result.csv);
    }
    if (result.failed) {
        std::cerr << "detection failed: no trial produced a single surviving candidate\n";
        return kExitDetectionFailed;
    }
    return kExitOk;
}

int cmd_angles(const std::string &method, uint32_t degree, double x_min, int order, uint64_t seed,
               double tolerance, const std::string &out) {
    nlohmann::json j;
    if (method == "recursive") {
        auto f = deteqt::qsp::SignApproximant::recursive(order, x_min);
        j = {{"method", "recursive"}, {"order", order}, {"d", f.degree()}, {"x_min", x_min}, {"epsilon", f.epsilon()}};
    } else {
        deteqt::qsp::OptimizationOptions o;
        o.degree = degree;
        o.x_min = x_min;
        o.seed = seed;
        o.tolerance = tolerance;
        auto fit = deteqt::qsp::find_angles_optimization(o);
        j = deteqt::qsp::to_json(fit);
        j["method"] = "optimize";
        j["converged"] = fit.converged;
    }
    emit(out, j);
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"deteqt: quantum community detection simulator"};
    app.require_subcommand(1);

    GeneratorFlags gen;
    uint64_t seed = 0;
    std::string out;
    std::string sidecar;
    auto *generate = app.add_subcommand("generate", "Write a planted-botnet network and its JSON sidecar");
    gen.add(generate, false);
    generate->add_option("--seed", seed, "Master seed")->required();
    generate->add_option("--out", out, "Edge-list path")->default_val("network.txt");
    generate->add_option("--sidecar", sidecar, "JSON sidecar path (default <out>.json)");

    RunConfig cfg;
    GeneratorFlags dgen;
    std::string config_file;
    std::string mode;
    std::string sign = "optimize";
    std::string backend = "circuit";
    std::string encoding = "lcu";
    bool exact = false;
    uint32_t k = 0, k_lcu = 0;
    uint64_t trials = 0;
    uint32_t budget = 0;
    double eps_target = 0;
    auto *detect = app.add_subcommand("detect", "Run the detection protocol and write a run report");
    detect->add_option("--config", config_file, "Rerun from a config or report JSON");
    detect->add_option("--network", cfg.network_file, "Edge list or JSON network");
    dgen.add(detect, true);
    detect->add_option("--botnet-size", k, "Known botnet size (estimated when omitted)");
    detect->add_option("--mode", mode, "zero | small")->check(CLI::IsMember({"zero", "small"}));
    detect->add_option("--k-lcu", k_lcu, "LCU subset size override");
    detect->add_option("--k-range", cfg.k_range, "Widen candidates to sizes k +- range");
    detect->add_option("--sign", sign, "optimize | recursive | file | exact")
        ->check(CLI::IsMember({"optimize", "recursive", "file", "exact"}));
    detect->add_flag("--exact-sign", exact, "Replace the QSVT stage with the exactly signed vector");
    detect->add_option("--degree", cfg.degree, "QSVT degree (odd)");
    detect->add_option("--epsilon-target", eps_target, "Raise the degree until epsilon meets this");
    detect->add_option("--order", cfg.recursive_order, "Recursive approximant order (1..4)");
    detect->add_option("--angles", cfg.angles_file, "Angle JSON for --sign file");
    detect->add_option("--backend", backend, "circuit | oracle")->check(CLI::IsMember({"circuit", "oracle"}));
    detect->add_option("--block-encoding", encoding, "lcu | dilation")->check(CLI::IsMember({"lcu", "dilation"}));
    detect->add_option("--shots", cfg.shots, "Shots for sampler validation");
    detect->add_option("--trials", trials, "Number of trials");
    detect->add_option("--budget", budget, "Samples per trial");
    detect->add_option("--seed", cfg.seed, "Master seed (required unless --config)");
    detect->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
    detect->add_option("--out", cfg.output, "Report path (stdout when omitted)");
    detect->add_option("--csv", cfg.csv, "Node-frequency CSV path");

    RunConfig rcfg;
    GeneratorFlags rgen;
    std::string rmode;
    uint32_t rk = 0, rk_lcu = 0;
    auto *resources = app.add_subcommand("resources", "Report qubit, gate and repetition counts");
    resources->add_option("--network", rcfg.network_file, "Edge list or JSON network");
    resources->add_option("--n", rgen.n, "Number of nodes");
    resources->add_option("--k", rk, "Botnet size");
    resources->add_option("--mode", rmode, "zero | small")->check(CLI::IsMember({"zero", "small"}));
    resources->add_option("--k-lcu", rk_lcu, "LCU subset size override");
    resources->add_option("--k-range", rcfg.k_range, "Widen candidates to sizes k +- range");
    resources->add_option("--degree", rcfg.degree, "QSVT degree");
    resources->add_option("--out", rcfg.output, "Report path (stdout when omitted)");

    RunConfig ocfg;
    GeneratorFlags ogen;
    uint64_t oshots = 100000;
    uint64_t otrials = 0;
    std::string omode;
    auto *oracle_cmd = app.add_subcommand("oracle", "Cross-check every pipeline stage against classical oracles");
    oracle_cmd->add_option("--network", ocfg.network_file, "JSON network with a planted set, or edge list");
    ogen.add(oracle_cmd, true);
    oracle_cmd->add_option("--mode", omode, "zero | small")->check(CLI::IsMember({"zero", "small"}));
    oracle_cmd->add_option("--degree", ocfg.degree, "QSVT degree (odd)");
    oracle_cmd->add_option("--shots", oshots, "Sampler validation shots");
    oracle_cmd->add_option("--trials", otrials, "Elimination trials");
    oracle_cmd->add_option("--seed", ocfg.seed, "Master seed");
    oracle_cmd->add_option("--out", ocfg.output, "Report path (stdout when omitted)");

    std::string amethod = "optimize";
    uint32_t adegree = 29;
    double ax_min = 0.2;
    int aorder = 3;
    uint64_t aseed = 0;
    double atol = 1e-4;
    std::string aout;
    auto *angles = app.add_subcommand("angles", "Compute sign-approximation phases");
    angles->add_option("--method", amethod, "optimize | recursive")->check(CLI::IsMember({"optimize", "recursive"}));
    angles->add_option("--degree", adegree, "Odd degree");
    angles->add_option("--x-min", ax_min, "Lower edge of the approximation interval");
    angles->add_option("--order", aorder, "Recursive order (1..4)");
    angles->add_option("--seed", aseed, "Restart seed");
    angles->add_option("--tolerance", atol, "Target epsilon");
    angles->add_option("--out", aout, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    // Echoed to stderr alongside any error raised after the config is assembled.
    std::optional<RunConfig> active;
    auto echo = [&] {
        if (active) {
            std::cerr << "config: " << deteqt::pipeline::to_json(*active).dump() << "\n";
        }
    };
    try {
        if (generate->parsed()) {
            return cmd_generate(gen, seed, out, sidecar);
        }
        if (detect->parsed()) {
            RunConfig run = cfg;
            if (!config_file.empty()) {
                std::ifstream in(config_file);
                if (!in) {
                    throw ConfigError("cannot open '" + config_file + "'");
                }
                nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
                if (j.is_discarded()) {
                    throw ConfigError("'" + config_file + "' is not valid JSON");
                }
                run = deteqt::pipeline::config_from_json(j.contains("config") ? j.at("config") : j);
                if (detect->count("--out")) {
                    run.output = cfg.output;
                }
                if (detect->count("--csv")) {
                    run.csv = cfg.csv;
                }
                if (detect->count("--threads")) {
                    run.threads = cfg.threads;
                }
            } else {
                if (!detect->count("--seed")) {
                    throw ConfigError("detect requires --seed");
                }
                if (run.network_file.empty()) {
                    if (dgen.n == 0) {
                        throw ConfigError("detect needs --network or generator flags (--n, --k)");
                    }
                    run.generator = dgen.params(cfg.seed, detect->count("--gen-seed") > 0);
                }
                if (detect->count("--botnet-size")) {
                    run.k = k;
                }
                if (!mode.empty()) {
                    run.mode = deteqt::hypergraph::parse_mode(mode);
                }
                if (detect->count("--k-lcu")) {
                    run.k_lcu = k_lcu;
                }
                run.sign = deteqt::pipeline::parse_sign_source(exact ? "exact" : sign);
                run.backend = deteqt::pipeline::parse_backend(backend);
                run.encoding = deteqt::pipeline::parse_encoding(encoding);
                if (detect->count("--trials")) {
                    run.trials = trials;
                }
                if (detect->count("--budget")) {
                    run.budget = budget;
                }
                if (detect->count("--epsilon-target")) {
                    run.epsilon_target = eps_target;
                }
            }
            active = run;
            return cmd_detect(run);
        }
        if (resources->parsed()) {
            RunConfig run = rcfg;
            run.command = "resources";
            if (run.network_file.empty()) {
                if (rgen.n == 0 || rk == 0) {
                    throw ConfigError("resources needs --n and --k, or --network");
                }
                rgen.k = rk;
                run.generator = rgen.params(0, false);
            }
            if (rk) {
                run.k = rk;
            }
            if (!rmode.empty()) {
                run.mode = deteqt::hypergraph::parse_mode(rmode);
            }
            if (resources->count("--k-lcu")) {
                run.k_lcu = rk_lcu;
            }
            active = run;
            emit(run.output, deteqt::pipeline::run_resources(run));
            return kExitOk;
        }
        if (oracle_cmd->parsed()) {
            RunConfig run = ocfg;
            run.command = "oracle";
            if (run.network_file.empty()) {
                if (ogen.n == 0) {
                    throw ConfigError("oracle needs --network or generator flags (--n, --k)");
                }
                run.generator = ogen.params(ocfg.seed, oracle_cmd->count("--gen-seed") > 0);
            }
            if (!omode.empty()) {
                run.mode = deteqt::hypergraph::parse_mode(omode);
            }
            if (otrials) {
                run.trials = otrials;
            }
            active = run;
            auto inst = deteqt::pipeline::load_instance(run);
            if (!inst.planted) {
                throw ConfigError("oracle needs a planted set (JSON network or generator)");
            }
            deteqt::oracle::VerifyOptions opts;
            opts.run = run;
            opts.shots = oshots;
            auto report = deteqt::oracle::verify_pipeline(inst.network, *inst.planted, opts);
            auto j = deteqt::oracle::to_json(report);
            j["config"] = deteqt::pipeline::to_json(run);
            emit(run.output, j);
            return report.passed() ? kExitOk : kExitDetectionFailed;
        }
        if (angles->parsed()) {
            return cmd_angles(amethod, adegree, ax_min, aorder, aseed, atol, aout);
        }
    } catch (const deteqt::pipeline::StageError &e) {
        std::cerr << "error in stage " << e.what() << "\n";
        echo();
        return kExitStage;
    } catch (const std::invalid_argument &e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        echo();
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        echo();
        return kExitStage;
    }
    return kExitConfig;
}
