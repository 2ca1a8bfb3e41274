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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string err;
};

fs::path scratch() {
    auto info = ::testing::UnitTest::GetInstance()->current_test_info();
    auto dir = fs::temp_directory_path() / (std::string("deteqt_cli_") + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Result run(const std::string &args, const fs::path &dir) {
    auto err = dir / "stderr.txt";
    std::string cmd = std::string(DETEQT_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                      err.string();
    int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(cli, generate_is_idempotent_per_seed) {
    auto d = scratch();
    auto a = (d / "a.txt").string();
    auto b = (d / "b.txt").string();
    ASSERT_EQ(run("generate --n 10 --k 3 --style hidden --seed 7 --out " + a, d).code, 0);
    ASSERT_EQ(run("generate --n 10 --k 3 --style hidden --seed 7 --out " + b, d).code, 0);
    ASSERT_EQ(slurp(a), slurp(b));
    ASSERT_EQ(slurp(a + ".json"), slurp(b + ".json"));
    auto side = nlohmann::json::parse(slurp(a + ".json"));
    ASSERT_EQ(side["planted"].size(), 3u);
}

TEST(cli, generate_rejects_bad_sizes) {
    auto d = scratch();
    ASSERT_EQ(run("generate --n 4 --k 3 --seed 1 --out " + (d / "x.txt").string(), d).code, 2);
    ASSERT_EQ(run("generate --n 10 --k 3 --out " + (d / "x.txt").string(), d).code, 2);
    ASSERT_EQ(run("generate --n 10 --k 3 --seed 1 --style weird", d).code, 2);
}

TEST(cli, detect_requires_seed) {
    auto d = scratch();
    ASSERT_EQ(run("detect --n 8 --k 3", d).code, 2);
}

TEST(cli, detect_writes_report_and_csv) {
    auto d = scratch();
    auto out = d / "report.json";
    auto csv = d / "freq.csv";
    auto r = run("detect --n 8 --k 3 --p-intra 0.9 --p-inter 0.05 --botnet-size 3 --seed 1 --out " + out.string() +
                     " --csv " + csv.string(),
                 d);
    ASSERT_EQ(r.code, 0) << r.err;
    auto report = nlohmann::json::parse(slurp(out));
    ASSERT_EQ(report["status"], "detected");
    ASSERT_EQ(slurp(csv).substr(0, 20), "node,count,frequency");
}

TEST(cli, rerun_from_report_is_bit_identical) {
    auto d = scratch();
    auto first = d / "first.json";
    auto kept = d / "kept.json";
    ASSERT_EQ(run("detect --n 10 --k 3 --mode small --botnet-size 3 --backend oracle --trials 15 --seed 5 --out " +
                      first.string(),
                  d)
                  .code,
              0);
    fs::copy_file(first, kept);
    // The embedded config names the same output path, so the rerun rewrites it in place.
    ASSERT_EQ(run("detect --config " + kept.string(), d).code, 0);
    ASSERT_EQ(slurp(first), slurp(kept));
    ASSERT_FALSE(slurp(first).empty());
}

TEST(cli, detection_failure_exit_code) {
    auto d = scratch();
    auto r = run("detect --n 16 --k 3 --botnet-size 3 --exact-sign --backend oracle --trials 1 --budget 1 --seed 3",
                 d);
    ASSERT_EQ(r.code, 3) << r.err;
}

TEST(cli, config_errors_echo_the_config) {
    auto d = scratch();
    auto r = run("detect --n 9 --k 3 --botnet-size 3 --mode zero --seed 3", d);
    ASSERT_EQ(r.code, 2);
    ASSERT_NE(r.err.find("config: {"), std::string::npos) << r.err;
    ASSERT_EQ(run("detect --network /nonexistent.txt --seed 1", d).code, 2);
    ASSERT_EQ(run("frobnicate", d).code, 2);
}

TEST(cli, qubit_cap_env_var) {
    auto d = scratch();
    auto r = run("detect --n 8 --k 3 --botnet-size 3 --seed 1", d);
    ASSERT_EQ(r.code, 0) << r.err;
    setenv("DETEQT_MAX_QUBITS", "10", 1);
    r = run("detect --n 8 --k 3 --botnet-size 3 --seed 1", d);
    unsetenv("DETEQT_MAX_QUBITS");
    ASSERT_EQ(r.code, 2) << r.err;
}

TEST(cli, resources_report) {
    auto d = scratch();
    auto out = d / "res.json";
    ASSERT_EQ(run("resources --n 16 --k 3 --mode zero --out " + out.string(), d).code, 0);
    auto j = nlohmann::json::parse(slurp(out));
    ASSERT_EQ(j["qubits"], 25);
    ASSERT_EQ(j["candidates"], 560);
}

TEST(cli, oracle_and_angles) {
    auto d = scratch();
    auto out = d / "oracle.json";
    auto r = run("oracle --n 8 --k 3 --p-intra 0.9 --p-inter 0.05 --shots 20000 --seed 1 --out " + out.string(), d);
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_TRUE(nlohmann::json::parse(slurp(out))["passed"].get<bool>());
    auto ang = d / "angles.json";
    ASSERT_EQ(run("angles --degree 29 --x-min 0.2 --out " + ang.string(), d).code, 0);
    auto j = nlohmann::json::parse(slurp(ang));
    ASSERT_EQ(j["phases"].size(), 30u);
    ASSERT_EQ(run("angles --degree 28", d).code, 2);
}
