/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support/fixtures.hpp"

namespace {

struct Outcome {
    int code;
    std::string out;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(GREENRETRAIN_CLI) + " " + args + " 2>/dev/null";
    Outcome o{-1, {}};
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return o;
    std::array<char, 4096> buf{};
    while (const auto n = fread(buf.data(), 1, buf.size(), pipe)) o.out.append(buf.data(), n);
    const int status = pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

constexpr const char* kSpec = R"(
[stream]
n_features = 5
n_periods = 6
samples_per_period = 200
label_signal_features = 0, 1
seed = 3

[drift]
events = 4:0:3.0
)";

constexpr const char* kConfig = R"(
[experiment]
configurations = static, periodic_fh, ks_fi_sw
span_value = 3
span_unit = months

[search]
n_trees = 4
max_depth = 3
min_samples_leaf = 2
max_features = sqrt
n_candidates = 2
)";

}  // namespace

TEST(Cli, EndToEnd) {
    fixtures::TempDir dir("cli");
    const auto spec = dir.file("spec.ini", kSpec);
    const auto config = dir.file("exp.ini", kConfig);
    const auto data = dir.path() / "stream.csv";
    ASSERT_EQ(run("generate --spec " + q(spec) + " --out " + q(data)).code, 0);
    ASSERT_TRUE(std::filesystem::exists(data));

    const auto runs = dir.path() / "runs";
    ASSERT_EQ(run("simulate --data " + q(data) + " --config " + q(config) + " --out " + q(runs) + " --seeds 2").code, 0);
    EXPECT_TRUE(std::filesystem::exists(runs / "ks_fi_sw_seed1.json"));
    EXPECT_TRUE(std::filesystem::exists(runs / "static_seed0.json"));

    const auto tables = dir.path() / "tables";
    ASSERT_EQ(run("report --runs " + q(runs) + " --out " + q(tables) + " --compare static,periodic_fh ks_fi_sw,static")
                  .code,
              0);
    for (const auto* f : {"summary.csv", "comparisons.csv", "figure_data.csv"})
        EXPECT_TRUE(std::filesystem::exists(tables / f)) << f;

    // One-shot detection; the stream's first and last periods straddle the drift.
    const auto lines = [&] {
        std::ifstream in(data);
        std::vector<std::string> out;
        for (std::string l; std::getline(in, l);) out.push_back(l);
        return out;
    }();
    std::string head = lines[0] + "\n", early, late;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].rfind("0,", 0) == 0) early += lines[i] + "\n";
        if (lines[i].rfind("5,", 0) == 0) late += lines[i] + "\n";
    }
    const auto train = dir.file("train.csv", head + early);
    const auto infer = dir.file("infer.csv", head + late);
    const auto shifted = run("detect --train " + q(train) + " --infer " + q(infer) + " --method ks-all --alpha 0.05");
    ASSERT_EQ(shifted.code, 0);
    const auto verdict = nlohmann::json::parse(shifted.out);
    EXPECT_TRUE(verdict.at("drift").get<bool>());
    const auto same = run("detect --train " + q(train) + " --infer " + q(train) + " --method ks-pca");
    ASSERT_EQ(same.code, 0);
    EXPECT_FALSE(nlohmann::json::parse(same.out).at("drift").get<bool>());
    const auto fi = run("detect --train " + q(train) + " --infer " + q(infer) + " --method ks-fi --model " +
                        q(runs / "ks_fi_sw_seed0.json"));
    EXPECT_EQ(fi.code, 0);
    EXPECT_EQ(nlohmann::json::parse(fi.out).at("method").at("method").get<std::string>(), "ks_fi");
}

TEST(Cli, ExitCodes) {
    fixtures::TempDir dir("cli");
    const auto spec = dir.file("spec.ini", kSpec);
    const auto data = dir.path() / "stream.csv";
    ASSERT_EQ(run("generate --spec " + q(spec) + " --out " + q(data)).code, 0);

    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("simulate --data x.csv").code, 2);
    EXPECT_EQ(run("detect --train " + q(data) + " --infer " + q(data) + " --method ks-max").code, 2);
    EXPECT_EQ(run("detect --train " + q(data) + " --infer " + q(data) + " --method ks-fi").code, 2);
    const auto bad_config = dir.file("bad.ini", "[experiment]\nconfigurations = ks_all\n");
    EXPECT_EQ(run("simulate --data " + q(data) + " --config " + q(bad_config) + " --out " + q(dir.path())).code, 2);
    const auto bad_csv = dir.file("bad.csv", "period,label,x\n0,0,1\n0,1,zz\n");
    EXPECT_EQ(run("detect --train " + q(bad_csv) + " --infer " + q(data)).code, 3);
    EXPECT_EQ(run("detect --train " + q(dir.path() / "missing.csv") + " --infer " + q(data)).code, 3);
    EXPECT_EQ(run("report --runs " + q(dir.path() / "empty") + " --out " + q(dir.path())).code, 3);
    EXPECT_EQ(run("generate --help").code, 0);
}
