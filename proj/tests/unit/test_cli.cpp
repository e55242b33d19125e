// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "test_support.hpp"

using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const adaret::testing::TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + ADARET_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

}  // namespace

TEST_CASE("command line pipeline from raw log to report", "[cli]") {
    adaret::testing::TempDir dir("adaret-cli");
    const auto root = dir.path().string();
    std::ofstream(dir / "tiny.cfg") << "dim = 8\nmax_len = 6\nblocks = 1\nheads = 1\nrounds = 2\n"
                                       "k_ctx = 2\nepochs = 2\nbatch_size = 32\neval_k = 4\n";

    auto r = run_cli(dir, "synth --kind cycle --users 20 --items 12 --length 8 --output " + root + "/log.tsv");
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / "log.tsv"));

    r = run_cli(dir, "stats --input " + root + "/log.tsv");
    REQUIRE(r.code == 0);
    const auto stats = nlohmann::json::parse(r.out);
    CHECK(stats["sequences"] == 20);
    CHECK(stats["actions"] == 160);

    r = run_cli(dir, "--out " + root + "/run prepare --input " + root + "/log.tsv");
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / "run" / "dataset.json"));

    const std::string common = "--quiet --config " + root + "/tiny.cfg --out " + root + "/run ";
    r = run_cli(dir, common + "pretrain --data " + root + "/run/dataset.json");
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    REQUIRE(fs::exists(dir / "run" / "pretrained" / "manifest.json"));

    r = run_cli(dir, common + "finetune --data " + root + "/run/dataset.json --checkpoint " + root + "/run/pretrained");
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / "run" / "finetuned" / "tensors.bin"));

    r = run_cli(dir, common + "evaluate --split test --label ada --data " + root + "/run/dataset.json --checkpoint " +
                         root + "/run/finetuned");
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(r.out);
    CHECK(report["label"] == "ada");
    CHECK(report["k"] == 4);
    CHECK(report["per_round"].size() == 2);
    CHECK(report["hr"].get<double>() >= 0.0);
    CHECK(slurp(dir / "run" / "report.jsonl") == r.out);

    r = run_cli(dir, common + "recommend --user u1 --k 2 --data " + root + "/run/dataset.json --checkpoint " + root +
                         "/run/pretrained");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("u1\t", 0) == 0);
}

TEST_CASE("command line errors exit nonzero with a message", "[cli]") {
    adaret::testing::TempDir dir("adaret-cli");
    const auto root = dir.path().string();
    auto r = run_cli(dir, "stats --input " + root + "/absent.tsv");
    CHECK(r.code == 2);
    CHECK_THAT(r.err, ContainsSubstring("error:"));

    r = run_cli(dir, "--set colour=red pretrain --data " + root + "/absent.json");
    CHECK(r.code == 2);
    CHECK_THAT(r.err, ContainsSubstring("colour"));

    r = run_cli(dir, "pretrain");
    CHECK(r.code == 1);

    r = run_cli(dir, "evaluate --data " + root + "/absent.json");
    CHECK(r.code == 1);
    CHECK_THAT(r.err, ContainsSubstring("checkpoint"));
}
