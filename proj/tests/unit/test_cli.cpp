// Runs the stackline executable and checks exit codes and outputs.
#include <cstdlib>
#include <sys/wait.h>

#include "doctest.h"
#include "stackline/pipeline.hpp"
#include "support.hpp"

using testsupport::TempDir;

namespace {

int run(const std::string& args, const TempDir& dir) {
    const std::string cmd = "cd '" + dir.path().string() + "' && '" STACKLINE_CLI "' " + args + " > log.txt 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("exit codes") {
    TempDir dir("cli");
    CHECK(run("", dir) == 2);
    CHECK(run("bogus", dir) == 2);
    CHECK(run("preprocess --set input=missing.csv", dir) == 2);
    CHECK_FALSE(std::filesystem::exists(dir / "stackline_out"));
    CHECK(run("preprocess --config nope.json", dir) == 2);
    CHECK(run("preprocess --set aplha=1", dir) == 2);
    CHECK(run("synth -o data.csv --balance 0", dir) == 2);
    CHECK(run("--help", dir) == 0);

    stackline::write_text(dir / "bad.csv", "a,b\n1,2,3\n");
    CHECK(run("preprocess --set input=bad.csv", dir) == 1);
}

TEST_CASE("synth, preprocess, select, train, evaluate, predict") {
    TempDir dir("cli_flow");
    REQUIRE(run("synth -o data.csv --rows 600 --seed 3", dir) == 0);
    stackline::write_text(dir / "cfg.json",
                          R"({"input": "data.csv", "output_dir": "out", "learners": {"mlp": {"epochs": 100}}})");
    REQUIRE(run("preprocess -c cfg.json", dir) == 0);
    REQUIRE(run("select -c cfg.json", dir) == 0);
    REQUIRE(run("train -c cfg.json --set stacking.n_folds=3", dir) == 0);
    REQUIRE(run("evaluate -c cfg.json --split val", dir) == 0);
    CHECK(std::filesystem::exists(dir / "out" / "report_val.json"));
    CHECK(std::filesystem::exists(dir / "out" / "manifest_evaluate_val.json"));
    REQUIRE(run("predict --model out/model.json --input data.csv --output pred.csv", dir) == 0);
    const auto pred = stackline::read_csv(dir / "pred.csv");
    CHECK(pred.n_rows() == 600);
    CHECK(run("evaluate -c cfg.json --split nope", dir) == 2);
}
