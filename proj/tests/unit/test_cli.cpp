#include <cstdlib>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome cli(const std::string& args) {
    gwtest::TempDir dir("cli");
    const auto out = dir.path() / "stdout.txt";
    const auto src = gwtest::source_dir().string();
    const std::string cmd = "cd '" + src + "' && '" + GW_CLI + "' " + args + " > '" + out.string() + "' 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, gwtest::read_file(out)};
}

}  // namespace

TEST(Cli, SuccessfulRunExitsZero) {
    const auto r = cli("run --task catalog_order_01");
    EXPECT_EQ(r.code, 0);
    const auto run = nlohmann::json::parse(r.out);
    EXPECT_EQ(run.at("status"), "success");
}

TEST(Cli, FailedRunExitsOne) {
    EXPECT_EQ(cli("run --task catalog_order_01 --script fixtures/models/never_answer.json --max-steps 3").code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli("run --task no_such_task").code, 2);
    EXPECT_EQ(cli("run --task catalog_order_01 --n 9").code, 2);
    EXPECT_EQ(cli("run --task catalog_order_01 --obs sideways").code, 2);
    EXPECT_EQ(cli("run").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
}

TEST(Cli, RunsAreReproducible) {
    const auto a = cli("run --task form_expense_01 --seed 11 --slip 0.3");
    const auto b = cli("run --task form_expense_01 --seed 11 --slip 0.3");
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
}

TEST(Cli, AxdiffPrintsGolden) {
    const auto r = cli("axdiff fixtures/ax/submit_before.json fixtures/ax/submit_after.json");
    EXPECT_EQ(r.code, 0);
    auto golden = gwtest::read_file(gwtest::fixture("ax/submit.golden.txt"));
    auto out = r.out;
    while (!golden.empty() && golden.back() == '\n') golden.pop_back();
    while (!out.empty() && out.back() == '\n') out.pop_back();
    EXPECT_EQ(out, golden);
}

TEST(Cli, EtlRunFilesProposals) {
    gwtest::TempDir store("cli-store");
    const auto r = cli("etl run --session catalog-ordering --logs fixtures/logs --store '" + store.path().string() + "'");
    EXPECT_EQ(r.code, 0);
    const auto report = nlohmann::json::parse(r.out);
    EXPECT_EQ(report.at("segments").size(), 4u);
    EXPECT_EQ(cli("etl run --session missing --logs fixtures/logs --store '" + store.path().string() + "'").code, 1);
}
