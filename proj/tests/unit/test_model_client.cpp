#include <thread>

#include <gtest/gtest.h>

#include "groundwork/agent_core.hpp"
#include "groundwork/error.hpp"
#include "groundwork/model_client.hpp"
#include "support.hpp"

using namespace groundwork;

TEST(ScriptedModel, FingerprintBeatsTaskBeatsDefault) {
    std::vector<Message> msgs{{"system", system_prompt("Do it")}, {"user", "ctx one"}};
    const auto fp = ScriptedModelClient::fingerprint(msgs);
    ScriptedModelClient client(nlohmann::json{
        {"completions", {{fp, {"ACTION: click(1)"}}}},
        {"tasks", {{"Do it", {"ACTION: click(2)"}}}},
        {"default", {"ACTION: click(3)"}},
    });
    EXPECT_EQ(client.complete(msgs, 2, 0.7), (std::vector<std::string>{"ACTION: click(1)", "ACTION: click(1)"}));
    msgs[1].content = "ctx two";
    EXPECT_EQ(client.complete(msgs, 1, 0.7)[0], "ACTION: click(2)");
    msgs[0].content = system_prompt("Other");
    EXPECT_EQ(client.complete(msgs, 1, 0.7)[0], "ACTION: click(3)");
}

TEST(ScriptedModel, ArrayEntriesCycleAndLastRepeats) {
    ScriptedModelClient client(nlohmann::json{{"default", {nlohmann::json::array({"a", "b"}), "c"}}});
    const std::vector<Message> msgs{{"system", system_prompt("x")}, {"user", "u"}};
    EXPECT_EQ(client.complete(msgs, 3, 0.7), (std::vector<std::string>{"a", "b", "a"}));
    EXPECT_EQ(client.complete(msgs, 1, 0.7)[0], "c");
    EXPECT_EQ(client.complete(msgs, 1, 0.7)[0], "c");
}

TEST(ScriptedModel, FingerprintIsSha256OfLastUserMessage) {
    const std::vector<Message> msgs{{"system", "s"}, {"user", "abc"}};
    EXPECT_EQ(ScriptedModelClient::fingerprint(msgs),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ScriptedModel, MissingEntryIsBackendError) {
    ScriptedModelClient client(nlohmann::json::object());
    try {
        client.complete({{"user", "x"}}, 1, 0.7);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::model_backend);
    }
}

TEST(BinaryVote, SingleSampleRateNearP) {
    BinaryVoteModel model(0.6, 1);
    int correct = 0;
    for (int i = 0; i < 4000; ++i) correct += model.complete({}, 1, 0.7)[0] == model.correct() ? 1 : 0;
    EXPECT_NEAR(correct / 4000.0, 0.6, 0.03);
}

TEST(BinaryVote, MajorityOfFiveNearAnalytic) {
    BinaryVoteModel model(0.6, 2);
    int wins = 0;
    const int trials = 3000;
    for (int i = 0; i < trials; ++i) {
        const auto v = propose_action("ctx", model, 5);
        wins += v.action == Action::click(1) ? 1 : 0;
    }
    EXPECT_NEAR(wins / static_cast<double>(trials), gwtest::majority_of_five(0.6), 0.03);
}

TEST(Oracle, MajorityOfFiveClosedForm) {
    EXPECT_NEAR(gwtest::majority_of_five(0.6), 0.68256, 1e-12);
    EXPECT_NEAR(gwtest::majority_of_five(0.5), 0.5, 1e-12);
}

TEST(HttpModel, EnvSelectsBackend) {
    ::unsetenv("AGENT_MODEL_URL");
    auto fallback = std::make_shared<BinaryVoteModel>(0.5, 1);
    EXPECT_EQ(model_client_from_env(fallback), fallback);
    ::setenv("AGENT_MODEL_URL", "http://127.0.0.1:9/v1/chat", 1);
    EXPECT_NE(model_client_from_env(fallback), fallback);
    ::unsetenv("AGENT_MODEL_URL");
}
