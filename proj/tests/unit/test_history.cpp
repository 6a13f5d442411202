#include <gtest/gtest.h>

#include "groundwork/error.hpp"
#include "groundwork/history.hpp"
#include "support.hpp"

using namespace groundwork;

namespace {

std::vector<Step> trajectory() {
    return steps_from_ndjson(gwtest::read_file(gwtest::fixture("trajectory_20.ndjson")));
}

}  // namespace

TEST(History, TokenCountIsCeilOfCodePointsOverFour) {
    EXPECT_EQ(token_count(""), 0u);
    EXPECT_EQ(token_count("abcd"), 1u);
    EXPECT_EQ(token_count("abcde"), 2u);
    EXPECT_EQ(token_count("ééé"), 1u);  // three code points, six bytes
}

TEST(History, FixtureHasTwentyContiguousSteps) {
    const auto steps = trajectory();
    ASSERT_EQ(steps.size(), 20u);
    EXPECT_EQ(steps_from_ndjson(steps_to_ndjson(steps)), steps);
}

TEST(History, DiffModeUsesFullObservationOnlyForFirstStep) {
    auto steps = trajectory();
    steps.resize(3);
    const auto ctx = compose_context(steps, "[1] WebArea 'x'\n", "(no changes)", ContextBudget{100000},
                                     HistoryMode::diff_history);
    EXPECT_EQ(std::count_if(steps.begin(), steps.end(),
                            [&](const Step& s) { return ctx.find(s.observation_full) != std::string::npos; }),
              1);
    EXPECT_NE(ctx.find("Changes:\n" + steps[1].diff_from_prev), std::string::npos);
}

TEST(History, ElidesOldestStepsFirst) {
    const auto steps = trajectory();
    const auto full = compose_context(steps, "obs", "diff", ContextBudget{1000000}, HistoryMode::full_history);
    const std::size_t budget = token_count(full) / 2;
    const auto ctx = compose_context(steps, "obs", "diff", ContextBudget{budget}, HistoryMode::full_history);
    EXPECT_LE(token_count(ctx), budget);
    EXPECT_EQ(ctx.rfind("[... ", 0), 0u);
    EXPECT_NE(ctx.find("## Step 19\n"), std::string::npos);
    EXPECT_EQ(ctx.find("## Step 0\n"), std::string::npos);
}

TEST(History, BudgetTooSmallForCurrentObservation) {
    try {
        compose_context({}, std::string(400, 'x'), "(no changes)", ContextBudget{10}, HistoryMode::diff_history);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::budget_too_small);
    }
}

// Property: for any budget that fits the current observation, the context
// fits the budget and the kept steps are a suffix of the history.
TEST(HistoryProperty, ContextFitsBudgetAndKeepsSuffix) {
    const auto steps = trajectory();
    for (std::size_t budget = 60; budget < 6000; budget += 37) {
        for (auto mode : {HistoryMode::diff_history, HistoryMode::full_history}) {
            const auto ctx = compose_context(steps, "[1] WebArea 'now'\n", "(no changes)", ContextBudget{budget}, mode);
            ASSERT_LE(token_count(ctx), budget);
            bool seen = false;
            for (std::size_t i = 0; i < steps.size(); ++i) {
                const bool present = ctx.find("## Step " + std::to_string(i) + "\n") != std::string::npos;
                if (seen) {
                    ASSERT_TRUE(present) << "gap at step " << i << " budget " << budget;
                }
                seen = seen || present;
            }
        }
    }
}

// Diff history is cheaper than full history from the third step on.
TEST(HistoryProperty, DiffHistoryIsSmallerFromStepTwo) {
    const auto steps = trajectory();
    const ContextBudget unlimited{10'000'000};
    for (std::size_t i = 2; i < steps.size(); ++i) {
        const std::vector<Step> prefix(steps.begin(), steps.begin() + static_cast<long>(i));
        const auto d = compose_context(prefix, steps[i].observation_full, steps[i].diff_from_prev, unlimited,
                                       HistoryMode::diff_history);
        const auto f = compose_context(prefix, steps[i].observation_full, steps[i].diff_from_prev, unlimited,
                                       HistoryMode::full_history);
        EXPECT_LT(token_count(d), token_count(f)) << "step " << i;
    }
}
