#include <random>

#include <gtest/gtest.h>

#include "groundwork/action_space.hpp"
#include "groundwork/error.hpp"

using namespace groundwork;

namespace {

ErrorCode code_of(std::string_view text) {
    try {
        parse_action(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ErrorCode::validation;
}

}  // namespace

TEST(ActionSpace, ParsesThoughtAndCall) {
    const auto p = parse_action("The Hardware link leads on.\nACTION: click(12)\n");
    EXPECT_EQ(p.thought, "The Hardware link leads on.");
    EXPECT_EQ(p.action, Action::click(12));
}

TEST(ActionSpace, ParsesEveryKind) {
    EXPECT_EQ(parse_action("ACTION: type_text(33, \"2\")").action, Action::type_text(33, "2"));
    EXPECT_EQ(parse_action("ACTION: scroll_into(7)").action, Action::scroll_into(7));
    EXPECT_EQ(parse_action("ACTION: select_option(5, \"CSV\")").action, Action::select_option(5, "CSV"));
    EXPECT_EQ(parse_action("ACTION: navigate(\"https://a.example/\")").action, Action::navigate("https://a.example/"));
    EXPECT_EQ(parse_action("ACTION: go_back()").action, Action::go_back());
    EXPECT_EQ(parse_action("ACTION: request_full_tree()").action, Action::request_full_tree());
    EXPECT_EQ(parse_action("ACTION: search_workspace(\"order laptop\")").action,
              Action::search_workspace("order laptop"));
    EXPECT_EQ(parse_action("ACTION: decompose(\"a\", \"b\")").action, Action::decompose({"a", "b"}));
    EXPECT_EQ(parse_action("ACTION: answer(\"say \\\"hi\\\"\")").action, Action::answer("say \"hi\""));
}

TEST(ActionSpace, Errors) {
    EXPECT_EQ(code_of("I would click the button."), ErrorCode::no_action_block);
    EXPECT_EQ(code_of("ACTION: click(\"Submit\")"), ErrorCode::bad_target_id);
    EXPECT_EQ(code_of("ACTION: fly(3)"), ErrorCode::malformed_action);
    EXPECT_EQ(code_of("ACTION: click(3, 4)"), ErrorCode::malformed_action);
    EXPECT_EQ(code_of("ACTION: decompose(\"only one\")"), ErrorCode::malformed_action);
    EXPECT_EQ(code_of("ACTION: click(1)\nACTION: click(2)"), ErrorCode::malformed_action);
    EXPECT_EQ(code_of("ACTION: type_text(3)"), ErrorCode::malformed_action);
}

TEST(ActionSpace, ShapeTable) {
    EXPECT_TRUE(shape_of(ActionKind::click).target);
    EXPECT_FALSE(shape_of(ActionKind::click).argument);
    EXPECT_TRUE(shape_of(ActionKind::type_text).argument);
    EXPECT_TRUE(shape_of(ActionKind::decompose).subgoals);
    EXPECT_TRUE(is_environment_action(ActionKind::go_back));
    EXPECT_FALSE(is_environment_action(ActionKind::search_workspace));
    EXPECT_FALSE(is_environment_action(ActionKind::answer));
}

TEST(ActionSpace, CanonicalFormCollapsesWhitespace) {
    EXPECT_EQ(canonicalize(Action::type_text(3, "  Visio   viewer ")), canonicalize(Action::type_text(3, "Visio viewer")));
    EXPECT_NE(canonicalize(Action::type_text(3, "visio viewer")), canonicalize(Action::type_text(3, "Visio viewer")));
    EXPECT_NE(canonicalize(Action::click(3)), canonicalize(Action::click(4)));
}

// Property: parse(format(a)) == a for random well-formed actions.
TEST(ActionSpaceProperty, FormatParseRoundTrip) {
    std::mt19937_64 rng(11);
    const std::string alphabet = "ab \"\\\n\tZ9-é";
    auto text = [&] {
        std::string s;
        const auto n = rng() % 12;
        for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
        return s;
    };
    const ActionKind kinds[] = {ActionKind::click, ActionKind::type_text, ActionKind::scroll_into,
                                ActionKind::select_option, ActionKind::navigate, ActionKind::go_back,
                                ActionKind::request_full_tree, ActionKind::search_workspace,
                                ActionKind::decompose, ActionKind::answer};
    for (int i = 0; i < 2000; ++i) {
        Action a;
        a.kind = kinds[rng() % std::size(kinds)];
        const auto shape = shape_of(a.kind);
        if (shape.target) a.target_id = static_cast<ElementId>(rng() % 100000);
        if (shape.argument) a.argument = text();
        if (shape.subgoals) {
            const auto n = 2 + rng() % 3;
            for (std::size_t g = 0; g < n; ++g) a.subgoals.push_back(text());
        }
        const auto formatted = format_action(a);
        ASSERT_EQ(parse_action("thinking...\n" + formatted).action, a) << formatted;
        ASSERT_EQ(nlohmann::json(a).get<Action>(), a);
    }
}
