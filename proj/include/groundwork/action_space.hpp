#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "groundwork/page_model.hpp"

namespace groundwork {

enum class ActionKind {
    click,
    type_text,
    scroll_into,
    select_option,
    navigate,
    go_back,
    request_full_tree,
    search_workspace,
    decompose,
    answer,
};

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> action_kind_from_string(std::string_view s);

/// Which payload fields a kind carries.
///
/// | kind              | target_id | argument | subgoals |
/// |-------------------|-----------|----------|----------|
/// | click             | yes       |          |          |
/// | type_text         | yes       | yes      |          |
/// | scroll_into       | yes       |          |          |
/// | select_option     | yes       | yes      |          |
/// | navigate          |           | yes      |          |
/// | go_back           |           |          |          |
/// | request_full_tree |           |          |          |
/// | search_workspace  |           | yes      |          |
/// | decompose         |           |          | >= 2     |
/// | answer            |           | yes      |          |
struct ActionShape {
    bool target = false;
    bool argument = false;
    bool subgoals = false;
};
ActionShape shape_of(ActionKind kind);

/// Kinds the environment executes; the rest are handled by the scaffold.
bool is_environment_action(ActionKind kind);

struct Action {
    ActionKind kind = ActionKind::answer;
    std::optional<ElementId> target_id;
    std::string argument;
    std::vector<std::string> subgoals;

    bool operator==(const Action&) const = default;

    static Action click(ElementId id) { return {ActionKind::click, id, {}, {}}; }
    static Action type_text(ElementId id, std::string text) {
        return {ActionKind::type_text, id, std::move(text), {}};
    }
    static Action scroll_into(ElementId id) { return {ActionKind::scroll_into, id, {}, {}}; }
    static Action select_option(ElementId id, std::string label) {
        return {ActionKind::select_option, id, std::move(label), {}};
    }
    static Action navigate(std::string url) { return {ActionKind::navigate, {}, std::move(url), {}}; }
    static Action go_back() { return {ActionKind::go_back, {}, {}, {}}; }
    static Action request_full_tree() { return {ActionKind::request_full_tree, {}, {}, {}}; }
    static Action search_workspace(std::string q) {
        return {ActionKind::search_workspace, {}, std::move(q), {}};
    }
    static Action decompose(std::vector<std::string> goals) {
        return {ActionKind::decompose, {}, {}, std::move(goals)};
    }
    static Action answer(std::string text) { return {ActionKind::answer, {}, std::move(text), {}}; }
};

/// Throws MalformedAction if the fields do not fit the kind's shape.
void validate(const Action& action);

struct ParsedOutput {
    std::string thought;
    Action action;
};

/// Parses `ACTION: kind(args)` out of a model completion. Text before the
/// action line becomes the thought.
ParsedOutput parse_action(std::string_view model_output);

/// `ACTION: kind(args)`; parse_action(format_action(a)).action == a.
std::string format_action(const Action& action);

/// Call form without the `ACTION: ` prefix, e.g. `click(42)`.
std::string format_call(const Action& action);

/// Trims and collapses whitespace in string payloads; case is preserved.
/// Two actions vote together iff their canonical strings are equal.
std::string canonicalize(const Action& action);

std::string quote_string(std::string_view s);

void to_json(nlohmann::json& j, const Action& a);
void from_json(const nlohmann::json& j, Action& a);

}  // namespace groundwork
