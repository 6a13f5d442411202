#include "groundwork/action_space.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <variant>

#include "groundwork/error.hpp"

namespace groundwork {

namespace {

constexpr std::array<std::pair<ActionKind, std::string_view>, 10> kKindNames{{
    {ActionKind::click, "click"},
    {ActionKind::type_text, "type_text"},
    {ActionKind::scroll_into, "scroll_into"},
    {ActionKind::select_option, "select_option"},
    {ActionKind::navigate, "navigate"},
    {ActionKind::go_back, "go_back"},
    {ActionKind::request_full_tree, "request_full_tree"},
    {ActionKind::search_workspace, "search_workspace"},
    {ActionKind::decompose, "decompose"},
    {ActionKind::answer, "answer"},
}};

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorCode::malformed_action, msg); }

using Arg = std::variant<long long, std::string>;

struct Bare {
    std::string token;
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Parses the text between the parentheses. Bare tokens that are not integers
// are kept so the caller can report BadTargetId in target position.
std::vector<std::variant<long long, std::string, Bare>> parse_args(std::string_view s) {
    std::vector<std::variant<long long, std::string, Bare>> args;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < s.size() && is_space(s[i])) ++i;
    };
    skip();
    if (i == s.size()) return args;
    while (true) {
        skip();
        if (i >= s.size()) malformed("dangling comma in argument list");
        if (s[i] == '"') {
            ++i;
            std::string value;
            bool closed = false;
            while (i < s.size()) {
                char c = s[i++];
                if (c == '\\') {
                    if (i >= s.size()) malformed("unterminated escape");
                    char e = s[i++];
                    switch (e) {
                        case 'n': value += '\n'; break;
                        case 't': value += '\t'; break;
                        case '"': value += '"'; break;
                        case '\\': value += '\\'; break;
                        default: malformed(std::string("unknown escape \\") + e);
                    }
                } else if (c == '"') {
                    closed = true;
                    break;
                } else {
                    value += c;
                }
            }
            if (!closed) malformed("unterminated string argument");
            args.emplace_back(std::move(value));
        } else {
            std::size_t start = i;
            while (i < s.size() && s[i] != ',' && !is_space(s[i])) ++i;
            std::string_view tok = s.substr(start, i - start);
            long long value = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec == std::errc{} && ptr == tok.data() + tok.size() && !tok.empty()) {
                args.emplace_back(value);
            } else {
                args.emplace_back(Bare{std::string(tok)});
            }
        }
        skip();
        if (i == s.size()) break;
        if (s[i] != ',') malformed("expected ',' between arguments");
        ++i;
    }
    return args;
}

std::string normalize_ws(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "answer";
}

std::optional<ActionKind> action_kind_from_string(std::string_view s) {
    for (const auto& [k, name] : kKindNames) {
        if (name == s) return k;
    }
    return std::nullopt;
}

ActionShape shape_of(ActionKind kind) {
    switch (kind) {
        case ActionKind::click:
        case ActionKind::scroll_into: return {true, false, false};
        case ActionKind::type_text:
        case ActionKind::select_option: return {true, true, false};
        case ActionKind::navigate:
        case ActionKind::search_workspace:
        case ActionKind::answer: return {false, true, false};
        case ActionKind::go_back:
        case ActionKind::request_full_tree: return {false, false, false};
        case ActionKind::decompose: return {false, false, true};
    }
    return {};
}

bool is_environment_action(ActionKind kind) {
    switch (kind) {
        case ActionKind::click:
        case ActionKind::type_text:
        case ActionKind::scroll_into:
        case ActionKind::select_option:
        case ActionKind::navigate:
        case ActionKind::go_back: return true;
        default: return false;
    }
}

void validate(const Action& a) {
    const auto shape = shape_of(a.kind);
    const std::string name(to_string(a.kind));
    if (shape.target != a.target_id.has_value()) malformed(name + ": target_id presence mismatch");
    if (!shape.argument && !a.argument.empty()) malformed(name + " takes no string argument");
    if (!shape.subgoals && !a.subgoals.empty()) malformed(name + " takes no subgoals");
    if (shape.subgoals && a.subgoals.size() < 2) malformed("decompose needs at least 2 subgoals");
}

ParsedOutput parse_action(std::string_view out) {
    constexpr std::string_view marker = "ACTION:";
    std::optional<std::size_t> found;
    std::size_t pos = 0;
    while (pos <= out.size()) {
        std::size_t eol = out.find('\n', pos);
        if (eol == std::string_view::npos) eol = out.size();
        std::string_view line = out.substr(pos, eol - pos);
        std::size_t lead = 0;
        while (lead < line.size() && is_space(line[lead])) ++lead;
        if (line.substr(lead).starts_with(marker)) {
            if (found) malformed("more than one ACTION line");
            found = pos + lead;
        }
        pos = eol + 1;
    }
    if (!found) throw Error(ErrorCode::no_action_block, "no 'ACTION:' line in model output");

    ParsedOutput result;
    std::string_view thought = out.substr(0, *found);
    while (!thought.empty() && is_space(thought.back())) thought.remove_suffix(1);
    while (!thought.empty() && is_space(thought.front())) thought.remove_prefix(1);
    result.thought = std::string(thought);

    std::size_t eol = out.find('\n', *found);
    std::string_view call = out.substr(*found + marker.size(),
                                       eol == std::string_view::npos ? std::string_view::npos
                                                                     : eol - *found - marker.size());
    while (!call.empty() && is_space(call.front())) call.remove_prefix(1);
    while (!call.empty() && is_space(call.back())) call.remove_suffix(1);

    const std::size_t open = call.find('(');
    if (open == std::string_view::npos || call.empty() || call.back() != ')') {
        malformed("expected kind(args) after ACTION:");
    }
    const std::string kind_name(call.substr(0, open));
    const auto kind = action_kind_from_string(kind_name);
    if (!kind) malformed("unknown action kind '" + kind_name + "'");

    auto args = parse_args(call.substr(open + 1, call.size() - open - 2));
    const auto shape = shape_of(*kind);
    Action& a = result.action;
    a.kind = *kind;

    std::size_t next = 0;
    if (shape.target) {
        if (args.empty()) malformed(kind_name + " requires a target element id");
        if (auto* id = std::get_if<long long>(&args[0])) {
            a.target_id = *id;
        } else {
            throw Error(ErrorCode::bad_target_id, kind_name + " target must be an integer element id");
        }
        next = 1;
    }
    auto take_string = [&](std::size_t idx) {
        if (auto* s = std::get_if<std::string>(&args[idx])) return *s;
        malformed(kind_name + ": argument " + std::to_string(idx + 1) + " must be a quoted string");
    };
    if (shape.subgoals) {
        for (std::size_t i = next; i < args.size(); ++i) a.subgoals.push_back(take_string(i));
        if (a.subgoals.size() < 2) malformed("decompose needs at least 2 subgoals");
        return result;
    }
    const std::size_t expected = next + (shape.argument ? 1 : 0);
    if (args.size() != expected) {
        malformed(kind_name + " takes " + std::to_string(expected) + " argument(s), got " +
                  std::to_string(args.size()));
    }
    if (shape.argument) a.argument = take_string(next);
    return result;
}

std::string quote_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string format_call(const Action& a) {
    std::string out(to_string(a.kind));
    out += '(';
    std::vector<std::string> parts;
    if (a.target_id) parts.push_back(std::to_string(*a.target_id));
    if (shape_of(a.kind).argument) parts.push_back(quote_string(a.argument));
    for (const auto& g : a.subgoals) parts.push_back(quote_string(g));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        out += parts[i];
    }
    out += ')';
    return out;
}

std::string format_action(const Action& a) { return "ACTION: " + format_call(a); }

std::string canonicalize(const Action& a) {
    Action n = a;
    n.argument = normalize_ws(a.argument);
    for (auto& g : n.subgoals) g = normalize_ws(g);
    return format_call(n);
}

void to_json(nlohmann::json& j, const Action& a) {
    j = {{"kind", to_string(a.kind)}};
    j["target_id"] = a.target_id ? nlohmann::json(*a.target_id) : nlohmann::json(nullptr);
    j["argument"] = a.argument;
    j["subgoals"] = a.subgoals;
}

void from_json(const nlohmann::json& j, Action& a) {
    const auto name = j.at("kind").get<std::string>();
    const auto kind = action_kind_from_string(name);
    if (!kind) malformed("unknown action kind '" + name + "'");
    a = Action{};
    a.kind = *kind;
    if (j.contains("target_id") && !j["target_id"].is_null()) a.target_id = j["target_id"].get<ElementId>();
    a.argument = j.value("argument", "");
    if (j.contains("subgoals")) j.at("subgoals").get_to(a.subgoals);
}

}  // namespace groundwork
