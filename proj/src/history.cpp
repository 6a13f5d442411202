#include "groundwork/history.hpp"

#include <sstream>

#include "groundwork/error.hpp"

namespace groundwork {

namespace {

void append_block(std::string& out, std::string_view label, std::string_view body) {
    out += label;
    out += '\n';
    out += body;
    if (!body.empty() && body.back() != '\n') out += '\n';
}

std::string render_step(const Step& s, HistoryMode mode) {
    std::string out = "## Step " + std::to_string(s.index) + "\n";
    if (mode == HistoryMode::full_history || s.index == 0) {
        append_block(out, "Observation:", s.observation_full);
    } else {
        append_block(out, "Changes:", s.diff_from_prev);
    }
    if (!s.thought.empty()) out += "Thought: " + s.thought + "\n";
    out += "Action: " + (s.action ? format_call(*s.action) : std::string("(none)")) + "\n";
    if (!s.result_note.empty()) out += "Result: " + s.result_note + "\n";
    return out;
}

std::string render_current(std::string_view obs, std::string_view diff) {
    std::string out;
    append_block(out, "## Current observation", obs);
    append_block(out, "## Changes since previous step", diff);
    return out;
}

}  // namespace

std::string_view to_string(HistoryMode mode) {
    return mode == HistoryMode::diff_history ? "diff" : "full";
}

HistoryMode history_mode_from_string(std::string_view s) {
    if (s == "diff" || s == "diff_history") return HistoryMode::diff_history;
    if (s == "full" || s == "full_history") return HistoryMode::full_history;
    throw Error(ErrorCode::validation, "unknown history mode '" + std::string(s) + "'");
}

std::size_t token_count(std::string_view text) {
    std::size_t chars = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++chars;
    }
    return (chars + 3) / 4;
}

std::string compose_context(const std::vector<Step>& steps, std::string_view current_obs,
                            std::string_view current_diff, const ContextBudget& budget,
                            HistoryMode mode) {
    if (budget.max_tokens == 0) throw Error(ErrorCode::validation, "max_tokens must be positive");
    const std::string current = render_current(current_obs, current_diff);
    if (token_count(current) > budget.max_tokens) {
        throw Error(ErrorCode::budget_too_small,
                    "current observation needs " + std::to_string(token_count(current)) +
                        " tokens, budget is " + std::to_string(budget.max_tokens));
    }

    std::vector<std::string> rendered;
    rendered.reserve(steps.size());
    for (const auto& s : steps) rendered.push_back(render_step(s, mode));

    // Suffix sums of code-point counts give the exact size for every elision count.
    auto chars_of = [](std::string_view t) {
        std::size_t n = 0;
        for (unsigned char c : t) {
            if ((c & 0xC0) != 0x80) ++n;
        }
        return n;
    };
    std::vector<std::size_t> suffix(rendered.size() + 1, 0);
    for (std::size_t i = rendered.size(); i-- > 0;) suffix[i] = suffix[i + 1] + chars_of(rendered[i]);
    const std::size_t current_chars = chars_of(current);

    for (std::size_t elided = 0; elided < rendered.size(); ++elided) {
        std::string marker =
            elided > 0 ? "[... " + std::to_string(elided) + " earlier steps elided ...]\n" : "";
        const std::size_t total = marker.size() + suffix[elided] + current_chars;
        if ((total + 3) / 4 > budget.max_tokens) continue;
        std::string out = std::move(marker);
        for (std::size_t i = elided; i < rendered.size(); ++i) out += rendered[i];
        out += current;
        return out;
    }
    if (!rendered.empty()) {
        std::string out = "[... " + std::to_string(rendered.size()) + " earlier steps elided ...]\n";
        out += current;
        if (token_count(out) <= budget.max_tokens) return out;
    }
    return current;
}

void to_json(nlohmann::json& j, const Step& s) {
    j = {{"index", s.index},
         {"thought", s.thought},
         {"action", s.action ? nlohmann::json(*s.action) : nlohmann::json(nullptr)},
         {"observation_full", s.observation_full},
         {"diff_from_prev", s.diff_from_prev},
         {"result_note", s.result_note}};
}

void from_json(const nlohmann::json& j, Step& s) {
    s = Step{};
    j.at("index").get_to(s.index);
    s.thought = j.value("thought", "");
    if (j.contains("action") && !j["action"].is_null()) s.action = j["action"].get<Action>();
    s.observation_full = j.value("observation_full", "");
    s.diff_from_prev = j.value("diff_from_prev", "");
    s.result_note = j.value("result_note", "");
}

std::string steps_to_ndjson(const std::vector<Step>& steps) {
    std::string out;
    for (const auto& s : steps) {
        out += nlohmann::json(s).dump();
        out += '\n';
    }
    return out;
}

std::vector<Step> steps_from_ndjson(std::string_view text) {
    std::vector<Step> steps;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        steps.push_back(nlohmann::json::parse(line).get<Step>());
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].index != i) throw Error(ErrorCode::validation, "step indices must be contiguous from 0");
    }
    return steps;
}

}  // namespace groundwork
