#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "groundwork/action_space.hpp"

namespace groundwork {

/// One executed step of the ReAct loop.
struct Step {
    std::size_t index = 0;
    std::string thought;
    std::optional<Action> action;  // empty when no sample could be parsed
    std::string observation_full;  // what the model saw at this step
    std::string diff_from_prev;    // "(no changes)" at step 0
    std::string result_note;

    bool operator==(const Step&) const = default;
};

enum class HistoryMode { diff_history, full_history };

std::string_view to_string(HistoryMode mode);
HistoryMode history_mode_from_string(std::string_view s);

/// ceil(characters / 4), counting UTF-8 code points.
std::size_t token_count(std::string_view text);

struct ContextBudget {
    std::size_t max_tokens = 32000;
};

/// Builds the user-turn context: past steps, then the current observation
/// and diff. In diff_history mode past observations are replaced by their
/// verbal diffs (step 0 keeps its initial observation). Over budget, whole
/// steps are elided oldest-first. Throws BudgetTooSmall when the current
/// observation alone does not fit.
std::string compose_context(const std::vector<Step>& steps, std::string_view current_obs,
                            std::string_view current_diff, const ContextBudget& budget,
                            HistoryMode mode);

void to_json(nlohmann::json& j, const Step& s);
void from_json(const nlohmann::json& j, Step& s);

/// Trajectory dumps: one Step per line.
std::string steps_to_ndjson(const std::vector<Step>& steps);
std::vector<Step> steps_from_ndjson(std::string_view text);

}  // namespace groundwork
