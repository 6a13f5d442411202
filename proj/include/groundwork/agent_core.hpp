#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundwork/action_space.hpp"
#include "groundwork/environment.hpp"
#include "groundwork/history.hpp"
#include "groundwork/model_client.hpp"

namespace groundwork {

class Workspace;

enum class ObservationMode { lazy, full };
enum class RunStatus { running, success, failure, budget_exhausted };

std::string_view to_string(ObservationMode m);
ObservationMode observation_mode_from_string(std::string_view s);
std::string_view to_string(RunStatus s);
RunStatus run_status_from_string(std::string_view s);

struct ScaffoldConfig {
    int n_samples = 5;
    int max_steps = 30;
    ObservationMode observation_mode = ObservationMode::lazy;
    HistoryMode history_mode = HistoryMode::diff_history;
    ContextBudget budget;
    bool decomposition_enabled = true;
    double temperature = 0.7;
    bool parallel_subagents = true;
    std::size_t search_k = 5;
};

/// Throws ValidationError unless 1 <= n_samples <= 5 and max_steps >= 1.
void validate(const ScaffoldConfig& config);

struct TaskRun {
    std::string task_id;
    std::string instruction;
    std::vector<Step> steps;
    RunStatus status = RunStatus::running;
    std::optional<std::string> answer;
    std::vector<TaskRun> sub_runs;

    bool operator==(const TaskRun&) const = default;
};

struct Vote {
    Action action;
    std::string thought;
    /// Canonical string -> number of samples, for every parsed group.
    std::map<std::string, int> tally;
    int discarded = 0;
};

/// Samples n completions and returns the plurality action. Ties go to the
/// group whose first member was sampled earliest. Unparseable samples are
/// dropped; if none parse, throws AllSamplesMalformed.
Vote propose_action(const std::vector<Message>& messages, ModelClient& client, int n,
                    double temperature = 0.7);
Vote propose_action(const std::string& context, ModelClient& client, int n, double temperature = 0.7);

/// The system message every run starts with; the instruction appears on a
/// line of its own as `Task: <instruction>`.
std::string system_prompt(const std::string& instruction);

struct RunHooks {
    /// Fresh environment per sub-agent; decomposition is refused without it.
    EnvFactory env_factory;
    /// Called when the model answers `CHOICES: [...]`. Returns the chosen
    /// option, or nullopt to treat the answer as final.
    std::function<std::optional<std::string>(const std::vector<std::string>&)> on_choices;
    /// Sees every composed user context before sampling.
    std::function<void(std::size_t step, const std::string& context)> on_context;
    /// Called after each step is appended.
    std::function<void(const TaskRun&)> on_step;
    std::string task_id;
};

/// The observe / compose / vote / dispatch loop.
TaskRun run_task(const std::string& instruction, Environment& env, const Workspace* workspace,
                 const ScaffoldConfig& config, ModelClient& client, const RunHooks& hooks = {},
                 int depth = 0);

/// One sub-run per subgoal, each with its own environment and empty history.
/// Runs concurrently when config.parallel_subagents is set; results are the
/// same either way.
std::vector<TaskRun> spawn_subagents(const std::vector<std::string>& subgoals, const EnvFactory& env_factory,
                                     const Workspace* workspace, const ScaffoldConfig& config,
                                     ModelClient& client);

void to_json(nlohmann::json& j, const ScaffoldConfig& c);
/// Applies the fields present in `j` on top of `c`.
void apply_overrides(ScaffoldConfig& c, const nlohmann::json& j);
void to_json(nlohmann::json& j, const TaskRun& r);
void from_json(const nlohmann::json& j, TaskRun& r);

}  // namespace groundwork
