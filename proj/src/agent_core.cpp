#include "groundwork/agent_core.hpp"

#include <algorithm>
#include <future>

#include "groundwork/diff_engine.hpp"
#include "groundwork/error.hpp"
#include "groundwork/page_model.hpp"
#include "groundwork/workspace.hpp"

namespace groundwork {

namespace {

constexpr std::string_view kChoicesPrefix = "CHOICES:";

std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

std::optional<std::vector<std::string>> parse_choices(const std::string& answer) {
    if (answer.rfind(kChoicesPrefix, 0) != 0) return std::nullopt;
    try {
        auto j = nlohmann::json::parse(answer.substr(kChoicesPrefix.size()));
        if (!j.is_array() || j.empty()) return std::nullopt;
        std::vector<std::string> options;
        for (const auto& o : j) {
            if (!o.is_string()) return std::nullopt;
            options.push_back(o.get<std::string>());
        }
        return options;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string join_answers(const std::vector<TaskRun>& runs) {
    std::string out;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i) out += "\n";
        out += runs[i].answer.value_or("");
    }
    return out;
}

}  // namespace

std::string_view to_string(ObservationMode m) { return m == ObservationMode::lazy ? "lazy" : "full"; }

ObservationMode observation_mode_from_string(std::string_view s) {
    if (s == "lazy") return ObservationMode::lazy;
    if (s == "full") return ObservationMode::full;
    throw Error(ErrorCode::validation, "unknown observation mode '" + std::string(s) + "'");
}

std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::running: return "running";
        case RunStatus::success: return "success";
        case RunStatus::failure: return "failure";
        case RunStatus::budget_exhausted: return "budget_exhausted";
    }
    return "running";
}

RunStatus run_status_from_string(std::string_view s) {
    for (auto v : {RunStatus::running, RunStatus::success, RunStatus::failure, RunStatus::budget_exhausted}) {
        if (to_string(v) == s) return v;
    }
    throw Error(ErrorCode::validation, "unknown run status '" + std::string(s) + "'");
}

void validate(const ScaffoldConfig& c) {
    if (c.n_samples < 1 || c.n_samples > 5) throw Error(ErrorCode::validation, "n_samples must be in 1..5");
    if (c.max_steps < 1) throw Error(ErrorCode::validation, "max_steps must be >= 1");
    if (c.budget.max_tokens == 0) throw Error(ErrorCode::validation, "budget must be positive");
    if (c.search_k == 0) throw Error(ErrorCode::validation, "search_k must be >= 1");
    if (c.temperature < 0.0) throw Error(ErrorCode::validation, "temperature must be >= 0");
}

Vote propose_action(const std::vector<Message>& messages, ModelClient& client, int n, double temperature) {
    if (n < 1) throw Error(ErrorCode::validation, "n must be >= 1");
    const auto samples = client.complete(messages, n, temperature);
    if (samples.size() != static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::model_backend, "model returned " + std::to_string(samples.size()) +
                                                  " completions for n=" + std::to_string(n));
    }
    struct Group {
        ParsedOutput first;
        int count = 0;
    };
    std::vector<std::pair<std::string, Group>> groups;  // in order of first appearance
    Vote vote;
    for (const auto& text : samples) {
        ParsedOutput parsed;
        try {
            parsed = parse_action(text);
            validate(parsed.action);
        } catch (const Error&) {
            ++vote.discarded;
            continue;
        }
        const std::string key = canonicalize(parsed.action);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, Group{std::move(parsed), 1}});
        } else {
            ++it->second.count;
        }
    }
    if (groups.empty()) {
        throw Error(ErrorCode::all_samples_malformed, "none of " + std::to_string(n) + " samples parsed");
    }
    const Group* best = &groups.front().second;
    for (const auto& [key, g] : groups) {
        vote.tally[key] = g.count;
        if (g.count > best->count) best = &g;
    }
    vote.action = best->first.action;
    vote.thought = best->first.thought;
    return vote;
}

Vote propose_action(const std::string& context, ModelClient& client, int n, double temperature) {
    return propose_action(std::vector<Message>{{"user", context}}, client, n, temperature);
}

std::string system_prompt(const std::string& instruction) {
    std::string task = instruction;
    std::replace(task.begin(), task.end(), '\n', ' ');
    return "You operate a web browser through its accessibility tree. Each element is shown as\n"
           "`[id] role 'name' text`. Only elements inside the viewport are listed unless you ask\n"
           "for the full tree. Think briefly, then emit exactly one line:\n"
           "ACTION: kind(args)\n"
           "Kinds: click(id), type_text(id, \"text\"), scroll_into(id), select_option(id, \"label\"),\n"
           "navigate(\"url\"), go_back(), request_full_tree(), search_workspace(\"query\"),\n"
           "decompose(\"subgoal\", \"subgoal\", ...), answer(\"text\").\n"
           "search_workspace looks up the user's task board, wiki and timeline.\n"
           "Task: " +
           task + "\n";
}

std::vector<TaskRun> spawn_subagents(const std::vector<std::string>& subgoals, const EnvFactory& env_factory,
                                     const Workspace* workspace, const ScaffoldConfig& config,
                                     ModelClient& client) {
    if (subgoals.size() < 2) throw Error(ErrorCode::validation, "decomposition needs at least 2 subgoals");
    if (!env_factory) throw Error(ErrorCode::validation, "sub-agents need an environment factory");
    RunHooks hooks;
    hooks.env_factory = env_factory;
    auto one = [&](std::size_t i) {
        auto env = env_factory();
        RunHooks h = hooks;
        h.task_id = "sub-" + std::to_string(i);
        return run_task(subgoals[i], *env, workspace, config, client, h, 1);
    };
    std::vector<TaskRun> runs;
    if (config.parallel_subagents) {
        std::vector<std::future<TaskRun>> futures;
        for (std::size_t i = 0; i < subgoals.size(); ++i) futures.push_back(std::async(std::launch::async, one, i));
        for (auto& f : futures) runs.push_back(f.get());
    } else {
        for (std::size_t i = 0; i < subgoals.size(); ++i) runs.push_back(one(i));
    }
    return runs;
}

TaskRun run_task(const std::string& instruction, Environment& env, const Workspace* workspace,
                 const ScaffoldConfig& config, ModelClient& client, const RunHooks& hooks, int depth) {
    validate(config);
    TaskRun run;
    run.task_id = hooks.task_id;
    run.instruction = instruction;
    const std::string system = system_prompt(instruction);

    std::optional<AXSnapshot> prev;
    bool full_next = false;

    for (int i = 0; i < config.max_steps && run.status == RunStatus::running; ++i) {
        if (env.goal_reached()) {
            run.status = RunStatus::success;
            break;
        }
        const AXSnapshot current = env.observe();
        std::string diff = prev ? strip_trailing_newlines(render_verbal(tree_diff(*prev, current))) : "(no changes)";
        const bool full = config.observation_mode == ObservationMode::full || full_next;
        full_next = false;

        Step step;
        step.index = run.steps.size();
        step.observation_full = full ? render_full(current) : render_viewport(current);
        step.diff_from_prev = diff;

        std::string context;
        try {
            context = compose_context(run.steps, step.observation_full, step.diff_from_prev, config.budget,
                                      config.history_mode);
        } catch (const Error& e) {
            step.result_note = e.what();
            run.steps.push_back(std::move(step));
            run.status = RunStatus::failure;
            break;
        }
        if (hooks.on_context) hooks.on_context(step.index, context);

        Vote vote;
        try {
            vote = propose_action({{"system", system}, {"user", context}}, client, config.n_samples,
                                  config.temperature);
        } catch (const Error& e) {
            step.result_note = e.what();
            run.steps.push_back(std::move(step));
            if (e.code() != ErrorCode::all_samples_malformed) run.status = RunStatus::failure;
            if (hooks.on_step) hooks.on_step(run);
            prev = current;
            continue;
        }
        step.thought = vote.thought;
        step.action = vote.action;
        const Action& action = vote.action;

        if (is_environment_action(action.kind)) {
            try {
                step.result_note = env.step(action).result_note;
            } catch (const Error& e) {
                step.result_note = e.what();
            } catch (const std::exception& e) {
                step.result_note = std::string("environment failure: ") + e.what();
                run.status = RunStatus::failure;
            }
        } else {
            switch (action.kind) {
                case ActionKind::request_full_tree:
                    full_next = true;
                    step.result_note = "full tree requested";
                    break;
                case ActionKind::search_workspace:
                    if (workspace) {
                        step.result_note = strip_trailing_newlines(render_search_results(
                            action.argument, workspace->search(action.argument, config.search_k), *workspace));
                    } else {
                        step.result_note = "no workspace attached";
                    }
                    break;
                case ActionKind::decompose:
                    if (!config.decomposition_enabled || depth >= 1 || !hooks.env_factory) {
                        step.result_note = std::string(to_string(ErrorCode::malformed_action)) +
                                           ": decomposition is not available here";
                        break;
                    }
                    run.sub_runs =
                        spawn_subagents(action.subgoals, hooks.env_factory, workspace, config, client);
                    for (std::size_t k = 0; k < run.sub_runs.size(); ++k) {
                        run.sub_runs[k].task_id =
                            (run.task_id.empty() ? std::string("run") : run.task_id) + "/sub-" + std::to_string(k);
                    }
                    run.answer = join_answers(run.sub_runs);
                    run.status = std::all_of(run.sub_runs.begin(), run.sub_runs.end(),
                                             [](const TaskRun& r) { return r.status == RunStatus::success; })
                                     ? RunStatus::success
                                     : RunStatus::failure;
                    step.result_note = std::to_string(run.sub_runs.size()) + " sub-agents finished";
                    break;
                case ActionKind::answer: {
                    auto options = parse_choices(action.argument);
                    if (options && hooks.on_choices) {
                        if (auto picked = hooks.on_choices(*options)) {
                            step.result_note = "User selected: " + *picked;
                            break;
                        }
                    }
                    run.answer = action.argument;
                    const auto verdict = env.check_answer(action.argument);
                    run.status = verdict.value_or(true) ? RunStatus::success : RunStatus::failure;
                    step.result_note = "answered";
                    break;
                }
                default: break;
            }
        }
        run.steps.push_back(std::move(step));
        if (hooks.on_step) hooks.on_step(run);
        prev = current;
    }
    if (run.status == RunStatus::running) {
        run.status = env.goal_reached() ? RunStatus::success : RunStatus::budget_exhausted;
    }
    return run;
}

void to_json(nlohmann::json& j, const ScaffoldConfig& c) {
    j = {{"n_samples", c.n_samples},
         {"max_steps", c.max_steps},
         {"observation_mode", to_string(c.observation_mode)},
         {"history_mode", to_string(c.history_mode)},
         {"budget", c.budget.max_tokens},
         {"decomposition_enabled", c.decomposition_enabled},
         {"temperature", c.temperature},
         {"parallel_subagents", c.parallel_subagents},
         {"search_k", c.search_k}};
}

void apply_overrides(ScaffoldConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::validation, "config overrides must be an object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "n_samples") c.n_samples = value.get<int>();
            else if (key == "max_steps") c.max_steps = value.get<int>();
            else if (key == "observation_mode") c.observation_mode = observation_mode_from_string(value.get<std::string>());
            else if (key == "history_mode") c.history_mode = history_mode_from_string(value.get<std::string>());
            else if (key == "budget") c.budget.max_tokens = value.get<std::size_t>();
            else if (key == "decomposition_enabled") c.decomposition_enabled = value.get<bool>();
            else if (key == "temperature") c.temperature = value.get<double>();
            else if (key == "parallel_subagents") c.parallel_subagents = value.get<bool>();
            else if (key == "search_k") c.search_k = value.get<std::size_t>();
            else throw Error(ErrorCode::validation, "unknown config field '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::validation, std::string("bad config override: ") + e.what());
    }
    validate(c);
}

void to_json(nlohmann::json& j, const TaskRun& r) {
    j = {{"task_id", r.task_id},
         {"instruction", r.instruction},
         {"steps", r.steps},
         {"status", to_string(r.status)},
         {"answer", r.answer ? nlohmann::json(*r.answer) : nlohmann::json(nullptr)},
         {"sub_runs", r.sub_runs}};
}

void from_json(const nlohmann::json& j, TaskRun& r) {
    r = TaskRun{};
    r.task_id = j.value("task_id", "");
    r.instruction = j.value("instruction", "");
    j.at("steps").get_to(r.steps);
    r.status = run_status_from_string(j.at("status").get<std::string>());
    if (j.contains("answer") && !j["answer"].is_null()) r.answer = j["answer"].get<std::string>();
    if (j.contains("sub_runs")) j["sub_runs"].get_to(r.sub_runs);
}

}  // namespace groundwork
