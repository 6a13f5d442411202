#include "groundwork/policy_model.hpp"

#include <algorithm>
#include <sstream>

#include "groundwork/action_space.hpp"
#include "groundwork/hashing.hpp"

namespace groundwork {

namespace {

struct HistoryView {
    std::vector<std::string> calls;  // `Action:` lines of past steps, in order
    std::size_t steps = 0;
    std::string observation;
    std::vector<std::string> tag_lines;
};

HistoryView read_context(const std::string& context) {
    HistoryView v;
    std::istringstream in(context);
    std::string line;
    enum { history, observation, after } section = history;
    while (std::getline(in, line)) {
        if (line.rfind("## Step ", 0) == 0) {
            ++v.steps;
            section = history;
            continue;
        }
        if (line == "## Current observation") {
            section = observation;
            continue;
        }
        if (line == "## Changes since previous step") {
            section = after;
            continue;
        }
        if (section == observation) {
            v.observation += line;
            v.observation += '\n';
        } else if (section == history) {
            if (line.rfind("Action: ", 0) == 0) v.calls.push_back(line.substr(8));
            if (line.find(" tags: ") != std::string::npos) v.tag_lines.push_back(line);
        }
    }
    return v;
}

std::string last_user(const std::vector<Message>& messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == "user") return it->content;
    }
    return {};
}

}  // namespace

TaskPolicyModel::TaskPolicyModel(const sim::Catalog& catalog, PolicyParams params)
    : tasks_(catalog.tasks()), params_(std::move(params)) {
    for (const auto& t : tasks_) {
        if (hosts_.contains(t.site_id)) continue;
        std::string origin = catalog.site(t.site_id)->origin;
        const auto scheme = origin.find("://");
        if (scheme != std::string::npos) origin = origin.substr(scheme + 3);
        hosts_[t.site_id] = origin.substr(0, origin.find('/'));
    }
}

std::vector<std::string> TaskPolicyModel::complete(const std::vector<Message>& messages, int n,
                                                   double temperature) {
    const std::string instruction = task_line(messages);
    auto task = std::find_if(tasks_.begin(), tasks_.end(),
                             [&](const sim::TaskSpec& t) { return t.instruction == instruction; });
    if (task == tasks_.end()) {
        return std::vector<std::string>(static_cast<std::size_t>(n), "I do not know this task.\nACTION: answer(\"unknown task\")");
    }
    const HistoryView h = read_context(last_user(messages));

    const bool searched = std::any_of(h.calls.begin(), h.calls.end(),
                                      [](const std::string& c) { return c.rfind("search_workspace(", 0) == 0; });
    if (!searched) {
        const std::string a = "Check the workspace for anything relevant first.\n" +
                              format_action(Action::search_workspace(instruction));
        return std::vector<std::string>(static_cast<std::size_t>(n), a);
    }

    // Best knowledge factor among results tagged with the task's category.
    double factor = 1.0;
    for (const auto& line : h.tag_lines) {
        const auto tags = line.substr(line.find(" tags: ") + 7);
        std::vector<std::string> parts;
        std::stringstream ss(tags);
        for (std::string part; std::getline(ss, part, ',');) {
            part.erase(0, part.find_first_not_of(' '));
            part.erase(part.find_last_not_of(' ') + 1);
            parts.push_back(part);
        }
        const bool about_task = std::find(parts.begin(), parts.end(), task->category) != parts.end() ||
                                std::find(parts.begin(), parts.end(), hosts_[task->site_id]) != parts.end();
        if (!about_task) continue;
        double f = params_.untyped_factor;
        for (const auto& [format, value] : params_.knowledge_factor) {
            if (std::find(parts.begin(), parts.end(), std::string(to_string(format))) != parts.end()) f = value;
        }
        factor = std::min(factor, f);
    }

    // How far along the solution the environment actions in the history go.
    std::size_t progress = 0;
    for (const auto& call : h.calls) {
        if (progress < task->solution.size() && call == format_call(task->solution[progress])) ++progress;
    }
    const Action next = progress < task->solution.size() ? task->solution[progress] : Action::answer("done");

    std::string intended;
    if (next.target_id && h.observation.find("[" + std::to_string(*next.target_id) + "]") == std::string::npos &&
        (h.calls.empty() || h.calls.back() != "request_full_tree()")) {
        intended = "The element I need is not in view.\n" + format_action(Action::request_full_tree());
    } else {
        intended = "Next step of the procedure.\n" + format_action(next);
    }
    const std::string slip = "That should be enough.\n" + format_action(Action::answer("done"));
    const double p = params_.slip_prob * factor;

    std::vector<std::string> out;
    const std::string seed = std::to_string(params_.seed);
    const std::string prog = std::to_string(progress);
    const std::string steps = std::to_string(h.steps);
    for (int i = 0; i < n; ++i) {
        const std::string sample = std::to_string(temperature == 0.0 ? 0 : i);
        const double u = stable_uniform({seed, task->task_id, prog, steps, sample});
        out.push_back(u < p ? slip : intended);
    }
    return out;
}

}  // namespace groundwork
