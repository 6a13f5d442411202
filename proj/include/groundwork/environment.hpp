#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "groundwork/action_space.hpp"
#include "groundwork/page_model.hpp"

namespace groundwork {

struct StepResult {
    AXSnapshot snapshot;
    std::string result_note;
};

/// What the agent loop drives. Only environment actions (see
/// is_environment_action) are passed to `step`.
class Environment {
public:
    virtual ~Environment() = default;

    /// Latest snapshot without advancing the session.
    virtual AXSnapshot observe() const = 0;

    virtual StepResult step(const Action& action) = 0;

    /// State-only success predicate of the bound task, if it has one that
    /// does not depend on a final answer.
    virtual bool goal_reached() const { return false; }

    /// Whether `answer` completes the bound task; nullopt when the
    /// environment cannot judge answers.
    virtual std::optional<bool> check_answer(const std::string& answer) const {
        (void)answer;
        return std::nullopt;
    }
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

}  // namespace groundwork
