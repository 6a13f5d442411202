#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "groundwork/model_client.hpp"
#include "groundwork/sim_env.hpp"
#include "groundwork/workspace.hpp"

namespace groundwork {

/// Stochastic stand-in for a reasoning model on the simulated sites.
///
/// It recognises the task from the `Task:` line, replays the task's solution
/// from wherever the history shows it has got to, and asks for the full tree
/// when the next target is not in view. Its first move is always
/// `search_workspace(<instruction>)`. Each sample slips with probability
/// `slip_prob` into a premature `answer("done")`. When a search result is
/// tagged with the task's category or its site's host, the slip
/// probability is scaled by the factor for that result's format tag.
///
/// Draws are keyed by (seed, task, progress, step, sample), so runs are
/// reproducible and independent of call order.
struct PolicyParams {
    std::uint64_t seed = 0;
    double slip_prob = 0.08;
    std::map<KnowledgeFormat, double> knowledge_factor{
        {KnowledgeFormat::trajectory, 0.0}, {KnowledgeFormat::script, 0.0}, {KnowledgeFormat::insight, 0.25}};
    /// Factor for a category hit whose tags carry no format.
    double untyped_factor = 0.0;
};

class TaskPolicyModel final : public ModelClient {
public:
    TaskPolicyModel(const sim::Catalog& catalog, PolicyParams params);

    std::vector<std::string> complete(const std::vector<Message>& messages, int n,
                                      double temperature) override;

private:
    std::vector<sim::TaskSpec> tasks_;
    std::map<std::string, std::string> hosts_;  // site_id -> host
    PolicyParams params_;
};

}  // namespace groundwork
