#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace groundwork {

struct Message {
    std::string role;  // system, user or assistant
    std::string content;

    bool operator==(const Message&) const = default;
};

/// The reasoning model behind the agent. Implementations must tolerate
/// concurrent calls from sub-agents.
class ModelClient {
public:
    virtual ~ModelClient() = default;

    /// Exactly `n` completion texts.
    virtual std::vector<std::string> complete(const std::vector<Message>& messages, int n,
                                              double temperature) = 0;
};

/// Canned completions keyed by the SHA-256 of the last user message.
///
/// Fixture layout:
///
///     {"completions": {"<fingerprint>": [entry, ...]},
///      "tasks": {"<instruction>": [entry, ...]},
///      "default": [entry, ...]}
///
/// Lookup order is fingerprint, then the `Task:` line of the system
/// message, then the default list. An entry is either one completion
/// (repeated n times) or a list of completions (cycled to length n). Every
/// list keeps its own cursor per instruction, so concurrent sub-agents see
/// the same sequence regardless of scheduling. Once a list runs out its last
/// entry repeats.
class ScriptedModelClient final : public ModelClient {
public:
    explicit ScriptedModelClient(nlohmann::json fixture);
    static std::unique_ptr<ScriptedModelClient> from_file(const std::string& path);
    /// Convenience: a default list only.
    static std::unique_ptr<ScriptedModelClient> sequence(std::vector<std::string> completions);

    std::vector<std::string> complete(const std::vector<Message>& messages, int n,
                                      double temperature) override;

    static std::string fingerprint(const std::vector<Message>& messages);

private:
    std::vector<std::string> take(const nlohmann::json& list, std::size_t& cursor, int n);

    nlohmann::json fixture_;
    std::map<std::string, std::size_t> cursors_;
    std::mutex mu_;
};

/// POSTs `{messages, n, temperature}` to `url` and reads
/// `choices[i].message.content`. Plain HTTP only.
class HttpModelClient final : public ModelClient {
public:
    explicit HttpModelClient(std::string url, int timeout_seconds = 120);

    std::vector<std::string> complete(const std::vector<Message>& messages, int n,
                                      double temperature) override;

private:
    std::string origin_;
    std::string path_;
    int timeout_seconds_;
};

/// Binary correct/incorrect sampler: each completion is `correct` with
/// probability p, otherwise the single shared `incorrect` action.
class BinaryVoteModel final : public ModelClient {
public:
    BinaryVoteModel(double p, std::uint64_t seed, std::string correct = "ACTION: click(1)",
                    std::string incorrect = "ACTION: click(2)");

    std::vector<std::string> complete(const std::vector<Message>& messages, int n,
                                      double temperature) override;

    const std::string& correct() const { return correct_; }

private:
    double p_;
    std::string correct_;
    std::string incorrect_;
    std::mt19937_64 rng_;
    std::mutex mu_;
};

/// The instruction from the `Task: ` line of the first system message.
std::string task_line(const std::vector<Message>& messages);

/// HTTP backend when AGENT_MODEL_URL is set, otherwise `fallback`.
std::shared_ptr<ModelClient> model_client_from_env(std::shared_ptr<ModelClient> fallback);

void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);

}  // namespace groundwork
