#include "groundwork/model_client.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "groundwork/error.hpp"
#include "groundwork/hashing.hpp"

namespace groundwork {

void to_json(nlohmann::json& j, const Message& m) { j = {{"role", m.role}, {"content", m.content}}; }

void from_json(const nlohmann::json& j, Message& m) {
    m.role = j.at("role").get<std::string>();
    m.content = j.at("content").get<std::string>();
}

ScriptedModelClient::ScriptedModelClient(nlohmann::json fixture) : fixture_(std::move(fixture)) {
    if (!fixture_.is_object()) throw Error(ErrorCode::validation, "scripted fixture must be an object");
    if (!fixture_.contains("completions")) fixture_["completions"] = nlohmann::json::object();
    if (!fixture_.contains("tasks")) fixture_["tasks"] = nlohmann::json::object();
    if (!fixture_.contains("default")) fixture_["default"] = nlohmann::json::array();
    auto check_list = [](const nlohmann::json& list) {
        if (!list.is_array()) throw Error(ErrorCode::validation, "scripted completions must be lists");
        for (const auto& e : list) {
            if (e.is_string()) continue;
            if (!e.is_array() || e.empty()) throw Error(ErrorCode::validation, "bad scripted entry");
            for (const auto& s : e) {
                if (!s.is_string()) throw Error(ErrorCode::validation, "bad scripted entry");
            }
        }
    };
    for (const auto& [_, list] : fixture_["completions"].items()) check_list(list);
    for (const auto& [_, list] : fixture_["tasks"].items()) check_list(list);
    check_list(fixture_["default"]);
}

std::unique_ptr<ScriptedModelClient> ScriptedModelClient::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path);
    try {
        return std::make_unique<ScriptedModelClient>(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::validation, path + ": " + e.what());
    }
}

std::unique_ptr<ScriptedModelClient> ScriptedModelClient::sequence(std::vector<std::string> completions) {
    return std::make_unique<ScriptedModelClient>(nlohmann::json{{"default", completions}});
}

std::string ScriptedModelClient::fingerprint(const std::vector<Message>& messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == "user") return sha256_hex(it->content);
    }
    return sha256_hex("");
}

std::vector<std::string> ScriptedModelClient::take(const nlohmann::json& list, std::size_t& cursor, int n) {
    if (list.empty()) throw Error(ErrorCode::model_backend, "scripted model has no completion for this prompt");
    const auto& entry = list[std::min(cursor, list.size() - 1)];
    ++cursor;
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(entry.is_string() ? entry.get<std::string>()
                                        : entry[static_cast<std::size_t>(i) % entry.size()].get<std::string>());
    }
    return out;
}

std::vector<std::string> ScriptedModelClient::complete(const std::vector<Message>& messages, int n, double) {
    if (n < 1) throw Error(ErrorCode::validation, "n must be >= 1");
    const std::string fp = fingerprint(messages);
    const std::string task = task_line(messages);
    std::lock_guard lock(mu_);
    const auto& by_fp = fixture_["completions"];
    if (by_fp.contains(fp)) return take(by_fp[fp], cursors_["fp:" + fp], n);
    const auto& by_task = fixture_["tasks"];
    if (by_task.contains(task)) return take(by_task[task], cursors_["task:" + task], n);
    return take(fixture_["default"], cursors_["default:" + task], n);
}

std::string task_line(const std::vector<Message>& messages) {
    for (const auto& m : messages) {
        if (m.role != "system") continue;
        std::size_t pos = 0;
        while (pos < m.content.size()) {
            auto end = m.content.find('\n', pos);
            if (end == std::string::npos) end = m.content.size();
            std::string_view line(m.content.data() + pos, end - pos);
            if (line.substr(0, 6) == "Task: ") return std::string(line.substr(6));
            pos = end + 1;
        }
        break;
    }
    return {};
}

HttpModelClient::HttpModelClient(std::string url, int timeout_seconds) : timeout_seconds_(timeout_seconds) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
        throw Error(ErrorCode::validation, "model URL must start with http:// (got '" + url + "')");
    }
    const auto slash = url.find('/', scheme + 3);
    origin_ = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

std::vector<std::string> HttpModelClient::complete(const std::vector<Message>& messages, int n,
                                                   double temperature) {
    if (n < 1) throw Error(ErrorCode::validation, "n must be >= 1");
    httplib::Client cli(origin_);
    cli.set_read_timeout(timeout_seconds_, 0);
    cli.set_write_timeout(timeout_seconds_, 0);
    const nlohmann::json body = {{"messages", messages}, {"n", n}, {"temperature", temperature}};
    auto res = cli.Post(path_, body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::model_backend, "model request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error(ErrorCode::model_backend, "model returned HTTP " + std::to_string(res->status));
    }
    std::vector<std::string> out;
    try {
        const auto reply = nlohmann::json::parse(res->body);
        for (const auto& c : reply.at("choices")) out.push_back(c.at("message").at("content").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::model_backend, std::string("unreadable model response: ") + e.what());
    }
    if (out.size() != static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::model_backend,
                    "asked for " + std::to_string(n) + " completions, got " + std::to_string(out.size()));
    }
    return out;
}

BinaryVoteModel::BinaryVoteModel(double p, std::uint64_t seed, std::string correct, std::string incorrect)
    : p_(p), correct_(std::move(correct)), incorrect_(std::move(incorrect)), rng_(seed) {
    if (p < 0.0 || p > 1.0) throw Error(ErrorCode::validation, "p must be in [0, 1]");
}

std::vector<std::string> BinaryVoteModel::complete(const std::vector<Message>&, int n, double) {
    std::bernoulli_distribution coin(p_);
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(coin(rng_) ? correct_ : incorrect_);
    return out;
}

std::shared_ptr<ModelClient> model_client_from_env(std::shared_ptr<ModelClient> fallback) {
    if (const char* url = std::getenv("AGENT_MODEL_URL"); url && *url) {
        return std::make_shared<HttpModelClient>(url);
    }
    return fallback;
}

}  // namespace groundwork
