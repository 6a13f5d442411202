#include "groundwork/workspace.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "groundwork/error.hpp"
#include "groundwork/hashing.hpp"
#include "groundwork/pii.hpp"

namespace groundwork {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::validation, msg); }

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& values, const char* what) {
    for (auto v : values) {
        if (to_string(v) == s) return v;
    }
    invalid(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array kFormats{KnowledgeFormat::trajectory, KnowledgeFormat::script, KnowledgeFormat::insight};
constexpr std::array kStatuses{TaskStatus::not_started, TaskStatus::in_progress, TaskStatus::completed};
constexpr std::array kPriorities{Priority::low, Priority::medium, Priority::high};
constexpr std::array kProvenances{Provenance::user, Provenance::agent};
constexpr std::array kTypes{ArtifactType::task, ArtifactType::wiki, ArtifactType::timeline};
constexpr std::array kProposalStatuses{ProposalStatus::pending, ProposalStatus::approved,
                                       ProposalStatus::rejected};

std::int64_t system_now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string require_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) invalid(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
}

std::string opt_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    if (!j[key].is_string()) invalid(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
}

std::int64_t opt_int(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return 0;
    if (!j[key].is_number_integer()) invalid(std::string("field '") + key + "' must be an integer");
    return j[key].get<std::int64_t>();
}

std::vector<std::string> opt_strings(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    if (!j[key].is_array()) invalid(std::string("field '") + key + "' must be a list");
    std::vector<std::string> out;
    for (const auto& v : j[key]) {
        if (!v.is_string()) invalid(std::string("field '") + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

void check_artifact(const TaskItem& t) {
    if (t.title.empty()) invalid("task title must not be empty");
}

void check_artifact(const WikiPage& w) {
    if (w.title.empty()) invalid("wiki title must not be empty");
}

void check_artifact(const TimelineEntry& e) {
    if (e.duration_ms < 0) invalid("duration_ms must be >= 0");
    const auto& tax = activity_taxonomy();
    if (std::find(tax.begin(), tax.end(), e.tag) == tax.end()) invalid("tag '" + e.tag + "' not in taxonomy");
}

std::string artifact_prefix(ArtifactType t) {
    switch (t) {
        case ArtifactType::task: return "task";
        case ArtifactType::wiki: return "wiki";
        case ArtifactType::timeline: return "tl";
    }
    return "x";
}

bool utf8_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

// Byte-bounded cut that never splits a UTF-8 sequence.
std::string clip(const std::string& s, std::size_t from, std::size_t max_chars) {
    while (from > 0 && from < s.size() && utf8_continuation(s[from])) --from;
    std::string out;
    std::size_t chars = 0;
    for (std::size_t i = from; i < s.size(); ++i) {
        if (!utf8_continuation(s[i])) {
            if (chars == max_chars) break;
            ++chars;
        }
        out += s[i];
    }
    return out;
}

std::string lowercase(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

}  // namespace

std::string_view to_string(KnowledgeFormat f) {
    switch (f) {
        case KnowledgeFormat::trajectory: return "trajectory";
        case KnowledgeFormat::script: return "script";
        case KnowledgeFormat::insight: return "insight";
    }
    return "script";
}

std::string_view to_string(TaskStatus s) {
    switch (s) {
        case TaskStatus::not_started: return "not_started";
        case TaskStatus::in_progress: return "in_progress";
        case TaskStatus::completed: return "completed";
    }
    return "not_started";
}

std::string_view to_string(Priority p) {
    switch (p) {
        case Priority::low: return "low";
        case Priority::medium: return "medium";
        case Priority::high: return "high";
    }
    return "medium";
}

std::string_view to_string(Provenance p) { return p == Provenance::user ? "user" : "agent"; }

std::string_view to_string(ArtifactType t) {
    switch (t) {
        case ArtifactType::task: return "task";
        case ArtifactType::wiki: return "wiki";
        case ArtifactType::timeline: return "timeline";
    }
    return "task";
}

std::string_view to_string(ProposalStatus s) {
    switch (s) {
        case ProposalStatus::pending: return "pending";
        case ProposalStatus::approved: return "approved";
        case ProposalStatus::rejected: return "rejected";
    }
    return "pending";
}

KnowledgeFormat knowledge_format_from_string(std::string_view s) {
    return parse_enum(s, kFormats, "knowledge format");
}

ArtifactType artifact_type_from_string(std::string_view s) { return parse_enum(s, kTypes, "artifact type"); }

const std::vector<std::string>& activity_taxonomy() {
    static const std::vector<std::string> tax{"communication", "research",       "reporting",
                                              "development",   "administration", "other"};
    return tax;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80) {
            cur += static_cast<char>(std::tolower(u));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const TaskItem& t) {
    j = {{"id", t.id},
         {"title", t.title},
         {"description", t.description},
         {"status", to_string(t.status)},
         {"priority", to_string(t.priority)},
         {"notes", t.notes},
         {"provenance", to_string(t.provenance)},
         {"updated_ts", t.updated_ts}};
}

void from_json(const nlohmann::json& j, TaskItem& t) {
    if (!j.is_object()) invalid("task must be an object");
    t = TaskItem{};
    t.id = opt_string(j, "id");
    t.title = require_string(j, "title");
    t.description = opt_string(j, "description");
    if (j.contains("status")) t.status = parse_enum(opt_string(j, "status"), kStatuses, "task status");
    if (j.contains("priority")) t.priority = parse_enum(opt_string(j, "priority"), kPriorities, "priority");
    t.notes = opt_string(j, "notes");
    if (j.contains("provenance")) {
        t.provenance = parse_enum(opt_string(j, "provenance"), kProvenances, "provenance");
    }
    t.updated_ts = opt_int(j, "updated_ts");
}

void to_json(nlohmann::json& j, const WikiPage& w) {
    j = {{"id", w.id},
         {"title", w.title},
         {"body", w.body},
         {"tags", w.tags},
         {"source_segments", w.source_segments},
         {"provenance", to_string(w.provenance)},
         {"updated_ts", w.updated_ts}};
    j["format"] = w.format ? nlohmann::json(to_string(*w.format)) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, WikiPage& w) {
    if (!j.is_object()) invalid("wiki page must be an object");
    w = WikiPage{};
    w.id = opt_string(j, "id");
    w.title = require_string(j, "title");
    w.body = opt_string(j, "body");
    w.tags = opt_strings(j, "tags");
    if (j.contains("format") && !j["format"].is_null()) {
        w.format = knowledge_format_from_string(opt_string(j, "format"));
    }
    w.source_segments = opt_strings(j, "source_segments");
    if (j.contains("provenance")) {
        w.provenance = parse_enum(opt_string(j, "provenance"), kProvenances, "provenance");
    }
    w.updated_ts = opt_int(j, "updated_ts");
}

void to_json(nlohmann::json& j, const TimelineEntry& e) {
    j = {{"id", e.id},
         {"date", e.date},
         {"start_ts", e.start_ts},
         {"duration_ms", e.duration_ms},
         {"tag", e.tag},
         {"summary", e.summary},
         {"details", e.details},
         {"provenance", to_string(e.provenance)},
         {"updated_ts", e.updated_ts}};
}

void from_json(const nlohmann::json& j, TimelineEntry& e) {
    if (!j.is_object()) invalid("timeline entry must be an object");
    e = TimelineEntry{};
    e.id = opt_string(j, "id");
    e.date = opt_string(j, "date");
    e.start_ts = opt_int(j, "start_ts");
    e.duration_ms = opt_int(j, "duration_ms");
    e.tag = require_string(j, "tag");
    e.summary = opt_string(j, "summary");
    e.details = opt_string(j, "details");
    if (j.contains("provenance")) {
        e.provenance = parse_enum(opt_string(j, "provenance"), kProvenances, "provenance");
    }
    e.updated_ts = opt_int(j, "updated_ts");
}

void to_json(nlohmann::json& j, const ArtifactRef& r) { j = {{"type", to_string(r.type)}, {"id", r.id}}; }

void from_json(const nlohmann::json& j, ArtifactRef& r) {
    if (!j.is_object()) invalid("target must be an object");
    r.type = artifact_type_from_string(require_string(j, "type"));
    r.id = require_string(j, "id");
}

void to_json(nlohmann::json& j, const Proposal& p) {
    j = {{"id", p.id},
         {"target", p.target},
         {"change", p.change},
         {"rationale", p.rationale},
         {"status", to_string(p.status)},
         {"created_by", p.created_by},
         {"created_ts", p.created_ts}};
    j["decided_ts"] = p.decided_ts ? nlohmann::json(*p.decided_ts) : nlohmann::json(nullptr);
    j["applied_id"] = p.applied_id ? nlohmann::json(*p.applied_id) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Proposal& p) {
    if (!j.is_object()) invalid("proposal must be an object");
    p = Proposal{};
    p.id = opt_string(j, "id");
    p.target = j.at("target").get<ArtifactRef>();
    p.change = j.value("change", nlohmann::json::object());
    p.rationale = opt_string(j, "rationale");
    if (j.contains("status")) p.status = parse_enum(opt_string(j, "status"), kProposalStatuses, "proposal status");
    p.created_by = j.value("created_by", "agent");
    p.created_ts = opt_int(j, "created_ts");
    if (j.contains("decided_ts") && !j["decided_ts"].is_null()) p.decided_ts = j["decided_ts"].get<std::int64_t>();
    if (j.contains("applied_id") && !j["applied_id"].is_null()) p.applied_id = j["applied_id"].get<std::string>();
}

void to_json(nlohmann::json& j, const SearchHit& h) {
    j = {{"ref", h.ref},         {"title", h.title}, {"score", h.score},
         {"snippet", h.snippet}, {"tags", h.tags},   {"updated_ts", h.updated_ts}};
}

// ---------------------------------------------------------------------------
// Workspace

Workspace::Workspace(Clock clock) : clock_(clock ? std::move(clock) : Clock(system_now_ms)) {}

Workspace::Workspace(Workspace&& other) noexcept {
    std::unique_lock lock(other.mu_);
    clock_ = std::move(other.clock_);
    state_ = std::move(other.state_);
    dir_ = std::move(other.dir_);
}

Workspace& Workspace::operator=(Workspace&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mu_, other.mu_);
        clock_ = std::move(other.clock_);
        state_ = std::move(other.state_);
        dir_ = std::move(other.dir_);
    }
    return *this;
}

Workspace Workspace::clone() const {
    std::shared_lock lock(mu_);
    Workspace copy(clock_);
    copy.state_ = state_;
    return copy;
}

bool Workspace::operator==(const Workspace& other) const {
    if (this == &other) return true;
    std::shared_lock a(mu_);
    std::shared_lock b(other.mu_);
    return state_ == other.state_;
}

std::int64_t Workspace::next_ts() {
    state_.last_ts = std::max(clock_(), state_.last_ts + 1);
    return state_.last_ts;
}

std::string Workspace::next_id(const std::string& prefix) {
    return prefix + "-" + std::to_string(++state_.counters[prefix]);
}

bool Workspace::exists(const ArtifactRef& ref) const {
    switch (ref.type) {
        case ArtifactType::task: return state_.tasks.contains(ref.id);
        case ArtifactType::wiki: return state_.wiki.contains(ref.id);
        case ArtifactType::timeline: return state_.timeline.contains(ref.id);
    }
    return false;
}

std::string Workspace::put(ArtifactType type, nlohmann::json artifact, Provenance who) {
    auto finish = [&](auto& map, auto value) {
        check_artifact(value);
        if (value.id.empty() || value.id == "new") value.id = next_id(artifact_prefix(type));
        value.provenance = who;
        value.updated_ts = next_ts();
        std::string id = value.id;
        log({{"op", "put"}, {"type", to_string(type)}, {"artifact", value}});
        map[id] = std::move(value);
        return id;
    };
    switch (type) {
        case ArtifactType::task: return finish(state_.tasks, artifact.get<TaskItem>());
        case ArtifactType::wiki: {
            auto page = artifact.get<WikiPage>();
            if (who == Provenance::agent) {
                page.title = mask_pii(page.title).text;
                page.body = mask_pii(page.body).text;
            }
            return finish(state_.wiki, std::move(page));
        }
        case ArtifactType::timeline: return finish(state_.timeline, artifact.get<TimelineEntry>());
    }
    invalid("unknown artifact type");
}

std::string Workspace::upsert_user(TaskItem item) {
    return upsert_user(ArtifactType::task, nlohmann::json(item));
}

std::string Workspace::upsert_user(WikiPage page) {
    return upsert_user(ArtifactType::wiki, nlohmann::json(page));
}

std::string Workspace::upsert_user(TimelineEntry entry) {
    return upsert_user(ArtifactType::timeline, nlohmann::json(entry));
}

std::string Workspace::upsert_user(ArtifactType type, const nlohmann::json& artifact) {
    std::unique_lock lock(mu_);
    return put(type, artifact, Provenance::user);
}

nlohmann::json Workspace::patch_user(const ArtifactRef& ref, const nlohmann::json& fields) {
    if (!fields.is_object()) invalid("patch must be an object");
    if (fields.contains("id")) invalid("id cannot be patched");
    std::unique_lock lock(mu_);
    if (!exists(ref)) throw Error(ErrorCode::not_found, std::string(to_string(ref.type)) + " '" + ref.id + "'");
    nlohmann::json current;
    switch (ref.type) {
        case ArtifactType::task: current = state_.tasks.at(ref.id); break;
        case ArtifactType::wiki: current = state_.wiki.at(ref.id); break;
        case ArtifactType::timeline: current = state_.timeline.at(ref.id); break;
    }
    current.merge_patch(fields);
    put(ref.type, current, Provenance::user);
    switch (ref.type) {
        case ArtifactType::task: return state_.tasks.at(ref.id);
        case ArtifactType::wiki: return state_.wiki.at(ref.id);
        case ArtifactType::timeline: return state_.timeline.at(ref.id);
    }
    return nullptr;
}

void Workspace::remove_user(const ArtifactRef& ref) {
    std::unique_lock lock(mu_);
    if (!exists(ref)) throw Error(ErrorCode::not_found, std::string(to_string(ref.type)) + " '" + ref.id + "'");
    switch (ref.type) {
        case ArtifactType::task: state_.tasks.erase(ref.id); break;
        case ArtifactType::wiki: state_.wiki.erase(ref.id); break;
        case ArtifactType::timeline: state_.timeline.erase(ref.id); break;
    }
    log({{"op", "delete"}, {"type", to_string(ref.type)}, {"id", ref.id}});
}

std::string Workspace::propose(Proposal p) {
    if (!p.change.is_object()) invalid("proposal change must be an object");
    std::unique_lock lock(mu_);
    // Dry-run the change so invalid proposals are refused up front.
    nlohmann::json trial;
    if (p.target.id == "new") {
        trial = p.change;
    } else {
        if (p.change.contains("id")) invalid("a field delta cannot change the id");
        if (!exists(p.target)) {
            throw Error(ErrorCode::target_missing, std::string(to_string(p.target.type)) + " '" + p.target.id + "'");
        }
        switch (p.target.type) {
            case ArtifactType::task: trial = state_.tasks.at(p.target.id); break;
            case ArtifactType::wiki: trial = state_.wiki.at(p.target.id); break;
            case ArtifactType::timeline: trial = state_.timeline.at(p.target.id); break;
        }
        trial.merge_patch(p.change);
    }
    switch (p.target.type) {
        case ArtifactType::task: check_artifact(trial.get<TaskItem>()); break;
        case ArtifactType::wiki: check_artifact(trial.get<WikiPage>()); break;
        case ArtifactType::timeline: check_artifact(trial.get<TimelineEntry>()); break;
    }

    p.id = next_id("prop");
    p.status = ProposalStatus::pending;
    p.created_by = "agent";
    p.created_ts = next_ts();
    p.decided_ts.reset();
    p.applied_id.reset();
    log({{"op", "proposal"}, {"proposal", p}});
    std::string id = p.id;
    state_.proposals.emplace(id, std::move(p));
    return id;
}

nlohmann::json Workspace::decide(const std::string& proposal_id, bool approve) {
    std::unique_lock lock(mu_);
    auto it = state_.proposals.find(proposal_id);
    if (it == state_.proposals.end()) throw Error(ErrorCode::not_found, "proposal '" + proposal_id + "'");
    Proposal& p = it->second;
    if (p.status != ProposalStatus::pending) {
        throw Error(ErrorCode::already_decided, "proposal '" + proposal_id + "' is " + std::string(to_string(p.status)));
    }
    auto current = [&](const ArtifactRef& ref) -> nlohmann::json {
        switch (ref.type) {
            case ArtifactType::task: return state_.tasks.at(ref.id);
            case ArtifactType::wiki: return state_.wiki.at(ref.id);
            case ArtifactType::timeline: return state_.timeline.at(ref.id);
        }
        return nullptr;
    };
    const bool is_new = p.target.id == "new";
    if (!is_new && !exists(p.target)) {
        p.status = ProposalStatus::rejected;
        p.decided_ts = next_ts();
        log({{"op", "proposal"}, {"proposal", p}});
        throw Error(ErrorCode::target_missing,
                    std::string(to_string(p.target.type)) + " '" + p.target.id + "' no longer exists");
    }
    if (!approve) {
        p.status = ProposalStatus::rejected;
        p.decided_ts = next_ts();
        log({{"op", "proposal"}, {"proposal", p}});
        return is_new ? nlohmann::json(nullptr) : current(p.target);
    }
    nlohmann::json artifact;
    if (is_new) {
        artifact = p.change;
        artifact.erase("id");
    } else {
        artifact = current(p.target);
        artifact.merge_patch(p.change);
    }
    const std::string id = put(p.target.type, artifact, Provenance::agent);
    p.status = ProposalStatus::approved;
    p.decided_ts = next_ts();
    p.applied_id = id;
    log({{"op", "proposal"}, {"proposal", p}});
    return current({p.target.type, id});
}

std::optional<TaskItem> Workspace::task(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = state_.tasks.find(id);
    return it == state_.tasks.end() ? std::nullopt : std::optional(it->second);
}

std::optional<WikiPage> Workspace::wiki(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = state_.wiki.find(id);
    return it == state_.wiki.end() ? std::nullopt : std::optional(it->second);
}

std::optional<TimelineEntry> Workspace::timeline(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = state_.timeline.find(id);
    return it == state_.timeline.end() ? std::nullopt : std::optional(it->second);
}

std::optional<Proposal> Workspace::proposal(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = state_.proposals.find(id);
    return it == state_.proposals.end() ? std::nullopt : std::optional(it->second);
}

std::optional<nlohmann::json> Workspace::artifact_json(const ArtifactRef& ref) const {
    std::shared_lock lock(mu_);
    if (!exists(ref)) return std::nullopt;
    switch (ref.type) {
        case ArtifactType::task: return nlohmann::json(state_.tasks.at(ref.id));
        case ArtifactType::wiki: return nlohmann::json(state_.wiki.at(ref.id));
        case ArtifactType::timeline: return nlohmann::json(state_.timeline.at(ref.id));
    }
    return std::nullopt;
}

std::vector<TaskItem> Workspace::tasks() const {
    std::shared_lock lock(mu_);
    std::vector<TaskItem> out;
    for (const auto& [_, t] : state_.tasks) out.push_back(t);
    return out;
}

std::vector<WikiPage> Workspace::wiki_pages() const {
    std::shared_lock lock(mu_);
    std::vector<WikiPage> out;
    for (const auto& [_, w] : state_.wiki) out.push_back(w);
    return out;
}

std::vector<TimelineEntry> Workspace::timeline_entries() const {
    std::shared_lock lock(mu_);
    std::vector<TimelineEntry> out;
    for (const auto& [_, e] : state_.timeline) out.push_back(e);
    return out;
}

std::vector<Proposal> Workspace::proposals(std::optional<ProposalStatus> status) const {
    std::shared_lock lock(mu_);
    std::vector<Proposal> out;
    for (const auto& [_, p] : state_.proposals) {
        if (!status || p.status == *status) out.push_back(p);
    }
    return out;
}

std::vector<SearchHit> Workspace::search(std::string_view query, std::size_t k) const {
    if (k == 0) invalid("k must be >= 1");
    struct Doc {
        SearchHit hit;
        std::string body;
        std::unordered_map<std::string, std::size_t> tf;
        std::size_t length = 0;
    };
    std::vector<Doc> docs;
    {
        std::shared_lock lock(mu_);
        auto add = [&](ArtifactType type, const std::string& id, const std::string& title,
                       const std::string& body, const std::vector<std::string>& tags, std::int64_t ts) {
            Doc d;
            d.hit.ref = {type, id};
            d.hit.title = title;
            d.hit.tags = tags;
            d.hit.updated_ts = ts;
            d.body = body;
            for (auto& tok : tokenize(title + "\n" + body + "\n" + join(tags, " "))) {
                ++d.tf[tok];
                ++d.length;
            }
            docs.push_back(std::move(d));
        };
        for (const auto& [id, t] : state_.tasks) {
            add(ArtifactType::task, id, t.title, t.description + "\n" + t.notes, {}, t.updated_ts);
        }
        for (const auto& [id, w] : state_.wiki) add(ArtifactType::wiki, id, w.title, w.body, w.tags, w.updated_ts);
        for (const auto& [id, e] : state_.timeline) {
            add(ArtifactType::timeline, id, e.summary, e.details, {e.tag}, e.updated_ts);
        }
    }
    if (docs.empty()) return {};

    auto q = tokenize(query);
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());

    double avg_len = 0.0;
    for (const auto& d : docs) avg_len += static_cast<double>(d.length);
    avg_len /= static_cast<double>(docs.size());
    const double n_docs = static_cast<double>(docs.size());

    std::unordered_map<std::string, double> idf;
    for (const auto& t : q) {
        std::size_t df = 0;
        for (const auto& d : docs) df += d.tf.contains(t) ? 1 : 0;
        if (df > 0) idf[t] = std::log(1.0 + n_docs / static_cast<double>(df));
    }

    std::vector<SearchHit> hits;
    for (auto& d : docs) {
        double raw = 0.0;
        for (const auto& t : q) {
            auto it = d.tf.find(t);
            if (it != d.tf.end()) raw += static_cast<double>(it->second) * idf[t];
        }
        if (raw <= 0.0) continue;
        const double norm = avg_len > 0.0 ? 1.0 + 0.5 * static_cast<double>(d.length) / avg_len : 1.0;
        d.hit.score = raw / norm;

        const std::string text = d.body.empty() ? d.hit.title : d.body;
        const std::string lower = lowercase(text);
        std::size_t pos = std::string::npos;
        for (const auto& t : q) pos = std::min(pos, lower.find(t));
        const std::size_t from = pos == std::string::npos || pos < 40 ? 0 : pos - 40;
        d.hit.snippet = clip(text, from, 200);
        hits.push_back(d.hit);
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.updated_ts != b.updated_ts) return a.updated_ts > b.updated_ts;
        if (a.ref.type != b.ref.type) return a.ref.type < b.ref.type;
        return a.ref.id < b.ref.id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

std::string render_search_results(std::string_view query, const std::vector<SearchHit>& hits,
                                  const Workspace& ws) {
    std::ostringstream out;
    out << "Workspace search results for \"" << query << "\" (" << hits.size() << "):\n";
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& h = hits[i];
        char score[32];
        std::snprintf(score, sizeof score, "%.3f", h.score);
        out << i + 1 << ". [" << to_string(h.ref.type) << " " << h.ref.id << "] " << h.title << " (score "
            << score << ")";
        if (!h.tags.empty()) out << " tags: " << join(h.tags, ", ");
        out << "\n   " << h.snippet << "\n";
    }
    if (!hits.empty() && hits.front().ref.type == ArtifactType::wiki) {
        if (auto page = ws.wiki(hits.front().ref.id)) {
            out << "Top result content:\n" << clip(page->body, 0, 2000);
            if (!page->body.empty() && page->body.back() != '\n') out << "\n";
        }
    }
    return out.str();
}

std::string Workspace::artifact_digest() const {
    std::shared_lock lock(mu_);
    nlohmann::json j = {{"tasks", state_.tasks}, {"wiki", state_.wiki}, {"timeline", state_.timeline}};
    return sha256_hex(j.dump());
}

nlohmann::json Workspace::state_json(const State& s) {
    return {{"tasks", s.tasks},
            {"wiki", s.wiki},
            {"timeline", s.timeline},
            {"proposals", s.proposals},
            {"counters", s.counters},
            {"last_ts", s.last_ts}};
}

Workspace::State Workspace::state_from_json(const nlohmann::json& j) {
    State s;
    j.at("tasks").get_to(s.tasks);
    j.at("wiki").get_to(s.wiki);
    j.at("timeline").get_to(s.timeline);
    j.at("proposals").get_to(s.proposals);
    j.at("counters").get_to(s.counters);
    j.at("last_ts").get_to(s.last_ts);
    return s;
}

nlohmann::json Workspace::to_json() const {
    std::shared_lock lock(mu_);
    return state_json(state_);
}

Workspace Workspace::from_json(const nlohmann::json& j, Clock clock) {
    Workspace ws(std::move(clock));
    ws.state_ = state_from_json(j);
    return ws;
}

void Workspace::log(const nlohmann::json& op) {
    if (!dir_) return;
    std::ofstream out(*dir_ / "oplog.ndjson", std::ios::app);
    if (!out) throw Error(ErrorCode::io, "cannot append to oplog in " + dir_->string());
    out << op.dump() << '\n';
}

void Workspace::replay(const nlohmann::json& op) {
    const auto kind = op.at("op").get<std::string>();
    if (kind == "put") {
        const auto type = artifact_type_from_string(op.at("type").get<std::string>());
        const auto& a = op.at("artifact");
        switch (type) {
            case ArtifactType::task: {
                auto t = a.get<TaskItem>();
                state_.tasks[t.id] = t;
                break;
            }
            case ArtifactType::wiki: {
                auto w = a.get<WikiPage>();
                state_.wiki[w.id] = w;
                break;
            }
            case ArtifactType::timeline: {
                auto e = a.get<TimelineEntry>();
                state_.timeline[e.id] = e;
                break;
            }
        }
        state_.last_ts = std::max(state_.last_ts, a.at("updated_ts").get<std::int64_t>());
    } else if (kind == "delete") {
        const auto type = artifact_type_from_string(op.at("type").get<std::string>());
        const auto id = op.at("id").get<std::string>();
        switch (type) {
            case ArtifactType::task: state_.tasks.erase(id); break;
            case ArtifactType::wiki: state_.wiki.erase(id); break;
            case ArtifactType::timeline: state_.timeline.erase(id); break;
        }
    } else if (kind == "proposal") {
        auto p = op.at("proposal").get<Proposal>();
        state_.last_ts = std::max({state_.last_ts, p.created_ts, p.decided_ts.value_or(0)});
        state_.proposals[p.id] = std::move(p);
    } else {
        throw Error(ErrorCode::corrupt_store, "unknown oplog entry '" + kind + "'");
    }
    // Counters follow the highest id seen per prefix.
    auto bump = [&](const std::string& id) {
        auto dash = id.rfind('-');
        if (dash == std::string::npos) return;
        try {
            auto n = std::stoull(id.substr(dash + 1));
            auto& c = state_.counters[id.substr(0, dash)];
            c = std::max<std::uint64_t>(c, n);
        } catch (const std::exception&) {
        }
    };
    if (kind == "put") bump(op["artifact"].value("id", ""));
    if (kind == "proposal") bump(op["proposal"].value("id", ""));
}

void Workspace::attach(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::unique_lock lock(mu_);
    dir_ = dir;
}

void Workspace::persist() const {
    std::shared_lock lock(mu_);
    if (!dir_) throw Error(ErrorCode::io, "workspace is not attached to a directory");
    const std::string content = state_json(state_).dump() + "\n";
    const auto snap = *dir_ / "snapshot.json";
    const auto tmp = *dir_ / "snapshot.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        out << content;
        if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    }
    {
        std::ofstream out(*dir_ / "digest", std::ios::trunc);
        out << sha256_hex(content) << '\n';
        if (!out) throw Error(ErrorCode::io, "cannot write digest");
    }
    std::filesystem::rename(tmp, snap);
    std::ofstream(*dir_ / "oplog.ndjson", std::ios::trunc);
}

Workspace Workspace::load(const std::filesystem::path& dir, Clock clock) {
    Workspace ws(std::move(clock));
    const auto snap = dir / "snapshot.json";
    if (std::filesystem::exists(snap)) {
        std::ifstream in(snap, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string content = buf.str();
        std::ifstream din(dir / "digest");
        std::string digest;
        din >> digest;
        if (digest.empty() || digest != sha256_hex(content)) {
            throw Error(ErrorCode::corrupt_store, "snapshot digest mismatch in " + dir.string());
        }
        try {
            ws.state_ = state_from_json(nlohmann::json::parse(content));
        } catch (const std::exception& e) {
            throw Error(ErrorCode::corrupt_store, std::string("unreadable snapshot: ") + e.what());
        }
    }
    const auto oplog = dir / "oplog.ndjson";
    if (std::filesystem::exists(oplog)) {
        std::ifstream in(oplog);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                ws.replay(nlohmann::json::parse(line));
            } catch (const std::exception& e) {
                throw Error(ErrorCode::corrupt_store,
                            "oplog line " + std::to_string(lineno) + " unreadable: " + e.what());
            }
        }
    }
    ws.attach(dir);
    return ws;
}

}  // namespace groundwork
