#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace groundwork {

enum class KnowledgeFormat { trajectory, script, insight };
enum class TaskStatus { not_started, in_progress, completed };
enum class Priority { low, medium, high };
enum class Provenance { user, agent };
enum class ArtifactType { task, wiki, timeline };
enum class ProposalStatus { pending, approved, rejected };

std::string_view to_string(KnowledgeFormat f);
std::string_view to_string(TaskStatus s);
std::string_view to_string(Priority p);
std::string_view to_string(Provenance p);
std::string_view to_string(ArtifactType t);
std::string_view to_string(ProposalStatus s);
KnowledgeFormat knowledge_format_from_string(std::string_view s);
ArtifactType artifact_type_from_string(std::string_view s);

/// The default activity taxonomy for timeline tags and segment categories.
const std::vector<std::string>& activity_taxonomy();

struct TaskItem {
    std::string id;
    std::string title;
    std::string description;
    TaskStatus status = TaskStatus::not_started;
    Priority priority = Priority::medium;
    std::string notes;
    Provenance provenance = Provenance::user;
    std::int64_t updated_ts = 0;

    bool operator==(const TaskItem&) const = default;
};

struct WikiPage {
    std::string id;
    std::string title;
    std::string body;
    std::vector<std::string> tags;
    std::optional<KnowledgeFormat> format;  // none for hand-written pages
    std::vector<std::string> source_segments;
    Provenance provenance = Provenance::user;
    std::int64_t updated_ts = 0;

    bool operator==(const WikiPage&) const = default;
};

struct TimelineEntry {
    std::string id;
    std::string date;  // YYYY-MM-DD (UTC)
    std::int64_t start_ts = 0;
    std::int64_t duration_ms = 0;
    std::string tag;
    std::string summary;
    std::string details;
    Provenance provenance = Provenance::user;
    std::int64_t updated_ts = 0;

    bool operator==(const TimelineEntry&) const = default;
};

struct ArtifactRef {
    ArtifactType type = ArtifactType::task;
    std::string id;  // "new" for a creation proposal

    bool operator==(const ArtifactRef&) const = default;
};

/// An agent-suggested change. `change` is a full artifact payload when the
/// target is "new", otherwise an object of fields to overwrite.
struct Proposal {
    std::string id;
    ArtifactRef target;
    nlohmann::json change = nlohmann::json::object();
    std::string rationale;
    ProposalStatus status = ProposalStatus::pending;
    std::string created_by = "agent";
    std::int64_t created_ts = 0;
    std::optional<std::int64_t> decided_ts;
    std::optional<std::string> applied_id;  // artifact written on approval

    bool operator==(const Proposal&) const = default;
};

struct SearchHit {
    ArtifactRef ref;
    std::string title;
    double score = 0.0;
    std::string snippet;  // at most 200 characters
    std::vector<std::string> tags;
    std::int64_t updated_ts = 0;
};

/// Lowercased alphanumeric runs; the tokenizer used by search and by
/// title-overlap routing.
std::vector<std::string> tokenize(std::string_view text);

/// Shared knowledge store with approval-gated agent writes.
///
/// Readers take a shared lock and writers an exclusive one. When attached to
/// a directory every mutation is appended to `oplog.ndjson`; persist() writes
/// `snapshot.json` plus its `digest` and truncates the log.
class Workspace {
public:
    using Clock = std::function<std::int64_t()>;

    explicit Workspace(Clock clock = {});
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
    Workspace(Workspace&& other) noexcept;
    Workspace& operator=(Workspace&& other) noexcept;

    /// In-memory copy of the current state, detached from any directory.
    Workspace clone() const;

    // User path: immediate writes, provenance=user.
    std::string upsert_user(TaskItem item);
    std::string upsert_user(WikiPage page);
    std::string upsert_user(TimelineEntry entry);
    std::string upsert_user(ArtifactType type, const nlohmann::json& artifact);
    /// Merges `fields` into an existing artifact as a user edit.
    nlohmann::json patch_user(const ArtifactRef& ref, const nlohmann::json& fields);
    void remove_user(const ArtifactRef& ref);

    // Agent path.
    std::string propose(Proposal proposal);
    /// Returns the artifact state after the decision. Throws AlreadyDecided,
    /// NotFound, or TargetMissing (the proposal is auto-rejected first).
    nlohmann::json decide(const std::string& proposal_id, bool approve);

    std::optional<TaskItem> task(const std::string& id) const;
    std::optional<WikiPage> wiki(const std::string& id) const;
    std::optional<TimelineEntry> timeline(const std::string& id) const;
    std::optional<Proposal> proposal(const std::string& id) const;
    std::optional<nlohmann::json> artifact_json(const ArtifactRef& ref) const;
    std::vector<TaskItem> tasks() const;
    std::vector<WikiPage> wiki_pages() const;
    std::vector<TimelineEntry> timeline_entries() const;
    std::vector<Proposal> proposals(std::optional<ProposalStatus> status = std::nullopt) const;

    /// Σ_t tf(t,d)·idf(t) / (1 + 0.5·|d|/avg|d|) over unique query tokens,
    /// idf(t) = ln(1 + N/df(t)). Ties: newer updated_ts, then id.
    std::vector<SearchHit> search(std::string_view query, std::size_t k = 5) const;

    /// SHA-256 over all artifacts (not proposals).
    std::string artifact_digest() const;

    nlohmann::json to_json() const;
    static Workspace from_json(const nlohmann::json& j, Clock clock = {});

    /// Starts logging mutations under `dir` (created if needed).
    void attach(const std::filesystem::path& dir);
    void persist() const;
    /// Loads snapshot + oplog from `dir`; throws CorruptStore on digest
    /// mismatch or unreadable content. A missing directory yields an empty
    /// store attached to it.
    static Workspace load(const std::filesystem::path& dir, Clock clock = {});

    bool operator==(const Workspace& other) const;

private:
    struct State {
        std::map<std::string, TaskItem> tasks;
        std::map<std::string, WikiPage> wiki;
        std::map<std::string, TimelineEntry> timeline;
        std::map<std::string, Proposal> proposals;
        std::map<std::string, std::uint64_t> counters;
        std::int64_t last_ts = 0;

        bool operator==(const State&) const = default;
    };

    std::int64_t next_ts();
    std::string next_id(const std::string& prefix);
    bool exists(const ArtifactRef& ref) const;
    std::string put(ArtifactType type, nlohmann::json artifact, Provenance who);
    void log(const nlohmann::json& op);
    void replay(const nlohmann::json& op);
    static nlohmann::json state_json(const State& s);
    static State state_from_json(const nlohmann::json& j);

    mutable std::shared_mutex mu_;
    Clock clock_;
    State state_;
    std::optional<std::filesystem::path> dir_;
};

/// Text block the agent sees after a search_workspace call.
std::string render_search_results(std::string_view query, const std::vector<SearchHit>& hits,
                                  const Workspace& ws);

void to_json(nlohmann::json& j, const TaskItem& t);
void from_json(const nlohmann::json& j, TaskItem& t);
void to_json(nlohmann::json& j, const WikiPage& w);
void from_json(const nlohmann::json& j, WikiPage& w);
void to_json(nlohmann::json& j, const TimelineEntry& e);
void from_json(const nlohmann::json& j, TimelineEntry& e);
void to_json(nlohmann::json& j, const ArtifactRef& r);
void from_json(const nlohmann::json& j, ArtifactRef& r);
void to_json(nlohmann::json& j, const Proposal& p);
void from_json(const nlohmann::json& j, Proposal& p);
void to_json(nlohmann::json& j, const SearchHit& h);

}  // namespace groundwork
