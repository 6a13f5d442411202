#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundwork/behavior_logger.hpp"
#include "groundwork/model_client.hpp"
#include "groundwork/workspace.hpp"

namespace groundwork {

constexpr std::int64_t kDefaultTimeoutMs = 1'800'000;

struct Segment {
    std::string segment_id;
    std::vector<BehaviorEvent> events;
    std::int64_t start_ts = 0;
    std::int64_t end_ts = 0;
    std::int64_t gap_before_ms = 0;

    bool operator==(const Segment&) const = default;
};

struct SegmentSummary {
    std::string segment_id;
    std::string screen_state;
    std::string actions;
    std::string resulting_changes;
    std::string category;
    double confidence = 0.0;

    bool operator==(const SegmentSummary&) const = default;
};

/// Masks PII in payload, url, title and element name. Adds the number of
/// replacements to `*hits` when given.
std::vector<BehaviorEvent> ingest(std::vector<BehaviorEvent> events, std::size_t* hits = nullptr);

/// A new segment starts at event i > 0 iff ts(i) - ts(i-1) >= timeout_ms.
/// Segment ids are `<session_id>/<index>`. Throws UnorderedInput.
std::vector<Segment> segment(const std::vector<BehaviorEvent>& events, std::int64_t timeout_ms = kDefaultTimeoutMs);

/// Keyword-rule classification into the activity taxonomy. Returns the
/// category and the share of keyword hits it won (0 when nothing matched).
std::pair<std::string, double> classify(const Segment& seg);

/// The deterministic summary backend.
SegmentSummary summarize_template(const Segment& seg);

/// With a client: schema prompt, up to two retries, then the template with
/// confidence 0. Without a client: the template. Throws EmptySegment.
SegmentSummary summarize(const Segment& seg, ModelClient* client = nullptr);

/// A wiki-page draft in the given format, tagged with the summary category,
/// the host of the segment's main site and the format. A client may rewrite the body
/// (`{"body": "..."}`); anything else keeps the deterministic text.
WikiPage distill(const Segment& seg, const SegmentSummary& summary, KnowledgeFormat format,
                 ModelClient* client = nullptr);

/// Script steps of a segment, one per click or input event, consecutive
/// repeats dropped. Throws EmptySegment when there are none.
std::vector<std::string> script_steps(const Segment& seg);

struct RouteConfig {
    std::vector<std::string> wiki_categories{"research", "development", "reporting"};
    std::size_t wiki_min_actions = 3;
    double task_overlap = 0.5;
    KnowledgeFormat format = KnowledgeFormat::script;
};

/// Share of an open task's title tokens that also occur in the segment's
/// titles, element names and inputs.
double title_overlap(const std::string& task_title, const Segment& seg);

/// Baseline routing table, or the model's per-segment override when a client
/// is given (agentic mode). Segments, summaries and drafts are parallel;
/// a draft may be absent. Returns proposals, not writes.
std::vector<Proposal> route(const std::vector<Segment>& segments, const std::vector<SegmentSummary>& summaries,
                            const std::vector<std::optional<WikiPage>>& drafts, const std::vector<TaskItem>& open_tasks,
                            const RouteConfig& config, ModelClient* client = nullptr);

struct EtlConfig {
    std::int64_t timeout_ms = kDefaultTimeoutMs;
    RouteConfig route;
    bool agentic = false;
};

struct EtlReport {
    std::string session_id;
    std::size_t events_read = 0;
    std::size_t events_after_dedup = 0;
    std::size_t pii_hits = 0;
    std::vector<Segment> segments;
    std::vector<SegmentSummary> summaries;
    std::vector<WikiPage> drafts;
    std::vector<Proposal> proposals;  // as stored, with ids
};

/// ingest -> dedup_compress -> segment -> summarize -> distill -> route,
/// then files every proposal with `ws`. `client` is used only in agentic mode.
EtlReport run_pipeline(const std::vector<BehaviorEvent>& events, Workspace& ws, const EtlConfig& config,
                       ModelClient* client = nullptr);

/// run_pipeline over a session log, holding `<session>.lock` for the run.
EtlReport run_session(const std::filesystem::path& logs_dir, const std::string& session_id, Workspace& ws,
                      const EtlConfig& config, ModelClient* client = nullptr);

void to_json(nlohmann::json& j, const Segment& s);
void to_json(nlohmann::json& j, const SegmentSummary& s);
void from_json(const nlohmann::json& j, SegmentSummary& s);
void to_json(nlohmann::json& j, const EtlReport& r);

}  // namespace groundwork
