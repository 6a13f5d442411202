#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundwork/page_model.hpp"
#include "groundwork/sim_env.hpp"

namespace groundwork {

enum class EventKind { page_view, click, input, tab_switch, screenshot_ref };

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

struct ElementRef {
    std::string role;
    std::string name;
    ElementId id = 0;

    bool operator==(const ElementRef&) const = default;
};

struct BehaviorEvent {
    std::int64_t ts = 0;  // ms since epoch, UTC
    std::string session_id;
    std::string tab_id;
    std::string site;  // origin
    std::string url;
    std::string title;  // page title at capture time
    EventKind kind = EventKind::page_view;
    std::optional<ElementRef> element;
    std::optional<std::string> payload;  // input text or screenshot reference
    std::string snapshot_digest;
    std::size_t repeat = 1;  // >1 after dedup_compress collapsed a run of views

    bool operator==(const BehaviorEvent&) const = default;
};

struct ConsentState {
    bool enabled = false;
    bool paused = false;
    std::optional<std::int64_t> consent_ts;

    bool permits() const { return enabled && !paused; }
};

/// Append-only session logs under `<dir>/<session_id>.ndjson`.
///
/// After each append the committed byte length is written to
/// `<session_id>.hwm`; readers stop there, so a line being written is never
/// seen half-finished.
class BehaviorLogger {
public:
    explicit BehaviorLogger(std::filesystem::path dir);

    /// Stores the event iff consent permits. Throws UnorderedInput if the
    /// timestamp is older than the session's last one.
    bool record(const BehaviorEvent& event, const ConsentState& consent);

    std::filesystem::path session_path(const std::string& session_id) const;
    std::uint64_t high_water_mark(const std::string& session_id) const;
    std::size_t event_count(const std::string& session_id) const;

private:
    std::filesystem::path dir_;
    std::map<std::string, std::int64_t> last_ts_;
    mutable std::mutex mu_;
};

/// Events of a session file up to its high-water mark (whole file when no
/// mark exists; a trailing partial line is ignored).
std::vector<BehaviorEvent> read_session(const std::filesystem::path& dir, const std::string& session_id);
std::vector<BehaviorEvent> read_events(const std::filesystem::path& ndjson_file);
std::string events_to_ndjson(const std::vector<BehaviorEvent>& events);
std::vector<BehaviorEvent> events_from_ndjson(std::string_view text);

/// Collapses consecutive page_view events with equal (site, snapshot_digest)
/// into the first one, summing `repeat`. Other kinds pass through.
/// Throws UnorderedInput if timestamps decrease.
std::vector<BehaviorEvent> dedup_compress(const std::vector<BehaviorEvent>& events);

/// Plays the role of the capture extension: replays a task's solution in
/// a fresh session and emits the events a user doing the same would
/// produce. Answers are not events. Timestamps start at `start_ts` and
/// advance by `step_ms`.
std::vector<BehaviorEvent> capture_solution(const sim::Catalog& catalog, const sim::TaskSpec& task,
                                            const std::string& session_id, std::int64_t start_ts,
                                            std::int64_t step_ms = 4000);

void to_json(nlohmann::json& j, const BehaviorEvent& e);
void from_json(const nlohmann::json& j, BehaviorEvent& e);

}  // namespace groundwork
