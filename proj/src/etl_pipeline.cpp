#include "groundwork/etl_pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <ctime>
#include <map>
#include <set>

#include "groundwork/error.hpp"
#include "groundwork/pii.hpp"

namespace groundwork {

namespace {

bool is_action(const BehaviorEvent& e) { return e.kind == EventKind::click || e.kind == EventKind::input; }

std::string mask(const std::string& s, std::size_t& hits) {
    auto r = mask_pii(s);
    hits += r.hits;
    return std::move(r.text);
}

std::string utc_date(std::int64_t ts_ms) {
    std::time_t secs = static_cast<std::time_t>(ts_ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

std::string site_host(const std::string& origin) {
    const auto scheme = origin.find("://");
    std::string host = scheme == std::string::npos ? origin : origin.substr(scheme + 3);
    return host.substr(0, host.find('/'));
}

std::string squote(const std::string& s) { return "'" + s + "'"; }

std::string plural(std::size_t n, const std::string& one, const std::string& many) {
    return std::to_string(n) + " " + (n == 1 ? one : many);
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& keyword_rules() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> rules{
        {"communication", {"mail", "email", "inbox", "message", "messages", "chat", "reply", "meeting", "calendar"}},
        {"research", {"search", "knowledge", "article", "articles", "wiki", "docs", "documentation", "kb", "lookup"}},
        {"reporting", {"report", "reports", "dashboard", "chart", "charts", "metrics", "analytics", "export"}},
        {"development", {"code", "repo", "repository", "commit", "build", "deploy", "bug", "pull", "merge"}},
        {"administration",
         {"catalog", "order", "request", "form", "settings", "admin", "approval", "ticket", "hardware", "incident"}},
    };
    return rules;
}

std::vector<std::string> segment_tokens(const Segment& seg) {
    std::vector<std::string> out;
    auto add = [&](const std::string& s) {
        for (auto& t : tokenize(s)) out.push_back(std::move(t));
    };
    for (const auto& e : seg.events) {
        add(e.title);
        if (e.element) add(e.element->name);
        if (e.payload && e.kind == EventKind::input) add(*e.payload);
    }
    return out;
}

std::string trace_line(const BehaviorEvent& e) {
    std::string line(to_string(e.kind));
    switch (e.kind) {
        case EventKind::page_view:
            line += " " + e.url + " " + squote(e.title);
            break;
        case EventKind::click:
        case EventKind::input:
            if (e.element) line += " " + e.element->role + " " + squote(e.element->name);
            if (e.kind == EventKind::input && e.payload) line += " = " + squote(*e.payload);
            break;
        case EventKind::tab_switch:
            line += " " + e.tab_id + " " + e.url;
            break;
        case EventKind::screenshot_ref:
            line += " " + e.payload.value_or("");
            break;
    }
    if (e.repeat > 1) line += " (x" + std::to_string(e.repeat) + ")";
    return line;
}

std::string capitalized(std::string_view s) {
    std::string out(s);
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

std::string page_trail(const Segment& seg) {
    std::vector<std::string> titles;
    for (const auto& e : seg.events) {
        if (e.title.empty()) continue;
        if (titles.empty() || titles.back() != e.title) titles.push_back(e.title);
    }
    std::string trail;
    for (std::size_t i = 0; i < titles.size(); ++i) {
        if (i) trail += " > ";
        trail += titles[i];
    }
    if (trail.size() > 160) {
        trail.resize(157);
        while (!trail.empty() && (static_cast<unsigned char>(trail.back()) & 0xC0) == 0x80) trail.pop_back();
        if (!trail.empty() && static_cast<unsigned char>(trail.back()) >= 0xC0) trail.pop_back();
        trail += "...";
    }
    return trail.empty() ? "Untitled activity" : trail;
}

std::optional<nlohmann::json> ask_json(ModelClient& client, const std::string& system, const std::string& user) {
    try {
        auto out = client.complete({{"system", system}, {"user", user}}, 1, 0.0);
        if (out.empty()) return std::nullopt;
        auto j = nlohmann::json::parse(out.front());
        if (!j.is_object()) return std::nullopt;
        return j;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string event_digest(const Segment& seg) {
    std::string out;
    for (std::size_t i = 0; i < seg.events.size(); ++i) out += std::to_string(i + 1) + ". " + trace_line(seg.events[i]) + "\n";
    return out;
}

nlohmann::json without_id(nlohmann::json j) {
    j.erase("id");
    j.erase("updated_ts");
    j.erase("provenance");
    return j;
}

class RunLock {
public:
    explicit RunLock(std::filesystem::path path) : path_(std::move(path)) {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) throw Error(ErrorCode::io, "another pipeline run holds " + path_.string());
    }
    ~RunLock() {
        ::close(fd_);
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

}  // namespace

std::vector<BehaviorEvent> ingest(std::vector<BehaviorEvent> events, std::size_t* hits) {
    std::size_t n = 0;
    for (auto& e : events) {
        e.url = mask(e.url, n);
        e.title = mask(e.title, n);
        if (e.payload) e.payload = mask(*e.payload, n);
        if (e.element) e.element->name = mask(e.element->name, n);
    }
    if (hits) *hits += n;
    return events;
}

std::vector<Segment> segment(const std::vector<BehaviorEvent>& events, std::int64_t timeout_ms) {
    if (timeout_ms <= 0) throw Error(ErrorCode::validation, "timeout must be positive");
    std::vector<Segment> out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        std::int64_t gap = 0;
        if (i > 0) {
            gap = e.ts - events[i - 1].ts;
            if (gap < 0) throw Error(ErrorCode::unordered_input, "timestamps decrease at event " + std::to_string(i));
        }
        if (i == 0 || gap >= timeout_ms) {
            Segment s;
            s.segment_id = e.session_id + "/" + std::to_string(out.size());
            s.start_ts = e.ts;
            s.gap_before_ms = gap;
            out.push_back(std::move(s));
        }
        out.back().events.push_back(e);
        out.back().end_ts = e.ts;
    }
    return out;
}

std::pair<std::string, double> classify(const Segment& seg) {
    const auto tokens = segment_tokens(seg);
    std::map<std::string, std::size_t> score;
    std::size_t total = 0;
    for (const auto& t : tokens) {
        for (const auto& [category, words] : keyword_rules()) {
            if (std::find(words.begin(), words.end(), t) != words.end()) {
                ++score[category];
                ++total;
            }
        }
    }
    std::string best = "other";
    std::size_t best_score = 0;
    for (const auto& [category, _] : keyword_rules()) {
        if (score[category] > best_score) {
            best = category;
            best_score = score[category];
        }
    }
    return {best, total == 0 ? 0.0 : static_cast<double>(best_score) / static_cast<double>(total)};
}

SegmentSummary summarize_template(const Segment& seg) {
    if (seg.events.empty()) throw Error(ErrorCode::empty_segment, "segment " + seg.segment_id + " has no events");
    SegmentSummary s;
    s.segment_id = seg.segment_id;

    std::map<std::string, std::size_t> sites;
    std::string last_title;
    std::map<EventKind, std::size_t> kinds;
    std::set<std::string> digests;
    for (const auto& e : seg.events) {
        ++sites[e.site];
        if (!e.title.empty()) last_title = e.title;
        kinds[e.kind] += e.kind == EventKind::page_view ? e.repeat : 1;
        if (!e.snapshot_digest.empty()) digests.insert(e.snapshot_digest);
    }
    auto top = std::max_element(sites.begin(), sites.end(),
                                [](const auto& a, const auto& b) { return a.second < b.second; });
    s.screen_state = "Working on " + top->first;
    s.screen_state += last_title.empty() ? "." : ", last page " + squote(last_title) + ".";

    std::vector<std::string> parts;
    static const std::vector<std::tuple<EventKind, std::string, std::string>> names{
        {EventKind::page_view, "page view", "page views"},
        {EventKind::click, "click", "clicks"},
        {EventKind::input, "input", "inputs"},
        {EventKind::tab_switch, "tab switch", "tab switches"},
        {EventKind::screenshot_ref, "screenshot", "screenshots"}};
    for (const auto& [kind, one, many] : names) {
        if (kinds[kind] > 0) parts.push_back(plural(kinds[kind], one, many));
    }
    for (std::size_t i = 0; i < parts.size(); ++i) s.actions += (i ? ", " : "") + parts[i];
    s.actions += ".";
    s.resulting_changes = plural(digests.size(), "distinct page state", "distinct page states") + ".";
    std::tie(s.category, s.confidence) = classify(seg);
    return s;
}

SegmentSummary summarize(const Segment& seg, ModelClient* client) {
    if (seg.events.empty()) throw Error(ErrorCode::empty_segment, "segment " + seg.segment_id + " has no events");
    if (!client) return summarize_template(seg);

    std::string taxonomy;
    for (const auto& c : activity_taxonomy()) taxonomy += (taxonomy.empty() ? "" : ", ") + c;
    const std::string system =
        "Summarize the browsing segment. Reply with one JSON object with string fields screen_state, "
        "actions, resulting_changes, category (one of: " + taxonomy + ") and a number confidence in [0, 1].";
    const std::string user = event_digest(seg);
    for (int attempt = 0; attempt < 3; ++attempt) {
        auto j = ask_json(*client, system, user);
        if (!j) continue;
        const auto& r = *j;
        auto str = [&](const char* k) { return r.contains(k) && r[k].is_string(); };
        if (!str("screen_state") || !str("actions") || !str("resulting_changes") || !str("category")) continue;
        if (!r.contains("confidence") || !r["confidence"].is_number()) continue;
        const auto category = r["category"].get<std::string>();
        const auto& tax = activity_taxonomy();
        if (std::find(tax.begin(), tax.end(), category) == tax.end()) continue;
        const double confidence = r["confidence"].get<double>();
        if (confidence < 0.0 || confidence > 1.0) continue;
        SegmentSummary s;
        s.segment_id = seg.segment_id;
        s.screen_state = mask_pii(r["screen_state"].get<std::string>()).text;
        s.actions = mask_pii(r["actions"].get<std::string>()).text;
        s.resulting_changes = mask_pii(r["resulting_changes"].get<std::string>()).text;
        s.category = category;
        s.confidence = confidence;
        return s;
    }
    auto s = summarize_template(seg);
    s.confidence = 0.0;
    return s;
}

std::vector<std::string> script_steps(const Segment& seg) {
    std::vector<std::string> steps;
    for (const auto& e : seg.events) {
        if (!is_action(e) || !e.element) continue;
        const auto& role = e.element->role;
        const auto name = squote(e.element->name);
        const auto value = squote(e.payload.value_or(""));
        std::string step;
        if (e.kind == EventKind::click) {
            if (role == "link") step = "Navigate to " + name + ".";
            else if (role == "listitem" || role == "treeitem" || role == "option" || role == "tab" ||
                     role == "menuitem" || role == "row")
                step = "Select " + name + ".";
            else if (role == "checkbox") step = "Check " + name + ".";
            else step = "Click " + name + ".";
        } else {
            if (role == "spinbutton") step = "Set " + name + " to " + value + ".";
            else if (role == "combobox" || role == "listbox") step = "Choose " + value + " in " + name + ".";
            else step = "Enter " + value + " in " + name + ".";
        }
        if (steps.empty() || steps.back() != step) steps.push_back(std::move(step));
    }
    if (steps.empty()) {
        throw Error(ErrorCode::empty_segment, "segment " + seg.segment_id + " has no user actions");
    }
    return steps;
}

WikiPage distill(const Segment& seg, const SegmentSummary& summary, KnowledgeFormat format, ModelClient* client) {
    if (seg.events.empty()) throw Error(ErrorCode::empty_segment, "segment " + seg.segment_id + " has no events");
    WikiPage page;
    page.title = capitalized(to_string(format)) + ": " + page_trail(seg);
    std::map<std::string, std::size_t> sites;
    for (const auto& e : seg.events) ++sites[site_host(e.site)];
    const auto top = std::max_element(sites.begin(), sites.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
    page.tags = {summary.category, top->first, std::string(to_string(format))};
    page.format = format;
    page.source_segments = {seg.segment_id};
    page.provenance = Provenance::agent;

    switch (format) {
        case KnowledgeFormat::trajectory:
            page.body = event_digest(seg);
            break;
        case KnowledgeFormat::script: {
            const auto steps = script_steps(seg);
            for (std::size_t i = 0; i < steps.size(); ++i) page.body += std::to_string(i + 1) + ". " + steps[i] + "\n";
            break;
        }
        case KnowledgeFormat::insight:
            page.body = summary.screen_state + " " + summary.actions + " " + summary.resulting_changes + "\n";
            break;
    }
    if (client) {
        auto j = ask_json(*client,
                          "Rewrite this " + std::string(to_string(format)) +
                              " note for a colleague. Reply with JSON {\"body\": \"...\"}.",
                          page.body);
        if (j && j->contains("body") && (*j)["body"].is_string() && !(*j)["body"].get<std::string>().empty()) {
            page.body = (*j)["body"].get<std::string>();
        }
    }
    page.title = mask_pii(page.title).text;
    page.body = mask_pii(page.body).text;
    return page;
}

double title_overlap(const std::string& task_title, const Segment& seg) {
    auto title = tokenize(task_title);
    std::set<std::string> wanted(title.begin(), title.end());
    if (wanted.empty()) return 0.0;
    const auto tokens = segment_tokens(seg);
    const std::set<std::string> have(tokens.begin(), tokens.end());
    std::size_t common = 0;
    for (const auto& t : wanted) common += have.count(t);
    return static_cast<double>(common) / static_cast<double>(wanted.size());
}

std::vector<Proposal> route(const std::vector<Segment>& segments, const std::vector<SegmentSummary>& summaries,
                            const std::vector<std::optional<WikiPage>>& drafts, const std::vector<TaskItem>& open_tasks,
                            const RouteConfig& config, ModelClient* client) {
    if (segments.size() != summaries.size() || segments.size() != drafts.size()) {
        throw Error(ErrorCode::validation, "segments, summaries and drafts must line up");
    }
    std::vector<Proposal> out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        const auto& sum = summaries[i];
        const std::size_t actions =
            static_cast<std::size_t>(std::count_if(seg.events.begin(), seg.events.end(), is_action));

        TimelineEntry entry;
        entry.date = utc_date(seg.start_ts);
        entry.start_ts = seg.start_ts;
        entry.duration_ms = seg.end_ts - seg.start_ts;
        entry.tag = sum.category;
        entry.summary = sum.screen_state;
        entry.details = sum.actions + " " + sum.resulting_changes;
        Proposal tl;
        tl.target = {ArtifactType::timeline, "new"};
        tl.change = without_id(nlohmann::json(entry));
        tl.rationale = "Recorded activity from segment " + seg.segment_id + " (" + sum.category + ").";
        out.push_back(std::move(tl));

        bool wiki = drafts[i].has_value() &&
                    std::find(config.wiki_categories.begin(), config.wiki_categories.end(), sum.category) !=
                        config.wiki_categories.end() &&
                    actions >= config.wiki_min_actions;
        std::optional<WikiPage> draft = drafts[i];
        if (client) {
            const std::string prompt = "Segment " + seg.segment_id + "\nCategory: " + sum.category +
                                       "\nSummary: " + sum.screen_state + " " + sum.actions + "\n";
            auto j = ask_json(*client,
                              "Decide whether this segment deserves a wiki page and in which format. Reply with "
                              "JSON {\"wiki\": true|false, \"format\": \"trajectory|script|insight\"}.",
                              prompt);
            if (j && j->contains("wiki") && (*j)["wiki"].is_boolean()) {
                wiki = (*j)["wiki"].get<bool>();
                if (wiki && j->contains("format") && (*j)["format"].is_string()) {
                    try {
                        const auto f = knowledge_format_from_string((*j)["format"].get<std::string>());
                        if (!draft || draft->format != f) draft = distill(seg, sum, f);
                    } catch (const Error&) {
                        wiki = draft.has_value();
                    }
                }
                wiki = wiki && draft.has_value();
            }
        }
        if (wiki) {
            Proposal p;
            p.target = {ArtifactType::wiki, "new"};
            p.change = without_id(nlohmann::json(*draft));
            p.rationale = "Segment " + seg.segment_id + " shows a reusable " + sum.category + " procedure (" +
                          std::to_string(actions) + " actions).";
            out.push_back(std::move(p));
        }

        for (const auto& task : open_tasks) {
            if (task.status == TaskStatus::completed) continue;
            const double overlap = title_overlap(task.title, seg);
            if (overlap < config.task_overlap) continue;
            Proposal p;
            p.target = {ArtifactType::task, task.id};
            p.change = {{"status", "completed"}};
            char share[16];
            std::snprintf(share, sizeof share, "%.2f", overlap);
            p.rationale = "Segment " + seg.segment_id + " covers " + share + " of the title of '" + task.title +
                          "'; it looks done (" + std::string(to_string(task.status)) + " -> completed).";
            out.push_back(std::move(p));
        }
    }
    return out;
}

EtlReport run_pipeline(const std::vector<BehaviorEvent>& events, Workspace& ws, const EtlConfig& config,
                       ModelClient* client) {
    ModelClient* agent = config.agentic ? client : nullptr;
    EtlReport report;
    report.session_id = events.empty() ? "" : events.front().session_id;
    report.events_read = events.size();
    const auto masked = ingest(events, &report.pii_hits);
    const auto compact = dedup_compress(masked);
    report.events_after_dedup = compact.size();
    report.segments = segment(compact, config.timeout_ms);

    std::vector<std::optional<WikiPage>> drafts;
    for (const auto& seg : report.segments) {
        report.summaries.push_back(summarize(seg, agent));
        std::optional<WikiPage> draft;
        try {
            draft = distill(seg, report.summaries.back(), config.route.format, agent);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::empty_segment) throw;
        }
        if (draft) report.drafts.push_back(*draft);
        drafts.push_back(std::move(draft));
    }
    std::vector<TaskItem> open;
    for (const auto& t : ws.tasks()) {
        if (t.status != TaskStatus::completed) open.push_back(t);
    }
    for (auto& p : route(report.segments, report.summaries, drafts, open, config.route, agent)) {
        const auto id = ws.propose(p);
        report.proposals.push_back(*ws.proposal(id));
    }
    return report;
}

EtlReport run_session(const std::filesystem::path& logs_dir, const std::string& session_id, Workspace& ws,
                      const EtlConfig& config, ModelClient* client) {
    const auto log = logs_dir / (session_id + ".ndjson");
    if (!std::filesystem::exists(log)) throw Error(ErrorCode::not_found, "no session log " + log.string());
    RunLock lock(logs_dir / (session_id + ".lock"));
    auto report = run_pipeline(read_session(logs_dir, session_id), ws, config, client);
    report.session_id = session_id;
    return report;
}

void to_json(nlohmann::json& j, const Segment& s) {
    j = {{"segment_id", s.segment_id},   {"start_ts", s.start_ts},          {"end_ts", s.end_ts},
         {"gap_before_ms", s.gap_before_ms}, {"event_count", s.events.size()}};
}

void to_json(nlohmann::json& j, const SegmentSummary& s) {
    j = {{"segment_id", s.segment_id},
         {"screen_state", s.screen_state},
         {"actions", s.actions},
         {"resulting_changes", s.resulting_changes},
         {"category", s.category},
         {"confidence", s.confidence}};
}

void from_json(const nlohmann::json& j, SegmentSummary& s) {
    j.at("segment_id").get_to(s.segment_id);
    j.at("screen_state").get_to(s.screen_state);
    j.at("actions").get_to(s.actions);
    j.at("resulting_changes").get_to(s.resulting_changes);
    j.at("category").get_to(s.category);
    j.at("confidence").get_to(s.confidence);
}

void to_json(nlohmann::json& j, const EtlReport& r) {
    j = {{"session_id", r.session_id},
         {"events_read", r.events_read},
         {"events_after_dedup", r.events_after_dedup},
         {"pii_hits", r.pii_hits},
         {"segments", r.segments},
         {"summaries", r.summaries},
         {"drafts", r.drafts},
         {"proposals", r.proposals}};
}

}  // namespace groundwork
