#include "groundwork/behavior_logger.hpp"

#include <array>
#include <climits>
#include <fstream>
#include <sstream>

#include "groundwork/error.hpp"

namespace groundwork {

namespace {

constexpr std::array kKinds{EventKind::page_view, EventKind::click, EventKind::input, EventKind::tab_switch,
                            EventKind::screenshot_ref};

std::optional<AXNode> find_node(const AXNode& root, ElementId id) {
    std::optional<AXNode> found;
    visit_preorder(root, [&](const AXNode& n, const AXNode*, int) {
        if (!found && n.id == id) found = n;
    });
    return found;
}

}  // namespace

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::page_view: return "page_view";
        case EventKind::click: return "click";
        case EventKind::input: return "input";
        case EventKind::tab_switch: return "tab_switch";
        case EventKind::screenshot_ref: return "screenshot_ref";
    }
    return "page_view";
}

EventKind event_kind_from_string(std::string_view s) {
    for (auto k : kKinds) {
        if (to_string(k) == s) return k;
    }
    throw Error(ErrorCode::validation, "unknown event kind '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const BehaviorEvent& e) {
    j = {{"ts", e.ts},
         {"session_id", e.session_id},
         {"tab_id", e.tab_id},
         {"site", e.site},
         {"url", e.url},
         {"title", e.title},
         {"kind", to_string(e.kind)}};
    if (e.element) {
        j["element"] = {{"role", e.element->role}, {"name", e.element->name}, {"id", e.element->id}};
    } else {
        j["element"] = nullptr;
    }
    j["payload"] = e.payload ? nlohmann::json(*e.payload) : nlohmann::json(nullptr);
    j["snapshot_digest"] = e.snapshot_digest;
    if (e.repeat != 1) j["repeat"] = e.repeat;
}

void from_json(const nlohmann::json& j, BehaviorEvent& e) {
    try {
        e = BehaviorEvent{};
        j.at("ts").get_to(e.ts);
        j.at("session_id").get_to(e.session_id);
        e.tab_id = j.value("tab_id", "");
        j.at("site").get_to(e.site);
        e.url = j.value("url", "");
        e.title = j.value("title", "");
        e.kind = event_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("element") && !j["element"].is_null()) {
            const auto& el = j["element"];
            e.element = ElementRef{el.value("role", ""), el.value("name", ""), el.value("id", ElementId{0})};
        }
        if (j.contains("payload") && !j["payload"].is_null()) e.payload = j["payload"].get<std::string>();
        e.snapshot_digest = j.value("snapshot_digest", "");
        e.repeat = j.value("repeat", std::size_t{1});
        if (e.repeat == 0) throw Error(ErrorCode::validation, "repeat must be >= 1");
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::validation, std::string("bad event: ") + ex.what());
    }
}

BehaviorLogger::BehaviorLogger(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path BehaviorLogger::session_path(const std::string& session_id) const {
    if (session_id.empty() || session_id.find_first_of("/\\") != std::string::npos || session_id == "." ||
        session_id == "..") {
        throw Error(ErrorCode::validation, "bad session id '" + session_id + "'");
    }
    return dir_ / (session_id + ".ndjson");
}

bool BehaviorLogger::record(const BehaviorEvent& event, const ConsentState& consent) {
    if (!consent.permits()) return false;
    const auto path = session_path(event.session_id);
    std::lock_guard lock(mu_);
    auto last = last_ts_.find(event.session_id);
    if (last == last_ts_.end()) {
        std::int64_t prev = INT64_MIN;
        for (const auto& e : read_session(dir_, event.session_id)) prev = std::max(prev, e.ts);
        last = last_ts_.emplace(event.session_id, prev).first;
    }
    if (event.ts < last->second) {
        throw Error(ErrorCode::unordered_input, "event ts " + std::to_string(event.ts) + " precedes " +
                                                    std::to_string(last->second) + " in " + event.session_id);
    }
    {
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << nlohmann::json(event).dump() << '\n';
        out.flush();
        if (!out) throw Error(ErrorCode::io, "cannot append to " + path.string());
    }
    std::ofstream hwm(dir_ / (event.session_id + ".hwm"), std::ios::trunc);
    hwm << std::filesystem::file_size(path) << '\n';
    last->second = event.ts;
    return true;
}

std::uint64_t BehaviorLogger::high_water_mark(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    std::ifstream in(dir_ / (session_id + ".hwm"));
    std::uint64_t mark = 0;
    in >> mark;
    return mark;
}

std::size_t BehaviorLogger::event_count(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    return read_session(dir_, session_id).size();
}

std::vector<BehaviorEvent> events_from_ndjson(std::string_view text) {
    std::vector<BehaviorEvent> out;
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        if (end == std::string_view::npos) break;  // partial trailing line
        ++lineno;
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line).get<BehaviorEvent>());
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::validation, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::string events_to_ndjson(const std::vector<BehaviorEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += nlohmann::json(e).dump();
        out += '\n';
    }
    return out;
}

std::vector<BehaviorEvent> read_events(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, "no event log at " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return events_from_ndjson(buf.str());
}

std::vector<BehaviorEvent> read_session(const std::filesystem::path& dir, const std::string& session_id) {
    const auto path = dir / (session_id + ".ndjson");
    if (!std::filesystem::exists(path)) return {};
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::ifstream hwm(dir / (session_id + ".hwm"));
    std::uint64_t mark = 0;
    if (hwm >> mark && mark < text.size()) text.resize(mark);
    return events_from_ndjson(text);
}

std::vector<BehaviorEvent> dedup_compress(const std::vector<BehaviorEvent>& events) {
    std::vector<BehaviorEvent> out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (i > 0 && e.ts < events[i - 1].ts) {
            throw Error(ErrorCode::unordered_input, "timestamps decrease at event " + std::to_string(i));
        }
        if (e.kind == EventKind::page_view && !out.empty()) {
            auto& prev = out.back();
            if (prev.kind == EventKind::page_view && prev.site == e.site &&
                prev.snapshot_digest == e.snapshot_digest) {
                prev.repeat += e.repeat;
                continue;
            }
        }
        out.push_back(e);
    }
    return out;
}

std::vector<BehaviorEvent> capture_solution(const sim::Catalog& catalog, const sim::TaskSpec& task,
                                            const std::string& session_id, std::int64_t start_ts,
                                            std::int64_t step_ms) {
    auto session = catalog.open(task);
    std::vector<BehaviorEvent> events;
    std::int64_t ts = start_ts;
    const std::string origin = session->site().origin;

    auto base = [&](const AXSnapshot& snap, EventKind kind) {
        BehaviorEvent e;
        e.ts = ts;
        e.session_id = session_id;
        e.tab_id = "tab-1";
        e.site = origin;
        e.url = snap.url;
        e.title = snap.title;
        e.kind = kind;
        e.snapshot_digest = snapshot_digest(snap);
        return e;
    };

    AXSnapshot snap = session->observe();
    events.push_back(base(snap, EventKind::page_view));
    for (const auto& action : task.solution) {
        if (!is_environment_action(action.kind)) continue;
        ts += step_ms;
        if (action.kind == ActionKind::click || action.kind == ActionKind::type_text ||
            action.kind == ActionKind::select_option) {
            auto e = base(snap, action.kind == ActionKind::click ? EventKind::click : EventKind::input);
            if (action.target_id) {
                auto node = find_node(snap.root, *action.target_id);
                if (!node) throw Error(ErrorCode::unknown_element, "solution targets missing element");
                e.element = ElementRef{node->role, node->name, node->id};
            }
            if (action.kind != ActionKind::click) e.payload = action.argument;
            events.push_back(std::move(e));
        }
        session->step(action);
        const AXSnapshot next = session->observe();
        if (next.url != snap.url || snapshot_digest(next) != snapshot_digest(snap)) {
            ts += step_ms / 2;
            snap = next;
            events.push_back(base(snap, EventKind::page_view));
        } else {
            snap = next;
        }
    }
    return events;
}

}  // namespace groundwork
