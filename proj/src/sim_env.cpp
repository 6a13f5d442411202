#include "groundwork/sim_env.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>

#include "groundwork/error.hpp"

namespace groundwork::sim {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::validation, msg); }

std::string pad7(int v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%07d", v);
    return buf;
}

// Replaces every `${kind:arg}` using `resolve(kind, arg)`.
template <typename Resolve>
std::string substitute(const std::string& tmpl, Resolve&& resolve) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        auto open = tmpl.find("${", i);
        if (open == std::string::npos) {
            out.append(tmpl, i);
            break;
        }
        auto close = tmpl.find('}', open);
        if (close == std::string::npos) {
            out.append(tmpl, i);
            break;
        }
        out.append(tmpl, i, open - i);
        std::string body = tmpl.substr(open + 2, close - open - 2);
        auto colon = body.find(':');
        if (colon == std::string::npos) invalid("template '${" + body + "}' lacks a kind");
        out += resolve(body.substr(0, colon), body.substr(colon + 1));
        i = close + 1;
    }
    return out;
}

bool is_checkbox(const ElementSpec& e) { return e.role == "checkbox"; }

}  // namespace

bool TaskSpec::needs_answer() const {
    return std::any_of(success.begin(), success.end(),
                       [](const Check& c) { return c.type == CheckType::answer_contains; });
}

void validate(const SiteSpec& site) {
    if (!site.pages.contains(site.start_page)) invalid(site.site_id + ": start_page missing");
    std::map<std::string, std::set<ElementId>> ids;
    for (const auto& [pid, page] : site.pages) {
        if (page.elements.empty()) invalid(site.site_id + "/" + pid + ": page has no elements");
        auto& seen = ids[pid];
        for (const auto& e : page.elements) {
            if (!seen.insert(e.id).second) {
                invalid(site.site_id + "/" + pid + ": element id " + std::to_string(e.id) + " repeats");
            }
            if (e.parent && !seen.contains(*e.parent)) {
                invalid(site.site_id + "/" + pid + ": element " + std::to_string(e.id) +
                        " listed before its parent");
            }
        }
        if (page.elements.front().parent) invalid(site.site_id + "/" + pid + ": first element must be the root");
    }
    for (const auto& t : site.transitions) {
        auto it = ids.find(t.page);
        if (it == ids.end()) invalid(site.site_id + ": transition on unknown page '" + t.page + "'");
        if (shape_of(t.action).target && !it->second.contains(t.target)) {
            invalid(site.site_id + ": transition targets unknown element " + std::to_string(t.target) +
                    " on '" + t.page + "'");
        }
        for (const auto& e : t.effects) {
            const std::string& page = e.page.empty() ? t.page : e.page;
            if (!ids.contains(page)) invalid(site.site_id + ": effect references unknown page '" + page + "'");
            if (e.type == EffectType::set_text && !ids[page].contains(e.id)) {
                invalid(site.site_id + ": set_text on unknown element " + std::to_string(e.id));
            }
            if (e.type == EffectType::append_element) {
                if (!e.element) invalid(site.site_id + ": append_element without element");
                if (!e.element->parent || !ids[page].contains(*e.element->parent)) {
                    invalid(site.site_id + ": appended element needs an existing parent");
                }
            }
        }
    }
}

Session::Session(std::shared_ptr<const SiteSpec> site, const TaskSpec* task)
    : site_(std::move(site)), task_(task) {
    reset();
}

AXSnapshot Session::reset() {
    page_ = site_->start_page;
    back_stack_.clear();
    text_.clear();
    appended_.clear();
    fields_.clear();
    counters_ = site_->counters;
    focused_.reset();
    viewport_ = site_->viewport;
    return build_snapshot();
}

AXSnapshot Session::observe() const { return last_; }

const PageSpec& Session::page_spec(const std::string& page) const {
    auto it = site_->pages.find(page);
    if (it == site_->pages.end()) invalid("unknown page '" + page + "'");
    return it->second;
}

std::vector<ElementSpec> Session::elements_of(const std::string& page) const {
    std::vector<ElementSpec> els = page_spec(page).elements;
    if (auto it = appended_.find(page); it != appended_.end()) {
        els.insert(els.end(), it->second.begin(), it->second.end());
    }
    return els;
}

std::optional<ElementSpec> Session::find_element(const std::string& page, ElementId id) const {
    for (auto& e : elements_of(page)) {
        if (e.id == id) return e;
    }
    return std::nullopt;
}

std::string Session::current_text(const std::string& page, ElementId id) const {
    if (auto it = text_.find({page, id}); it != text_.end()) return it->second;
    if (auto e = find_element(page, id)) {
        if (is_checkbox(*e) && e->text.empty()) return "unchecked";
        return e->text;
    }
    return {};
}

std::string Session::expand(const std::string& tmpl, const std::string& page) {
    return substitute(tmpl, [&](const std::string& kind, const std::string& arg) -> std::string {
        if (kind == "value") return current_text(page, std::stoll(arg));
        if (kind == "field") return fields_[arg];
        if (kind == "counter") return pad7(++counters_[arg]);
        invalid("unknown template kind '" + kind + "'");
    });
}

std::string Session::expand_check(const std::string& tmpl, const std::string& page) const {
    return substitute(tmpl, [&](const std::string& kind, const std::string& arg) -> std::string {
        if (kind == "text") return current_text(page, std::stoll(arg));
        if (kind == "field") {
            auto it = fields_.find(arg);
            return it == fields_.end() ? std::string() : it->second;
        }
        invalid("unknown check template kind '" + kind + "'");
    });
}

void Session::goto_page(const std::string& page) {
    page_spec(page);
    if (page != page_) {
        back_stack_.push_back(page_);
        page_ = page;
        viewport_.scroll_x = 0;
        viewport_.scroll_y = 0;
        focused_.reset();
    }
}

bool Session::apply_transitions(const Action& action) {
    const std::string source = page_;
    bool matched = false;
    for (const auto& t : site_->transitions) {
        if (t.page != source || t.action != action.kind) continue;
        if (shape_of(t.action).target && (!action.target_id || *action.target_id != t.target)) continue;
        if (t.argument && *t.argument != action.argument) continue;
        matched = true;
        std::optional<std::string> next_page;
        for (const auto& e : t.effects) {
            const std::string& page = e.page.empty() ? source : e.page;
            switch (e.type) {
                case EffectType::goto_page: next_page = e.page; break;
                case EffectType::set_text: text_[{page, e.id}] = expand(e.text, source); break;
                case EffectType::set_field: fields_[e.field] = expand(e.text, source); break;
                case EffectType::append_element: {
                    ElementSpec el = *e.element;
                    el.text = expand(el.text, source);
                    el.name = expand(el.name, source);
                    auto& list = appended_[page];
                    std::erase_if(list, [&](const ElementSpec& x) { return x.id == el.id; });
                    list.push_back(std::move(el));
                    break;
                }
            }
        }
        if (next_page) goto_page(*next_page);
        break;
    }
    return matched;
}

StepResult Session::step(const Action& action) {
    if (!is_environment_action(action.kind)) {
        invalid("'" + std::string(to_string(action.kind)) + "' is not an environment action");
    }
    std::optional<ElementSpec> target;
    if (shape_of(action.kind).target) {
        target = find_element(page_, *action.target_id);
        if (!target) {
            throw Error(ErrorCode::unknown_element,
                        "element " + std::to_string(*action.target_id) + " is not on page '" + page_ + "'");
        }
    }

    std::string note;
    switch (action.kind) {
        case ActionKind::click: {
            if (is_checkbox(*target)) {
                auto cur = current_text(page_, target->id);
                text_[{page_, target->id}] = cur == "checked" ? "unchecked" : "checked";
                note = "toggled [" + std::to_string(target->id) + "]";
            }
            if (apply_transitions(action)) note = "ok";
            break;
        }
        case ActionKind::type_text:
        case ActionKind::select_option: {
            const bool select = action.kind == ActionKind::select_option;
            if (!select && !target->editable) {
                note = "no-op: element [" + std::to_string(target->id) + "] is not editable";
                break;
            }
            if (select && std::find(target->options.begin(), target->options.end(), action.argument) ==
                              target->options.end()) {
                note = "no-op: no option '" + action.argument + "'";
                break;
            }
            focused_ = target->id;
            text_[{page_, target->id}] = action.argument;
            note = select ? "selected" : "typed";
            apply_transitions(action);
            break;
        }
        case ActionKind::scroll_into: {
            if (intersects(target->bbox, viewport_)) {
                note = "already visible";
            } else {
                viewport_.scroll_y = std::max(0, target->bbox.y - viewport_.height / 4);
                viewport_.scroll_x = std::max(0, std::min(viewport_.scroll_x, target->bbox.x));
                note = "scrolled to [" + std::to_string(target->id) + "]";
            }
            break;
        }
        case ActionKind::navigate: {
            std::optional<std::string> dest;
            for (const auto& [pid, p] : site_->pages) {
                if (p.url == action.argument || site_->origin + p.url == action.argument) dest = pid;
            }
            if (dest) {
                goto_page(*dest);
                note = "ok";
            } else {
                note = "no-op: no page at " + action.argument;
            }
            break;
        }
        case ActionKind::go_back: {
            if (back_stack_.empty()) {
                note = "no-op: no history";
            } else {
                page_ = back_stack_.back();
                back_stack_.pop_back();
                viewport_.scroll_x = viewport_.scroll_y = 0;
                focused_.reset();
                note = "ok";
            }
            break;
        }
        default: break;
    }
    if (note.empty()) note = "no-op: no matching transition";
    return {build_snapshot(), note};
}

AXSnapshot Session::build_snapshot() {
    const PageSpec& spec = page_spec(page_);
    std::vector<ElementSpec> els = elements_of(page_);
    std::unordered_map<ElementId, std::vector<std::size_t>> kids;
    for (std::size_t i = 1; i < els.size(); ++i) kids[*els[i].parent].push_back(i);

    std::function<AXNode(std::size_t)> build = [&](std::size_t i) {
        const auto& e = els[i];
        AXNode n;
        n.id = e.id;
        n.role = e.role;
        n.name = e.name;
        n.text = current_text(page_, e.id);
        n.bbox = e.bbox;
        n.editable = e.editable;
        n.focused = focused_ && *focused_ == e.id;
        for (auto k : kids[e.id]) n.children.push_back(build(k));
        return n;
    };

    AXSnapshot snap;
    snap.url = site_->origin + spec.url;
    snap.title = spec.title;
    snap.root = build(0);
    snap.viewport = viewport_;
    snap.seq = ++seq_;
    last_ = snap;
    return snap;
}

bool Session::check_success(const TaskSpec& task, const std::string& answer) const {
    for (const auto& c : task.success) {
        switch (c.type) {
            case CheckType::page_reached:
                if (page_ != c.page) return false;
                break;
            case CheckType::element_text_equals: {
                const std::string& page = c.page.empty() ? page_ : c.page;
                if (page != page_) return false;
                if (current_text(page, c.id) != expand_check(c.text, page)) return false;
                break;
            }
            case CheckType::answer_contains: {
                std::string expected = expand_check(c.text, c.page.empty() ? page_ : c.page);
                if (expected.empty() || answer.find(expected) == std::string::npos) return false;
                break;
            }
            case CheckType::field_equals: {
                auto it = fields_.find(c.field);
                if (it == fields_.end() || it->second != expand_check(c.text, page_)) return false;
                break;
            }
        }
    }
    return true;
}

bool Session::goal_reached() const {
    if (!task_ || task_->needs_answer()) return false;
    return check_success(*task_, {});
}

std::optional<bool> Session::check_answer(const std::string& answer) const {
    if (!task_) return std::nullopt;
    return check_success(*task_, answer);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

ActionKind parse_kind(const std::string& s) {
    auto k = action_kind_from_string(s);
    if (!k) invalid("unknown action kind '" + s + "'");
    return *k;
}

EffectType parse_effect(const std::string& s) {
    if (s == "goto") return EffectType::goto_page;
    if (s == "set_text") return EffectType::set_text;
    if (s == "append") return EffectType::append_element;
    if (s == "set_field") return EffectType::set_field;
    invalid("unknown effect '" + s + "'");
}

CheckType parse_check(const std::string& s) {
    if (s == "page_reached") return CheckType::page_reached;
    if (s == "element_text_equals") return CheckType::element_text_equals;
    if (s == "answer_contains") return CheckType::answer_contains;
    if (s == "field_equals") return CheckType::field_equals;
    invalid("unknown check '" + s + "'");
}

std::string check_name(CheckType t) {
    switch (t) {
        case CheckType::page_reached: return "page_reached";
        case CheckType::element_text_equals: return "element_text_equals";
        case CheckType::answer_contains: return "answer_contains";
        case CheckType::field_equals: return "field_equals";
    }
    return {};
}

}  // namespace

void from_json(const nlohmann::json& j, ElementSpec& e) {
    e = ElementSpec{};
    j.at("id").get_to(e.id);
    if (j.contains("parent") && !j["parent"].is_null()) e.parent = j["parent"].get<ElementId>();
    j.at("role").get_to(e.role);
    e.name = j.value("name", "");
    e.text = j.value("text", "");
    if (j.contains("bbox")) j.at("bbox").get_to(e.bbox);
    e.editable = j.value("editable", false);
    if (j.contains("options")) j.at("options").get_to(e.options);
}

void to_json(nlohmann::json& j, const ElementSpec& e) {
    j = {{"id", e.id}, {"role", e.role}, {"name", e.name}, {"text", e.text}, {"bbox", e.bbox}};
    j["parent"] = e.parent ? nlohmann::json(*e.parent) : nlohmann::json(nullptr);
    if (e.editable) j["editable"] = true;
    if (!e.options.empty()) j["options"] = e.options;
}

void from_json(const nlohmann::json& j, SiteSpec& s) {
    s = SiteSpec{};
    j.at("site_id").get_to(s.site_id);
    j.at("origin").get_to(s.origin);
    j.at("start_page").get_to(s.start_page);
    if (j.contains("viewport")) {
        s.viewport.width = j["viewport"].value("width", 1280);
        s.viewport.height = j["viewport"].value("height", 720);
    }
    for (const auto& [pid, pj] : j.at("pages").items()) {
        PageSpec p;
        p.page_id = pid;
        pj.at("url").get_to(p.url);
        p.title = pj.value("title", "");
        pj.at("elements").get_to(p.elements);
        s.pages.emplace(pid, std::move(p));
    }
    for (const auto& tj : j.value("transitions", nlohmann::json::array())) {
        Transition t;
        tj.at("page").get_to(t.page);
        t.action = parse_kind(tj.at("action").get<std::string>());
        t.target = tj.value("target", ElementId{0});
        if (tj.contains("argument")) t.argument = tj["argument"].get<std::string>();
        for (const auto& ej : tj.at("effects")) {
            Effect e;
            e.type = parse_effect(ej.at("type").get<std::string>());
            e.page = ej.value("page", "");
            e.id = ej.value("id", ElementId{0});
            e.text = ej.value("text", "");
            e.field = ej.value("field", "");
            if (ej.contains("element")) e.element = ej["element"].get<ElementSpec>();
            t.effects.push_back(std::move(e));
        }
        s.transitions.push_back(std::move(t));
    }
    if (j.contains("counters")) j.at("counters").get_to(s.counters);
}

void from_json(const nlohmann::json& j, TaskSpec& t) {
    t = TaskSpec{};
    j.at("task_id").get_to(t.task_id);
    t.template_id = j.value("template_id", t.task_id);
    j.at("instruction").get_to(t.instruction);
    j.at("site_id").get_to(t.site_id);
    j.at("category").get_to(t.category);
    for (const auto& cj : j.at("success")) {
        Check c;
        c.type = parse_check(cj.at("type").get<std::string>());
        c.page = cj.value("page", "");
        c.id = cj.value("id", ElementId{0});
        c.text = cj.value("text", "");
        c.field = cj.value("field", "");
        t.success.push_back(std::move(c));
    }
    for (const auto& aj : j.value("solution", nlohmann::json::array())) {
        t.solution.push_back(parse_action(aj.get<std::string>()).action);
    }
}

void to_json(nlohmann::json& j, const TaskSpec& t) {
    j = {{"task_id", t.task_id},
         {"template_id", t.template_id},
         {"instruction", t.instruction},
         {"site_id", t.site_id},
         {"category", t.category}};
    auto checks = nlohmann::json::array();
    for (const auto& c : t.success) {
        nlohmann::json cj = {{"type", check_name(c.type)}};
        if (!c.page.empty()) cj["page"] = c.page;
        if (c.id) cj["id"] = c.id;
        if (!c.text.empty()) cj["text"] = c.text;
        if (!c.field.empty()) cj["field"] = c.field;
        checks.push_back(std::move(cj));
    }
    j["success"] = std::move(checks);
    auto sol = nlohmann::json::array();
    for (const auto& a : t.solution) sol.push_back(format_action(a));
    j["solution"] = std::move(sol);
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::io, "cannot open " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        invalid(p.string() + ": " + e.what());
    }
}

std::vector<std::filesystem::path> json_files(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

Catalog Catalog::load(const std::string& sites_dir, const std::string& tasks_dir) {
    Catalog cat;
    for (const auto& f : json_files(sites_dir)) cat.add_site(read_json(f).get<SiteSpec>());
    for (const auto& f : json_files(tasks_dir)) {
        auto j = read_json(f);
        if (j.is_array()) {
            for (const auto& tj : j) cat.add_task(tj.get<TaskSpec>());
        } else {
            cat.add_task(j.get<TaskSpec>());
        }
    }
    return cat;
}

void Catalog::add_site(SiteSpec site) {
    validate(site);
    auto id = site.site_id;
    sites_[id] = std::make_shared<const SiteSpec>(std::move(site));
}

void Catalog::add_task(TaskSpec task) {
    if (!sites_.contains(task.site_id)) invalid(task.task_id + ": unknown site '" + task.site_id + "'");
    if (this->task(task.task_id)) invalid("duplicate task id '" + task.task_id + "'");
    tasks_.push_back(std::move(task));
}

std::shared_ptr<const SiteSpec> Catalog::site(const std::string& site_id) const {
    auto it = sites_.find(site_id);
    if (it == sites_.end()) throw Error(ErrorCode::not_found, "unknown site '" + site_id + "'");
    return it->second;
}

const TaskSpec* Catalog::task(const std::string& task_id) const {
    for (const auto& t : tasks_) {
        if (t.task_id == task_id) return &t;
    }
    return nullptr;
}

std::unique_ptr<Session> Catalog::open(const TaskSpec& task) const {
    return std::make_unique<Session>(site(task.site_id), &task);
}

EnvFactory Catalog::factory_for(const TaskSpec& task) const {
    auto s = site(task.site_id);
    const TaskSpec* t = &task;
    return [s, t]() -> std::unique_ptr<Environment> { return std::make_unique<Session>(s, t); };
}

}  // namespace groundwork::sim
