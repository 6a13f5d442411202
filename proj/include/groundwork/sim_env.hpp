#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundwork/environment.hpp"

namespace groundwork::sim {

struct ElementSpec {
    ElementId id = 0;
    std::optional<ElementId> parent;  // none for the page root
    std::string role;
    std::string name;
    std::string text;
    Rect bbox;
    bool editable = false;
    std::vector<std::string> options;  // combobox choices
};

struct PageSpec {
    std::string page_id;
    std::string url;
    std::string title;
    std::vector<ElementSpec> elements;  // parents listed before children
};

enum class EffectType { goto_page, set_text, append_element, set_field };

/// Text values may use `${value:ID}` (current text of element ID on the
/// source page), `${field:NAME}` and `${counter:NAME}` (next value of a
/// per-session counter, zero-padded to 7 digits).
struct Effect {
    EffectType type = EffectType::goto_page;
    std::string page;  // goto_page target; set_text/append_element page (defaults to source page)
    ElementId id = 0;
    std::string text;
    std::optional<ElementSpec> element;
    std::string field;
};

struct Transition {
    std::string page;
    ActionKind action = ActionKind::click;
    ElementId target = 0;
    std::optional<std::string> argument;  // exact match; absent matches anything
    std::vector<Effect> effects;
};

struct SiteSpec {
    std::string site_id;
    std::string origin;
    std::string start_page;
    Viewport viewport;
    std::map<std::string, PageSpec> pages;
    std::vector<Transition> transitions;
    std::map<std::string, int> counters;  // initial counter values
};

enum class CheckType { page_reached, element_text_equals, answer_contains, field_equals };

struct Check {
    CheckType type = CheckType::page_reached;
    std::string page;
    ElementId id = 0;
    std::string text;  // expected text; may reference `${text:ID}` on `page`
    std::string field;
};

struct TaskSpec {
    std::string task_id;
    std::string template_id;
    std::string instruction;
    std::string site_id;
    std::string category;  // dashboard, form, knowledge, list-filter, list-sort, service-catalog
    std::vector<Check> success;
    std::vector<Action> solution;

    bool needs_answer() const;
};

inline const std::vector<std::string>& task_categories() {
    static const std::vector<std::string> cats{"dashboard", "form", "knowledge",
                                               "list-filter", "list-sort", "service-catalog"};
    return cats;
}

/// Throws ValidationError if a transition or effect references a missing
/// page or element, or element IDs repeat within a page.
void validate(const SiteSpec& site);

/// One browsing session over an immutable SiteSpec.
class Session final : public Environment {
public:
    explicit Session(std::shared_ptr<const SiteSpec> site, const TaskSpec* task = nullptr);

    AXSnapshot reset();
    AXSnapshot observe() const override;
    StepResult step(const Action& action) override;
    bool goal_reached() const override;
    std::optional<bool> check_answer(const std::string& answer) const override;

    bool check_success(const TaskSpec& task, const std::string& answer) const;

    const std::string& current_page() const { return page_; }
    const SiteSpec& site() const { return *site_; }

private:
    const PageSpec& page_spec(const std::string& page) const;
    std::vector<ElementSpec> elements_of(const std::string& page) const;
    std::optional<ElementSpec> find_element(const std::string& page, ElementId id) const;
    std::string current_text(const std::string& page, ElementId id) const;
    std::string expand(const std::string& tmpl, const std::string& page);
    std::string expand_check(const std::string& tmpl, const std::string& page) const;
    bool apply_transitions(const Action& action);
    void goto_page(const std::string& page);
    AXSnapshot build_snapshot();

    std::shared_ptr<const SiteSpec> site_;
    const TaskSpec* task_ = nullptr;
    std::string page_;
    std::vector<std::string> back_stack_;
    std::map<std::pair<std::string, ElementId>, std::string> text_;
    std::map<std::string, std::vector<ElementSpec>> appended_;
    std::map<std::string, std::string> fields_;
    std::map<std::string, int> counters_;
    std::optional<ElementId> focused_;
    Viewport viewport_;
    std::uint64_t seq_ = 0;
    AXSnapshot last_;
};

/// A directory of sites/*.json and tasks/*.json.
class Catalog {
public:
    static Catalog load(const std::string& sites_dir, const std::string& tasks_dir);

    std::shared_ptr<const SiteSpec> site(const std::string& site_id) const;
    const TaskSpec* task(const std::string& task_id) const;
    const std::vector<TaskSpec>& tasks() const { return tasks_; }

    /// Fresh session on the task's site, bound to the task.
    std::unique_ptr<Session> open(const TaskSpec& task) const;
    EnvFactory factory_for(const TaskSpec& task) const;

    void add_site(SiteSpec site);
    void add_task(TaskSpec task);

private:
    std::map<std::string, std::shared_ptr<const SiteSpec>> sites_;
    std::vector<TaskSpec> tasks_;
};

void from_json(const nlohmann::json& j, ElementSpec& e);
void to_json(nlohmann::json& j, const ElementSpec& e);
void from_json(const nlohmann::json& j, SiteSpec& s);
void from_json(const nlohmann::json& j, TaskSpec& t);
void to_json(nlohmann::json& j, const TaskSpec& t);

}  // namespace groundwork::sim
