#include "groundwork/diff_engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "groundwork/error.hpp"

namespace groundwork {

namespace {

struct FlatNode {
    const AXNode* node = nullptr;
    std::optional<ElementId> parent;
};

using FlatIndex = std::map<ElementId, FlatNode>;

FlatIndex index_tree(const AXSnapshot& snap) {
    FlatIndex idx;
    visit_preorder(snap.root, [&](const AXNode& n, const AXNode* parent, int) {
        FlatNode f{&n, parent ? std::optional<ElementId>(parent->id) : std::nullopt};
        if (!idx.emplace(n.id, f).second) {
            throw Error(ErrorCode::duplicate_id, "element id " + std::to_string(n.id) + " repeats");
        }
    });
    return idx;
}

std::vector<ElementId> child_ids(const AXNode& n) {
    std::vector<ElementId> ids;
    ids.reserve(n.children.size());
    for (const auto& c : n.children) ids.push_back(c.id);
    return ids;
}

// Elements of `a` that are not part of one longest common subsequence of
// `a` and `b`. Both sequences hold the same set of IDs.
std::set<ElementId> outside_lcs(const std::vector<ElementId>& a, const std::vector<ElementId>& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::vector<std::size_t>> dp(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
        }
    }
    std::set<ElementId> in_lcs;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j]) {
            in_lcs.insert(a[i]);
            ++i;
            ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::set<ElementId> out;
    for (auto id : a) {
        if (!in_lcs.contains(id)) out.insert(id);
    }
    return out;
}

std::size_t position_in_parent(const AXSnapshot& snap, const FlatIndex& idx, ElementId id) {
    const auto& f = idx.at(id);
    if (!f.parent) return 0;
    const auto& siblings = idx.at(*f.parent).node->children;
    for (std::size_t i = 0; i < siblings.size(); ++i) {
        if (siblings[i].id == id) return i;
    }
    (void)snap;
    return 0;
}

AXNode without_children(const AXNode& n) {
    AXNode copy = n;
    copy.children.clear();
    return copy;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string quoted(const std::string& s) { return "'" + s + "'"; }

// `[id] role 'name'`, dropping the name segment when the name is empty.
std::string element_ref(const Change& c) {
    std::string out = "[" + std::to_string(c.id) + "] " + c.role;
    if (!c.name.empty()) out += " " + quoted(c.name);
    return out;
}

}  // namespace

std::string_view to_string(ChangeKind kind) {
    switch (kind) {
        case ChangeKind::added: return "added";
        case ChangeKind::removed: return "removed";
        case ChangeKind::text_changed: return "text_changed";
        case ChangeKind::name_changed: return "name_changed";
        case ChangeKind::moved: return "moved";
        case ChangeKind::attr_changed: return "attr_changed";
    }
    return "added";
}

ChangeKind change_kind_from_string(std::string_view s) {
    for (auto k : {ChangeKind::added, ChangeKind::removed, ChangeKind::text_changed,
                   ChangeKind::name_changed, ChangeKind::moved, ChangeKind::attr_changed}) {
        if (to_string(k) == s) return k;
    }
    throw Error(ErrorCode::validation, "unknown change kind '" + std::string(s) + "'");
}

ChangeSet tree_diff(const AXSnapshot& before, const AXSnapshot& after) {
    const FlatIndex bi = index_tree(before);
    const FlatIndex ai = index_tree(after);

    ChangeSet cs;
    cs.before_seq = before.seq;
    cs.after_seq = after.seq;
    if (before.url != after.url) cs.url_changed = std::make_pair(before.url, after.url);

    for (const auto& [id, f] : bi) {
        if (!ai.contains(id)) {
            Change c;
            c.kind = ChangeKind::removed;
            c.id = id;
            c.role = f.node->role;
            c.name = f.node->name;
            cs.changes.push_back(std::move(c));
        }
    }
    for (const auto& [id, f] : ai) {
        if (!bi.contains(id)) {
            Change c;
            c.kind = ChangeKind::added;
            c.id = id;
            c.role = f.node->role;
            c.name = f.node->name;
            c.parent_id = f.parent;
            c.index = position_in_parent(after, ai, id);
            c.node = without_children(*f.node);
            cs.changes.push_back(std::move(c));
        }
    }

    // Siblings that kept their parent but changed relative order count as moved.
    std::set<ElementId> reordered;
    for (const auto& [pid, af] : ai) {
        auto bit = bi.find(pid);
        if (bit == bi.end()) continue;
        auto stays = [&](ElementId cid, const FlatIndex& other) {
            auto it = other.find(cid);
            return it != other.end() && it->second.parent == pid;
        };
        std::vector<ElementId> seq_before, seq_after;
        for (auto cid : child_ids(*bit->second.node)) {
            if (stays(cid, ai)) seq_before.push_back(cid);
        }
        for (auto cid : child_ids(*af.node)) {
            if (stays(cid, bi)) seq_after.push_back(cid);
        }
        if (seq_before != seq_after) {
            auto out = outside_lcs(seq_before, seq_after);
            reordered.insert(out.begin(), out.end());
        }
    }

    for (const auto& [id, af] : ai) {
        auto bit = bi.find(id);
        if (bit == bi.end()) continue;
        const AXNode& b = *bit->second.node;
        const AXNode& a = *af.node;
        auto base = [&](ChangeKind kind) {
            Change c;
            c.kind = kind;
            c.id = id;
            c.role = a.role;
            c.name = a.name;
            return c;
        };
        if (b.text != a.text) {
            Change c = base(ChangeKind::text_changed);
            c.old_value = b.text;
            c.new_value = a.text;
            cs.changes.push_back(std::move(c));
        }
        if (b.name != a.name) {
            Change c = base(ChangeKind::name_changed);
            c.old_value = b.name;
            c.new_value = a.name;
            cs.changes.push_back(std::move(c));
        }
        if (bit->second.parent != af.parent || reordered.contains(id)) {
            Change c = base(ChangeKind::moved);
            c.parent_id = af.parent;
            c.index = position_in_parent(after, ai, id);
            cs.changes.push_back(std::move(c));
        }
        auto attr = [&](const char* name, std::string old_v, std::string new_v) {
            if (old_v == new_v) return;
            Change c = base(ChangeKind::attr_changed);
            c.attribute = name;
            c.old_value = std::move(old_v);
            c.new_value = std::move(new_v);
            cs.changes.push_back(std::move(c));
        };
        attr("role", b.role, a.role);
        attr("editable", bool_str(b.editable), bool_str(a.editable));
        attr("focused", bool_str(b.focused), bool_str(a.focused));
    }
    return cs;
}

std::string render_change(const Change& c) {
    switch (c.kind) {
        case ChangeKind::added: return "New element: " + element_ref(c);
        case ChangeKind::removed: return "Removed element: " + element_ref(c);
        case ChangeKind::text_changed:
            return "Text changed: " + element_ref(c) + (c.name.empty() ? " " : ": ") +
                   quoted(c.old_value) + " -> " + quoted(c.new_value);
        case ChangeKind::name_changed:
            return "Name changed: [" + std::to_string(c.id) + "]: " + quoted(c.old_value) + " -> " +
                   quoted(c.new_value);
        case ChangeKind::moved: return "Moved element: " + element_ref(c);
        case ChangeKind::attr_changed:
            return "Attribute changed: " + element_ref(c) + ": " + c.attribute + " " + c.old_value +
                   " -> " + c.new_value;
    }
    return {};
}

std::string render_verbal(const ChangeSet& cs) {
    if (cs.empty()) return "(no changes)\n";
    std::string out;
    if (cs.url_changed) {
        out += "Navigated: " + cs.url_changed->first + " -> " + cs.url_changed->second + "\n";
    }
    for (const auto& c : cs.changes) {
        out += render_change(c);
        out += '\n';
    }
    return out;
}

namespace {

struct WorkNode {
    AXNode fields;  // children unused
    std::optional<ElementId> parent;
    std::vector<ElementId> base_children;
    std::vector<std::pair<std::size_t, ElementId>> inserts;
    bool relocated = false;
};

[[noreturn]] void inconsistent(const std::string& what) {
    throw Error(ErrorCode::inconsistent_change, what);
}

}  // namespace

AXSnapshot apply_changes(const AXSnapshot& before, const ChangeSet& cs) {
    std::map<ElementId, WorkNode> work;
    visit_preorder(before.root, [&](const AXNode& n, const AXNode* parent, int) {
        WorkNode w;
        w.fields = without_children(n);
        w.parent = parent ? std::optional<ElementId>(parent->id) : std::nullopt;
        w.base_children = child_ids(n);
        if (!work.emplace(n.id, std::move(w)).second) {
            throw Error(ErrorCode::duplicate_id, "element id " + std::to_string(n.id) + " repeats");
        }
    });

    auto require = [&](ElementId id) -> WorkNode& {
        auto it = work.find(id);
        if (it == work.end()) inconsistent("element " + std::to_string(id) + " absent");
        return it->second;
    };

    for (const auto& c : cs.changes) {
        if (c.kind == ChangeKind::removed) {
            require(c.id);
            work.erase(c.id);
        }
    }
    for (const auto& c : cs.changes) {
        if (c.kind != ChangeKind::added) continue;
        if (work.contains(c.id)) inconsistent("added element " + std::to_string(c.id) + " already present");
        if (!c.node) inconsistent("added element " + std::to_string(c.id) + " carries no payload");
        WorkNode w;
        w.fields = *c.node;
        w.fields.id = c.id;
        w.fields.children.clear();
        w.parent = c.parent_id;
        w.relocated = true;
        work.emplace(c.id, std::move(w));
    }
    for (const auto& c : cs.changes) {
        switch (c.kind) {
            case ChangeKind::added:
            case ChangeKind::removed: break;
            case ChangeKind::text_changed: require(c.id).fields.text = c.new_value; break;
            case ChangeKind::name_changed: require(c.id).fields.name = c.new_value; break;
            case ChangeKind::moved: {
                auto& w = require(c.id);
                w.parent = c.parent_id;
                w.relocated = true;
                break;
            }
            case ChangeKind::attr_changed: {
                auto& w = require(c.id);
                if (c.attribute == "role") {
                    w.fields.role = c.new_value;
                } else if (c.attribute == "editable") {
                    w.fields.editable = c.new_value == "true";
                } else if (c.attribute == "focused") {
                    w.fields.focused = c.new_value == "true";
                } else {
                    inconsistent("unknown attribute '" + c.attribute + "'");
                }
                break;
            }
        }
    }

    // Placement: surviving, unmoved children keep their relative order; added
    // and moved children are inserted at their recorded index, ascending.
    std::optional<ElementId> root_id;
    for (const auto& c : cs.changes) {
        if (c.kind != ChangeKind::added && c.kind != ChangeKind::moved) continue;
        if (!c.parent_id) continue;
        auto pit = work.find(*c.parent_id);
        if (pit == work.end()) inconsistent("parent " + std::to_string(*c.parent_id) + " absent");
        pit->second.inserts.emplace_back(c.index, c.id);
    }
    for (auto& [id, w] : work) {
        if (!w.parent) {
            if (root_id) inconsistent("more than one root");
            root_id = id;
        }
    }
    if (!root_id) inconsistent("no root");

    std::map<ElementId, std::vector<ElementId>> children;
    for (auto& [id, w] : work) {
        std::vector<ElementId> kids;
        for (auto cid : w.base_children) {
            auto it = work.find(cid);
            if (it == work.end() || it->second.relocated || it->second.parent != id) continue;
            kids.push_back(cid);
        }
        std::sort(w.inserts.begin(), w.inserts.end());
        for (const auto& [pos, cid] : w.inserts) {
            kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(std::min(pos, kids.size())), cid);
        }
        children.emplace(id, std::move(kids));
    }

    std::unordered_set<ElementId> placed;
    std::function<AXNode(ElementId)> build = [&](ElementId id) {
        if (!placed.insert(id).second) inconsistent("element " + std::to_string(id) + " placed twice");
        AXNode n = work.at(id).fields;
        for (auto cid : children.at(id)) n.children.push_back(build(cid));
        return n;
    };

    AXSnapshot out;
    out.url = cs.url_changed ? cs.url_changed->second : before.url;
    out.title = before.title;
    out.viewport = before.viewport;
    out.seq = cs.after_seq;
    out.root = build(*root_id);
    if (placed.size() != work.size()) inconsistent("changes leave detached elements");
    return out;
}

namespace {

bool same_structure(const AXNode& a, const AXNode& b) {
    if (a.id != b.id || a.role != b.role || a.name != b.name || a.text != b.text ||
        a.editable != b.editable || a.focused != b.focused || a.children.size() != b.children.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!same_structure(a.children[i], b.children[i])) return false;
    }
    return true;
}

}  // namespace

bool structurally_equal(const AXSnapshot& a, const AXSnapshot& b) {
    return a.url == b.url && same_structure(a.root, b.root);
}

void to_json(nlohmann::json& j, const Change& c) {
    nlohmann::json detail = nlohmann::json::object();
    switch (c.kind) {
        case ChangeKind::text_changed:
            detail = {{"old_text", c.old_value}, {"new_text", c.new_value}};
            break;
        case ChangeKind::name_changed:
            detail = {{"old_name", c.old_value}, {"new_name", c.new_value}};
            break;
        case ChangeKind::attr_changed:
            detail = {{"attribute", c.attribute}, {"old", c.old_value}, {"new", c.new_value}};
            break;
        case ChangeKind::added:
        case ChangeKind::moved:
            detail["parent_id"] = c.parent_id ? nlohmann::json(*c.parent_id) : nlohmann::json(nullptr);
            detail["index"] = c.index;
            if (c.node) detail["node"] = *c.node;
            break;
        case ChangeKind::removed: break;
    }
    j = {{"kind", to_string(c.kind)}, {"id", c.id}, {"role", c.role}, {"name", c.name}, {"detail", detail}};
}

void from_json(const nlohmann::json& j, Change& c) {
    c = Change{};
    c.kind = change_kind_from_string(j.at("kind").get<std::string>());
    j.at("id").get_to(c.id);
    c.role = j.value("role", "");
    c.name = j.value("name", "");
    const auto detail = j.value("detail", nlohmann::json::object());
    switch (c.kind) {
        case ChangeKind::text_changed:
            c.old_value = detail.value("old_text", "");
            c.new_value = detail.value("new_text", "");
            break;
        case ChangeKind::name_changed:
            c.old_value = detail.value("old_name", "");
            c.new_value = detail.value("new_name", "");
            break;
        case ChangeKind::attr_changed:
            c.attribute = detail.value("attribute", "");
            c.old_value = detail.value("old", "");
            c.new_value = detail.value("new", "");
            break;
        case ChangeKind::added:
        case ChangeKind::moved:
            if (detail.contains("parent_id") && !detail["parent_id"].is_null()) {
                c.parent_id = detail["parent_id"].get<ElementId>();
            }
            c.index = detail.value("index", std::size_t{0});
            if (detail.contains("node")) c.node = detail["node"].get<AXNode>();
            break;
        case ChangeKind::removed: break;
    }
}

void to_json(nlohmann::json& j, const ChangeSet& cs) {
    j = {{"before_seq", cs.before_seq}, {"after_seq", cs.after_seq}, {"changes", cs.changes}};
    j["url_changed"] = cs.url_changed
                           ? nlohmann::json{cs.url_changed->first, cs.url_changed->second}
                           : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ChangeSet& cs) {
    cs = ChangeSet{};
    cs.before_seq = j.value("before_seq", std::uint64_t{0});
    cs.after_seq = j.value("after_seq", std::uint64_t{0});
    j.at("changes").get_to(cs.changes);
    if (j.contains("url_changed") && !j["url_changed"].is_null()) {
        cs.url_changed = std::make_pair(j["url_changed"][0].get<std::string>(),
                                        j["url_changed"][1].get<std::string>());
    }
}

}  // namespace groundwork
