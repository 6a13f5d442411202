#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groundwork/page_model.hpp"

namespace groundwork {

enum class ChangeKind { added, removed, text_changed, name_changed, moved, attr_changed };

std::string_view to_string(ChangeKind kind);
ChangeKind change_kind_from_string(std::string_view s);

/// One element-level delta, keyed by stable element ID.
///
/// `role`/`name` describe the element as the reader should recognise it:
/// the before-state for `removed`, the after-state otherwise.
struct Change {
    ChangeKind kind = ChangeKind::added;
    ElementId id = 0;
    std::string role;
    std::string name;

    // text_changed, name_changed, attr_changed
    std::string old_value;
    std::string new_value;
    // attr_changed: "role", "editable" or "focused"
    std::string attribute;

    // added, moved: placement in the after-tree. No parent means the root.
    std::optional<ElementId> parent_id;
    std::size_t index = 0;

    // added: the element without its children
    std::optional<AXNode> node;

    bool operator==(const Change&) const = default;
};

struct ChangeSet {
    std::uint64_t before_seq = 0;
    std::uint64_t after_seq = 0;
    std::vector<Change> changes;
    std::optional<std::pair<std::string, std::string>> url_changed;

    bool empty() const { return changes.empty() && !url_changed; }
    bool operator==(const ChangeSet&) const = default;
};

/// Matches elements by ID only. Bounding-box-only differences are ignored.
/// Order: removed, added, then modifications; each group by ascending ID.
ChangeSet tree_diff(const AXSnapshot& before, const AXSnapshot& after);

std::string render_change(const Change& change);

/// One line per change (plus a leading `Navigated:` line), or `(no changes)`.
std::string render_verbal(const ChangeSet& cs);

/// Replays `cs` onto `before`. Throws InconsistentChange when a change does
/// not fit the tree it is applied to.
AXSnapshot apply_changes(const AXSnapshot& before, const ChangeSet& cs);

/// Same URL and same tree shape, IDs, roles, names, texts and flags.
/// Bounding boxes are not compared.
bool structurally_equal(const AXSnapshot& a, const AXSnapshot& b);

void to_json(nlohmann::json& j, const Change& c);
void from_json(const nlohmann::json& j, Change& c);
void to_json(nlohmann::json& j, const ChangeSet& cs);
void from_json(const nlohmann::json& j, ChangeSet& cs);

}  // namespace groundwork
