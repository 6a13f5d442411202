#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace groundwork {

using ElementId = std::int64_t;

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    bool operator==(const Rect&) const = default;
};

struct Viewport {
    int scroll_x = 0;
    int scroll_y = 0;
    int width = 1280;
    int height = 720;

    bool operator==(const Viewport&) const = default;
};

/// One accessibility-tree element. IDs are assigned by the environment and
/// stay stable across observations of the same page.
struct AXNode {
    ElementId id = 0;
    std::string role;
    std::string name;
    std::string text;
    Rect bbox;
    std::vector<AXNode> children;
    bool editable = false;
    bool focused = false;

    bool operator==(const AXNode&) const = default;
};

struct AXSnapshot {
    std::string url;
    std::string title;
    AXNode root;
    Viewport viewport;
    std::uint64_t seq = 0;

    bool operator==(const AXSnapshot&) const = default;
};

/// Throws DuplicateId on repeated IDs, ValidationError on negative extents.
void validate(const AXSnapshot& snapshot);

std::size_t node_count(const AXNode& root);

/// Pre-order walk; the callback receives the node, its parent (nullptr for
/// the root) and its depth.
void visit_preorder(const AXNode& root,
                    const std::function<void(const AXNode&, const AXNode*, int)>& fn);

/// Area-positive overlap test between an element box and the viewport.
bool intersects(const Rect& box, const Viewport& viewport);

/// `[id] role 'name' text`, one line per node, two spaces per depth level.
std::string render_full(const AXSnapshot& snapshot);

/// Viewport-visible nodes plus their ancestors, then `(+K elements off-screen)`.
std::string render_viewport(const AXSnapshot& snapshot);

/// Number of nodes omitted by render_viewport.
std::size_t offscreen_count(const AXSnapshot& snapshot);

/// SHA-256 of render_full; identifies a page state independent of scrolling.
std::string snapshot_digest(const AXSnapshot& snapshot);

void to_json(nlohmann::json& j, const Rect& r);
void from_json(const nlohmann::json& j, Rect& r);
void to_json(nlohmann::json& j, const Viewport& v);
void from_json(const nlohmann::json& j, Viewport& v);
void to_json(nlohmann::json& j, const AXNode& n);
void from_json(const nlohmann::json& j, AXNode& n);
void to_json(nlohmann::json& j, const AXSnapshot& s);
void from_json(const nlohmann::json& j, AXSnapshot& s);

AXSnapshot load_snapshot(const std::string& path);

}  // namespace groundwork
