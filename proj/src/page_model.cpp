#include "groundwork/page_model.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "groundwork/error.hpp"
#include "groundwork/hashing.hpp"

namespace groundwork {

namespace {

void render_line(std::string& out, const AXNode& node, int depth) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += '[';
    out += std::to_string(node.id);
    out += "] ";
    out += node.role;
    out += " '";
    out += node.name;
    out += '\'';
    if (!node.text.empty()) {
        out += ' ';
        out += node.text;
    }
    out += '\n';
}

// Marks nodes to keep; returns true if this subtree has any kept node.
bool mark_visible(const AXNode& node, const Viewport& vp, std::unordered_set<ElementId>& keep) {
    bool any = intersects(node.bbox, vp);
    for (const auto& child : node.children) {
        any = mark_visible(child, vp, keep) || any;
    }
    if (any) keep.insert(node.id);
    return any;
}

void render_kept(std::string& out, const AXNode& node, int depth,
                 const std::unordered_set<ElementId>& keep) {
    if (!keep.contains(node.id)) return;
    render_line(out, node, depth);
    for (const auto& child : node.children) render_kept(out, child, depth + 1, keep);
}

}  // namespace

void visit_preorder(const AXNode& root,
                    const std::function<void(const AXNode&, const AXNode*, int)>& fn) {
    struct Frame {
        const AXNode* node;
        const AXNode* parent;
        int depth;
    };
    std::vector<Frame> stack{{&root, nullptr, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        fn(*f.node, f.parent, f.depth);
        for (auto it = f.node->children.rbegin(); it != f.node->children.rend(); ++it) {
            stack.push_back({&*it, f.node, f.depth + 1});
        }
    }
}

void validate(const AXSnapshot& snapshot) {
    std::unordered_set<ElementId> seen;
    visit_preorder(snapshot.root, [&](const AXNode& n, const AXNode*, int) {
        if (!seen.insert(n.id).second) {
            throw Error(ErrorCode::duplicate_id, "element id " + std::to_string(n.id) + " repeats");
        }
        if (n.bbox.width < 0 || n.bbox.height < 0) {
            throw Error(ErrorCode::validation, "negative bbox on element " + std::to_string(n.id));
        }
    });
}

std::size_t node_count(const AXNode& root) {
    std::size_t n = 1;
    for (const auto& c : root.children) n += node_count(c);
    return n;
}

bool intersects(const Rect& box, const Viewport& vp) {
    long long left = std::max<long long>(box.x, vp.scroll_x);
    long long right = std::min<long long>(static_cast<long long>(box.x) + box.width,
                                          static_cast<long long>(vp.scroll_x) + vp.width);
    long long top = std::max<long long>(box.y, vp.scroll_y);
    long long bottom = std::min<long long>(static_cast<long long>(box.y) + box.height,
                                           static_cast<long long>(vp.scroll_y) + vp.height);
    return right > left && bottom > top;
}

std::string render_full(const AXSnapshot& snapshot) {
    std::string out;
    visit_preorder(snapshot.root,
                   [&](const AXNode& n, const AXNode*, int depth) { render_line(out, n, depth); });
    return out;
}

std::string render_viewport(const AXSnapshot& snapshot) {
    std::unordered_set<ElementId> keep;
    mark_visible(snapshot.root, snapshot.viewport, keep);
    std::string out;
    render_kept(out, snapshot.root, 0, keep);
    out += "(+" + std::to_string(node_count(snapshot.root) - keep.size()) + " elements off-screen)\n";
    return out;
}

std::size_t offscreen_count(const AXSnapshot& snapshot) {
    std::unordered_set<ElementId> keep;
    mark_visible(snapshot.root, snapshot.viewport, keep);
    return node_count(snapshot.root) - keep.size();
}

std::string snapshot_digest(const AXSnapshot& snapshot) {
    return sha256_hex(snapshot.url + "\n" + render_full(snapshot));
}

void to_json(nlohmann::json& j, const Rect& r) {
    j = {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

void from_json(const nlohmann::json& j, Rect& r) {
    j.at("x").get_to(r.x);
    j.at("y").get_to(r.y);
    j.at("width").get_to(r.width);
    j.at("height").get_to(r.height);
}

void to_json(nlohmann::json& j, const Viewport& v) {
    j = {{"scroll_x", v.scroll_x}, {"scroll_y", v.scroll_y}, {"width", v.width}, {"height", v.height}};
}

void from_json(const nlohmann::json& j, Viewport& v) {
    j.at("scroll_x").get_to(v.scroll_x);
    j.at("scroll_y").get_to(v.scroll_y);
    j.at("width").get_to(v.width);
    j.at("height").get_to(v.height);
}

void to_json(nlohmann::json& j, const AXNode& n) {
    j = {{"id", n.id},
         {"role", n.role},
         {"name", n.name},
         {"text", n.text},
         {"bbox", n.bbox},
         {"children", n.children},
         {"editable", n.editable},
         {"focused", n.focused}};
}

void from_json(const nlohmann::json& j, AXNode& n) {
    j.at("id").get_to(n.id);
    j.at("role").get_to(n.role);
    n.name = j.value("name", "");
    n.text = j.value("text", "");
    if (j.contains("bbox")) j.at("bbox").get_to(n.bbox);
    n.children.clear();
    if (j.contains("children")) j.at("children").get_to(n.children);
    n.editable = j.value("editable", false);
    n.focused = j.value("focused", false);
}

void to_json(nlohmann::json& j, const AXSnapshot& s) {
    j = {{"url", s.url}, {"title", s.title}, {"root", s.root}, {"viewport", s.viewport}, {"seq", s.seq}};
}

void from_json(const nlohmann::json& j, AXSnapshot& s) {
    j.at("url").get_to(s.url);
    s.title = j.value("title", "");
    j.at("root").get_to(s.root);
    if (j.contains("viewport")) j.at("viewport").get_to(s.viewport);
    s.seq = j.value("seq", std::uint64_t{0});
}

AXSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path);
    AXSnapshot snap;
    try {
        snap = nlohmann::json::parse(in).get<AXSnapshot>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::validation, path + ": " + e.what());
    }
    validate(snap);
    return snap;
}

}  // namespace groundwork
