#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "groundwork/behavior_logger.hpp"
#include "groundwork/page_model.hpp"
#include "groundwork/workspace.hpp"

namespace gwtest {

using namespace groundwork;

inline std::filesystem::path source_dir() { return GW_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "fixtures" / rel; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("gw-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Random accessibility trees and mutations

inline const std::vector<std::string>& roles() {
    static const std::vector<std::string> r{"button", "link", "textbox", "listitem", "heading",
                                            "checkbox", "status", "generic", "list"};
    return r;
}

class TreeGen {
public:
    explicit TreeGen(std::uint64_t seed) : rng_(seed) {}

    std::string word() {
        static const std::vector<std::string> w{"Save", "Order", "Hardware", "Laptop", "Zoom", "Total",
                                                "Next", "Cancel", "Report", "Filter", "Sort", "Date"};
        return w[pick(w.size())];
    }

    AXNode make_node(ElementId id) {
        AXNode n;
        n.id = id;
        n.role = roles()[pick(roles().size())];
        n.name = coin(0.8) ? word() + " " + std::to_string(id) : "";
        n.text = coin(0.4) ? word() : "";
        n.bbox = {static_cast<int>(pick(1200)), static_cast<int>(pick(2000)), 10 + static_cast<int>(pick(300)),
                  10 + static_cast<int>(pick(60))};
        n.editable = coin(0.15);
        n.focused = coin(0.05);
        return n;
    }

    /// Random tree with `size` nodes, ids 1..size shuffled onto positions.
    AXSnapshot snapshot(std::size_t size) {
        std::vector<ElementId> ids(size);
        for (std::size_t i = 0; i < size; ++i) ids[i] = static_cast<ElementId>(i + 1);
        std::shuffle(ids.begin() + 1, ids.end(), rng_);
        std::vector<AXNode> flat;
        std::vector<std::size_t> parent(size, 0);
        for (std::size_t i = 0; i < size; ++i) {
            flat.push_back(make_node(ids[i]));
            if (i > 0) parent[i] = pick(i);
        }
        flat[0].role = "WebArea";
        for (std::size_t i = size; i-- > 1;) {
            flat[parent[i]].children.insert(flat[parent[i]].children.begin(), std::move(flat[i]));
        }
        AXSnapshot s;
        s.url = "https://site.example/p" + std::to_string(pick(3));
        s.title = word();
        s.root = std::move(flat[0]);
        next_id_ = static_cast<ElementId>(size + 1);
        return s;
    }

    /// Applies 1..4 random edits: add, remove, retext, move (reparent or
    /// reorder), rename, attribute flips. Root is never removed or moved.
    AXSnapshot mutate(AXSnapshot s, std::size_t max_nodes = 50) {
        const int edits = 1 + static_cast<int>(pick(4));
        for (int e = 0; e < edits; ++e) {
            std::vector<AXNode*> all;
            collect(s.root, all);
            switch (pick(6)) {
                case 0: {  // add
                    if (all.size() >= max_nodes) break;
                    AXNode* parent = all[pick(all.size())];
                    auto pos = pick(parent->children.size() + 1);
                    parent->children.insert(parent->children.begin() + static_cast<long>(pos), make_node(next_id_++));
                    break;
                }
                case 1: {  // remove a subtree
                    if (all.size() < 2) break;
                    AXNode* victim = all[1 + pick(all.size() - 1)];
                    erase(s.root, victim->id);
                    break;
                }
                case 2: {  // retext
                    AXNode* n = all[pick(all.size())];
                    n->text = coin(0.2) ? "" : word() + " " + std::to_string(pick(100));
                    break;
                }
                case 3: {  // move
                    if (all.size() < 3) break;
                    const ElementId id = all[1 + pick(all.size() - 1)]->id;
                    AXNode moving = *find(s.root, id);
                    erase(s.root, id);
                    std::vector<AXNode*> targets;
                    collect(s.root, targets);
                    AXNode* parent = targets[pick(targets.size())];
                    auto pos = pick(parent->children.size() + 1);
                    parent->children.insert(parent->children.begin() + static_cast<long>(pos), std::move(moving));
                    break;
                }
                case 4: {  // rename
                    AXNode* n = all[pick(all.size())];
                    n->name = word() + " renamed";
                    break;
                }
                default: {  // attributes and geometry
                    AXNode* n = all[pick(all.size())];
                    if (coin(0.5)) n->editable = !n->editable;
                    if (coin(0.3)) n->focused = !n->focused;
                    if (coin(0.3) && n != &s.root) n->role = roles()[pick(roles().size())];
                    n->bbox.y += 7;
                }
            }
        }
        if (coin(0.2)) s.url += "?v=" + std::to_string(pick(9));
        s.seq += 1;
        return s;
    }

    std::size_t pick(std::size_t n) { return n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
    std::mt19937_64& rng() { return rng_; }

private:
    static void collect(AXNode& n, std::vector<AXNode*>& out) {
        out.push_back(&n);
        for (auto& c : n.children) collect(c, out);
    }
    static AXNode* find(AXNode& n, ElementId id) {
        if (n.id == id) return &n;
        for (auto& c : n.children) {
            if (auto* f = find(c, id)) return f;
        }
        return nullptr;
    }
    static bool erase(AXNode& n, ElementId id) {
        for (auto it = n.children.begin(); it != n.children.end(); ++it) {
            if (it->id == id) {
                n.children.erase(it);
                return true;
            }
            if (erase(*it, id)) return true;
        }
        return false;
    }

    std::mt19937_64 rng_;
    ElementId next_id_ = 1;
};

// ---------------------------------------------------------------------------
// Oracles

/// Brute-force sessionization: walks every adjacent pair and cuts where the
/// gap reaches the timeout. Returns segment sizes.
inline std::vector<std::size_t> gap_scan_sizes(const std::vector<std::int64_t>& ts, std::int64_t timeout) {
    std::vector<std::size_t> sizes;
    if (ts.empty()) return sizes;
    std::size_t current = 1;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] - ts[i - 1] >= timeout) {
            sizes.push_back(current);
            current = 0;
        }
        ++current;
    }
    sizes.push_back(current);
    return sizes;
}

/// Straight transcription of the ranking formula over plain documents:
/// score(d) = sum over unique query terms t of tf(t,d) * ln(1 + N/df(t))
/// divided by (1 + 0.5 * |d| / avg|d|).
struct OracleDoc {
    std::string key;
    std::vector<std::string> tokens;
};

inline std::vector<std::pair<std::string, double>> tfidf_oracle(const std::vector<OracleDoc>& docs,
                                                                 const std::vector<std::string>& query) {
    std::map<std::string, int> df;
    double total_len = 0;
    for (const auto& d : docs) {
        std::set<std::string> seen(d.tokens.begin(), d.tokens.end());
        for (const auto& t : seen) ++df[t];
        total_len += static_cast<double>(d.tokens.size());
    }
    const double n = static_cast<double>(docs.size());
    const double avg = docs.empty() ? 0.0 : total_len / n;
    std::set<std::string> q(query.begin(), query.end());
    std::vector<std::pair<std::string, double>> out;
    for (const auto& d : docs) {
        double s = 0;
        for (const auto& t : q) {
            const auto tf = std::count(d.tokens.begin(), d.tokens.end(), t);
            if (tf == 0) continue;
            s += static_cast<double>(tf) * std::log(1.0 + n / df[t]);
        }
        const double norm = 1.0 + 0.5 * (avg > 0 ? static_cast<double>(d.tokens.size()) / avg : 0.0);
        if (s > 0) out.emplace_back(d.key, s / norm);
    }
    return out;
}

/// Exact P(majority of 5 correct) for per-sample accuracy p.
inline double majority_of_five(double p) {
    double total = 0;
    const int binom[] = {1, 5, 10, 10, 5, 1};
    for (int k = 3; k <= 5; ++k) total += binom[k] * std::pow(p, k) * std::pow(1 - p, 5 - k);
    return total;
}

}  // namespace gwtest
