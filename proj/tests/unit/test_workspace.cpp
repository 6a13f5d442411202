#include <fstream>

#include <gtest/gtest.h>

#include "groundwork/error.hpp"
#include "groundwork/workspace.hpp"
#include "support.hpp"

using namespace groundwork;

namespace {

Workspace::Clock ticking() {
    auto t = std::make_shared<std::int64_t>(1000);
    return [t] { return ++*t; };
}

TaskItem task(const std::string& title, TaskStatus status = TaskStatus::not_started) {
    TaskItem t;
    t.title = title;
    t.status = status;
    return t;
}

WikiPage wiki(const std::string& title, const std::string& body, std::vector<std::string> tags = {}) {
    WikiPage w;
    w.title = title;
    w.body = body;
    w.tags = std::move(tags);
    return w;
}

Proposal propose_status(const std::string& id, const std::string& status) {
    Proposal p;
    p.target = {ArtifactType::task, id};
    p.change = {{"status", status}};
    p.rationale = "looks done";
    return p;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::io;
}

}  // namespace

TEST(Workspace, UserWritesAreImmediate) {
    Workspace ws(ticking());
    const auto id = ws.upsert_user(task("Order sales laptop"));
    EXPECT_EQ(id, "task-1");
    EXPECT_EQ(ws.task(id)->provenance, Provenance::user);
    ws.patch_user({ArtifactType::task, id}, {{"priority", "high"}});
    EXPECT_EQ(ws.task(id)->priority, Priority::high);
    ws.remove_user({ArtifactType::task, id});
    EXPECT_FALSE(ws.task(id).has_value());
    EXPECT_EQ(code_of([&] { ws.remove_user({ArtifactType::task, id}); }), ErrorCode::not_found);
}

TEST(Workspace, ValidationErrors) {
    Workspace ws(ticking());
    EXPECT_EQ(code_of([&] { ws.upsert_user(task("")); }), ErrorCode::validation);
    TimelineEntry e;
    e.date = "2026-01-01";
    e.summary = "x";
    e.tag = "nonsense";
    EXPECT_EQ(code_of([&] { ws.upsert_user(e); }), ErrorCode::validation);
    e.tag = "research";
    e.duration_ms = -1;
    EXPECT_EQ(code_of([&] { ws.upsert_user(e); }), ErrorCode::validation);
}

TEST(Workspace, ApprovalFlipsTaskToCompleted) {
    Workspace ws(ticking());
    const auto id = ws.upsert_user(task("Order sales laptop"));
    const auto pid = ws.propose(propose_status(id, "completed"));
    EXPECT_EQ(ws.task(id)->status, TaskStatus::not_started);
    EXPECT_EQ(ws.proposal(pid)->status, ProposalStatus::pending);
    const auto after = ws.decide(pid, true);
    EXPECT_EQ(after.at("status"), "completed");
    EXPECT_EQ(ws.task(id)->status, TaskStatus::completed);
    EXPECT_EQ(ws.task(id)->provenance, Provenance::agent);
    EXPECT_EQ(ws.proposal(pid)->status, ProposalStatus::approved);
    EXPECT_EQ(ws.proposal(pid)->applied_id, id);
}

TEST(Workspace, RejectionLeavesArtifact) {
    Workspace ws(ticking());
    const auto id = ws.upsert_user(task("Order sales laptop"));
    const auto before = ws.artifact_digest();
    const auto pid = ws.propose(propose_status(id, "completed"));
    ws.decide(pid, false);
    EXPECT_EQ(ws.artifact_digest(), before);
    EXPECT_EQ(ws.proposal(pid)->status, ProposalStatus::rejected);
}

TEST(Workspace, DecisionErrors) {
    Workspace ws(ticking());
    const auto id = ws.upsert_user(task("Order sales laptop"));
    const auto pid = ws.propose(propose_status(id, "completed"));
    ws.decide(pid, true);
    EXPECT_EQ(code_of([&] { ws.decide(pid, true); }), ErrorCode::already_decided);
    EXPECT_EQ(code_of([&] { ws.decide(pid, false); }), ErrorCode::already_decided);
    EXPECT_EQ(code_of([&] { ws.decide("prop-99", true); }), ErrorCode::not_found);
}

TEST(Workspace, TargetDeletedBeforeApproval) {
    Workspace ws(ticking());
    const auto id = ws.upsert_user(task("Order sales laptop"));
    const auto pid = ws.propose(propose_status(id, "completed"));
    ws.remove_user({ArtifactType::task, id});
    EXPECT_EQ(code_of([&] { ws.decide(pid, true); }), ErrorCode::target_missing);
    EXPECT_EQ(ws.proposal(pid)->status, ProposalStatus::rejected);
    EXPECT_EQ(code_of([&] { ws.propose(propose_status(id, "completed")); }), ErrorCode::target_missing);
}

TEST(Workspace, InvalidProposalRefused) {
    Workspace ws(ticking());
    const auto id = ws.upsert_user(task("Order sales laptop"));
    EXPECT_EQ(code_of([&] { ws.propose(propose_status(id, "done-ish")); }), ErrorCode::validation);
    EXPECT_TRUE(ws.proposals().empty());
}

TEST(Workspace, AgentWikiPagesAreMasked) {
    Workspace ws(ticking());
    Proposal p;
    p.target = {ArtifactType::wiki, "new"};
    p.change = nlohmann::json(wiki("Contact", "Write to a.b@corp.example for access."));
    p.change.erase("id");
    const auto pid = ws.propose(p);
    ws.decide(pid, true);
    const auto page = ws.wiki(*ws.proposal(pid)->applied_id);
    EXPECT_EQ(page->body, "Write to [REDACTED:email] for access.");
}

TEST(Workspace, SearchMatchesOracle) {
    Workspace ws(ticking());
    ws.upsert_user(wiki("Ordering a laptop", "Navigate to the catalog, select hardware, order the laptop.",
                        {"service-catalog"}));
    ws.upsert_user(wiki("VPN setup", "Use port 443 for the VPN.", {"knowledge"}));
    ws.upsert_user(task("Order sales laptop"));
    ws.upsert_user(task("File expense report"));
    TimelineEntry e;
    e.date = "2026-01-01";
    e.tag = "administration";
    e.summary = "Ordered a monitor";
    e.details = "catalog order";
    ws.upsert_user(e);

    std::vector<gwtest::OracleDoc> docs;
    for (const auto& t : ws.tasks()) docs.push_back({"task " + t.id, tokenize(t.title + " " + t.description + " " + t.notes)});
    for (const auto& w : ws.wiki_pages()) {
        std::string tags;
        for (const auto& t : w.tags) tags += t + " ";
        docs.push_back({"wiki " + w.id, tokenize(w.title + " " + w.body + " " + tags)});
    }
    for (const auto& t : ws.timeline_entries()) docs.push_back({"timeline " + t.id, tokenize(t.summary + " " + t.details + " " + t.tag)});

    for (const std::string q : {"order laptop", "vpn port", "catalog", "expense", "nothing here"}) {
        auto expected = gwtest::tfidf_oracle(docs, tokenize(q));
        std::sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.second > b.second; });
        const auto hits = ws.search(q, 10);
        ASSERT_EQ(hits.size(), expected.size()) << q;
        for (std::size_t i = 0; i < hits.size(); ++i) {
            EXPECT_NEAR(hits[i].score, expected[i].second, 1e-9) << q << " #" << i;
            if (i + 1 < hits.size()) {
                EXPECT_GE(hits[i].score, hits[i + 1].score);
            }
        }
    }
    const auto top = ws.search("port", 1);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0].title, "VPN setup");
    EXPECT_EQ(code_of([&] { ws.search("x", 0); }), ErrorCode::validation);
}

TEST(Workspace, SnippetIsClippedNearMatch) {
    Workspace ws(ticking());
    std::string body(500, 'a');
    body += " needle ";
    body += std::string(500, 'b');
    ws.upsert_user(wiki("Long", body));
    const auto hits = ws.search("needle", 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_LE(hits[0].snippet.size(), 200u);
    EXPECT_NE(hits[0].snippet.find("needle"), std::string::npos);
}

TEST(Workspace, RenderedResultsIncludeTopWikiBody) {
    Workspace ws(ticking());
    ws.upsert_user(wiki("Ordering a laptop", "1. Navigate to 'Service Catalog'.\n", {"service-catalog", "script"}));
    const auto text = render_search_results("laptop", ws.search("laptop", 5), ws);
    EXPECT_EQ(text.rfind("Workspace search results for \"laptop\" (1):\n1. [wiki wiki-1] Ordering a laptop (score ", 0), 0u);
    EXPECT_NE(text.find(" tags: service-catalog, script\n"), std::string::npos);
    EXPECT_NE(text.find("Top result content:\n1. Navigate to 'Service Catalog'.\n"), std::string::npos);
}

// Property: with more matching query terms a document never ranks lower
// against the same corpus (added terms only occur in that document).
TEST(WorkspaceProperty, ExtraExclusiveTermNeverLowersRank) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        Workspace ws(ticking());
        const std::vector<std::string> words{"order", "laptop", "vpn", "report", "catalog", "monitor"};
        for (int d = 0; d < 6; ++d) {
            std::string body;
            for (int w = 0; w < 8; ++w) body += words[rng() % words.size()] + " ";
            ws.upsert_user(wiki("Doc " + std::to_string(d), body));
        }
        ws.upsert_user(wiki("Target", "zebra " + words[rng() % words.size()]));
        const std::string base = words[rng() % words.size()];
        auto rank_of_target = [&](const std::string& q) {
            const auto hits = ws.search(q, 100);
            for (std::size_t i = 0; i < hits.size(); ++i) {
                if (hits[i].title == "Target") return i;
            }
            return hits.size();
        };
        EXPECT_LE(rank_of_target(base + " zebra"), rank_of_target(base));
    }
}

TEST(Workspace, PersistAndReload) {
    gwtest::TempDir dir("store");
    {
        auto ws = Workspace::load(dir.path(), ticking());
        ws.upsert_user(task("Order sales laptop"));
        ws.persist();
        const auto id = ws.upsert_user(task("File expense report"));  // only in the oplog
        ws.propose(propose_status(id, "completed"));
    }
    auto again = Workspace::load(dir.path(), ticking());
    EXPECT_EQ(again.tasks().size(), 2u);
    EXPECT_EQ(again.proposals().size(), 1u);
    const auto id = again.upsert_user(task("Third"));
    EXPECT_EQ(id, "task-3");  // counters survive replay
}

TEST(Workspace, CorruptSnapshotDetected) {
    gwtest::TempDir dir("store");
    {
        auto ws = Workspace::load(dir.path(), ticking());
        ws.upsert_user(task("Order sales laptop"));
        ws.persist();
    }
    auto text = gwtest::read_file(dir.path() / "snapshot.json");
    text.replace(text.find("Order"), 5, "Ordex");
    std::ofstream(dir.path() / "snapshot.json") << text;
    EXPECT_EQ(code_of([&] { Workspace::load(dir.path()); }), ErrorCode::corrupt_store);
}

TEST(Workspace, CorruptOplogDetected) {
    gwtest::TempDir dir("store");
    {
        auto ws = Workspace::load(dir.path(), ticking());
        ws.upsert_user(task("Order sales laptop"));
    }
    std::ofstream(dir.path() / "oplog.ndjson", std::ios::app) << "{not json\n";
    EXPECT_EQ(code_of([&] { Workspace::load(dir.path()); }), ErrorCode::corrupt_store);
}

TEST(Workspace, CloneIsDetached) {
    Workspace ws(ticking());
    ws.upsert_user(task("One"));
    auto copy = ws.clone();
    copy.upsert_user(task("Two"));
    EXPECT_EQ(ws.tasks().size(), 1u);
    EXPECT_EQ(copy.tasks().size(), 2u);
}

// Property: across random operation sequences, an agent-provenance artifact
// only appears or changes on an approving decision.
TEST(WorkspaceProperty, NoAgentWriteWithoutApproval) {
    std::mt19937_64 rng(8);
    for (int seq = 0; seq < 200; ++seq) {
        Workspace ws(ticking());
        for (int op = 0; op < 25; ++op) {
            const auto snapshot = ws.to_json();
            const auto roll = rng() % 6;
            bool approving = false;
            try {
                if (roll == 0) {
                    ws.upsert_user(task("user task " + std::to_string(op)));
                } else if (roll == 1 && !ws.tasks().empty()) {
                    const auto t = ws.tasks()[rng() % ws.tasks().size()];
                    ws.propose(propose_status(t.id, rng() % 2 ? "completed" : "in_progress"));
                } else if (roll == 2) {
                    Proposal p;
                    p.target = {ArtifactType::wiki, "new"};
                    p.change = {{"title", "Draft " + std::to_string(op)}, {"body", "b"}, {"tags", {"other"}}};
                    ws.propose(p);
                } else if (roll == 3 && !ws.proposals().empty()) {
                    const auto p = ws.proposals()[rng() % ws.proposals().size()];
                    approving = rng() % 2 == 0;
                    ws.decide(p.id, approving);
                } else if (roll == 4 && !ws.tasks().empty()) {
                    const auto t = ws.tasks()[rng() % ws.tasks().size()];
                    ws.remove_user({ArtifactType::task, t.id});
                } else if (roll == 5 && !ws.tasks().empty()) {
                    const auto t = ws.tasks()[rng() % ws.tasks().size()];
                    ws.patch_user({ArtifactType::task, t.id}, {{"notes", "edited"}});
                }
            } catch (const Error&) {
                approving = false;
            }
            if (approving) continue;
            const auto now = ws.to_json();
            for (const char* kind : {"tasks", "wiki", "timeline"}) {
                for (const auto& [id, art] : now.at(kind).items()) {
                    if (art.at("provenance") != "agent") continue;
                    ASSERT_TRUE(snapshot.at(kind).contains(id)) << "new agent artifact " << id;
                    ASSERT_EQ(snapshot.at(kind).at(id), art) << "agent artifact changed " << id;
                }
            }
        }
    }
}
