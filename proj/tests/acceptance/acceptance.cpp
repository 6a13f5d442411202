#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "groundwork/agent_core.hpp"
#include "groundwork/diff_engine.hpp"
#include "groundwork/error.hpp"
#include "groundwork/etl_pipeline.hpp"
#include "groundwork/eval_coverage.hpp"
#include "groundwork/history.hpp"
#include "groundwork/model_client.hpp"
#include "groundwork/policy_model.hpp"
#include "support.hpp"

/// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

using namespace groundwork;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(digits);
    out << v;
    return out.str();
}

const sim::Catalog& catalog() {
    static const auto c = sim::Catalog::load((gwtest::source_dir() / "sites").string(),
                                             (gwtest::source_dir() / "tasks").string());
    return c;
}

TaskRun run_policy(const sim::TaskSpec& task, const Workspace* ws, PolicyParams params, int n) {
    TaskPolicyModel model(catalog(), params);
    ScaffoldConfig cfg;
    cfg.n_samples = n;
    RunHooks hooks;
    hooks.task_id = task.task_id;
    hooks.env_factory = catalog().factory_for(task);
    auto env = catalog().open(task);
    return run_task(task.instruction, *env, ws, cfg, model, hooks);
}

// 1. Diff round-trip on 1,000 random pairs of at most 50 nodes, under 10 s.
Verdict diff_round_trip() {
    const auto t0 = Clock::now();
    gwtest::TreeGen gen(1000);
    int ok = 0;
    std::size_t max_nodes = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto before = gen.snapshot(1 + gen.pick(50));
        auto after = before;
        const int rounds = 1 + static_cast<int>(gen.pick(3));
        for (int r = 0; r < rounds; ++r) after = gen.mutate(after, 50);
        max_nodes = std::max({max_nodes, node_count(before.root), node_count(after.root)});
        ok += structurally_equal(apply_changes(before, tree_diff(before, after)), after) ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    return {ok == 1000 && secs < 10.0 && max_nodes <= 50,
            std::to_string(ok) + "/1000 pairs reproduced, max " + std::to_string(max_nodes) + " nodes, " +
                fmt(secs, 3) + " s (limit 10 s)"};
}

std::string trim_newlines(std::string s) {
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

// 2. Verbal-diff goldens.
Verdict verbal_golden() {
    const auto submit = render_verbal(tree_diff(load_snapshot(gwtest::fixture("ax/submit_before.json").string()),
                                                load_snapshot(gwtest::fixture("ax/submit_after.json").string())));
    const auto cart = render_verbal(tree_diff(load_snapshot(gwtest::fixture("ax/cart_before.json").string()),
                                              load_snapshot(gwtest::fixture("ax/cart_after.json").string())));
    const bool exact = trim_newlines(submit) == "New element: [42] button 'Submit'";
    const bool table = trim_newlines(cart) == trim_newlines(gwtest::read_file(gwtest::fixture("ax/cart.golden.txt")));
    return {exact && table, std::string("submit example ") + (exact ? "exact" : "differs") + ", template table " +
                                (table ? "matches golden" : "differs from golden")};
}

// 3. Diff history is smaller than full history from step 2; cumulative ratio.
Verdict history_compression() {
    const auto steps = steps_from_ndjson(gwtest::read_file(gwtest::fixture("trajectory_20.ndjson")));
    const ContextBudget unlimited{10'000'000};
    std::size_t diff_total = 0, full_total = 0;
    bool smaller = true;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::vector<Step> prefix(steps.begin(), steps.begin() + static_cast<long>(i));
        const auto d = token_count(compose_context(prefix, steps[i].observation_full, steps[i].diff_from_prev,
                                                   unlimited, HistoryMode::diff_history));
        const auto f = token_count(compose_context(prefix, steps[i].observation_full, steps[i].diff_from_prev,
                                                   unlimited, HistoryMode::full_history));
        if (i >= 2 && d >= f) smaller = false;
        diff_total += d;
        full_total += f;
    }
    return {smaller && steps.size() == 20,
            "diff < full at every step >= 2: " + std::string(smaller ? "yes" : "no") + ", cumulative " +
                std::to_string(full_total) + " / " + std::to_string(diff_total) + " tokens = " +
                fmt(static_cast<double>(full_total) / static_cast<double>(diff_total), 2) + "x"};
}

// 4. Viewport rendering is cheaper; a run asks for the full tree and succeeds.
Verdict lazy_observation() {
    const auto page = load_snapshot(gwtest::fixture("ax/long_page.json").string());
    const auto lazy = token_count(render_viewport(page));
    const auto full = token_count(render_full(page));
    std::string completed;
    for (const auto& task : catalog().tasks()) {
        const auto first = catalog().open(task)->observe();
        const auto run = run_policy(task, nullptr, PolicyParams{.seed = 0, .slip_prob = 0.0}, 1);
        const bool asked = std::any_of(run.steps.begin(), run.steps.end(), [](const Step& s) {
            return s.action && s.action->kind == ActionKind::request_full_tree;
        });
        if (asked && run.status == RunStatus::success && offscreen_count(first) > 0) {
            completed = task.task_id;
            break;
        }
    }
    return {lazy < full && !completed.empty(),
            "long page " + std::to_string(lazy) + " vs " + std::to_string(full) + " tokens; " +
                (completed.empty() ? "no run completed via request_full_tree"
                                   : completed + " completed after request_full_tree")};
}

// 5. Majority of five at p = 0.6 over 10,000 votes.
Verdict best_of_n() {
    const int trials = 10'000;
    BinaryVoteModel single_model(0.6, 51);
    BinaryVoteModel vote_model(0.6, 52);
    int single = 0, majority = 0;
    for (int i = 0; i < trials; ++i) {
        single += propose_action("ctx", single_model, 1).action == Action::click(1) ? 1 : 0;
        majority += propose_action("ctx", vote_model, 5).action == Action::click(1) ? 1 : 0;
    }
    const double s = single / static_cast<double>(trials);
    const double m = majority / static_cast<double>(trials);
    const double analytic = gwtest::majority_of_five(0.6);
    return {std::abs(m - analytic) <= 0.02 && m > s,
            "majority " + fmt(m) + " vs analytic " + fmt(analytic, 5) + " (tol 0.02), single " + fmt(s)};
}

// 6. Segmentation equals the gap-scan oracle on 500 random logs.
Verdict segmentation_oracle() {
    std::mt19937_64 rng(600);
    int agree = 0, boundary = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::int64_t timeout = 1 + static_cast<std::int64_t>(rng() % 120);
        std::vector<std::int64_t> ts;
        std::vector<BehaviorEvent> events;
        std::int64_t t = 1'767'225'600'000;
        const auto n = rng() % 80;
        for (std::size_t i = 0; i < n; ++i) {
            const auto roll = rng() % 10;
            const std::int64_t gap = roll == 0   ? timeout
                                     : roll == 1 ? timeout - 1
                                                 : static_cast<std::int64_t>(rng() % (2 * timeout));
            if (i > 0 && gap == timeout) ++boundary;
            t += gap;
            ts.push_back(t);
            BehaviorEvent e;
            e.ts = t;
            e.session_id = "s";
            e.url = "https://work.example/" + std::to_string(i);
            events.push_back(e);
        }
        std::vector<std::size_t> sizes;
        for (const auto& seg : segment(events, timeout)) sizes.push_back(seg.events.size());
        agree += sizes == gwtest::gap_scan_sizes(ts, timeout) ? 1 : 0;
    }
    return {agree == 500 && boundary > 0,
            std::to_string(agree) + "/500 logs match, " + std::to_string(boundary) + " gaps equal to the timeout"};
}

// 7. No seeded PII string survives into reports or proposals.
Verdict pii_containment() {
    const auto seeded = nlohmann::json::parse(gwtest::read_file(gwtest::fixture("pii/seeded.json")));
    std::vector<std::string> needles;
    for (const auto& [cls, values] : seeded.items()) {
        for (const auto& v : values) needles.push_back(v.get<std::string>());
    }
    std::size_t leaks = 0, hits = 0;
    for (auto f : {KnowledgeFormat::trajectory, KnowledgeFormat::script, KnowledgeFormat::insight}) {
        Workspace ws;
        EtlConfig cfg;
        cfg.route.wiki_categories = activity_taxonomy();
        cfg.route.wiki_min_actions = 0;
        cfg.route.format = f;
        const auto report = run_session(gwtest::fixture("pii"), "pii-corpus", ws, cfg);
        hits += report.pii_hits;
        const std::string dump = nlohmann::json(report).dump() + ws.to_json().dump();
        for (const auto& n : needles) leaks += dump.find(n) != std::string::npos ? 1 : 0;
    }
    return {needles.size() == 25 && leaks == 0,
            std::to_string(needles.size()) + " seeded strings, " + std::to_string(leaks) + " occurrences in outputs, " +
                std::to_string(hits) + " redactions"};
}

// 8. Random operation sequences never mutate agent artifacts without approval.
Verdict approval_gate() {
    std::mt19937_64 rng(800);
    std::size_t violations = 0, approvals = 0;
    const int sequences = 1000;
    for (int seq = 0; seq < sequences; ++seq) {
        auto t = std::make_shared<std::int64_t>(0);
        Workspace ws([t] { return ++*t; });
        for (int op = 0; op < 30; ++op) {
            const auto before = ws.to_json();
            bool approved = false;
            try {
                switch (rng() % 7) {
                    case 0: {
                        TaskItem item;
                        item.title = "user task " + std::to_string(op);
                        ws.upsert_user(item);
                        break;
                    }
                    case 1:
                        if (!ws.tasks().empty()) {
                            const auto task = ws.tasks()[rng() % ws.tasks().size()];
                            Proposal p;
                            p.target = {ArtifactType::task, task.id};
                            p.change = {{"status", rng() % 2 ? "completed" : "in_progress"}};
                            ws.propose(p);
                        }
                        break;
                    case 2: {
                        Proposal p;
                        p.target = {rng() % 2 ? ArtifactType::wiki : ArtifactType::timeline, "new"};
                        if (p.target.type == ArtifactType::wiki) {
                            p.change = {{"title", "Draft " + std::to_string(op)}, {"body", "b"}};
                        } else {
                            p.change = {{"date", "2026-01-01"}, {"summary", "s"}, {"tag", "research"}};
                        }
                        ws.propose(p);
                        break;
                    }
                    case 3:
                    case 4:
                        if (!ws.proposals().empty()) {
                            const auto p = ws.proposals()[rng() % ws.proposals().size()];
                            const bool approve = rng() % 2 == 0;
                            ws.decide(p.id, approve);
                            approved = approve;
                            approvals += approve ? 1 : 0;
                        }
                        break;
                    case 5:
                        if (!ws.tasks().empty()) {
                            ws.remove_user({ArtifactType::task, ws.tasks()[rng() % ws.tasks().size()].id});
                        }
                        break;
                    default:
                        if (!ws.wiki_pages().empty()) {
                            const auto page = ws.wiki_pages()[rng() % ws.wiki_pages().size()];
                            ws.patch_user({ArtifactType::wiki, page.id}, {{"body", "user edit"}});
                        }
                        break;
                }
            } catch (const Error&) {
                approved = false;
            }
            if (approved) continue;
            const auto after = ws.to_json();
            for (const char* kind : {"tasks", "wiki", "timeline"}) {
                for (const auto& [id, art] : after.at(kind).items()) {
                    if (art.at("provenance") != "agent") continue;
                    if (!before.at(kind).contains(id) || before.at(kind).at(id) != art) ++violations;
                }
            }
        }
    }
    return {violations == 0, std::to_string(sequences) + " sequences, " + std::to_string(approvals) +
                                 " approvals, " + std::to_string(violations) + " unapproved agent mutations"};
}

// 9. Catalog ETL yields the ordering script; it lifts the degraded policy.
Verdict catalog_scenario() {
    Workspace ws;
    EtlConfig cfg;
    cfg.route.wiki_categories = {"administration"};
    cfg.route.wiki_min_actions = 0;
    cfg.route.format = KnowledgeFormat::script;
    run_session(gwtest::fixture("logs"), "catalog-ordering", ws, cfg);
    for (const auto& p : ws.proposals(ProposalStatus::pending)) {
        if (p.target.type == ArtifactType::wiki) ws.decide(p.id, true);
    }
    bool has_script = false;
    for (const auto& page : ws.wiki_pages()) {
        const auto& b = page.body;
        if (page.format == KnowledgeFormat::script && b.find("Navigate to 'Service Catalog'") != std::string::npos &&
            b.find("Select 'Sales Laptop'") != std::string::npos && b.find("Click 'Order Now'") != std::string::npos &&
            b.find("Click 'Copy request number'") != std::string::npos) {
            has_script = true;
        }
    }
    Workspace empty;
    int with_ok = 0, without_ok = 0, runs = 0;
    for (const auto& task : catalog().tasks()) {
        if (task.category != "service-catalog") continue;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const PolicyParams degraded{.seed = seed, .slip_prob = 0.08};
            with_ok += run_policy(task, &ws, degraded, 1).status == RunStatus::success ? 1 : 0;
            without_ok += run_policy(task, &empty, degraded, 1).status == RunStatus::success ? 1 : 0;
            ++runs;
        }
    }
    return {has_script && with_ok == runs && without_ok < runs,
            std::string("script page ") + (has_script ? "found" : "missing") + ", success with page " +
                std::to_string(with_ok) + "/" + std::to_string(runs) + ", empty workspace " +
                std::to_string(without_ok) + "/" + std::to_string(runs)};
}

// 10. Full coverage experiment under 10 minutes, k=6 >= k=0 for every format.
Verdict coverage_shape() {
    const auto t0 = Clock::now();
    const CoverageConfig cfg;
    const auto bundles = build_bundles(catalog(), cfg.formats);
    const auto report = eval_coverage(catalog(), bundles, cfg);
    gwtest::TempDir out("coverage");
    write_coverage_reports(report, out.path());
    const double secs = seconds_since(t0);
    bool shape = report.orderings.size() == 6 && report.mean.size() == 3 &&
                 std::filesystem::exists(out.path() / "coverage.csv") &&
                 std::filesystem::exists(out.path() / "coverage.json");
    bool direction = true;
    std::string means;
    for (const auto& [f, m] : report.mean) {
        shape = shape && m.size() == 7;
        direction = direction && m.back() >= m.front();
        means += " " + std::string(to_string(f)) + " " + fmt(m.front(), 3) + "->" + fmt(m.back(), 3);
    }
    return {shape && direction && secs < 600.0,
            "6x7x3 matrix, " + std::to_string(report.runs) + " runs in " + fmt(secs, 2) + " s (limit 600 s);" + means};
}

// 11. Two CLI runs with a fixed seed print identical TaskRun JSON.
Verdict cli_determinism() {
    gwtest::TempDir dir("determinism");
    auto invoke = [&](const std::string& task, int i) {
        const auto out = dir.path() / (task + "-" + std::to_string(i) + ".json");
        const std::string cmd = "cd '" + gwtest::source_dir().string() + "' && '" + GW_CLI + "' run --task " + task +
                                " --seed 17 --slip 0.08 > '" + out.string() + "'";
        if (std::system(cmd.c_str()) == -1) return std::string();
        return gwtest::read_file(out);
    };
    std::size_t same = 0;
    for (const auto& task : catalog().tasks()) {
        const auto a = invoke(task.task_id, 0);
        const auto b = invoke(task.task_id, 1);
        same += !a.empty() && a == b ? 1 : 0;
    }
    return {same == catalog().tasks().size(),
            std::to_string(same) + "/" + std::to_string(catalog().tasks().size()) + " tasks byte-identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"diff round-trip", diff_round_trip},
        {"verbal diff golden", verbal_golden},
        {"history compression", history_compression},
        {"lazy observation", lazy_observation},
        {"best-of-n dominance", best_of_n},
        {"segmentation oracle", segmentation_oracle},
        {"pii containment", pii_containment},
        {"approval gate", approval_gate},
        {"catalog scenario", catalog_scenario},
        {"coverage experiment", coverage_shape},
        {"end-to-end determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << v.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
