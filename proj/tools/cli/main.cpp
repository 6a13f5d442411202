#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "groundwork/agent_core.hpp"
#include "groundwork/behavior_logger.hpp"
#include "groundwork/diff_engine.hpp"
#include "groundwork/error.hpp"
#include "groundwork/etl_pipeline.hpp"
#include "groundwork/eval_coverage.hpp"
#include "groundwork/model_client.hpp"
#include "groundwork/policy_model.hpp"
#include "groundwork/service.hpp"
#include "groundwork/sim_env.hpp"
#include "groundwork/workspace.hpp"

namespace gw = groundwork;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataDirs {
    std::string sites = "sites";
    std::string tasks = "tasks";

    gw::sim::Catalog load() const { return gw::sim::Catalog::load(sites, tasks); }
};

void add_data_flags(CLI::App* cmd, DataDirs& dirs) {
    cmd->add_option("--sites", dirs.sites, "Directory of site specs")->capture_default_str();
    cmd->add_option("--tasks", dirs.tasks, "Directory of task specs")->capture_default_str();
}

gw::Workspace open_store(const std::string& store) {
    if (store.empty()) return gw::Workspace{};
    return gw::Workspace::load(store);
}

struct RunOptions {
    std::string task;
    int n = 5;
    std::string obs = "lazy";
    std::string hist = "diff";
    int max_steps = 30;
    std::uint64_t seed = 0;
    double slip = 0.0;
    double temperature = 0.7;
    std::string script;
    std::string store;
    int choice = -1;
};

int cmd_run(const RunOptions& o, const DataDirs& dirs) {
    const auto catalog = std::make_shared<gw::sim::Catalog>(dirs.load());
    const auto* task = catalog->task(o.task);
    if (!task) throw UsageError("unknown task '" + o.task + "'");

    gw::ScaffoldConfig cfg;
    cfg.n_samples = o.n;
    cfg.max_steps = o.max_steps;
    cfg.temperature = o.temperature;
    try {
        cfg.observation_mode = gw::observation_mode_from_string(o.obs);
        cfg.history_mode = gw::history_mode_from_string(o.hist);
        gw::validate(cfg);
    } catch (const gw::Error& e) {
        throw UsageError(e.what());
    }

    std::shared_ptr<gw::ModelClient> model;
    if (!o.script.empty()) {
        model = gw::ScriptedModelClient::from_file(o.script);
    } else {
        gw::PolicyParams params;
        params.seed = o.seed;
        params.slip_prob = o.slip;
        model = std::make_shared<gw::TaskPolicyModel>(*catalog, params);
    }
    model = gw::model_client_from_env(model);

    auto ws = open_store(o.store);
    gw::RunHooks hooks;
    hooks.task_id = task->task_id;
    hooks.env_factory = catalog->factory_for(*task);
    if (o.choice >= 0) {
        hooks.on_choices = [&](const std::vector<std::string>& options) -> std::optional<std::string> {
            if (static_cast<std::size_t>(o.choice) >= options.size()) return std::nullopt;
            return options[o.choice];
        };
    }
    auto env = catalog->open(*task);
    const auto run = gw::run_task(task->instruction, *env, &ws, cfg, *model, hooks);
    std::cout << json(run).dump(2) << '\n';
    return run.status == gw::RunStatus::success ? 0 : 1;
}

struct EtlOptions {
    std::string session;
    double timeout_min = 30.0;
    std::string format = "script";
    bool agentic = false;
    std::string logs = "logs";
    std::string store;
    std::vector<std::string> wiki_categories;
    int wiki_min_actions = -1;
    bool approve = false;
};

int cmd_etl(const EtlOptions& o) {
    gw::EtlConfig cfg;
    if (o.timeout_min <= 0) throw UsageError("--timeout-min must be positive");
    cfg.timeout_ms = static_cast<std::int64_t>(o.timeout_min * 60'000.0);
    cfg.agentic = o.agentic;
    try {
        cfg.route.format = gw::knowledge_format_from_string(o.format);
    } catch (const gw::Error& e) {
        throw UsageError(e.what());
    }
    if (!o.wiki_categories.empty()) cfg.route.wiki_categories = o.wiki_categories;
    if (o.wiki_min_actions >= 0) cfg.route.wiki_min_actions = static_cast<std::size_t>(o.wiki_min_actions);

    std::shared_ptr<gw::ModelClient> model;
    if (o.agentic) {
        model = gw::model_client_from_env(nullptr);
        if (!model) throw UsageError("--agentic needs AGENT_MODEL_URL");
    }
    auto ws = open_store(o.store);
    auto report = gw::run_session(o.logs, o.session, ws, cfg, model.get());
    json out = report;
    if (o.approve) {
        json applied = json::array();
        for (const auto& p : report.proposals) applied.push_back(ws.decide(p.id, true));
        out["applied"] = applied;
    }
    if (!o.store.empty()) ws.persist();
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_axdiff(const std::string& a, const std::string& b, bool as_json) {
    const auto before = gw::load_snapshot(a);
    const auto after = gw::load_snapshot(b);
    const auto cs = gw::tree_diff(before, after);
    if (as_json) {
        std::cout << json(cs).dump(2) << '\n';
    } else {
        std::cout << gw::render_verbal(cs);
    }
    return 0;
}

volatile std::sig_atomic_t g_stop = 0;

int cmd_serve(const std::string& host, int port, const std::string& store, const std::string& logs,
              const std::string& ui, const DataDirs& dirs) {
    auto ws = open_store(store);
    gw::ServiceConfig cfg;
    cfg.logs_dir = logs;
    cfg.catalog = std::make_shared<gw::sim::Catalog>(dirs.load());
    cfg.persist_on_write = !store.empty();
    if (!ui.empty()) cfg.ui_dir = ui;
    auto catalog = cfg.catalog;
    cfg.model_factory = [catalog] {
        return gw::model_client_from_env(std::make_shared<gw::TaskPolicyModel>(*catalog, gw::PolicyParams{}));
    };
    gw::Service service(ws, cfg);
    const int bound = service.start(host, port);
    std::cerr << "listening on http://" << host << ':' << bound << '\n';
    std::signal(SIGINT, [](int) { g_stop = 1; });
    std::signal(SIGTERM, [](int) { g_stop = 1; });
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    service.stop();
    if (!store.empty()) ws.persist();
    return 0;
}

struct CoverageOptions {
    int orderings = 6;
    std::uint64_t seed = 7;
    std::vector<std::string> formats{"trajectory", "script", "insight"};
    double slip = 0.08;
    std::string out = "reports";
};

int cmd_coverage(const CoverageOptions& o, const DataDirs& dirs) {
    if (o.orderings < 1) throw UsageError("--orderings must be at least 1");
    const auto catalog = dirs.load();
    gw::CoverageConfig cfg;
    cfg.orderings = o.orderings;
    cfg.seed = o.seed;
    cfg.slip_prob = o.slip;
    cfg.formats.clear();
    try {
        for (const auto& f : o.formats) cfg.formats.push_back(gw::knowledge_format_from_string(f));
    } catch (const gw::Error& e) {
        throw UsageError(e.what());
    }
    const auto bundles = gw::build_bundles(catalog, cfg.formats);
    const auto report = gw::eval_coverage(catalog, bundles, cfg);
    gw::write_coverage_reports(report, o.out);
    std::cout << gw::coverage_csv(report);
    return 0;
}

struct CaptureOptions {
    std::vector<std::string> tasks;
    std::string category;
    std::string session;
    std::string logs = "logs";
    double gap_min = 60.0;
    std::int64_t start_ts = 1'767'225'600'000;
};

int cmd_capture(const CaptureOptions& o, const DataDirs& dirs) {
    const auto catalog = dirs.load();
    std::vector<const gw::sim::TaskSpec*> selected;
    for (const auto& id : o.tasks) {
        const auto* t = catalog.task(id);
        if (!t) throw UsageError("unknown task '" + id + "'");
        selected.push_back(t);
    }
    if (!o.category.empty()) {
        for (const auto& t : catalog.tasks()) {
            if (t.category == o.category) selected.push_back(&t);
        }
    }
    if (selected.empty()) throw UsageError("nothing to capture: give --task or --category");

    gw::BehaviorLogger logger(o.logs);
    gw::ConsentState consent{true, false, o.start_ts};
    std::int64_t ts = o.start_ts;
    std::size_t written = 0;
    for (const auto* t : selected) {
        const auto events = gw::capture_solution(catalog, *t, o.session, ts);
        for (const auto& e : events) written += logger.record(e, consent) ? 1 : 0;
        if (!events.empty()) ts = events.back().ts;
        ts += static_cast<std::int64_t>(o.gap_min * 60'000.0);
    }
    std::cout << json{{"session", o.session}, {"events", written},
                      {"path", logger.session_path(o.session).string()}}
                     .dump()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"groundwork: web agent scaffold, behavior ETL and shared workspace"};
    app.require_subcommand(1);
    DataDirs dirs;

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run the agent on one simulated task and print the TaskRun");
    run_cmd->add_option("--task", run.task, "Task id")->required();
    run_cmd->add_option("--n", run.n, "Samples per step")->capture_default_str();
    run_cmd->add_option("--obs", run.obs, "Observation mode: lazy|full")->capture_default_str();
    run_cmd->add_option("--hist", run.hist, "History mode: diff|full")->capture_default_str();
    run_cmd->add_option("--max-steps", run.max_steps)->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "Seed of the stochastic mock model")->capture_default_str();
    run_cmd->add_option("--slip", run.slip, "Slip probability of the mock model")->capture_default_str();
    run_cmd->add_option("--temperature", run.temperature)->capture_default_str();
    run_cmd->add_option("--script", run.script, "Scripted-model fixture instead of the mock policy");
    run_cmd->add_option("--store", run.store, "Workspace store directory (read only)");
    run_cmd->add_option("--choice", run.choice, "Option index to pick when the model asks for a choice");
    add_data_flags(run_cmd, dirs);

    auto* etl_cmd = app.add_subcommand("etl", "Behavior-log pipeline");
    etl_cmd->require_subcommand(1);
    EtlOptions etl;
    auto* etl_run = etl_cmd->add_subcommand("run", "Process one session log into proposals");
    etl_run->add_option("--session", etl.session)->required();
    etl_run->add_option("--timeout-min", etl.timeout_min)->capture_default_str();
    etl_run->add_option("--format", etl.format, "script|trajectory|insight")->capture_default_str();
    etl_run->add_flag("--agentic", etl.agentic, "Let the model override routing");
    etl_run->add_option("--logs", etl.logs)->capture_default_str();
    etl_run->add_option("--store", etl.store, "Workspace store directory");
    etl_run->add_option("--wiki-category", etl.wiki_categories, "Categories routed to wiki pages");
    etl_run->add_option("--wiki-min-actions", etl.wiki_min_actions);
    etl_run->add_flag("--approve", etl.approve, "Approve every proposal after filing it");

    std::string diff_a, diff_b;
    bool diff_json = false;
    auto* diff_cmd = app.add_subcommand("axdiff", "Verbal diff of two snapshot files");
    diff_cmd->add_option("a", diff_a)->required();
    diff_cmd->add_option("b", diff_b)->required();
    diff_cmd->add_flag("--json", diff_json, "Print the change set as JSON");

    std::string host = "127.0.0.1", store, logs = "logs", ui;
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--host", host)->capture_default_str();
    serve_cmd->add_option("--port", port)->capture_default_str();
    serve_cmd->add_option("--store", store, "Workspace store directory");
    serve_cmd->add_option("--logs", logs)->capture_default_str();
    serve_cmd->add_option("--ui", ui, "Static UI bundle served at /ui");
    add_data_flags(serve_cmd, dirs);

    auto* eval_cmd = app.add_subcommand("eval", "Experiments");
    eval_cmd->require_subcommand(1);
    CoverageOptions cov;
    auto* cov_cmd = eval_cmd->add_subcommand("coverage", "Success rate against knowledge coverage");
    cov_cmd->add_option("--orderings", cov.orderings)->capture_default_str();
    cov_cmd->add_option("--seed", cov.seed)->capture_default_str();
    cov_cmd->add_option("--format", cov.formats, "Formats to evaluate")->capture_default_str();
    cov_cmd->add_option("--slip", cov.slip)->capture_default_str();
    cov_cmd->add_option("--out", cov.out)->capture_default_str();
    add_data_flags(cov_cmd, dirs);

    CaptureOptions cap;
    auto* cap_cmd = app.add_subcommand("capture", "Write behavior logs for task solutions");
    cap_cmd->add_option("--task", cap.tasks);
    cap_cmd->add_option("--category", cap.category);
    cap_cmd->add_option("--session", cap.session)->required();
    cap_cmd->add_option("--logs", cap.logs)->capture_default_str();
    cap_cmd->add_option("--gap-min", cap.gap_min, "Idle minutes between tasks")->capture_default_str();
    cap_cmd->add_option("--start-ts", cap.start_ts)->capture_default_str();
    add_data_flags(cap_cmd, dirs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run, dirs);
        if (*etl_run) return cmd_etl(etl);
        if (*diff_cmd) return cmd_axdiff(diff_a, diff_b, diff_json);
        if (*serve_cmd) return cmd_serve(host, port, store, logs, ui, dirs);
        if (*cov_cmd) return cmd_coverage(cov, dirs);
        if (*cap_cmd) return cmd_capture(cap, dirs);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const gw::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == gw::ErrorCode::validation ? kExitUsage : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
