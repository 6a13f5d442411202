#include "groundwork/service.hpp"

#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "groundwork/error.hpp"
#include "groundwork/etl_pipeline.hpp"

namespace groundwork {

namespace {

using nlohmann::json;

class BlankPage final : public Environment {
public:
    BlankPage() {
        snap_.url = "about:blank";
        snap_.root.id = 1;
        snap_.root.role = "WebArea";
        snap_.root.bbox = {0, 0, 1280, 720};
    }
    AXSnapshot observe() const override { return snap_; }
    StepResult step(const Action&) override {
        ++snap_.seq;
        return {snap_, "no-op: no matching transition"};
    }

private:
    AXSnapshot snap_;
};

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found:
        case ErrorCode::target_missing:
            return 404;
        case ErrorCode::already_decided:
            return 409;
        case ErrorCode::io:
        case ErrorCode::corrupt_store:
        case ErrorCode::model_backend:
            return 500;
        default:
            return 400;
    }
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    reply(res, status, {{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
    try {
        return req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::validation, std::string("body is not JSON: ") + e.what());
    }
}

std::optional<ArtifactType> collection_type(const std::string& name) {
    if (name == "tasks") return ArtifactType::task;
    if (name == "wiki") return ArtifactType::wiki;
    if (name == "timeline") return ArtifactType::timeline;
    return std::nullopt;
}

}  // namespace

struct Service::Impl {
    struct Run {
        std::string id;
        std::mutex mu;
        std::condition_variable cv;
        TaskRun snapshot;
        std::string status = "running";
        std::vector<std::string> options;
        std::optional<std::size_t> choice;
        bool cancelled = false;
        std::thread thread;
    };

    Workspace& ws;
    ServiceConfig config;
    httplib::Server server;
    std::thread listener;
    std::mutex runs_mu;
    std::map<std::string, std::shared_ptr<Run>> runs;
    std::size_t next_run = 0;
    std::mutex etl_mu;
    std::atomic<bool> stopped{false};

    Impl(Workspace& w, ServiceConfig c) : ws(w), config(std::move(c)) { routes(); }

    // Runs the handler, mapping library errors to status codes.
    template <typename F>
    httplib::Server::Handler guard(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const Error& e) {
                reply_error(res, status_for(e.code()), std::string(to_string(e.code())), e.what());
            } catch (const json::exception& e) {
                reply_error(res, 400, "validation", e.what());
            } catch (const std::exception& e) {
                reply_error(res, 500, "internal", e.what());
            }
        };
    }

    void after_write() {
        if (config.persist_on_write) {
            try {
                ws.persist();
            } catch (const Error&) {
                // not attached: nothing to persist
            }
        }
    }

    json run_json(Run& run) {
        std::lock_guard lock(run.mu);
        json j = {{"run_id", run.id}, {"status", run.status}, {"run", run.snapshot}};
        j["steps"] = run.snapshot.steps.size();
        if (run.status == "awaiting_choice") j["options"] = run.options;
        return j;
    }

    void routes() {
        server.Get(R"(/(tasks|wiki|timeline))", guard([this](const httplib::Request& req, httplib::Response& res) {
                       const auto type = *collection_type(req.matches[1]);
                       json out = json::array();
                       if (type == ArtifactType::task) out = ws.tasks();
                       if (type == ArtifactType::wiki) out = ws.wiki_pages();
                       if (type == ArtifactType::timeline) out = ws.timeline_entries();
                       reply(res, 200, out);
                   }));
        server.Get(R"(/(tasks|wiki|timeline)/([^/]+))",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       const ArtifactRef ref{*collection_type(req.matches[1]), req.matches[2]};
                       auto a = ws.artifact_json(ref);
                       if (!a) throw Error(ErrorCode::not_found, std::string(to_string(ref.type)) + " '" + ref.id + "'");
                       reply(res, 200, *a);
                   }));
        server.Post(R"(/(tasks|wiki|timeline))", guard([this](const httplib::Request& req, httplib::Response& res) {
                        const auto type = *collection_type(req.matches[1]);
                        auto body = parse_body(req);
                        if (!body.is_object()) throw Error(ErrorCode::validation, "artifact must be an object");
                        if (body.contains("id") && !body["id"].get<std::string>().empty()) {
                            throw Error(ErrorCode::validation, "use PATCH to edit an existing artifact");
                        }
                        const auto id = ws.upsert_user(type, body);
                        after_write();
                        reply(res, 201, *ws.artifact_json({type, id}));
                    }));
        server.Patch(R"(/(tasks|wiki|timeline)/([^/]+))",
                     guard([this](const httplib::Request& req, httplib::Response& res) {
                         const ArtifactRef ref{*collection_type(req.matches[1]), req.matches[2]};
                         auto out = ws.patch_user(ref, parse_body(req));
                         after_write();
                         reply(res, 200, out);
                     }));
        server.Delete(R"(/(tasks|wiki|timeline)/([^/]+))",
                      guard([this](const httplib::Request& req, httplib::Response& res) {
                          ws.remove_user({*collection_type(req.matches[1]), req.matches[2]});
                          after_write();
                          res.status = 204;
                      }));

        server.Get("/proposals", guard([this](const httplib::Request& req, httplib::Response& res) {
                       std::optional<ProposalStatus> status;
                       if (req.has_param("status")) {
                           const auto s = req.get_param_value("status");
                           if (s == "pending") status = ProposalStatus::pending;
                           else if (s == "approved") status = ProposalStatus::approved;
                           else if (s == "rejected") status = ProposalStatus::rejected;
                           else throw Error(ErrorCode::validation, "unknown status '" + s + "'");
                       }
                       reply(res, 200, ws.proposals(status));
                   }));
        server.Get(R"(/proposals/([^/]+))", guard([this](const httplib::Request& req, httplib::Response& res) {
                       auto p = ws.proposal(req.matches[1]);
                       if (!p) throw Error(ErrorCode::not_found, "proposal '" + std::string(req.matches[1]) + "'");
                       reply(res, 200, *p);
                   }));
        server.Post(R"(/proposals/([^/]+)/decision)",
                    guard([this](const httplib::Request& req, httplib::Response& res) {
                        auto body = parse_body(req);
                        if (!body.contains("approve") || !body["approve"].is_boolean()) {
                            throw Error(ErrorCode::validation, "body needs a boolean 'approve'");
                        }
                        const std::string id = req.matches[1];
                        json artifact;
                        try {
                            artifact = ws.decide(id, body["approve"].get<bool>());
                        } catch (const Error& e) {
                            if (e.code() == ErrorCode::target_missing) after_write();
                            throw;
                        }
                        after_write();
                        reply(res, 200, {{"proposal", *ws.proposal(id)}, {"artifact", artifact}});
                    }));

        server.Get("/search", guard([this](const httplib::Request& req, httplib::Response& res) {
                       if (!req.has_param("q")) throw Error(ErrorCode::validation, "missing q");
                       std::size_t k = 5;
                       if (req.has_param("k")) {
                           const auto raw = req.get_param_value("k");
                           std::size_t used = 0;
                           long long v = 0;
                           try {
                               v = std::stoll(raw, &used);
                           } catch (const std::exception&) {
                               used = 0;
                           }
                           if (used != raw.size() || v < 1) throw Error(ErrorCode::validation, "k must be a positive integer");
                           k = static_cast<std::size_t>(v);
                       }
                       reply(res, 200, ws.search(req.get_param_value("q"), k));
                   }));

        server.Post("/agent/runs", guard([this](const httplib::Request& req, httplib::Response& res) {
                        auto body = parse_body(req);
                        reply(res, 202, {{"run_id", start_run(body)}});
                    }));
        server.Get("/agent/runs", guard([this](const httplib::Request&, httplib::Response& res) {
                       json out = json::array();
                       std::lock_guard lock(runs_mu);
                       for (auto& [_, run] : runs) out.push_back(run_json(*run));
                       reply(res, 200, out);
                   }));
        server.Get(R"(/agent/runs/([^/]+))", guard([this](const httplib::Request& req, httplib::Response& res) {
                       reply(res, 200, run_json(*find_run(req.matches[1])));
                   }));
        server.Post(R"(/agent/runs/([^/]+)/choice)",
                    guard([this](const httplib::Request& req, httplib::Response& res) {
                        auto run = find_run(req.matches[1]);
                        auto body = parse_body(req);
                        std::unique_lock lock(run->mu);
                        if (run->status != "awaiting_choice") {
                            lock.unlock();
                            reply_error(res, 409, "not_awaiting_choice", "run is " + run->status);
                            return;
                        }
                        if (!body.contains("index") || !body["index"].is_number_integer()) {
                            throw Error(ErrorCode::validation, "body needs an integer 'index'");
                        }
                        const auto index = body["index"].get<long long>();
                        if (index < 0 || static_cast<std::size_t>(index) >= run->options.size()) {
                            throw Error(ErrorCode::validation, "choice index out of range");
                        }
                        run->choice = static_cast<std::size_t>(index);
                        run->status = "running";
                        run->cv.notify_all();
                        lock.unlock();
                        reply(res, 200, {{"run_id", run->id}, {"selected", run->options[index]}});
                    }));

        server.Post("/etl/run", guard([this](const httplib::Request& req, httplib::Response& res) {
                        auto body = parse_body(req);
                        if (!body.contains("session") || !body["session"].is_string()) {
                            throw Error(ErrorCode::validation, "body needs a string 'session'");
                        }
                        EtlConfig cfg;
                        cfg.timeout_ms = body.value("timeout_min", std::int64_t{30}) * 60'000;
                        if (body.contains("format")) {
                            cfg.route.format = knowledge_format_from_string(body["format"].get<std::string>());
                        }
                        if (body.contains("wiki_categories")) {
                            cfg.route.wiki_categories = body["wiki_categories"].get<std::vector<std::string>>();
                        }
                        if (body.contains("wiki_min_actions")) {
                            cfg.route.wiki_min_actions = body["wiki_min_actions"].get<std::size_t>();
                        }
                        cfg.agentic = body.value("agentic", false);
                        std::shared_ptr<ModelClient> model;
                        if (cfg.agentic && config.model_factory) model = config.model_factory();
                        std::lock_guard lock(etl_mu);
                        auto report = run_session(config.logs_dir, body["session"].get<std::string>(), ws, cfg,
                                                  model.get());
                        after_write();
                        reply(res, 200, report);
                    }));

        if (config.ui_dir && std::filesystem::exists(*config.ui_dir / "index.html")) {
            server.set_mount_point("/ui", config.ui_dir->string());
        } else {
            server.Get(R"(/ui(/.*)?)", [](const httplib::Request&, httplib::Response& res) {
                reply_error(res, 404, "not_found", "no UI bundle installed");
            });
        }
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) reply_error(res, res.status, "not_found", "no such endpoint");
        });
    }

    std::shared_ptr<Run> find_run(const std::string& id) {
        std::lock_guard lock(runs_mu);
        auto it = runs.find(id);
        if (it == runs.end()) throw Error(ErrorCode::not_found, "run '" + id + "'");
        return it->second;
    }

    std::string start_run(const json& body) {
        if (body.contains("instruction") && !body["instruction"].is_string()) {
            throw Error(ErrorCode::validation, "'instruction' must be a string");
        }
        std::string instruction = body.value("instruction", "");
        if (instruction.empty() && !body.contains("task_id")) {
            throw Error(ErrorCode::validation, "body needs a non-empty 'instruction' or a 'task_id'");
        }
        ScaffoldConfig scaffold = config.scaffold;
        if (body.contains("config")) apply_overrides(scaffold, body["config"]);
        if (!config.model_factory) throw Error(ErrorCode::model_backend, "no model configured");

        const sim::TaskSpec* task = nullptr;
        if (config.catalog) {
            if (body.contains("task_id")) {
                task = config.catalog->task(body["task_id"].get<std::string>());
                if (!task) throw Error(ErrorCode::not_found, "task '" + body["task_id"].get<std::string>() + "'");
            } else {
                for (const auto& t : config.catalog->tasks()) {
                    if (t.instruction == instruction) task = &t;
                }
            }
        }
        if (instruction.empty()) {
            if (!task) throw Error(ErrorCode::not_found, "no task catalog loaded");
            instruction = task->instruction;
        }
        auto model = config.model_factory();
        auto run = std::make_shared<Run>();
        {
            std::lock_guard lock(runs_mu);
            run->id = "run-" + std::to_string(++next_run);
            runs[run->id] = run;
        }
        run->snapshot.instruction = instruction;
        run->snapshot.task_id = task ? task->task_id : run->id;

        std::shared_ptr<const sim::Catalog> catalog = config.catalog;
        std::unique_lock lock(run->mu);
        run->thread = std::thread([this, run, model, catalog, task, instruction, scaffold] {
            std::unique_ptr<Environment> env;
            RunHooks hooks;
            hooks.task_id = run->snapshot.task_id;
            if (task) {
                env = catalog->open(*task);
                hooks.env_factory = catalog->factory_for(*task);
            } else {
                env = std::make_unique<BlankPage>();
                hooks.env_factory = [] { return std::make_unique<BlankPage>(); };
            }
            hooks.on_step = [run](const TaskRun& r) {
                std::lock_guard l(run->mu);
                run->snapshot = r;
            };
            hooks.on_choices = [run](const std::vector<std::string>& options) -> std::optional<std::string> {
                std::unique_lock l(run->mu);
                if (run->cancelled) return std::nullopt;
                run->options = options;
                run->choice.reset();
                run->status = "awaiting_choice";
                run->cv.notify_all();
                run->cv.wait(l, [&] { return run->choice.has_value() || run->cancelled; });
                if (!run->choice) return std::nullopt;
                run->status = "running";
                return run->options[*run->choice];
            };
            TaskRun result;
            std::string final_status;
            try {
                result = run_task(instruction, *env, &ws, scaffold, *model, hooks);
                final_status = std::string(to_string(result.status));
            } catch (const std::exception& e) {
                std::lock_guard l(run->mu);
                result = run->snapshot;
                result.status = RunStatus::failure;
                final_status = "failure";
            }
            std::lock_guard l(run->mu);
            result.task_id = run->snapshot.task_id;
            run->snapshot = std::move(result);
            run->status = final_status;
            run->cv.notify_all();
        });
        return run->id;
    }

    void cancel_runs() {
        std::vector<std::shared_ptr<Run>> all;
        {
            std::lock_guard lock(runs_mu);
            for (auto& [_, r] : runs) all.push_back(r);
        }
        for (auto& r : all) {
            {
                std::lock_guard l(r->mu);
                r->cancelled = true;
                r->cv.notify_all();
            }
            if (r->thread.joinable()) r->thread.join();
        }
    }
};

Service::Service(Workspace& workspace, ServiceConfig config)
    : impl_(std::make_unique<Impl>(workspace, std::move(config))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
    impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void Service::wait() {
    if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::stop() {
    if (impl_->stopped.exchange(true)) return;
    impl_->server.stop();
    if (impl_->listener.joinable()) impl_->listener.join();
    impl_->cancel_runs();
}

}  // namespace groundwork
