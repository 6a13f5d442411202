#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "groundwork/agent_core.hpp"
#include "groundwork/model_client.hpp"
#include "groundwork/sim_env.hpp"
#include "groundwork/workspace.hpp"

namespace groundwork {

struct ServiceConfig {
    std::filesystem::path logs_dir = "logs";
    /// Simulated sites for agent runs; runs whose instruction matches no
    /// task get a blank page.
    std::shared_ptr<const sim::Catalog> catalog;
    ScaffoldConfig scaffold;
    /// Model per agent run (and for agentic ETL runs).
    std::function<std::shared_ptr<ModelClient>()> model_factory;
    /// Directory with a built UI bundle, served at /ui when present.
    std::optional<std::filesystem::path> ui_dir;
    /// Persist the workspace after every write when it is attached.
    bool persist_on_write = false;
};

/// JSON HTTP front end over a Workspace. Endpoints are listed in docs/api.md.
class Service {
public:
    Service(Workspace& workspace, ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port;
    /// returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Blocks until stop() is called.
    void wait();
    /// Stops listening, releases runs waiting for a choice and joins them.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace groundwork
