#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundwork/agent_core.hpp"
#include "groundwork/sim_env.hpp"
#include "groundwork/workspace.hpp"

namespace groundwork {

/// Wiki pages distilled from one category's solution trajectories.
using BundleKey = std::pair<std::string, KnowledgeFormat>;  // (task category, format)
using Bundles = std::map<BundleKey, std::vector<WikiPage>>;

/// Replays every task's solution through capture and the ETL pipeline (one
/// session per task) and collects the approved wiki pages per category and
/// format. Wiki routing is open to every activity category here.
Bundles build_bundles(const sim::Catalog& catalog, const std::vector<KnowledgeFormat>& formats);

struct CoverageConfig {
    int orderings = 6;
    std::uint64_t seed = 7;
    std::vector<KnowledgeFormat> formats{KnowledgeFormat::trajectory, KnowledgeFormat::script,
                                         KnowledgeFormat::insight};
    double slip_prob = 0.08;
    ScaffoldConfig scaffold = [] {
        ScaffoldConfig c;
        c.n_samples = 1;
        c.temperature = 0.7;
        return c;
    }();
};

struct CoverageReport {
    std::vector<std::vector<std::string>> orderings;
    std::vector<KnowledgeFormat> formats;
    /// format -> ordering -> success rate per k = 0..6
    std::map<KnowledgeFormat, std::vector<std::vector<double>>> per_ordering;
    /// format -> mean over orderings per k
    std::map<KnowledgeFormat, std::vector<double>> mean;
    /// Service-catalog success just before and after its bundle is added,
    /// and at full coverage, per ordering (script format when present).
    struct CatalogRow {
        std::string ordering;
        double before = 0.0;
        double after = 0.0;
        double final = 0.0;
    };
    std::vector<CatalogRow> catalog;
    std::map<std::string, std::map<std::string, std::size_t>> bundle_counts;
    std::size_t runs = 0;
    std::size_t contexts_checked = 0;
};

/// Seeded Fisher-Yates over the six task categories.
std::vector<std::vector<std::string>> category_orderings(int count, std::uint64_t seed);

/// Runs every task at every coverage level k = 0..6 for every ordering and
/// format. Throws MissingBundle when a category lacks pages for a format,
/// and ValidationError if bundle text ever shows up in an initial context.
CoverageReport eval_coverage(const sim::Catalog& catalog, const Bundles& bundles, const CoverageConfig& config);

void to_json(nlohmann::json& j, const CoverageReport& r);
/// Rows are coverage levels, columns formats.
std::string coverage_csv(const CoverageReport& r);
/// Writes coverage.json and coverage.csv under `dir`.
void write_coverage_reports(const CoverageReport& r, const std::filesystem::path& dir);

}  // namespace groundwork
