#include "groundwork/eval_coverage.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "groundwork/behavior_logger.hpp"
#include "groundwork/error.hpp"
#include "groundwork/etl_pipeline.hpp"
#include "groundwork/hashing.hpp"
#include "groundwork/policy_model.hpp"

namespace groundwork {

namespace {

constexpr std::int64_t kCaptureStart = 1'767'225'600'000;  // 2026-01-01T00:00:00Z
constexpr std::int64_t kHour = 3'600'000;

std::string fmt_rate(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string ordering_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "order_%02zu", i);
    return buf;
}

}  // namespace

Bundles build_bundles(const sim::Catalog& catalog, const std::vector<KnowledgeFormat>& formats) {
    Bundles bundles;
    for (const auto format : formats) {
        for (const auto& cat : sim::task_categories()) bundles[{cat, format}];
        std::int64_t start = kCaptureStart;
        for (const auto& task : catalog.tasks()) {
            const auto events = capture_solution(catalog, task, "capture-" + task.task_id, start);
            start += kHour;
            Workspace scratch([] { return std::int64_t{0}; });
            EtlConfig cfg;
            cfg.route.format = format;
            cfg.route.wiki_categories = activity_taxonomy();
            cfg.route.wiki_min_actions = 0;
            const auto report = run_pipeline(events, scratch, cfg);
            for (const auto& p : report.proposals) {
                if (p.target.type == ArtifactType::wiki) scratch.decide(p.id, true);
            }
            for (auto page : scratch.wiki_pages()) {
                page.id.clear();
                page.updated_ts = 0;
                bundles[{task.category, format}].push_back(std::move(page));
            }
        }
    }
    return bundles;
}

std::vector<std::vector<std::string>> category_orderings(int count, std::uint64_t seed) {
    std::vector<std::vector<std::string>> out;
    const std::string s = std::to_string(seed);
    for (int o = 0; o < count; ++o) {
        auto cats = sim::task_categories();
        for (std::size_t i = cats.size() - 1; i > 0; --i) {
            const double u = stable_uniform({"ordering", s, std::to_string(o), std::to_string(i)});
            const auto j = static_cast<std::size_t>(u * static_cast<double>(i + 1));
            std::swap(cats[i], cats[std::min(j, i)]);
        }
        out.push_back(std::move(cats));
    }
    return out;
}

CoverageReport eval_coverage(const sim::Catalog& catalog, const Bundles& bundles, const CoverageConfig& config) {
    validate(config.scaffold);
    CoverageReport report;
    report.formats = config.formats;
    report.orderings = category_orderings(config.orderings, config.seed);
    const auto& cats = sim::task_categories();
    const std::size_t levels = cats.size() + 1;

    for (const auto& [key, pages] : bundles) report.bundle_counts[key.first][std::string(to_string(key.second))] = pages.size();
    for (const auto format : config.formats) {
        for (const auto& cat : cats) {
            auto it = bundles.find({cat, format});
            if (it == bundles.end() || it->second.empty()) {
                throw Error(ErrorCode::missing_bundle,
                            "no " + std::string(to_string(format)) + " pages for category '" + cat + "'");
            }
        }
    }

    std::vector<std::string> bundle_texts;
    for (const auto& [_, pages] : bundles) {
        for (const auto& p : pages) bundle_texts.push_back(p.body);
    }

    std::vector<const sim::TaskSpec*> catalog_tasks;
    for (const auto& t : catalog.tasks()) {
        if (t.category == "service-catalog") catalog_tasks.push_back(&t);
    }

    for (const auto format : config.formats) {
        auto& per_ordering = report.per_ordering[format];
        std::vector<std::vector<double>> catalog_rates;
        for (std::size_t o = 0; o < report.orderings.size(); ++o) {
            const auto& order = report.orderings[o];
            PolicyParams params;
            params.seed = fnv1a64(std::to_string(config.seed) + "/" + std::to_string(o));
            params.slip_prob = config.slip_prob;
            TaskPolicyModel model(catalog, params);

            std::vector<double> rates;
            std::vector<double> catalog_rate;
            Workspace ws([] { return std::int64_t{0}; });
            for (std::size_t k = 0; k < levels; ++k) {
                if (k > 0) {
                    for (const auto& page : bundles.at({order[k - 1], format})) {
                        Proposal p;
                        p.target = {ArtifactType::wiki, "new"};
                        p.change = nlohmann::json(page);
                        p.change.erase("id");
                        p.rationale = "coverage seed";
                        ws.decide(ws.propose(p), true);
                    }
                }
                std::size_t ok = 0;
                std::size_t catalog_ok = 0;
                for (const auto& task : catalog.tasks()) {
                    auto env = catalog.open(task);
                    const Workspace cell = ws.clone();
                    RunHooks hooks;
                    hooks.task_id = task.task_id;
                    hooks.on_context = [&](std::size_t step, const std::string& context) {
                        if (step != 0) return;
                        ++report.contexts_checked;
                        const std::string initial = system_prompt(task.instruction) + context;
                        for (const auto& text : bundle_texts) {
                            if (!text.empty() && initial.find(text) != std::string::npos) {
                                throw Error(ErrorCode::validation, "bundle text leaked into the initial context");
                            }
                        }
                    };
                    const auto run = run_task(task.instruction, *env, &cell, config.scaffold, model, hooks);
                    ++report.runs;
                    const bool success = run.status == RunStatus::success;
                    ok += success;
                    if (task.category == "service-catalog") catalog_ok += success;
                }
                rates.push_back(static_cast<double>(ok) / static_cast<double>(catalog.tasks().size()));
                catalog_rate.push_back(catalog_tasks.empty() ? 0.0
                                                             : static_cast<double>(catalog_ok) /
                                                                   static_cast<double>(catalog_tasks.size()));
            }
            per_ordering.push_back(std::move(rates));
            catalog_rates.push_back(std::move(catalog_rate));
        }
        auto& mean = report.mean[format];
        mean.assign(levels, 0.0);
        for (const auto& row : per_ordering) {
            for (std::size_t k = 0; k < levels; ++k) mean[k] += row[k] / static_cast<double>(per_ordering.size());
        }

        const bool table_format = format == KnowledgeFormat::script ||
                                  (report.catalog.empty() && std::find(config.formats.begin(), config.formats.end(),
                                                                       KnowledgeFormat::script) == config.formats.end());
        if (table_format && report.catalog.empty()) {
            for (std::size_t o = 0; o < report.orderings.size(); ++o) {
                const auto& order = report.orderings[o];
                const auto pos = static_cast<std::size_t>(
                    std::find(order.begin(), order.end(), "service-catalog") - order.begin());
                report.catalog.push_back(
                    {ordering_name(o), catalog_rates[o][pos], catalog_rates[o][pos + 1], catalog_rates[o][levels - 1]});
            }
        }
    }
    return report;
}

void to_json(nlohmann::json& j, const CoverageReport& r) {
    j = nlohmann::json::object();
    auto orderings = nlohmann::json::object();
    for (std::size_t i = 0; i < r.orderings.size(); ++i) orderings[ordering_name(i)] = r.orderings[i];
    j["orderings"] = orderings;
    auto formats = nlohmann::json::array();
    for (auto f : r.formats) formats.push_back(to_string(f));
    j["formats"] = formats;
    auto mean = nlohmann::json::object();
    auto per = nlohmann::json::object();
    for (auto f : r.formats) {
        const std::string name(to_string(f));
        mean[name] = r.mean.at(f);
        auto rows = nlohmann::json::object();
        for (std::size_t i = 0; i < r.per_ordering.at(f).size(); ++i) rows[ordering_name(i)] = r.per_ordering.at(f)[i];
        per[name] = rows;
    }
    j["mean_success"] = mean;
    j["per_ordering"] = per;
    auto table = nlohmann::json::array();
    for (const auto& row : r.catalog) {
        table.push_back({{"ordering", row.ordering}, {"before", row.before}, {"after", row.after}, {"final", row.final}});
    }
    j["service_catalog"] = table;
    j["bundle_counts"] = r.bundle_counts;
    j["runs"] = r.runs;
    j["initial_contexts_checked"] = r.contexts_checked;
}

std::string coverage_csv(const CoverageReport& r) {
    std::string out = "k";
    for (auto f : r.formats) out += "," + std::string(to_string(f));
    out += "\n";
    const std::size_t levels = r.formats.empty() ? 0 : r.mean.at(r.formats.front()).size();
    for (std::size_t k = 0; k < levels; ++k) {
        out += std::to_string(k);
        for (auto f : r.formats) out += "," + fmt_rate(r.mean.at(f)[k]);
        out += "\n";
    }
    return out;
}

void write_coverage_reports(const CoverageReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "coverage.json");
        out << nlohmann::json(r).dump(2) << "\n";
        if (!out) throw Error(ErrorCode::io, "cannot write coverage.json");
    }
    std::ofstream out(dir / "coverage.csv");
    out << coverage_csv(r);
    if (!out) throw Error(ErrorCode::io, "cannot write coverage.csv");
}

}  // namespace groundwork
