#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "format.hpp"

namespace nhxy::app {

namespace {

inline constexpr std::size_t max_grid_points = 1'000'000;

struct PointResult {
    json axis_values = json::object();
    bool ok = false;
    json summary;
    std::string error_kind;
    std::string message;
};

} // namespace

RunResult run_sweep(const RunConfig& cfg) {
    const json& sp = cfg.parameters;
    const std::string target = sp.at("command").get<std::string>();
    const CommandSpec* cmd = find_command(target);
    if (!cmd) raise(ErrorKind::config, "sweep: unknown command '" + target + "'");
    const json& axes = sp.at("axes");
    if (!axes.is_array() || axes.empty()) raise(ErrorKind::usage, "sweep: empty axis list");

    std::vector<std::string> names;
    std::vector<std::size_t> sizes;
    std::size_t total = 1;
    for (const auto& a : axes) {
        names.push_back(a.at("name").get<std::string>());
        const std::size_t n = a.at("values").size();
        if (n == 0) raise(ErrorKind::config, "sweep axis '" + names.back() + "' has no values");
        sizes.push_back(n);
        if (total > max_grid_points / n) raise(ErrorKind::config, "sweep grid exceeds 1e6 points");
        total *= n;
    }

    std::vector<PointResult> results(total);
    // row-major: the last axis varies fastest
    const auto evaluate = [&](std::size_t index) {
        PointResult& r = results[index];
        json params = sp.at("base");
        std::size_t rem = index;
        for (std::size_t k = names.size(); k-- > 0;) {
            const json& v = axes[k].at("values")[rem % sizes[k]];
            rem /= sizes[k];
            params[names[k]] = v;
            r.axis_values[names[k]] = v;
        }
        try {
            const json resolved = resolve_parameters(*cmd, params, {});
            r.summary = cmd->run(resolved).summary;
            r.ok = true;
        } catch (const Error& e) {
            r.error_kind = std::string(to_string(e.kind()));
            r.message = e.what();
        } catch (const std::exception& e) {
            r.error_kind = "internal_error";
            r.message = e.what();
        }
    };

    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), total);
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < total; i = next++) evaluate(i);
            });
        for (auto& t : pool) t.join();
    }

    std::vector<std::string> columns{"index"};
    columns.insert(columns.end(), names.begin(), names.end());
    columns.push_back("status");
    columns.push_back("error_kind");
    columns.insert(columns.end(), cmd->summary_columns.begin(), cmd->summary_columns.end());
    CsvTable table(columns);
    json rows = json::array();
    std::size_t failed = 0;
    for (std::size_t i = 0; i < total; ++i) {
        const PointResult& r = results[i];
        std::vector<json> cells{i};
        for (const auto& n : names) cells.push_back(r.axis_values[n]);
        cells.emplace_back(r.ok ? "ok" : "error");
        cells.push_back(r.ok ? json(nullptr) : json(r.error_kind));
        for (const auto& c : cmd->summary_columns)
            cells.push_back(r.ok && r.summary.contains(c) ? r.summary[c] : json(nullptr));
        table.add_row(cells);
        json row = {{"index", i}, {"parameters", r.axis_values}, {"status", r.ok ? "ok" : "error"}};
        row["summary"] = r.ok ? r.summary : json(nullptr);
        row["error"] = r.ok ? json(nullptr) : json{{"kind", r.error_kind}, {"message", r.message}};
        rows.push_back(row);
        if (!r.ok) ++failed;
    }

    RunResult out;
    json report = {{"command", target}, {"axes", axes}, {"base", sp.at("base")},
                   {"n_points", total}, {"n_failed", failed}, {"rows", rows}};
    out.files.emplace_back("sweep.csv", table.str());
    out.files.emplace_back("sweep.json", dump_json(report));
    out.summary = {{"command", target}, {"n_points", total}, {"n_failed", failed}};
    if (failed > 0) out.exit_code = exit_partial_sweep;
    if (2 * failed > total)
        out.error = {{"error",
                      {{"kind", "sweep_error"},
                       {"message", std::to_string(failed) + " of " + std::to_string(total) + " sweep points failed"},
                       {"exit_code", exit_partial_sweep}}}};
    return out;
}

} // namespace nhxy::app
