#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "format.hpp"

namespace nhxy::app {

namespace {

struct HelpRequested {
    std::string text;
};

const std::set<std::string> config_keys{"command", "parameters", "output_dir", "seed", "workers"};
const std::set<std::string> sweep_keys{"command", "axes", "base"};

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<long long> seed;
    std::optional<long long> workers;
    bool gnuplot = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config_path, "JSON run configuration");
    app->add_option("--out", f.out_dir, "output directory");
    app->add_option("--seed", f.seed, "seed recorded in the manifest");
    app->add_option("--workers", f.workers, "worker threads for sweeps");
    app->add_flag("--gnuplot", f.gnuplot, "also write a gnuplot script");
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        raise(ErrorKind::usage, std::string(flag) + " expects NAME=VALUE, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

json parse_axis_values(const ParamSpec& spec, const std::string& text) {
    if (spec.type == ParamType::number_list)
        raise(ErrorKind::config, "sweep axis '" + spec.name + "' is list-valued and cannot be swept");
    json values = json::array();
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        values.push_back(parse_param_text(spec, std::string(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return values;
}

json resolve_sweep(const json& file_params, const std::string& command_flag, const std::vector<std::string>& axis_flags,
                   const std::vector<std::string>& set_flags) {
    json fp = file_params.is_null() ? json::object() : file_params;
    if (!fp.is_object()) raise(ErrorKind::config, "sweep parameters must be a JSON object");
    for (const auto& [key, value] : fp.items())
        if (!sweep_keys.count(key)) raise(ErrorKind::config, "unknown parameter '" + key + "' for command 'sweep'");

    std::string target = command_flag;
    if (target.empty() && fp.contains("command")) {
        if (!fp["command"].is_string()) raise(ErrorKind::config, "parameter 'command': expected a string");
        target = fp["command"].get<std::string>();
    }
    if (target.empty()) raise(ErrorKind::usage, "sweep: missing required parameter 'command'");
    if (target == "sweep") raise(ErrorKind::config, "sweep: nested sweeps are not supported");
    const CommandSpec* cmd = find_command(target);
    if (!cmd) raise(ErrorKind::config, "sweep: unknown command '" + target + "'");

    std::vector<std::pair<std::string, json>> axes;
    const auto set_axis = [&](const std::string& name, json values) {
        const ParamSpec* spec = cmd->find(name);
        if (!spec) raise(ErrorKind::config, "sweep: '" + name + "' is not a parameter of '" + target + "'");
        if (spec->type == ParamType::number_list)
            raise(ErrorKind::config, "sweep axis '" + name + "' is list-valued and cannot be swept");
        if (!values.is_array() || values.empty()) raise(ErrorKind::config, "sweep axis '" + name + "' needs values");
        for (auto& v : values) v = check_param_value(*spec, v);
        for (auto& [n, vals] : axes)
            if (n == name) {
                vals = std::move(values);
                return;
            }
        axes.emplace_back(name, std::move(values));
    };
    if (fp.contains("axes")) {
        if (!fp["axes"].is_array()) raise(ErrorKind::config, "parameter 'axes': expected a list");
        for (const auto& a : fp["axes"]) {
            if (!a.is_object() || a.size() != 2 || !a.contains("name") || !a.contains("values") || !a["name"].is_string())
                raise(ErrorKind::config, "parameter 'axes': each entry must be {\"name\": ..., \"values\": [...]}");
            set_axis(a["name"].get<std::string>(), a["values"]);
        }
    }
    for (const auto& flag : axis_flags) {
        const auto [name, text] = split_assignment(flag, "--axis");
        const ParamSpec* spec = cmd->find(name);
        if (!spec) raise(ErrorKind::config, "sweep: '" + name + "' is not a parameter of '" + target + "'");
        set_axis(name, parse_axis_values(*spec, text));
    }
    if (axes.empty()) raise(ErrorKind::usage, "sweep: empty axis list");

    json base = fp.contains("base") ? fp["base"] : json::object();
    if (!base.is_object()) raise(ErrorKind::config, "parameter 'base': expected an object");
    for (const auto& [key, value] : base.items()) {
        const ParamSpec* spec = cmd->find(key);
        if (!spec) raise(ErrorKind::config, "unknown parameter '" + key + "' for command '" + target + "'");
        base[key] = check_param_value(*spec, value);
    }
    for (const auto& flag : set_flags) {
        const auto [name, text] = split_assignment(flag, "--set");
        const ParamSpec* spec = cmd->find(name);
        if (!spec) raise(ErrorKind::config, "unknown parameter '" + name + "' for command '" + target + "'");
        base[name] = parse_param_text(*spec, text);
    }

    json axes_json = json::array();
    for (const auto& [name, values] : axes) axes_json.push_back({{"name", name}, {"values", values}});
    return {{"command", target}, {"axes", axes_json}, {"base", base}};
}

std::string gnuplot_script(const std::string& command, const PlotSpec& plot) {
    std::ostringstream s;
    s << "# " << command << " data\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << plot.x << "'\n"
      << "plot ";
    for (std::size_t i = 0; i < plot.y.size(); ++i) {
        if (i) s << ", \\\n     ";
        s << (i ? "''" : "'" + command + ".csv'") << " using '" << plot.x << "':'" << plot.y[i] << "' with "
          << plot.style;
    }
    s << "\n";
    return s.str();
}

json error_json(const std::string& kind, const std::string& message, int code) {
    return {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) raise(ErrorKind::config, "cannot write " + path.string());
    f << contents;
    if (!f) raise(ErrorKind::config, "failed writing " + path.string());
}

} // namespace

int exit_code_for(ErrorKind kind) noexcept {
    return kind == ErrorKind::config || kind == ErrorKind::usage ? exit_config : exit_numeric;
}

json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) raise(ErrorKind::config, "cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        raise(ErrorKind::config, "config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) raise(ErrorKind::config, "config file must hold a JSON object");
    for (const auto& [key, value] : j.items())
        if (!config_keys.count(key)) raise(ErrorKind::config, "unknown config key '" + key + "'");
    if (j.contains("command") && !j["command"].is_string())
        raise(ErrorKind::config, "config key 'command': expected a string");
    if (j.contains("parameters") && !j["parameters"].is_object())
        raise(ErrorKind::config, "config key 'parameters': expected an object");
    if (j.contains("output_dir") && !j["output_dir"].is_string())
        raise(ErrorKind::config, "config key 'output_dir': expected a string");
    if (j.contains("seed") && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
        raise(ErrorKind::config, "config key 'seed': expected a non-negative integer");
    if (j.contains("workers") && !j["workers"].is_number_integer())
        raise(ErrorKind::config, "config key 'workers': expected an integer");
    return j;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Non-Hermitian XY / clock-model RG toolkit", "nhxy"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", version);

    CommonFlags top;
    add_common(&app, top);
    std::map<std::string, CommonFlags> common;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, CLI::Option*>> options;
    std::map<std::string, CLI::App*> subs;
    for (const auto& cmd : command_registry()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        subs[cmd.name] = sub;
        add_common(sub, common[cmd.name]);
        for (const auto& p : cmd.params) {
            std::string help = p.help;
            if (!p.default_value.is_null()) help += " [default " + format_cell(p.default_value) + "]";
            options[cmd.name][p.name] = sub->add_option("--" + p.name, values[cmd.name][p.name], help);
        }
    }
    std::string sweep_command;
    std::vector<std::string> sweep_axes, sweep_sets;
    CLI::App* sweep = app.add_subcommand("sweep", "run another command over a parameter grid");
    subs["sweep"] = sweep;
    add_common(sweep, common["sweep"]);
    sweep->add_option("--command", sweep_command, "command evaluated at each grid point");
    sweep->add_option("--axis", sweep_axes, "NAME=v1,v2,... (repeatable)");
    sweep->add_option("--set", sweep_sets, "NAME=VALUE fixed for every point (repeatable)");

    std::vector<std::string> argv_store{"nhxy"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        CLI::App* target = &app;
        for (auto* s : app.get_subcommands()) target = s;
        throw HelpRequested{target->help()};
    } catch (const CLI::CallForVersion&) {
        throw HelpRequested{std::string(version) + "\n"};
    } catch (const CLI::ParseError& e) {
        raise(ErrorKind::usage, e.what());
    }

    std::string chosen;
    const auto parsed_subs = app.get_subcommands();
    if (!parsed_subs.empty()) chosen = parsed_subs.front()->get_name();
    CommonFlags flags = chosen.empty() ? top : common[chosen];
    if (!chosen.empty()) {
        // common flags given before the subcommand still count
        if (flags.config_path.empty()) flags.config_path = top.config_path;
        if (flags.out_dir.empty()) flags.out_dir = top.out_dir;
        if (!flags.seed) flags.seed = top.seed;
        if (!flags.workers) flags.workers = top.workers;
        flags.gnuplot = flags.gnuplot || top.gnuplot;
    }

    json file = json::object();
    if (!flags.config_path.empty()) file = load_config_file(flags.config_path);
    if (file.contains("command")) {
        const auto file_cmd = file["command"].get<std::string>();
        if (!chosen.empty() && chosen != file_cmd)
            raise(ErrorKind::config, "config file is for '" + file_cmd + "' but the command line asks for '" + chosen + "'");
        chosen = file_cmd;
    }
    if (chosen.empty()) raise(ErrorKind::usage, "no command given (use --help for the list)");
    if (chosen != "sweep" && !find_command(chosen)) raise(ErrorKind::config, "unknown command '" + chosen + "'");

    RunConfig cfg;
    cfg.command = chosen;
    const json file_params = file.contains("parameters") ? file["parameters"] : json::object();
    if (chosen == "sweep") {
        cfg.parameters = resolve_sweep(file_params, sweep_command, sweep_axes, sweep_sets);
    } else {
        std::map<std::string, std::string> given;
        for (const auto& [name, opt] : options[chosen])
            if (opt->count() > 0) given[name] = values[chosen][name];
        cfg.parameters = resolve_parameters(*find_command(chosen), file_params, given);
    }

    if (!flags.out_dir.empty()) {
        cfg.output_dir = flags.out_dir;
    } else if (const char* env = std::getenv("NHXY_OUTPUT_DIR"); env && *env) {
        cfg.output_dir = env;
    } else if (file.contains("output_dir")) {
        cfg.output_dir = file["output_dir"].get<std::string>();
    }
    const long long seed = flags.seed ? *flags.seed : file.value("seed", 0LL);
    if (seed < 0) raise(ErrorKind::config, "seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    const long long workers = flags.workers ? *flags.workers : file.value("workers", 1LL);
    if (workers < 1 || workers > 256) raise(ErrorKind::config, "workers must lie in [1, 256]");
    cfg.workers = static_cast<int>(workers);
    cfg.gnuplot = flags.gnuplot;
    return cfg;
}

RunResult execute(const RunConfig& cfg) {
    if (cfg.command == "sweep") return run_sweep(cfg);
    const CommandSpec* cmd = find_command(cfg.command);
    if (!cmd) raise(ErrorKind::config, "unknown command '" + cfg.command + "'");
    CommandOutput out = cmd->run(cfg.parameters);
    RunResult r;
    r.summary = std::move(out.summary);
    r.files.emplace_back(cfg.command + ".csv", out.table.str());
    r.files.emplace_back(cfg.command + ".json", dump_json(out.report));
    if (cfg.gnuplot) r.files.emplace_back(cfg.command + ".gp", gnuplot_script(cfg.command, cmd->plot));
    return r;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const HelpRequested& h) {
        out << h.text;
        return exit_ok;
    } catch (const Error& e) {
        const int code = exit_code_for(e.kind());
        err << error_json(std::string(to_string(e.kind())), e.what(), code).dump() << "\n";
        return code;
    }

    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    try {
        result = execute(cfg);
    } catch (const Error& e) {
        result = {};
        result.exit_code = exit_code_for(e.kind());
        result.error = error_json(std::string(to_string(e.kind())), e.what(), result.exit_code);
    } catch (const std::exception& e) {
        result = {};
        result.exit_code = exit_numeric;
        result.error = error_json("internal_error", e.what(), result.exit_code);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!result.error.is_null()) {
        err << result.error.dump() << "\n";
        result.files.emplace_back("error.json", dump_json(result.error));
    }

    json artifacts = json::array();
    for (const auto& [name, contents] : result.files) artifacts.push_back(name);
    artifacts.push_back("manifest.json");
    json manifest = {
        {"command", cfg.command},
        {"config",
         {{"command", cfg.command}, {"parameters", cfg.parameters}, {"seed", cfg.seed}, {"workers", cfg.workers},
          {"gnuplot", cfg.gnuplot}}},
        {"versions",
         {{"nhxy", version},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION}}},
        {"artifacts", artifacts},
        {"summary", result.summary},
        {"exit_code", result.exit_code},
        {"wall_time_s", wall}};
    result.files.emplace_back("manifest.json", dump_json(manifest));

    try {
        const std::filesystem::path dir(cfg.output_dir);
        std::filesystem::create_directories(dir);
        for (const auto& [name, contents] : result.files) write_file(dir / name, contents);
    } catch (const std::exception& e) {
        err << error_json("config_error", std::string("writing artifacts: ") + e.what(), exit_config).dump() << "\n";
        return exit_config;
    }
    out << result.summary.dump() << "\n";
    return result.exit_code;
}

} // namespace nhxy::app
