#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "format.hpp"

namespace nhxy::app {

enum class ParamType { number, integer, boolean, text, number_list };

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::number;
    json default_value; ///< null marks an optional parameter with no value
    std::string help;
    std::vector<std::string> choices; ///< allowed values for text parameters
};

struct CommandOutput {
    json report;             ///< <command>.json
    CsvTable table{{}};      ///< <command>.csv
    json summary = json::object(); ///< flat key/value digest, written to the manifest and sweep rows
};

struct PlotSpec {
    std::string x;
    std::vector<std::string> y;
    std::string style = "lines";
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
    std::vector<std::string> summary_columns;
    PlotSpec plot;
    std::function<CommandOutput(const json& params)> run;

    [[nodiscard]] const ParamSpec* find(const std::string& param) const;
};

/// Every subcommand except sweep, in a fixed order.
[[nodiscard]] const std::vector<CommandSpec>& command_registry();
[[nodiscard]] const CommandSpec* find_command(const std::string& name);

/// Converts flag text to a typed value; throws a config error naming the key.
[[nodiscard]] json parse_param_text(const ParamSpec& spec, const std::string& text);

/// Checks a JSON value against the parameter type; returns it normalised.
[[nodiscard]] json check_param_value(const ParamSpec& spec, const json& value);

/// Defaults, overridden by `file_params`, overridden by `flag_values`.
/// Unknown keys are config errors.
[[nodiscard]] json resolve_parameters(const CommandSpec& cmd, const json& file_params,
                                      const std::map<std::string, std::string>& flag_values);

} // namespace nhxy::app
