#include "registry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include "nhxy/errors.hpp"

namespace nhxy::app {

namespace {

[[noreturn]] void bad_value(const ParamSpec& spec, const std::string& what) {
    raise(ErrorKind::config, "parameter '" + spec.name + "': " + what);
}

double parse_number(const ParamSpec& spec, std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
        bad_value(spec, "'" + std::string(text) + "' is not a finite number");
    return v;
}

} // namespace

const ParamSpec* CommandSpec::find(const std::string& param) const {
    const auto it = std::find_if(params.begin(), params.end(), [&](const ParamSpec& p) { return p.name == param; });
    return it == params.end() ? nullptr : &*it;
}

const CommandSpec* find_command(const std::string& name) {
    const auto& reg = command_registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const CommandSpec& c) { return c.name == name; });
    return it == reg.end() ? nullptr : &*it;
}

json parse_param_text(const ParamSpec& spec, const std::string& text) {
    if (spec.default_value.is_null() && (text == "none" || text == "null")) return nullptr;
    switch (spec.type) {
        case ParamType::number: return parse_number(spec, text);
        case ParamType::integer: {
            long long v = 0;
            const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
                bad_value(spec, "'" + text + "' is not an integer");
            return v;
        }
        case ParamType::boolean:
            if (text == "true" || text == "1" || text == "yes") return true;
            if (text == "false" || text == "0" || text == "no") return false;
            bad_value(spec, "'" + text + "' is not a boolean");
        case ParamType::text: return check_param_value(spec, text);
        case ParamType::number_list: {
            json list = json::array();
            std::string_view rest = text;
            while (true) {
                const auto comma = rest.find(',');
                list.push_back(parse_number(spec, rest.substr(0, comma)));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
            return list;
        }
    }
    bad_value(spec, "unsupported type");
}

json check_param_value(const ParamSpec& spec, const json& value) {
    if (value.is_null()) {
        if (spec.default_value.is_null()) return nullptr;
        bad_value(spec, "null is not allowed");
    }
    switch (spec.type) {
        case ParamType::number:
            if (!value.is_number() || !std::isfinite(value.get<double>())) bad_value(spec, "expected a finite number");
            return value.get<double>();
        case ParamType::integer:
            if (value.is_number_integer()) return value.get<long long>();
            if (value.is_number_float() && std::floor(value.get<double>()) == value.get<double>() &&
                std::abs(value.get<double>()) < 9e15)
                return static_cast<long long>(value.get<double>());
            bad_value(spec, "expected an integer");
        case ParamType::boolean:
            if (!value.is_boolean()) bad_value(spec, "expected a boolean");
            return value;
        case ParamType::text: {
            if (!value.is_string()) bad_value(spec, "expected a string");
            const auto& s = value.get_ref<const std::string&>();
            if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), s) == spec.choices.end()) {
                std::string allowed;
                for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
                bad_value(spec, "'" + s + "' is not one of {" + allowed + "}");
            }
            return value;
        }
        case ParamType::number_list: {
            if (!value.is_array() || value.empty()) bad_value(spec, "expected a non-empty list of numbers");
            json out = json::array();
            for (const auto& v : value) {
                if (!v.is_number() || !std::isfinite(v.get<double>())) bad_value(spec, "list entries must be finite numbers");
                out.push_back(v.get<double>());
            }
            return out;
        }
    }
    bad_value(spec, "unsupported type");
}

json resolve_parameters(const CommandSpec& cmd, const json& file_params,
                        const std::map<std::string, std::string>& flag_values) {
    if (!file_params.is_null() && !file_params.is_object())
        raise(ErrorKind::config, "parameters must be a JSON object");
    json out = json::object();
    for (const auto& p : cmd.params) out[p.name] = p.default_value;
    if (file_params.is_object()) {
        for (const auto& [key, value] : file_params.items()) {
            const ParamSpec* spec = cmd.find(key);
            if (!spec) raise(ErrorKind::config, "unknown parameter '" + key + "' for command '" + cmd.name + "'");
            out[key] = check_param_value(*spec, value);
        }
    }
    for (const auto& [key, text] : flag_values) {
        const ParamSpec* spec = cmd.find(key);
        if (!spec) raise(ErrorKind::config, "unknown parameter '" + key + "' for command '" + cmd.name + "'");
        out[key] = parse_param_text(*spec, text);
    }
    return out;
}

} // namespace nhxy::app
