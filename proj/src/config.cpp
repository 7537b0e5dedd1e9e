#include "ruinlab/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    raise(Errc::config_error, where + ": " + what);
}

constexpr const char* kCommandNames[] = {"compute-discrete", "compute-classical",
                                         "compute-andersen", "sweep-epsilon",
                                         "simulate",         "verify"};

std::string read_file(const std::string& path, const std::string& where) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad(where, "referenced file \"" + path + "\" does not exist");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double get_number(const Json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    return j.get<double>();
}

std::int64_t get_integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) bad(where, "expected an integer");
    return j.get<std::int64_t>();
}

void parse_model(const Json& j, const std::string& where, RunConfig& cfg) {
    if (!j.is_object()) bad(where, "expected an object");
    const auto it = j.find("type");
    if (it == j.end() || !it->is_string()) bad(where, "missing \"type\" string");
    const std::string type = it->get<std::string>();
    if (type == "discrete") {
        cfg.discrete = discrete_model_from_json(j, where);
    } else if (type == "classical") {
        cfg.classical = classical_model_from_json(j, where);
    } else if (type == "andersen") {
        cfg.andersen = andersen_model_from_json(j, where);
    } else {
        bad(where + "/type",
            "unknown model type \"" + type + "\"; expected discrete, classical or andersen");
    }
}

void parse_mc(const Json& j, const std::string& where, MCConfig& mc) {
    if (!j.is_object()) bad(where, "expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string path = where + "/" + key;
        if (key == "paths") {
            const auto v = get_integer(value, path);
            if (v < 1) bad(path, "must be >= 1");
            mc.paths = static_cast<std::uint64_t>(v);
        } else if (key == "horizon") {
            const auto v = get_integer(value, path);
            if (v < 1) bad(path, "must be >= 1");
            mc.horizon = v;
        } else if (key == "seed") {
            mc.seed = static_cast<std::uint64_t>(get_integer(value, path));
        } else if (key == "chunks") {
            const auto v = get_integer(value, path);
            if (v < 1) bad(path, "must be >= 1");
            mc.chunks = static_cast<unsigned>(v);
        } else {
            bad(path, "unknown field");
        }
    }
}

void parse_sweep(const Json& j, const std::string& where, SweepSpec& sweep) {
    if (!j.is_object()) bad(where, "expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string path = where + "/" + key;
        if (key == "a") {
            const double v = get_number(value, path);
            if (!(v > 0.0)) bad(path, "must be > 0");
            sweep.threshold_a = v;
        } else if (key == "epsilons") {
            if (!value.is_array() || value.empty()) bad(path, "expected a non-empty array");
            for (std::size_t i = 0; i < value.size(); ++i) {
                const double e = get_number(value[i], path + "/" + std::to_string(i));
                if (!(e > 0.0)) bad(path + "/" + std::to_string(i), "must be > 0");
                sweep.epsilons.push_back(e);
            }
        } else if (key == "u_list") {
            if (!value.is_array()) bad(path, "expected an array");
            for (std::size_t i = 0; i < value.size(); ++i) {
                const double u = get_number(value[i], path + "/" + std::to_string(i));
                if (u < 0.0) bad(path + "/" + std::to_string(i), "must be >= 0");
                sweep.u_list.push_back(u);
            }
        } else {
            bad(path, "unknown field");
        }
    }
    if (sweep.epsilons.empty()) bad(where, "missing \"epsilons\"");
}

}  // namespace

const char* command_name(Command c) noexcept {
    return kCommandNames[static_cast<int>(c)];
}

const char* format_name(OutputFormat f) noexcept {
    return f == OutputFormat::Csv ? "csv" : "json";
}

std::string RunConfig::output_path() const {
    if (!out_path.empty()) return out_path;
    return std::string(command_name(command)) + "." + format_name(format);
}

RunConfig parse_config(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        raise(Errc::config_error, std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("", "top level must be an object");

    RunConfig cfg;
    bool have_command = false, have_model = false, have_model_file = false;
    for (const auto& [key, value] : root.items()) {
        const std::string path = "/" + key;
        if (key == "command") {
            if (!value.is_string()) bad(path, "expected a string");
            const std::string name = value.get<std::string>();
            bool found = false;
            for (int i = 0; i < 6; ++i) {
                if (name == kCommandNames[i]) {
                    cfg.command = static_cast<Command>(i);
                    found = true;
                    break;
                }
            }
            if (!found) {
                std::string valid;
                for (int i = 0; i < 6; ++i)
                    valid += std::string(i ? ", " : "") + kCommandNames[i];
                bad(path, "unknown command \"" + name + "\"; valid commands: " + valid);
            }
            have_command = true;
        } else if (key == "model") {
            parse_model(value, path, cfg);
            have_model = true;
        } else if (key == "model_file") {
            if (!value.is_string()) bad(path, "expected a string");
            const std::string file = value.get<std::string>();
            Json inner;
            try {
                inner = Json::parse(read_file(file, path));
            } catch (const Json::parse_error& e) {
                bad(path, "invalid JSON in \"" + file + "\": " + e.what());
            }
            parse_model(inner, path, cfg);
            have_model_file = true;
        } else if (key == "u_max") {
            const auto v = get_integer(value, path);
            if (v < 0) bad(path, "must be >= 0");
            cfg.u_max = static_cast<int>(v);
        } else if (key == "tolerance") {
            const double v = get_number(value, path);
            if (!(v > 0.0)) bad(path, "must be > 0");
            cfg.tolerance = v;
        } else if (key == "grid_step") {
            const double v = get_number(value, path);
            if (!(v > 0.0)) bad(path, "must be > 0");
            cfg.grid_step = v;
        } else if (key == "convention") {
            if (!value.is_string()) bad(path, "expected a string");
            const std::string name = value.get<std::string>();
            if (name == "weak")
                cfg.convention = RuinConvention::Weak;
            else if (name == "strict")
                cfg.convention = RuinConvention::Strict;
            else
                bad(path, "expected \"weak\" or \"strict\"");
        } else if (key == "u") {
            const double v = get_number(value, path);
            if (v < 0.0) bad(path, "must be >= 0");
            cfg.initial_surplus = v;
        } else if (key == "mc") {
            parse_mc(value, path, cfg.mc);
        } else if (key == "sweep") {
            SweepSpec sweep;
            parse_sweep(value, path, sweep);
            cfg.sweep = std::move(sweep);
        } else if (key == "output") {
            if (!value.is_object()) bad(path, "expected an object");
            for (const auto& [okey, ovalue] : value.items()) {
                const std::string opath = path + "/" + okey;
                if (okey == "format") {
                    if (!ovalue.is_string()) bad(opath, "expected a string");
                    const std::string name = ovalue.get<std::string>();
                    if (name == "csv")
                        cfg.format = OutputFormat::Csv;
                    else if (name == "json")
                        cfg.format = OutputFormat::Json;
                    else
                        bad(opath, "expected \"csv\" or \"json\"");
                } else if (okey == "path") {
                    if (!ovalue.is_string()) bad(opath, "expected a string");
                    cfg.out_path = ovalue.get<std::string>();
                } else {
                    bad(opath, "unknown field");
                }
            }
        } else {
            bad(path, "unknown field");
        }
    }

    if (!have_command) bad("/command", "required");
    if (have_model && have_model_file) bad("/model", "give either model or model_file, not both");
    const bool needs_model = cfg.command != Command::Verify || cfg.discrete.has_value() ||
                             cfg.classical.has_value() || cfg.andersen.has_value();
    if (needs_model && !(cfg.discrete || cfg.classical || cfg.andersen))
        bad("/model", "required for this command");

    switch (cfg.command) {
        case Command::ComputeDiscrete:
            if (!cfg.discrete) bad("/model/type", "compute-discrete needs a discrete model");
            break;
        case Command::ComputeClassical:
            if (!cfg.classical) bad("/model/type", "compute-classical needs a classical model");
            break;
        case Command::ComputeAndersen:
            if (!cfg.andersen) bad("/model/type", "compute-andersen needs an andersen model");
            break;
        case Command::SweepEpsilon:
            if (!cfg.sweep) bad("/sweep", "required for sweep-epsilon");
            if (!cfg.discrete && !cfg.classical)
                bad("/model/type", "sweep-epsilon needs a discrete or classical model");
            if (cfg.classical && !cfg.sweep->threshold_a)
                bad("/sweep/a", "required for a classical sweep");
            break;
        case Command::Simulate:
            break;
        case Command::Verify:
            if (!cfg.discrete) bad("/model/type", "verify needs a (neutral) discrete model");
            break;
    }
    return cfg;
}

Json emit_config(const RunConfig& cfg) {
    Json out;
    out["command"] = command_name(cfg.command);
    if (cfg.discrete) out["model"] = model_to_json(*cfg.discrete);
    if (cfg.classical) out["model"] = model_to_json(*cfg.classical);
    if (cfg.andersen) out["model"] = model_to_json(*cfg.andersen);
    out["u_max"] = cfg.u_max;
    out["tolerance"] = cfg.tolerance;
    if (cfg.grid_step > 0.0) out["grid_step"] = cfg.grid_step;
    out["convention"] = cfg.convention == RuinConvention::Weak ? "weak" : "strict";
    out["u"] = cfg.initial_surplus;
    out["mc"] = Json{{"paths", cfg.mc.paths},
                     {"horizon", cfg.mc.horizon},
                     {"seed", cfg.mc.seed},
                     {"chunks", cfg.mc.chunks}};
    if (cfg.sweep) {
        Json sweep;
        if (cfg.sweep->threshold_a) sweep["a"] = *cfg.sweep->threshold_a;
        sweep["epsilons"] = cfg.sweep->epsilons;
        sweep["u_list"] = cfg.sweep->u_list;
        out["sweep"] = std::move(sweep);
    }
    out["output"] = Json{{"format", format_name(cfg.format)}, {"path", cfg.out_path}};
    return out;
}

}  // namespace ruinlab
