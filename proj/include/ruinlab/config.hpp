#ifndef RUINLAB_CONFIG_HPP
#define RUINLAB_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "ruinlab/json_io.hpp"

namespace ruinlab {

enum class Command {
    ComputeDiscrete,
    ComputeClassical,
    ComputeAndersen,
    SweepEpsilon,
    Simulate,
    Verify,
};

enum class OutputFormat { Csv, Json };

const char* command_name(Command c) noexcept;
const char* format_name(OutputFormat f) noexcept;

struct SweepSpec {
    std::optional<double> threshold_a;  // continuous claims only
    std::vector<double> epsilons;
    std::vector<double> u_list;
};

struct RunConfig {
    Command command = Command::Verify;
    std::optional<SeasonalModel> discrete;
    std::optional<ClassicalModel> classical;
    std::optional<AndersenModel> andersen;
    int u_max = 10;
    double tolerance = 1e-6;
    double grid_step = 0.0;  // 0 = library default
    RuinConvention convention = RuinConvention::Weak;
    double initial_surplus = 0.0;
    MCConfig mc{};
    std::optional<SweepSpec> sweep;
    OutputFormat format = OutputFormat::Csv;
    std::string out_path;  // empty = "<command>.<format>"

    std::string output_path() const;
};

// Parses and validates the documented JSON schema; violations raise
// ConfigError carrying a JSON-pointer path.
RunConfig parse_config(const std::string& text);

// Round-trip companion of parse_config.
Json emit_config(const RunConfig& cfg);

}  // namespace ruinlab

#endif
