#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ruinlab/errors.hpp"
#include "ruinlab/runner.hpp"

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) ruinlab::raise(ruinlab::Errc::config_error, "cannot read config \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ruin_lab: ultimate-time ruin and survival probabilities for discrete-time, "
        "classical and Sparre Andersen risk models"};

    std::string config_path;
    app.add_option("config", config_path, "JSON run configuration (\"-\" for stdin)")
        ->required();
    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "override mc.seed");
    std::optional<std::uint64_t> paths;
    app.add_option("--paths", paths, "override mc.paths");
    std::optional<std::string> out;
    app.add_option("--out", out, "override output.path");

    CLI11_PARSE(app, argc, argv);

    try {
        ruinlab::RunConfig cfg = ruinlab::parse_config(read_input(config_path));
        if (seed) cfg.mc.seed = *seed;
        if (paths) cfg.mc.paths = *paths;
        if (out) cfg.out_path = *out;

        const ruinlab::RunOutcome outcome = ruinlab::run(cfg);
        for (const auto& warning : outcome.warnings)
            std::cerr << nlohmann::json{{"warning", warning}}.dump() << "\n";
        if (!outcome.summary.empty()) {
            std::cout << outcome.summary;
            if (outcome.summary.back() != '\n') std::cout << '\n';
        }
        for (const auto& file : outcome.outputs) std::cout << "wrote " << file << "\n";
        return outcome.exit_code;
    } catch (const ruinlab::Error& e) {
        std::cerr << nlohmann::json{{"error", ruinlab::errc_name(e.code())},
                                    {"message", e.message()}}
                         .dump()
                  << "\n";
        return ruinlab::is_validation_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    }
}
