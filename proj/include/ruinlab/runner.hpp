#ifndef RUINLAB_RUNNER_HPP
#define RUINLAB_RUNNER_HPP

#include <string>
#include <vector>

#include "ruinlab/config.hpp"

namespace ruinlab {

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> outputs;   // files written
    std::vector<std::string> warnings;  // non-fatal diagnostics
    std::string summary;                // human-readable stdout block
};

// Executes one parsed config: dispatches the computation and writes the
// requested artifacts. Model and numerical failures propagate as Error;
// callers map them to exit codes 2/3 via is_validation_error().
RunOutcome run(const RunConfig& cfg);

}  // namespace ruinlab

#endif
