#include "ruinlab/errors.hpp"

namespace ruinlab {

const char* errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::invalid_distribution: return "InvalidDistribution";
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::invalid_perturbation: return "InvalidPerturbation";
        case Errc::empty_site: return "EmptySite";
        case Errc::empty_tail: return "EmptyTail";
        case Errc::degenerate_model: return "DegenerateModel";
        case Errc::degenerate_at_zero: return "DegenerateAtZero";
        case Errc::npc_violation: return "NPCViolation";
        case Errc::needs_shift: return "NeedsShift";
        case Errc::cannot_invert: return "CannotInvert";
        case Errc::config_error: return "ConfigError";
        case Errc::root_failure: return "RootFailure";
        case Errc::coupling_broken: return "CouplingBroken";
        case Errc::inconsistent_block: return "InconsistentBlock";
        case Errc::censoring_too_high: return "CensoringTooHigh";
    }
    return "UnknownError";
}

bool is_validation_error(Errc c) noexcept {
    switch (c) {
        case Errc::root_failure:
        case Errc::coupling_broken:
        case Errc::inconsistent_block:
        case Errc::censoring_too_high:
            return false;
        default:
            return true;
    }
}

}  // namespace ruinlab
