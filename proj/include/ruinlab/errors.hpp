#ifndef RUINLAB_ERRORS_HPP
#define RUINLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ruinlab {

// Failure classes surfaced by the library. Validation failures mean the
// inputs describe a model the requested algorithm does not apply to;
// numerical failures mean the computation itself broke down.
enum class Errc {
    invalid_distribution,
    invalid_argument,
    invalid_perturbation,
    empty_site,
    empty_tail,
    degenerate_model,
    degenerate_at_zero,
    npc_violation,
    needs_shift,
    cannot_invert,
    config_error,
    // numerical
    root_failure,
    coupling_broken,
    inconsistent_block,
    censoring_too_high,
};

const char* errc_name(Errc c) noexcept;

// true for errors that indicate bad model/config input (CLI exit code 2),
// false for numerical failures (CLI exit code 3).
bool is_validation_error(Errc c) noexcept;

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code),
          message_(message) {}

    Errc code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

  private:
    Errc code_;
    std::string message_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace ruinlab

#endif
