#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace groundwork {

enum class ErrorCode {
    validation,
    duplicate_id,
    inconsistent_change,
    budget_too_small,
    no_action_block,
    malformed_action,
    bad_target_id,
    all_samples_malformed,
    unordered_input,
    empty_segment,
    already_decided,
    target_missing,
    not_found,
    corrupt_store,
    unknown_element,
    missing_bundle,
    model_backend,
    io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace groundwork
