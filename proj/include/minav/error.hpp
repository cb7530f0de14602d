#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace minav {

enum class ErrorCode {
    invalid_config,
    invalid_input,
    invalid_range,
    dimension_mismatch,
    degenerate_embedding,
    empty_goal_set,
    empty_dataset,
    no_free_cell,
    format_error,
    version_mismatch,
    truncated_file,
    checksum_mismatch,
    io_error,
    divergence,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on `code()`.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_config: return "invalid-config";
        case ErrorCode::invalid_input: return "invalid-input";
        case ErrorCode::invalid_range: return "invalid-range";
        case ErrorCode::dimension_mismatch: return "dimension-mismatch";
        case ErrorCode::degenerate_embedding: return "degenerate-embedding";
        case ErrorCode::empty_goal_set: return "empty-goal-set";
        case ErrorCode::empty_dataset: return "empty-dataset";
        case ErrorCode::no_free_cell: return "no-free-cell";
        case ErrorCode::format_error: return "format-error";
        case ErrorCode::version_mismatch: return "version-mismatch";
        case ErrorCode::truncated_file: return "truncated-file";
        case ErrorCode::checksum_mismatch: return "checksum-mismatch";
        case ErrorCode::io_error: return "io-error";
        case ErrorCode::divergence: return "divergence";
    }
    return "unknown";
}

}  // namespace minav
