/**
 * @file error.hpp
 * @brief Error type shared by all subvarlap modules.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subvarlap {

enum class ErrorCode {
    InvalidArgument,
    UnsupportedOrder,
    ConjugateInfinite,
    SobolevExponentUndefined,
    InvalidExponentPair,
    InvalidWeight,
    IncompleteFamily,
    NormEstimateTooSmall,
    InvalidState,
    VacuousReport,
    ParseError,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define SUBVARLAP_REQUIRE(cond, code, msg)                                                 \
    do {                                                                                   \
        if (!(cond)) throw ::subvarlap::Error((code), (msg));                              \
    } while (false)

}  // namespace subvarlap
