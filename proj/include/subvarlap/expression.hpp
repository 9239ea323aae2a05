/**
 * @file expression.hpp
 * @brief Closed-form expressions over grid coordinates.
 *
 * Grammar: numbers, variables x y z t (x1 x2 x3 as aliases), constants pi
 * and e, binary + - * / ^, unary -, parentheses and the functions pow abs
 * sin cos exp sqrt log min max step.  step(s) is 1 for s >= 0 and 0 otherwise.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "subvarlap/error.hpp"
#include "subvarlap/grid.hpp"

namespace subvarlap {

class Expression {
public:
    /// Throws ExpressionError (code parse-error).
    [[nodiscard]] static Expression parse(const std::string& source);

    [[nodiscard]] double operator()(const Point& x) const { return eval_(x); }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] std::function<double(const Point&)> function() const { return eval_; }

private:
    std::string source_;
    std::function<double(const Point&)> eval_;
};

/// Parse failure with the 1-based column of the offending character.
class ExpressionError : public Error {
public:
    ExpressionError(std::size_t column, const std::string& message)
        : Error(ErrorCode::ParseError, "column " + std::to_string(column) + ": " + message),
          column_(column),
          detail_(message) {}

    [[nodiscard]] std::size_t column() const noexcept { return column_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t column_;
    std::string detail_;
};

}  // namespace subvarlap
