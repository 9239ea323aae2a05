/**
 * @file config.hpp
 * @brief `key = value` experiment files.  `#` starts a comment; blank lines
 *        are ignored; keys are lower-case identifiers and may appear once.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subvarlap/expression.hpp"

namespace subvarlap {

class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
        /// 1-based column where the value starts.
        int column = 0;
    };

    /// Throws parse-error with "line L, column C:" in the message.
    [[nodiscard]] static Config parse(const std::string& text);
    [[nodiscard]] static Config load(const std::string& path);

    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
    [[nodiscard]] const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
    /// Overrides (or adds) a value, e.g. from a command-line flag.
    void set(const std::string& key, const std::string& value);

    [[nodiscard]] std::string text_value(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double number(const std::string& key, double fallback) const;
    [[nodiscard]] double number(const std::string& key) const;
    [[nodiscard]] long long integer(const std::string& key, long long fallback) const;
    [[nodiscard]] bool boolean(const std::string& key, bool fallback) const;
    /// Comma-separated numbers.
    [[nodiscard]] std::vector<double> numbers(const std::string& key) const;
    [[nodiscard]] Expression expression(const std::string& key, const std::string& fallback) const;

    /// Throws parse-error naming the first key not in `allowed`.
    void require_known(const std::vector<std::string>& allowed) const;

private:
    [[noreturn]] void fail(const Entry& e, int column_offset, const std::string& msg) const;
    [[nodiscard]] const Entry& entry(const std::string& key) const;

    std::string text_;
    std::map<std::string, Entry> entries_;
};

}  // namespace subvarlap
