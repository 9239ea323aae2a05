#include "subvarlap/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "subvarlap/error.hpp"

namespace subvarlap {

namespace {

[[noreturn]] void fail_at(int line, int column, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
}

std::string trim_right(const std::string& s) {
    std::size_t end = s.size();
    while (end > 0 && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(0, end);
}

// Parses a whole token as a double; returns the offset of the first bad character.
std::optional<std::size_t> to_double(const std::string& s, double& out) {
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    const std::string t = trim_right(s);
    const auto [end, ec] = std::from_chars(t.data() + start, t.data() + t.size(), out);
    if (ec != std::errc() || start == t.size()) return start;
    if (end != t.data() + t.size()) return static_cast<std::size_t>(end - t.data());
    return std::nullopt;
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    cfg.text_ = text;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        std::size_t pos = 0;
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos == line.size()) continue;
        const std::size_t key_start = pos;
        while (pos < line.size() && (std::islower(static_cast<unsigned char>(line[pos])) ||
                                     std::isdigit(static_cast<unsigned char>(line[pos])) || line[pos] == '_'))
            ++pos;
        if (pos == key_start) fail_at(line_no, static_cast<int>(pos) + 1, "expected a lower-case key");
        const std::string key = line.substr(key_start, pos - key_start);
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos == line.size() || line[pos] != '=') fail_at(line_no, static_cast<int>(pos) + 1, "expected '='");
        ++pos;
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        const std::string value = trim_right(line.substr(pos));
        if (value.empty()) fail_at(line_no, static_cast<int>(pos) + 1, "missing value for '" + key + "'");
        if (cfg.entries_.count(key)) fail_at(line_no, static_cast<int>(key_start) + 1, "duplicate key '" + key + "'");
        cfg.entries_[key] = {value, line_no, static_cast<int>(pos) + 1};
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    SUBVARLAP_REQUIRE(in.good(), ErrorCode::InvalidArgument, "cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = {value, 0, 1}; }

void Config::fail(const Entry& e, int column_offset, const std::string& msg) const {
    if (e.line == 0) throw Error(ErrorCode::ParseError, "command-line value: " + msg);
    fail_at(e.line, e.column + column_offset, msg);
}

const Config::Entry& Config::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    SUBVARLAP_REQUIRE(it != entries_.end(), ErrorCode::ParseError, "missing required key '" + key + "'");
    return it->second;
}

std::string Config::text_value(const std::string& key, const std::string& fallback) const {
    return has(key) ? entry(key).value : fallback;
}

double Config::number(const std::string& key) const {
    const Entry& e = entry(key);
    double v = 0.0;
    if (const auto bad = to_double(e.value, v)) fail(e, static_cast<int>(*bad), "'" + key + "' must be a number");
    return v;
}

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long long Config::integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const Entry& e = entry(key);
    long long v = 0;
    const auto [end, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || end != e.value.data() + e.value.size())
        fail(e, static_cast<int>(end - e.value.data()), "'" + key + "' must be an integer");
    return v;
}

bool Config::boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Entry& e = entry(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    fail(e, 0, "'" + key + "' must be true or false");
}

std::vector<double> Config::numbers(const std::string& key) const {
    const Entry& e = entry(key);
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = e.value.find(',', start);
        const std::string item = e.value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double v = 0.0;
        if (const auto bad = to_double(item, v))
            fail(e, static_cast<int>(start + *bad), "'" + key + "' must be a comma-separated list of numbers");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

Expression Config::expression(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return Expression::parse(fallback);
    const Entry& e = entry(key);
    try {
        return Expression::parse(e.value);
    } catch (const ExpressionError& err) {
        fail(e, static_cast<int>(err.column()) - 1, "in '" + key + "': " + err.detail());
    }
}

void Config::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, e] : entries_)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail_at(e.line, 1, "unknown key '" + key + "'");
}

}  // namespace subvarlap
