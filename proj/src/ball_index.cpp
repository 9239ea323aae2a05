#include "subvarlap/ball_index.hpp"

#include <bit>

namespace subvarlap {

LinePrefix::LinePrefix(const GridDomain& dom, std::span<const double> values)
    : len_(static_cast<std::size_t>(dom.line_length())) {
    const std::size_t lines = dom.line_count();
    p_.assign(lines * (len_ + 1), 0.0);
    for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t base = l * (len_ + 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < len_; ++i) {
            acc += values[l * len_ + i];
            p_[base + i + 1] = acc;
        }
    }
}

LineRangeExtremum::LineRangeExtremum(const GridDomain& dom, std::span<const double> values, bool take_max)
    : len_(static_cast<std::size_t>(dom.line_length())), max_(take_max) {
    table_.emplace_back(values.begin(), values.end());
    const std::size_t n = values.size();
    for (std::size_t w = 1; 2 * w <= len_; w *= 2) {
        const auto& prev = table_.back();
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t off = i % len_;
            const double a = prev[i];
            const double b = off + w < len_ ? prev[i + w] : a;
            next[i] = max_ ? std::max(a, b) : std::min(a, b);
        }
        table_.push_back(std::move(next));
    }
}

double LineRangeExtremum::query(std::size_t first, int count) const {
    const auto c = static_cast<unsigned>(count);
    const int level = std::bit_width(c) - 1;
    const std::size_t w = std::size_t{1} << level;
    const auto& t = table_[static_cast<std::size_t>(level)];
    const double a = t[first];
    const double b = t[first + static_cast<std::size_t>(count) - w];
    return max_ ? std::max(a, b) : std::min(a, b);
}

}  // namespace subvarlap
