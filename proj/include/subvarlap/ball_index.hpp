/**
 * @file ball_index.hpp
 * @brief Enumeration of grid cells inside gauge balls as contiguous runs.
 *
 * Both gauges have convex sections along the last coordinate, so the cells of
 * a ball split into at most one run per line.  Run endpoints are solved in
 * closed form and then snapped against the exact predicate d(center, y) < r,
 * so the enumerated set is exactly the cell-counting ball.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "subvarlap/carnot.hpp"
#include "subvarlap/grid.hpp"

namespace subvarlap {

class BallIndex {
public:
    BallIndex(GridDomain dom, CarnotGroup g) : dom_(std::move(dom)), g_(std::move(g)) {}

    [[nodiscard]] const GridDomain& domain() const noexcept { return dom_; }
    [[nodiscard]] const CarnotGroup& group() const noexcept { return g_; }

    /// Calls fn(first_linear_index, count) once per non-empty run of cells
    /// whose centres lie in B(center, r).
    template <class Fn>
    void for_each_run(const Point& center, double r, Fn&& fn) const {
        const int d = dom_.dim();
        const int last = d - 1;
        const auto ext = g_.bounding_half_extents(center, r);
        CellIndex lo{}, hi{};
        for (int k = 0; k < last; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double h = dom_.spacing(k);
            lo[kk] = std::max(0, static_cast<int>(std::floor((center[k] - ext[kk] - dom_.lo(k)) / h - 0.5)));
            hi[kk] = std::min(dom_.cells(k) - 1, static_cast<int>(std::ceil((center[k] + ext[kk] - dom_.lo(k)) / h - 0.5)));
            if (lo[kk] > hi[kk]) return;
        }
        CellIndex idx = lo;
        const int n_last = dom_.cells(last);
        const double h_last = dom_.spacing(last);
        while (true) {
            Point b(d);
            for (int k = 0; k < last; ++k) b[k] = dom_.center_coord(k, idx[static_cast<std::size_t>(k)]);
            if (auto iv = g_.last_axis_interval(center, b, r)) {
                const double mid = iv->first;
                const double half = iv->second;
                int i0 = static_cast<int>(std::ceil((mid - half - dom_.lo(last)) / h_last - 0.5));
                int i1 = static_cast<int>(std::floor((mid + half - dom_.lo(last)) / h_last - 0.5));
                i0 = std::max(i0, 0);
                i1 = std::min(i1, n_last - 1);
                auto inside = [&](int i) {
                    b[last] = dom_.center_coord(last, i);
                    return g_.distance(center, b) < r;
                };
                while (i0 <= i1 && !inside(i0)) ++i0;
                while (i1 >= i0 && !inside(i1)) --i1;
                if (i0 <= i1) {
                    while (i0 > 0 && inside(i0 - 1)) --i0;
                    while (i1 < n_last - 1 && inside(i1 + 1)) ++i1;
                    idx[static_cast<std::size_t>(last)] = i0;
                    fn(dom_.linear(idx), i1 - i0 + 1);
                }
            }
            int k = last - 1;
            for (; k >= 0; --k) {
                auto kk = static_cast<std::size_t>(k);
                if (++idx[kk] <= hi[kk]) break;
                idx[kk] = lo[kk];
            }
            if (k < 0) break;
        }
    }

    /// Run layout of a Euclidean ball of radius r in cell offsets: one entry per
    /// line offset on the leading axes, with the half-width along the last axis.
    struct Stencil {
        std::vector<CellIndex> offsets;
        std::vector<int> half;
    };

    /// Only valid for Euclidean groups, where balls are translation invariant on the grid.
    [[nodiscard]] Stencil euclidean_stencil(double r) const {
        const int d = dom_.dim();
        const int last = d - 1;
        const double r2 = r * r;
        const double hl = dom_.spacing(last);
        CellIndex reach{};
        for (int k = 0; k < last; ++k)
            reach[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(r / dom_.spacing(k))) + 1;
        Stencil st;
        CellIndex off{};
        for (int k = 0; k < last; ++k) off[static_cast<std::size_t>(k)] = -reach[static_cast<std::size_t>(k)];
        while (true) {
            double s = 0.0;
            for (int k = 0; k < last; ++k) {
                const double dx = off[static_cast<std::size_t>(k)] * dom_.spacing(k);
                s += dx * dx;
            }
            if (s < r2) {
                int j = static_cast<int>(std::floor(std::sqrt(r2 - s) / hl));
                while (j >= 0 && s + (j * hl) * (j * hl) >= r2) --j;
                while (s + ((j + 1) * hl) * ((j + 1) * hl) < r2) ++j;
                st.offsets.push_back(off);
                st.half.push_back(j);
            }
            int k = last - 1;
            for (; k >= 0; --k) {
                auto kk = static_cast<std::size_t>(k);
                if (++off[kk] <= reach[kk]) break;
                off[kk] = -reach[kk];
            }
            if (k < 0) break;
        }
        return st;
    }

    /// Same runs as for_each_run(dom.center(cell), r, fn) for the stencil's radius.
    template <class Fn>
    void for_each_run(std::size_t cell, const Stencil& st, Fn&& fn) const {
        const int last = dom_.dim() - 1;
        const CellIndex c = dom_.unravel(cell);
        const int n_last = dom_.cells(last);
        const auto cl = static_cast<std::size_t>(last);
        for (std::size_t s = 0; s < st.offsets.size(); ++s) {
            CellIndex idx = c;
            bool inside = true;
            for (int k = 0; k < last && inside; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                idx[kk] += st.offsets[s][kk];
                inside = idx[kk] >= 0 && idx[kk] < dom_.cells(k);
            }
            if (!inside) continue;
            const int i0 = std::max(0, c[cl] - st.half[s]);
            const int i1 = std::min(n_last - 1, c[cl] + st.half[s]);
            idx[cl] = i0;
            fn(dom_.linear(idx), i1 - i0 + 1);
        }
    }

    [[nodiscard]] std::size_t count(const Point& center, double r) const {
        std::size_t n = 0;
        for_each_run(center, r, [&](std::size_t, int c) { n += static_cast<std::size_t>(c); });
        return n;
    }

    /// True when B(center, r) lies inside the domain box (conservative test).
    [[nodiscard]] bool ball_inside(const Point& center, double r) const {
        const auto ext = g_.bounding_half_extents(center, r);
        for (int k = 0; k < dom_.dim(); ++k) {
            const auto kk = static_cast<std::size_t>(k);
            if (center[k] - ext[kk] < dom_.lo(k) || center[k] + ext[kk] > dom_.hi(k)) return false;
        }
        return true;
    }

private:
    GridDomain dom_;
    CarnotGroup g_;
};

/// Prefix sums along every last-axis line; run sums in O(1).
class LinePrefix {
public:
    LinePrefix() = default;
    LinePrefix(const GridDomain& dom, std::span<const double> values);

    /// Sum of values over cells [first, first + count) of one line.
    [[nodiscard]] double run_sum(std::size_t first, int count) const {
        const std::size_t line = first / len_;
        const std::size_t off = first % len_;
        const std::size_t base = line * (len_ + 1);
        return p_[base + off + static_cast<std::size_t>(count)] - p_[base + off];
    }

private:
    std::vector<double> p_;
    std::size_t len_ = 1;
};

/// Sparse tables for range min/max along every last-axis line.
class LineRangeExtremum {
public:
    LineRangeExtremum() = default;
    LineRangeExtremum(const GridDomain& dom, std::span<const double> values, bool take_max);

    [[nodiscard]] double query(std::size_t first, int count) const;

private:
    std::vector<std::vector<double>> table_;
    std::size_t len_ = 1;
    bool max_ = true;
};

}  // namespace subvarlap
