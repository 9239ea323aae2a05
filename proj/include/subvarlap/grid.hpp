/**
 * @file grid.hpp
 * @brief Cell-centred rectangular lattices and sampled functions on them.
 *
 * Cells are stored with the last axis varying fastest, so a "line" along the
 * last axis is a contiguous block of the value array.  Ball queries rely on
 * that layout (see ball_index.hpp).
 */
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace subvarlap {

inline constexpr int kMaxDim = 3;

/// Coordinates of a point in the group (length = group dimension).
class Point {
public:
    Point() = default;
    Point(std::initializer_list<double> coords);
    explicit Point(int dim) : dim_(dim) {}

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

    [[nodiscard]] std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 0;
};

using CellIndex = std::array<int, kMaxDim>;

class GridDomain {
public:
    GridDomain() = default;
    GridDomain(std::vector<double> lo, std::vector<double> hi, std::vector<int> cells);

    /// Cells centred on the nodes lo + i*(hi-lo)/intervals, i = 0..intervals.
    /// The outermost cell layer then sits exactly on the boundary of [lo, hi].
    [[nodiscard]] static GridDomain node_aligned(const std::vector<double>& lo, const std::vector<double>& hi,
                                                 const std::vector<int>& intervals);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] double lo(int k) const { return lo_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] double hi(int k) const { return hi_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] int cells(int k) const { return n_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] double spacing(int k) const { return h_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] double cell_measure() const noexcept { return cell_measure_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] double total_measure() const noexcept { return cell_measure_ * static_cast<double>(size_); }
    /// Cells per line along the last axis.
    [[nodiscard]] int line_length() const { return n_[static_cast<std::size_t>(dim_ - 1)]; }
    [[nodiscard]] std::size_t line_count() const { return size_ / static_cast<std::size_t>(line_length()); }

    [[nodiscard]] std::size_t linear(const CellIndex& idx) const;
    [[nodiscard]] CellIndex unravel(std::size_t linear) const;
    [[nodiscard]] double center_coord(int axis, int i) const { return lo(axis) + (i + 0.5) * spacing(axis); }
    [[nodiscard]] Point center(std::size_t linear) const;
    [[nodiscard]] Point center(const CellIndex& idx) const;
    [[nodiscard]] Point midpoint() const;
    /// Index of the cell whose centre is nearest to p (clamped into the grid).
    [[nodiscard]] CellIndex nearest_cell(const Point& p) const;

    /// True for cells in the outermost layer along any axis.
    [[nodiscard]] bool is_boundary(const CellIndex& idx) const;
    [[nodiscard]] bool is_boundary(std::size_t linear) const { return is_boundary(unravel(linear)); }

    [[nodiscard]] double min_spacing() const;
    [[nodiscard]] double max_spacing() const;
    /// Divides every spacing by `factor`; node-aligned grids stay node-aligned.
    [[nodiscard]] GridDomain refined(int factor) const;
    [[nodiscard]] bool is_node_aligned() const noexcept { return node_aligned_; }

    friend bool operator==(const GridDomain& a, const GridDomain& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.n_ == b.n_;
    }

private:
    std::vector<double> lo_, hi_, h_;
    std::vector<int> n_;
    int dim_ = 0;
    std::size_t size_ = 0;
    double cell_measure_ = 0.0;
    bool node_aligned_ = false;
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridDomain dom, double fill = 0.0);
    GridFunction(GridDomain dom, std::vector<double> values);

    /// Samples fn at every cell centre.
    [[nodiscard]] static GridFunction sample(const GridDomain& dom, const std::function<double(const Point&)>& fn);

    [[nodiscard]] const GridDomain& domain() const noexcept { return dom_; }
    [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return v_; }
    [[nodiscard]] std::span<double> values() noexcept { return v_; }
    [[nodiscard]] double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }

    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;
    [[nodiscard]] double sup_abs() const;
    /// Sum of values times cell measure.
    [[nodiscard]] double integral() const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double c);
    [[nodiscard]] GridFunction abs() const;
    [[nodiscard]] GridFunction map(const std::function<double(double)>& fn) const;

private:
    GridDomain dom_;
    std::vector<double> v_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);
/// Pointwise product.
GridFunction operator*(GridFunction a, const GridFunction& b);

}  // namespace subvarlap
