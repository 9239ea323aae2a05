/**
 * @file carnot.hpp
 * @brief Group law, dilations, gauge distance, ball measures and horizontal
 *        derivatives for the first Heisenberg group and abelian R^n.
 *
 * Heisenberg coordinates are exponential coordinates (x, y, t) with
 *   (x,y,t)·(x',y',t') = (x+x', y+y', t+t'+(xy'-yx')/2),
 * horizontal fields X1 = ∂x - (y/2)∂t, X2 = ∂y + (x/2)∂t and T = ∂t.
 * Distances use the Korányi gauge N(x,y,t) = ((x²+y²)² + 16t²)^{1/4}.
 */
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subvarlap/grid.hpp"

namespace subvarlap {

class CarnotGroup {
public:
    enum class Kind { Heisenberg1, Euclidean };

    [[nodiscard]] static CarnotGroup heisenberg1();
    [[nodiscard]] static CarnotGroup euclidean(int n);
    /// "h1", "r1", "r2", "r3".
    [[nodiscard]] static CarnotGroup from_id(const std::string& id);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::string id() const;
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<int>& layer_dims() const noexcept { return layers_; }
    /// Number of horizontal (first-layer) directions.
    [[nodiscard]] int horizontal_dim() const { return layers_.front(); }
    /// Homogeneous dimension, sum of k * n_k.
    [[nodiscard]] int homogeneous_dimension() const noexcept { return q_; }
    /// Quasi-triangle constant of the gauge distance.
    [[nodiscard]] double quasi_metric_constant() const noexcept { return k_; }
    /// Layer (1-based) of coordinate axis k.
    [[nodiscard]] int layer_of_axis(int k) const;

    [[nodiscard]] Point multiply(const Point& a, const Point& b) const;
    [[nodiscard]] Point inverse(const Point& a) const;
    [[nodiscard]] Point dilate(const Point& a, double eps) const;
    /// Homogeneous gauge N(a); N(δ_ε a) = ε N(a).
    [[nodiscard]] double gauge(const Point& a) const;
    /// N(a^{-1} b).
    [[nodiscard]] double distance(const Point& a, const Point& b) const;
    /// Haar (Lebesgue) measure of a full gauge ball of radius r.
    [[nodiscard]] double ball_volume(double r) const;

    /// For points whose first dim-1 coordinates are those of `b`, the set of
    /// last coordinates at gauge distance < r from `center` is an open
    /// interval (mid - half, mid + half); nullopt when empty.
    [[nodiscard]] std::optional<std::pair<double, double>> last_axis_interval(const Point& center, const Point& b,
                                                                            double r) const;
    /// Per-axis half extents of a box containing B(center, r).
    [[nodiscard]] std::vector<double> bounding_half_extents(const Point& center, double r) const;

    /// Smallest gauge distance between distinct cell centres of dom (lower bound).
    [[nodiscard]] double cell_scale(const GridDomain& dom) const;

    /// Checks that a point has this group's dimension; throws invalid-argument.
    void check(const Point& a) const;

private:
    Kind kind_ = Kind::Euclidean;
    int dim_ = 0;
    std::vector<int> layers_;
    int q_ = 0;
    double k_ = 1.0;
};

[[nodiscard]] Point group_multiply(const Point& a, const Point& b, const CarnotGroup& g);
[[nodiscard]] Point dilate(const Point& a, double eps, const CarnotGroup& g);
[[nodiscard]] double homogeneous_quasi_distance(const Point& a, const Point& b, const CarnotGroup& g);

struct BallMeasure {
    double measure = 0.0;
    std::size_t cells = 0;
    /// Set when r is below the cell scale or no cell centre lies in the ball.
    bool degenerate = false;
};

/// Lebesgue measure of {y in dom : d(center, y) < r} by cell-centre counting.
[[nodiscard]] BallMeasure ball_measure(const Point& center, double r, const CarnotGroup& g, const GridDomain& dom);

/// Coordinate derivative along one axis: central differences inside,
/// first-order one-sided differences on the two faces.
[[nodiscard]] GridFunction axis_derivative(const GridFunction& f, int axis);

/// Components X_1 f, ..., X_{n1} f.
[[nodiscard]] std::vector<GridFunction> horizontal_gradient(const GridFunction& f, const CarnotGroup& g);

/// Pointwise |X^m f| for m in {1, 2}; degree-2 terms are the ordered
/// monomials X_i X_j (i <= j) plus the second-layer field T on H¹.
[[nodiscard]] GridFunction higher_order_gradient(const GridFunction& f, int m, const CarnotGroup& g);

/// Pointwise Euclidean norm of a vector field given by components.
[[nodiscard]] GridFunction pointwise_norm(const std::vector<GridFunction>& components);

}  // namespace subvarlap
