/**
 * @file ball_family.hpp
 * @brief Finite ball families standing in for "all balls" in suprema.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "subvarlap/carnot.hpp"
#include "subvarlap/grid.hpp"

namespace subvarlap {

struct Ball {
    Point center;
    double radius = 0.0;
};

/// Either every cell centre crossed with a geometric radius ladder, or an
/// explicit list of balls.
class BallFamily {
public:
    enum class Policy { GridDyadic, Explicit };

    /// Radii r0 * 2^{k / 2^enrichment} from a sub-cell r0 (so every cell
    /// owns a singleton ball) up to the gauge diameter of the domain.
    [[nodiscard]] static BallFamily grid_dyadic(const GridDomain& dom, const CarnotGroup& g, int enrichment = 0);
    [[nodiscard]] static BallFamily explicit_balls(std::vector<Ball> balls);

    [[nodiscard]] Policy policy() const noexcept { return policy_; }
    [[nodiscard]] std::string id() const;
    [[nodiscard]] const std::vector<double>& radii() const noexcept { return radii_; }
    [[nodiscard]] const std::vector<Ball>& balls() const noexcept { return balls_; }
    [[nodiscard]] bool empty() const noexcept;
    [[nodiscard]] std::size_t size(const GridDomain& dom) const;

    /// Calls fn(center, radius) for every ball.
    template <class Fn>
    void for_each(const GridDomain& dom, Fn&& fn) const {
        if (policy_ == Policy::Explicit) {
            for (const auto& b : balls_) fn(b.center, b.radius);
            return;
        }
        for (std::size_t i = 0; i < dom.size(); ++i) {
            const Point c = dom.center(i);
            for (double r : radii_) fn(c, r);
        }
    }

private:
    Policy policy_ = Policy::Explicit;
    int enrichment_ = 0;
    std::vector<double> radii_;
    std::vector<Ball> balls_;
};

/// Largest gauge distance between two corners of the domain box.
[[nodiscard]] double gauge_diameter(const GridDomain& dom, const CarnotGroup& g);

}  // namespace subvarlap
