/**
 * @file muckenhoupt.hpp
 * @brief Sampled Muckenhoupt A_{p(.),q(.)} constants and doubling ratios.
 *
 * Every supremum is taken over a finite BallFamily, so the reported values
 * are lower bounds.  Balls are intersected with the grid domain and |B| is
 * the cell-counted measure of that intersection.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subvarlap/ball_family.hpp"
#include "subvarlap/carnot.hpp"
#include "subvarlap/variable_lebesgue.hpp"

namespace subvarlap {

struct MuckenhouptEstimate {
    double constant = 0.0;
    Ball argmax;
    double gamma = 0.0;
    std::size_t balls = 0;
};

struct BallQuantity {
    Ball ball;
    double value = 0.0;
};

/// |B|^{γ-1} ||w χ_B||_{q(.)} ||w^{-1} χ_B||_{p'(.)} for every ball of the family.
[[nodiscard]] std::vector<BallQuantity> apq_ball_quantities(const Weight& w, const ExponentField& p,
                                                            const ExponentField& q, const BallFamily& balls,
                                                            const CarnotGroup& g);

/// Maximum of apq_ball_quantities, with γ = 1/p - 1/q checked constant.
[[nodiscard]] MuckenhouptEstimate apq_constant_estimate(const Weight& w, const ExponentField& p,
                                                        const ExponentField& q, const BallFamily& balls,
                                                        const CarnotGroup& g);

enum class Growth { Stable, Divergent, Inconclusive };

/// Classifies a sequence of estimates from successive enrichments or
/// refinements: Divergent when every step at least doubles the value,
/// Stable when every step changes it by less than `stable_tol` (relative).
[[nodiscard]] Growth classify_growth(std::span<const double> estimates, double stable_tol = 0.05);

struct DoublingResult {
    double ratio = 0.0;
    Ball argmax;
    std::size_t balls_used = 0;
    /// Balls skipped because μ(B) = 0.
    std::size_t zero_measure = 0;
};

/// max μ(B(x,2r)) / μ(B(x,r)) over family balls whose doubled ball lies in the domain.
[[nodiscard]] DoublingResult doubling_check(const GridFunction& density, const BallFamily& balls,
                                            const CarnotGroup& g);

}  // namespace subvarlap
