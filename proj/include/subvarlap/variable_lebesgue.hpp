/**
 * @file variable_lebesgue.hpp
 * @brief Modulars, Luxemburg norms and exponent regularity checks on grids.
 *
 * The weighted space L^{p(.)}_w uses the measure w(x)^{p(x)} dx, so every
 * weighted quantity is computed on the product |f w|.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "subvarlap/carnot.hpp"
#include "subvarlap/grid.hpp"

namespace subvarlap {

/// p(.) sampled on a grid, 1 <= p(x) < infinity.
class ExponentField {
public:
    ExponentField() = default;
    explicit ExponentField(GridFunction p);
    [[nodiscard]] static ExponentField constant(const GridDomain& dom, double p);

    [[nodiscard]] const GridFunction& field() const noexcept { return p_; }
    [[nodiscard]] const GridDomain& domain() const noexcept { return p_.domain(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return p_.values(); }
    [[nodiscard]] double operator[](std::size_t i) const { return p_[i]; }
    [[nodiscard]] double minus() const noexcept { return p_minus_; }
    [[nodiscard]] double plus() const noexcept { return p_plus_; }
    [[nodiscard]] bool is_constant() const noexcept { return p_minus_ == p_plus_; }
    /// Pointwise s * p(x).
    [[nodiscard]] ExponentField scaled(double s) const;

private:
    GridFunction p_;
    double p_minus_ = 1.0;
    double p_plus_ = 1.0;
};

/// w(.) > 0 sampled on a grid.
class Weight {
public:
    Weight() = default;
    explicit Weight(GridFunction w);
    [[nodiscard]] static Weight unit(const GridDomain& dom);

    [[nodiscard]] const GridFunction& field() const noexcept { return w_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return w_.values(); }
    [[nodiscard]] double operator[](std::size_t i) const { return w_[i]; }
    /// Pointwise w^s.
    [[nodiscard]] Weight power(double s) const;

private:
    GridFunction w_;
};

inline constexpr double kLuxemburgTolerance = 1e-12;

/// Σ |f w|^p * cell over a set of samples (w empty means w ≡ 1).
[[nodiscard]] double modular(std::span<const double> f, std::span<const double> p, std::span<const double> w,
                             double cell_measure);
[[nodiscard]] double modular(const GridFunction& f, const ExponentField& p);
[[nodiscard]] double modular(const GridFunction& f, const ExponentField& p, const Weight& w);

/// inf{λ > 0 : modular(f/λ) <= 1} by log-space bisection seeded from the
/// norm/modular sandwich; relative tolerance `tol`.
[[nodiscard]] double luxemburg_norm(std::span<const double> f, std::span<const double> p,
                                    std::span<const double> w, double cell_measure,
                                    double tol = kLuxemburgTolerance);
[[nodiscard]] double luxemburg_norm(const GridFunction& f, const ExponentField& p, double tol = kLuxemburgTolerance);
[[nodiscard]] double luxemburg_norm(const GridFunction& f, const ExponentField& p, const Weight& w,
                                    double tol = kLuxemburgTolerance);

/// p'(x) = p(x) / (p(x) - 1); throws conjugate-infinite where p = 1.
[[nodiscard]] ExponentField conjugate_exponent(const ExponentField& p);

/// Q p(x) / (Q - order p(x)); throws sobolev-exponent-undefined unless p+ < Q/order.
[[nodiscard]] ExponentField sobolev_exponent(const ExponentField& p, int q_dim, int order);

struct LogHolderOptions {
    /// C0 above this value is reported as a failure.
    double threshold = 2.0;
    /// Above this many cells, pairs are sampled instead of enumerated.
    std::size_t exhaustive_limit = 4096;
    std::size_t sampled_pairs = 2'000'000;
    unsigned long long seed = 12345;
};

struct LogHolderResult {
    double c0 = 0.0;
    std::size_t witness_a = 0;
    std::size_t witness_b = 0;
    std::size_t pairs = 0;
    bool bounded = true;
};

/// Smallest C0 with |p(x)-p(y)| (-log d(x,y)) <= C0 over pairs with d < 1/2.
[[nodiscard]] LogHolderResult log_holder_check(const ExponentField& p, const CarnotGroup& g,
                                               const LogHolderOptions& opts = {});

struct JumpConditionResult {
    bool holds = true;
    /// Linear indices of cells where neither alternative holds.
    std::vector<std::size_t> failures;
    /// Local extrema over B(x, δ) ∩ Ω for every cell.
    std::vector<double> local_min;
    std::vector<double> local_max;
};

/// Checks that every x has p-_{B(x,δ)} >= Q or p+_{B(x,δ)} <= Q p-/(Q - p-);
/// balls are intersected with the grid domain.
[[nodiscard]] JumpConditionResult jump_condition_check(const ExponentField& p, const CarnotGroup& g, double delta);

}  // namespace subvarlap
