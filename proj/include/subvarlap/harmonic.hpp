/**
 * @file harmonic.hpp
 * @brief Discrete maximal operator, fractional integral, Rubio de Francia
 *        iteration, operator-norm probes and the ball-condition quantities.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subvarlap/ball_family.hpp"
#include "subvarlap/carnot.hpp"
#include "subvarlap/variable_lebesgue.hpp"

namespace subvarlap {

/// Mf(x) = max over family balls B ∋ x of the μ-average of |f| on B ∩ Ω,
/// μ = density dx (Lebesgue when density is absent).
[[nodiscard]] GridFunction maximal_operator(const GridFunction& f, const BallFamily& balls, const CarnotGroup& g,
                                            const GridFunction* density = nullptr);

/// d^α / |B(x, d)| with the exact Haar measure of the gauge ball.
[[nodiscard]] double fractional_kernel(double d, double alpha, const CarnotGroup& g);

/// K_r(x,y) = min{ r^α/|B(x,r)|, d^α/|B(x,d)| }.
[[nodiscard]] double truncated_kernel(double d, double r, double alpha, const CarnotGroup& g);

/// Distance used for the singular self-cell term: half the cell diagonal
/// measured with the group gauge.
[[nodiscard]] double self_cell_distance(const GridDomain& dom, const CarnotGroup& g);

/// I_α f(x) = Σ_y f(y) K(x,y) cell, with the self-cell using self_cell_distance.
[[nodiscard]] GridFunction fractional_integral(const GridFunction& f, double alpha, const CarnotGroup& g);

struct OperatorNormEstimate {
    double value = 0.0;
    std::string probe_family;
    std::string op;
    std::size_t argmax = 0;
    std::size_t probes_used = 0;
    /// Zero-norm probes that were skipped.
    std::size_t skipped = 0;
};

struct LinearishOperator {
    std::string id;
    std::function<GridFunction(const GridFunction&)> apply;
    /// M fixes constants, so its norm is at least 1.
    bool clamp_at_one = false;
};

[[nodiscard]] LinearishOperator identity_operator();
[[nodiscard]] LinearishOperator maximal_operator_op(BallFamily balls, CarnotGroup g,
                                                    std::optional<GridFunction> density = std::nullopt);
[[nodiscard]] LinearishOperator fractional_integral_op(double alpha, CarnotGroup g);

/// max over probes of ||op f|| / ||f|| in L^{p(.)}_w.
[[nodiscard]] OperatorNormEstimate operator_norm_estimate(const LinearishOperator& op, const ExponentField& p,
                                                          const Weight& w, const std::vector<GridFunction>& probes,
                                                          const std::string& family_id = "custom");

/// Indicators of dyadic sub-boxes, smooth bumps at seeded random centres and
/// scales, and the constant function.
[[nodiscard]] std::vector<GridFunction> bump_indicator_probes(const GridDomain& dom, std::size_t count,
                                                              unsigned long long seed);

/// Indicators of the gauge shells {R 2^{-k-1} <= d(center, y) < R 2^{-k}},
/// k = 0..levels-1, with R the half diameter.  Shells with no cells are dropped.
[[nodiscard]] std::vector<GridFunction> shell_probes(const GridDomain& dom, const CarnotGroup& g, const Point& center,
                                                     int levels);

struct RubioDeFranciaResult {
    GridFunction rh;
    /// Luxemburg norms of M^k h / (2||M||)^k for the included terms.
    std::vector<double> term_norms;
    /// Norm of the last included term.
    double last_term_norm = 0.0;
    /// sup of the first omitted term; M(Rh) <= 2||M|| (Rh + tail_sup) pointwise.
    double tail_sup = 0.0;
    int terms = 0;
};

inline constexpr int kRubioDeFranciaTerms = 30;

/// Truncated series Σ_{k<=K} M^k h / (2||M||)^k, stopping early once a term's
/// norm falls below 1e-12 ||h||.  Throws norm-estimate-too-small when a term
/// fails to decrease.
[[nodiscard]] RubioDeFranciaResult rubio_de_francia(const GridFunction& h, const ExponentField& p,
                                                    const GridFunction* mu_density, const OperatorNormEstimate& norm_m,
                                                    int k_terms, const BallFamily& balls, const CarnotGroup& g);

struct SawyerWheedenOptions {
    /// Pair budget per ball; larger balls scan all partners of random anchors.
    std::size_t pair_budget = 10'000;
    unsigned long long seed = 7;
};

struct SawyerWheedenResult {
    double value = 0.0;
    Ball argmax;
    std::size_t balls_used = 0;
    /// Balls with no pair separated by at least C(K) r.
    std::size_t skipped = 0;
};

/// max over balls of φ(B) (∫_B w_target)^{1/q} (∫_B v_source^{1-p'})^{1/p'}.
[[nodiscard]] SawyerWheedenResult sawyer_wheeden_check(const GridFunction& w_target, const GridFunction& v_source,
                                                       double p, double q, double alpha, const BallFamily& balls,
                                                       const CarnotGroup& g, const SawyerWheedenOptions& opts = {});

struct WeakTypeOptions {
    /// Nested log grid: 2^levels + 1 thresholds between min and max of |I_α f|.
    int t_levels = 6;
    /// Also evaluate the p = 1 constant L of the truncated-kernel weak-type bound.
    bool p1_constant = false;
    const BallFamily* p1_balls = nullptr;
};

struct WeakTypeResult {
    double constant = 0.0;
    double t_at_max = 0.0;
    std::size_t t_evaluated = 0;
    std::size_t t_skipped = 0;
    std::optional<double> p1_constant;
};

/// max over t of (∫_{|I_α f|>t} w^q)^{1/q} / ((1/t^p) ∫ |f|^p w^p)^{1/p}.
[[nodiscard]] WeakTypeResult weak_type_check(const GridFunction& f, double alpha, double p, double q, const Weight& w,
                                             const CarnotGroup& g, const WeakTypeOptions& opts = {});

}  // namespace subvarlap
