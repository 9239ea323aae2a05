/**
 * @file poincare.hpp
 * @brief Empirical Poincaré–Sobolev ratios, the level truncation and the
 *        pointwise representation-formula check.
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

/// (1/μ(Ω)) ∫ f dμ with μ = density dx (Lebesgue when absent).
[[nodiscard]] double domain_mean(const GridFunction& f, const GridFunction* density = nullptr);

enum class RatioMode { MeanSubtracted, ZeroBoundary };
/// SobolevGain: ||·||_{p*} on the left.  SameExponent: ||·||_{p} on both sides.
enum class RatioVariant { SobolevGain, SameExponent };

enum class RatioStatus { Finite, Vacuous, Infinite };

struct RatioValue {
    double ratio = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    RatioStatus status = RatioStatus::Finite;
};

/// ||f - f_Ω||_{p*,w} / ||Xf||_{p,w} (mean-subtracted, m = 1) or
/// ||f||_{p*,w} / ||X^m f||_{p,w} (zero-boundary); p* = Qp/(Q - m p).
[[nodiscard]] RatioValue poincare_ratio(const GridFunction& f, const ExponentField& p, const Weight& w,
                                        const CarnotGroup& g, RatioMode mode, int order,
                                        RatioVariant variant = RatioVariant::SobolevGain);

enum class FamilyKind { Bumps, CoordinateBumps, Trigonometric, Tents };

[[nodiscard]] std::string to_string(FamilyKind kind);
[[nodiscard]] FamilyKind family_from_string(const std::string& name);

/// Seeded Lipschitz test functions.  Members are continuous functions of the
/// point and of the box spanned by the first and last cell centres, so the
/// same member can be sampled at any resolution; zero-boundary members vanish
/// on the outer cell layer.
class TestFunctionFamily {
public:
    TestFunctionFamily(FamilyKind kind, std::size_t count, unsigned long long seed, bool zero_boundary);

    [[nodiscard]] FamilyKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] bool zero_boundary() const noexcept { return zero_boundary_; }
    [[nodiscard]] std::string id() const;

    [[nodiscard]] GridFunction sample(std::size_t member, const GridDomain& dom) const;

private:
    struct Member {
        std::vector<double> a;
    };
    FamilyKind kind_;
    std::size_t count_;
    unsigned long long seed_;
    bool zero_boundary_;
    std::vector<Member> members_;
};

struct GateResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

/// Closed-form description of a sweep; fields are re-sampled per resolution.
struct SweepProblem {
    CarnotGroup group;
    GridDomain domain;
    std::function<double(const Point&)> exponent;
    std::function<double(const Point&)> weight;
    RatioMode mode = RatioMode::ZeroBoundary;
    int order = 1;
    RatioVariant variant = RatioVariant::SobolevGain;
    /// Radius of the jump-condition balls (SameExponent variant); 0 picks 4 cell scales.
    double jump_delta = 0.0;
    /// The A_{p-,(p-)*} gate runs on a copy of the domain with at most this
    /// many cells per axis; membership does not depend on the grid.
    int weight_gate_cells = 17;
};

struct RatioReport {
    std::string inequality;
    std::vector<RatioValue> ratios;
    /// Maximum over finite ratios; empty when every member was vacuous.
    std::optional<double> max_ratio;
    std::size_t argmax = 0;
    std::vector<int> resolution;
};

struct SweepResult {
    std::vector<GateResult> gates;
    bool gates_passed = true;
    /// One report per refinement level.
    std::vector<RatioReport> reports;
    /// max over levels of max_ratio ratio between consecutive levels (>= 1).
    std::optional<double> refinement_factor;
};

/// Checks the preconditions of the chosen inequality on the base grid.
[[nodiscard]] std::vector<GateResult> sweep_gates(const SweepProblem& problem);

/// Evaluates poincare_ratio for every member at the base resolution and at
/// each of `refinements` successive doublings.  Returns early (no reports)
/// when a gate fails.
[[nodiscard]] SweepResult ratio_sweep(const TestFunctionFamily& family, const SweepProblem& problem,
                                      int refinements = 1);

/// clamp(|f - c|, 2^j, 2^{j+1}).
[[nodiscard]] GridFunction level_truncation(const GridFunction& f, double c, int j);

struct RepresentationResult {
    double constant = 0.0;
    std::size_t argmax = 0;
    std::size_t evaluated = 0;
    std::size_t excluded = 0;
    Ball central_ball;
    double ball_mean = 0.0;
};

/// Largest gauge ball centred at the domain midpoint that fits in the box.
[[nodiscard]] Ball central_ball(const GridDomain& dom, const CarnotGroup& g);

/// max over interior x of |f(x) - f_{B0}| / I_1(|Xf|)(x); throws
/// vacuous-report when every point is excluded.
[[nodiscard]] RepresentationResult representation_check(const GridFunction& f, const CarnotGroup& g,
                                                        std::optional<Ball> b0 = std::nullopt);

}  // namespace subvarlap
