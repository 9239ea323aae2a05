/**
 * @file plaplacian.hpp
 * @brief Variational solver for the degenerate p(x)-Laplacian with zero
 *        Dirichlet data, plus residual, convexity and coercivity diagnostics.
 *
 * The discrete energy averages the integrand over all 2^dim choices of
 * forward/backward differences per axis, with u extended by zero outside
 * the grid.  Boundary cells are pinned to zero.  For p = 2 and A = I this
 * reduces to the 5-point (7-point) Laplacian.
 */
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "subvarlap/carnot.hpp"
#include "subvarlap/variable_lebesgue.hpp"

namespace subvarlap {

/// Per-cell symmetric n1 x n1 matrix with ω²η1|ξ|² <= <Aξ,ξ> <= ω²η2|ξ|².
class EllipticityField {
public:
    using Matrix = std::array<double, 9>;

    /// Validates symmetry and the ellipticity bounds on random probes.
    EllipticityField(const GridDomain& dom, int n1, std::vector<Matrix> a, double eta1, double eta2,
                     const Weight& w, unsigned long long seed = 11);

    /// A = ω² I.
    [[nodiscard]] static EllipticityField isotropic(const Weight& w, int n1);
    /// A = ω² (I + ½ R diag(1, -1) Rᵀ) with R the rotation by `angle` in the
    /// first two horizontal directions; η1 = 0.5, η2 = 1.5.
    [[nodiscard]] static EllipticityField rotated(const Weight& w, int n1, double angle);

    [[nodiscard]] int n1() const noexcept { return n1_; }
    [[nodiscard]] double eta1() const noexcept { return eta1_; }
    [[nodiscard]] double eta2() const noexcept { return eta2_; }
    [[nodiscard]] const Matrix& operator[](std::size_t cell) const { return a_[cell]; }
    [[nodiscard]] std::size_t size() const noexcept { return a_.size(); }

private:
    int n1_ = 0;
    double eta1_ = 1.0;
    double eta2_ = 1.0;
    std::vector<Matrix> a_;
};

struct SolverSettings {
    /// Exit when sup |G| falls below this.
    double gradient_tol = 1e-8;
    /// Exit an intermediate continuation stage when the relative energy
    /// decrease stays below this for `patience` consecutive iterations.
    double energy_rel_tol = 1e-10;
    /// Same rule for the last stage; 0 disables it so the last stage runs to
    /// the gradient tolerance.
    double final_energy_rel_tol = 0.0;
    int patience = 20;
    std::size_t max_iterations = 100'000;
    /// Empty: {1e-2, 1e-4, 1e-6} followed by 0 when p- >= 2.
    std::vector<double> eps_schedule;
    double armijo_c = 1e-4;
};

struct DirichletProblem {
    GridDomain dom;
    CarnotGroup g;
    ExponentField p;
    Weight w;
    EllipticityField a;
    GridFunction f;
    SolverSettings settings;
};

/// Checks the problem invariants and returns warnings for conditions that
/// are assumed by the existence theory but not needed by the discrete solver
/// (currently only p+ >= Q).
[[nodiscard]] std::vector<std::string> validate(const DirichletProblem& prob);

[[nodiscard]] std::vector<double> default_eps_schedule(const ExponentField& p);

/// Σ_cells [ mean over stencils of (ε² + <AXu,Xu>)^{p/2}/p + |uω|^p/p - f u ] cell.
[[nodiscard]] double energy(const GridFunction& u, const DirichletProblem& prob, double eps);

/// energy(u + t d) - energy(u), evaluated cell by cell from the increments
/// so that it stays accurate when the difference is far below energy(u).
[[nodiscard]] double energy_difference(const GridFunction& u, const GridFunction& d, double t,
                                       const DirichletProblem& prob, double eps);

/// G with <G, v> cell = d/ds energy(u + s v) at s = 0 for zero-boundary v;
/// zero on boundary cells.
[[nodiscard]] GridFunction energy_gradient(const GridFunction& u, const DirichletProblem& prob, double eps);

enum class SolveStatus { GradientTolerance, EnergyStagnation, MachinePrecision, MaxIterations };

[[nodiscard]] std::string to_string(SolveStatus status);

struct StageReport {
    double eps = 0.0;
    std::size_t iterations = 0;
    double gradient_sup = 0.0;
    SolveStatus status = SolveStatus::MaxIterations;
};

struct Solution {
    GridFunction u;
    /// Energy after every accepted step, starting with the initial guess.
    /// Within a stage each entry is the previous one plus energy_difference;
    /// a new stage restarts from a direct evaluation at the new ε.
    std::vector<double> energy_trace;
    /// Index into energy_trace where each stage starts.
    std::vector<std::size_t> stage_starts;
    double gradient_sup = 0.0;
    std::size_t iterations = 0;
    double eps = 0.0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::vector<StageReport> stages;
    std::vector<std::string> warnings;
};

/// Barzilai-Borwein trial steps inside Armijo backtracking, with ε continuation.
[[nodiscard]] Solution solve_dirichlet(const DirichletProblem& prob,
                                       const std::optional<GridFunction>& initial = std::nullopt);

/// Weak form <G(u), v> cell at regularization eps.
[[nodiscard]] double weak_form(const GridFunction& u, const GridFunction& v, const DirichletProblem& prob, double eps);

/// max over random smooth zero-boundary v of |weak_form(u; v)| / (||v||_{W^{1,p}_w} + 1).
[[nodiscard]] double weak_residual(const GridFunction& u, const DirichletProblem& prob, std::size_t test_count,
                                   double eps = 0.0, unsigned long long seed = 5);

/// energy(s * direction) at ε = 0 for each s.
[[nodiscard]] std::vector<double> coercivity_probe(const DirichletProblem& prob, const GridFunction& direction,
                                                   const std::vector<double>& scales);

/// Random zero-boundary field: a smooth trigonometric sum of unit sup scale.
[[nodiscard]] GridFunction random_zero_boundary(const GridDomain& dom, unsigned long long seed);

}  // namespace subvarlap
