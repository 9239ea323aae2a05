#include "subvarlap/plaplacian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "subvarlap/error.hpp"
#include "subvarlap/poincare.hpp"

namespace subvarlap {

namespace {

using Matrix = EllipticityField::Matrix;

double quad_form(const Matrix& a, int n, const double* x, const double* y) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += x[i] * a[static_cast<std::size_t>(i * 3 + j)] * y[j];
    return s;
}

// (b + delta)^e - b^e computed without cancellation; b >= 0, b + delta >= 0.
double pow_increment(double b, double delta, double e) {
    if (b <= 0.0) return std::pow(std::max(0.0, b + delta), e);
    const double r = delta / b;
    if (r <= -1.0) return -std::pow(b, e);
    return std::pow(b, e) * std::expm1(e * std::log1p(r));
}

// One-sided differences and horizontal-field coefficients for one cell.
class Stencil {
public:
    explicit Stencil(const DirichletProblem& prob) : prob_(prob), dom_(prob.dom), dim_(dom_.dim()) {
        n1_ = prob.g.horizontal_dim();
        std::size_t s = 1;
        for (int k = dim_ - 1; k >= 0; --k) {
            stride_[static_cast<std::size_t>(k)] = s;
            s *= static_cast<std::size_t>(dom_.cells(k));
        }
        combos_ = 1 << dim_;
    }

    int dim() const { return dim_; }
    int n1() const { return n1_; }
    int combos() const { return combos_; }
    std::size_t stride(int k) const { return stride_[static_cast<std::size_t>(k)]; }

    // c[j*3+k]: coefficient of ∂_k in X_j at the cell centre.
    void coefficients(const CellIndex& idx, double* c) const {
        std::fill(c, c + 9, 0.0);
        if (prob_.g.kind() == CarnotGroup::Kind::Heisenberg1) {
            const double x = dom_.center_coord(0, idx[0]);
            const double y = dom_.center_coord(1, idx[1]);
            c[0] = 1.0;
            c[2] = -0.5 * y;
            c[4] = 1.0;
            c[5] = 0.5 * x;
        } else {
            for (int k = 0; k < dim_; ++k) c[k * 3 + k] = 1.0;
        }
    }

    void differences(std::span<const double> u, std::size_t i, const CellIndex& idx, double* fwd, double* bwd) const {
        for (int k = 0; k < dim_; ++k) {
            const double h = dom_.spacing(k);
            const std::size_t st = stride(k);
            const double next = idx[static_cast<std::size_t>(k)] + 1 < dom_.cells(k) ? u[i + st] : 0.0;
            const double prev = idx[static_cast<std::size_t>(k)] > 0 ? u[i - st] : 0.0;
            fwd[k] = (next - u[i]) / h;
            bwd[k] = (u[i] - prev) / h;
        }
    }

    // Xu for one forward/backward choice.
    void horizontal(const double* c, const double* fwd, const double* bwd, int combo, double* xu) const {
        for (int j = 0; j < n1_; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim_; ++k) s += c[j * 3 + k] * ((combo >> k) & 1 ? fwd[k] : bwd[k]);
            xu[j] = s;
        }
    }

private:
    const DirichletProblem& prob_;
    const GridDomain& dom_;
    int dim_;
    int n1_ = 0;
    int combos_ = 1;
    std::array<std::size_t, kMaxDim> stride_{};
};

void check_input(const GridFunction& u, const DirichletProblem& prob) {
    SUBVARLAP_REQUIRE(u.domain() == prob.dom, ErrorCode::InvalidArgument, "u lives on another grid");
}

void check_finite(double v) {
    SUBVARLAP_REQUIRE(std::isfinite(v), ErrorCode::InvalidState, "non-finite value in the energy stencil");
}

}  // namespace

EllipticityField::EllipticityField(const GridDomain& dom, int n1, std::vector<Matrix> a, double eta1, double eta2,
                                   const Weight& w, unsigned long long seed)
    : n1_(n1), eta1_(eta1), eta2_(eta2), a_(std::move(a)) {
    SUBVARLAP_REQUIRE(n1 >= 1 && n1 <= 3, ErrorCode::InvalidArgument, "matrix size must be 1..3");
    SUBVARLAP_REQUIRE(a_.size() == dom.size(), ErrorCode::InvalidArgument, "one matrix per cell required");
    SUBVARLAP_REQUIRE(w.field().domain() == dom, ErrorCode::InvalidArgument, "weight lives on another grid");
    SUBVARLAP_REQUIRE(eta1 > 0.0 && eta2 >= eta1, ErrorCode::InvalidArgument, "need 0 < eta1 <= eta2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (std::size_t c = 0; c < a_.size(); ++c) {
        const Matrix& m = a_[c];
        double scale = 0.0;
        for (double v : m) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < i; ++j)
                SUBVARLAP_REQUIRE(std::abs(m[static_cast<std::size_t>(i * 3 + j)] -
                                           m[static_cast<std::size_t>(j * 3 + i)]) <= 1e-12 * std::max(1.0, scale),
                                  ErrorCode::InvalidArgument, "A(x) is not symmetric");
        const double w2 = w[c] * w[c];
        for (int probe = 0; probe < 4; ++probe) {
            std::array<double, 3> xi{};
            double norm2 = 0.0;
            for (int i = 0; i < n1; ++i) {
                xi[static_cast<std::size_t>(i)] = normal(rng);
                norm2 += xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(i)];
            }
            const double q = quad_form(m, n1, xi.data(), xi.data());
            const double slack = 1e-12 * w2 * eta2 * norm2;
            SUBVARLAP_REQUIRE(q >= w2 * eta1 * norm2 - slack && q <= w2 * eta2 * norm2 + slack,
                              ErrorCode::InvalidArgument, "A(x) violates the ellipticity bounds");
        }
    }
}

EllipticityField EllipticityField::isotropic(const Weight& w, int n1) {
    const GridDomain& dom = w.field().domain();
    std::vector<Matrix> a(dom.size(), Matrix{});
    for (std::size_t c = 0; c < dom.size(); ++c)
        for (int i = 0; i < n1; ++i) a[c][static_cast<std::size_t>(i * 4)] = w[c] * w[c];
    return {dom, n1, std::move(a), 1.0, 1.0, w};
}

EllipticityField EllipticityField::rotated(const Weight& w, int n1, double angle) {
    SUBVARLAP_REQUIRE(n1 >= 2, ErrorCode::InvalidArgument, "rotated preset needs two horizontal directions");
    const GridDomain& dom = w.field().domain();
    const double cs = std::cos(angle), sn = std::sin(angle);
    // I + ½ R diag(1,-1) Rᵀ restricted to the first two directions.
    const double a00 = 1.0 + 0.5 * (cs * cs - sn * sn);
    const double a11 = 1.0 - 0.5 * (cs * cs - sn * sn);
    const double a01 = 0.5 * (2.0 * cs * sn);
    std::vector<Matrix> a(dom.size(), Matrix{});
    for (std::size_t c = 0; c < dom.size(); ++c) {
        const double w2 = w[c] * w[c];
        Matrix& m = a[c];
        m[0] = w2 * a00;
        m[1] = m[3] = w2 * a01;
        m[4] = w2 * a11;
        if (n1 == 3) m[8] = w2;
    }
    return {dom, n1, std::move(a), 0.5, 1.5, w};
}

std::vector<std::string> validate(const DirichletProblem& prob) {
    const GridDomain& dom = prob.dom;
    SUBVARLAP_REQUIRE(dom.dim() == prob.g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    for (int k = 0; k < dom.dim(); ++k)
        SUBVARLAP_REQUIRE(dom.cells(k) >= 3, ErrorCode::InvalidArgument, "need at least 3 cells per axis");
    SUBVARLAP_REQUIRE(prob.p.domain() == dom && prob.w.field().domain() == dom && prob.f.domain() == dom,
                      ErrorCode::InvalidArgument, "problem fields live on different grids");
    SUBVARLAP_REQUIRE(prob.a.size() == dom.size() && prob.a.n1() == prob.g.horizontal_dim(),
                      ErrorCode::InvalidArgument, "ellipticity field does not match the grid");
    SUBVARLAP_REQUIRE(prob.p.minus() > 1.0, ErrorCode::InvalidArgument, "need p- > 1");
    SUBVARLAP_REQUIRE(prob.f.all_finite(), ErrorCode::InvalidArgument, "source must be finite");
    const double fnorm = luxemburg_norm(prob.f, conjugate_exponent(prob.p), prob.w.power(-1.0));
    SUBVARLAP_REQUIRE(std::isfinite(fnorm), ErrorCode::InvalidArgument, "source is not in L^{p'}_{1/w}");
    const auto& s = prob.settings;
    SUBVARLAP_REQUIRE(s.gradient_tol > 0.0 && s.energy_rel_tol >= 0.0 && s.patience >= 1 && s.armijo_c > 0.0 &&
                          s.armijo_c < 1.0,
                      ErrorCode::InvalidArgument, "invalid solver settings");
    for (double e : s.eps_schedule)
        SUBVARLAP_REQUIRE(e >= 0.0 && std::isfinite(e), ErrorCode::InvalidArgument, "eps must be >= 0");
    std::vector<std::string> warnings;
    if (prob.p.plus() >= prob.g.homogeneous_dimension())
        warnings.push_back("p+ >= Q: outside the range covered by the existence theory");
    return warnings;
}

std::vector<double> default_eps_schedule(const ExponentField& p) {
    std::vector<double> out{1e-2, 1e-4, 1e-6};
    if (p.minus() >= 2.0) out.push_back(0.0);
    return out;
}

double energy(const GridFunction& u, const DirichletProblem& prob, double eps) {
    check_input(u, prob);
    const Stencil st(prob);
    const GridDomain& dom = prob.dom;
    const auto uv = u.values();
    const double eps2 = eps * eps;
    const double inv_combos = 1.0 / st.combos();
    double total = 0.0;
#pragma omp parallel for reduction(+ : total)
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const CellIndex idx = dom.unravel(i);
        double c[9], fwd[3], bwd[3], xu[3];
        st.coefficients(idx, c);
        st.differences(uv, i, idx, fwd, bwd);
        const Matrix& a = prob.a[i];
        const double p = prob.p[i];
        double cell = 0.0;
        for (int combo = 0; combo < st.combos(); ++combo) {
            st.horizontal(c, fwd, bwd, combo, xu);
            const double s = quad_form(a, st.n1(), xu, xu);
            cell += std::pow(eps2 + std::max(0.0, s), 0.5 * p) / p;
        }
        cell *= inv_combos;
        cell += std::pow(std::abs(uv[i] * prob.w[i]), p) / p - prob.f[i] * uv[i];
        total += cell;
    }
    check_finite(total);
    return total * dom.cell_measure();
}

double energy_difference(const GridFunction& u, const GridFunction& d, double t, const DirichletProblem& prob,
                         double eps) {
    check_input(u, prob);
    check_input(d, prob);
    const Stencil st(prob);
    const GridDomain& dom = prob.dom;
    const auto uv = u.values();
    const auto dv = d.values();
    const double eps2 = eps * eps;
    const double inv_combos = 1.0 / st.combos();
    double total = 0.0;
#pragma omp parallel for reduction(+ : total)
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const CellIndex idx = dom.unravel(i);
        double c[9], uf[3], ub[3], df[3], db[3], xu[3], xd[3];
        st.coefficients(idx, c);
        st.differences(uv, i, idx, uf, ub);
        st.differences(dv, i, idx, df, db);
        const Matrix& a = prob.a[i];
        const double p = prob.p[i];
        double cell = 0.0;
        for (int combo = 0; combo < st.combos(); ++combo) {
            st.horizontal(c, uf, ub, combo, xu);
            st.horizontal(c, df, db, combo, xd);
            const double s0 = std::max(0.0, quad_form(a, st.n1(), xu, xu));
            const double ds = 2.0 * t * quad_form(a, st.n1(), xu, xd) + t * t * quad_form(a, st.n1(), xd, xd);
            cell += pow_increment(eps2 + s0, ds, 0.5 * p) / p;
        }
        cell *= inv_combos;
        const double u0 = uv[i], di = dv[i];
        const double wp = std::pow(prob.w[i], p);
        cell += wp * pow_increment(u0 * u0, 2.0 * t * u0 * di + t * t * di * di, 0.5 * p) / p;
        cell -= prob.f[i] * t * di;
        total += cell;
    }
    check_finite(total);
    return total * dom.cell_measure();
}

GridFunction energy_gradient(const GridFunction& u, const DirichletProblem& prob, double eps) {
    check_input(u, prob);
    const Stencil st(prob);
    const GridDomain& dom = prob.dom;
    const int dim = st.dim();
    const std::size_t n = dom.size();
    const auto uv = u.values();
    const double eps2 = eps * eps;
    const double inv_combos = 1.0 / st.combos();
    // Flux through the forward / backward difference of axis k at each cell.
    std::vector<double> flux_f(n * static_cast<std::size_t>(dim)), flux_b(n * static_cast<std::size_t>(dim));
#pragma omp parallel for
    for (std::size_t i = 0; i < n; ++i) {
        const CellIndex idx = dom.unravel(i);
        double c[9], fwd[3], bwd[3], xu[3], axu[3];
        double ff[3] = {0.0, 0.0, 0.0}, fb[3] = {0.0, 0.0, 0.0};
        st.coefficients(idx, c);
        st.differences(uv, i, idx, fwd, bwd);
        const Matrix& a = prob.a[i];
        const double p = prob.p[i];
        for (int combo = 0; combo < st.combos(); ++combo) {
            st.horizontal(c, fwd, bwd, combo, xu);
            for (int j = 0; j < st.n1(); ++j) {
                axu[j] = 0.0;
                for (int l = 0; l < st.n1(); ++l) axu[j] += a[static_cast<std::size_t>(j * 3 + l)] * xu[l];
            }
            double s = 0.0;
            for (int j = 0; j < st.n1(); ++j) s += xu[j] * axu[j];
            const double base = eps2 + std::max(0.0, s);
            if (base == 0.0) continue;
            const double phi = std::pow(base, 0.5 * p - 1.0);
            for (int k = 0; k < dim; ++k) {
                double g = 0.0;
                for (int j = 0; j < st.n1(); ++j) g += c[j * 3 + k] * axu[j];
                ((combo >> k) & 1 ? ff : fb)[k] += phi * g;
            }
        }
        for (int k = 0; k < dim; ++k) {
            flux_f[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] = ff[k] * inv_combos;
            flux_b[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] = fb[k] * inv_combos;
        }
    }
    GridFunction out(dom);
    bool finite = true;
#pragma omp parallel for reduction(&& : finite)
    for (std::size_t i = 0; i < n; ++i) {
        const CellIndex idx = dom.unravel(i);
        if (dom.is_boundary(idx)) continue;
        double g = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double h = dom.spacing(k);
            const std::size_t st_k = st.stride(k);
            const auto kk = static_cast<std::size_t>(k);
            const auto d = static_cast<std::size_t>(dim);
            // Interior cells always have both neighbours.
            g += (flux_f[(i - st_k) * d + kk] - flux_f[i * d + kk]) / h;
            g += (flux_b[i * d + kk] - flux_b[(i + st_k) * d + kk]) / h;
        }
        const double p = prob.p[i];
        g += std::copysign(std::pow(std::abs(uv[i]), p - 1.0), uv[i]) * std::pow(prob.w[i], p);
        g -= prob.f[i];
        out[i] = g;
        finite = finite && std::isfinite(g);
    }
    SUBVARLAP_REQUIRE(finite, ErrorCode::InvalidState, "non-finite value in the energy gradient");
    return out;
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::GradientTolerance: return "gradient-tolerance";
        case SolveStatus::EnergyStagnation: return "energy-stagnation";
        case SolveStatus::MachinePrecision: return "converged-at-machine-precision";
        case SolveStatus::MaxIterations: return "max-iterations";
    }
    return "unknown";
}

namespace {

double dot(const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
#pragma omp parallel for reduction(+ : s)
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

Solution solve_dirichlet(const DirichletProblem& prob, const std::optional<GridFunction>& initial) {
    Solution sol;
    sol.warnings = validate(prob);
    const GridDomain& dom = prob.dom;
    const auto& settings = prob.settings;
    const double cell = dom.cell_measure();

    sol.u = initial ? *initial : GridFunction(dom);
    check_input(sol.u, prob);
    SUBVARLAP_REQUIRE(sol.u.all_finite(), ErrorCode::InvalidArgument, "initial guess must be finite");
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (dom.is_boundary(i)) sol.u[i] = 0.0;

    const std::vector<double> schedule =
        settings.eps_schedule.empty() ? default_eps_schedule(prob.p) : settings.eps_schedule;
    double step = 1.0;
    for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
        const double eps = schedule[stage];
        const bool last = stage + 1 == schedule.size();
        const double stage_tol = last ? settings.gradient_tol : std::max(settings.gradient_tol, 1e-6);
        const double rel_tol = last ? settings.final_energy_rel_tol : settings.energy_rel_tol;
        StageReport report;
        report.eps = eps;
        sol.eps = eps;

        double e = energy(sol.u, prob, eps);
        sol.stage_starts.push_back(sol.energy_trace.size());
        sol.energy_trace.push_back(e);
        GridFunction grad = energy_gradient(sol.u, prob, eps);
        std::optional<GridFunction> prev_grad;
        std::optional<GridFunction> prev_move;
        int quiet = 0;
        while (true) {
            report.gradient_sup = grad.sup_abs();
            if (report.gradient_sup < stage_tol) {
                report.status = SolveStatus::GradientTolerance;
                break;
            }
            if (sol.iterations >= settings.max_iterations) {
                report.status = SolveStatus::MaxIterations;
                break;
            }
            if (prev_grad) {
                GridFunction y = grad - *prev_grad;
                const double sy = dot(*prev_move, y);
                if (sy > 0.0) step = dot(*prev_move, *prev_move) / sy;
            }
            GridFunction dir = grad;
            dir *= -1.0;
            const double slope = -dot(grad, grad) * cell;
            double de = 0.0;
            bool accepted = false;
            for (int tries = 0; tries < 80; ++tries) {
                de = energy_difference(sol.u, dir, step, prob, eps);
                if (de <= settings.armijo_c * step * slope && de < 0.0) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                report.status = SolveStatus::MachinePrecision;
                break;
            }
            dir *= step;
            sol.u += dir;
            e += de;
            sol.energy_trace.push_back(e);
            ++sol.iterations;
            ++report.iterations;
            prev_move = std::move(dir);
            prev_grad = std::move(grad);
            grad = energy_gradient(sol.u, prob, eps);

            quiet = -de < rel_tol * std::abs(e) ? quiet + 1 : 0;
            if (quiet >= settings.patience) {
                report.gradient_sup = grad.sup_abs();
                report.status = SolveStatus::EnergyStagnation;
                break;
            }
        }
        sol.stages.push_back(report);
        sol.status = report.status;
        sol.gradient_sup = report.gradient_sup;
        if (report.status == SolveStatus::MaxIterations) break;
    }
    return sol;
}

double weak_form(const GridFunction& u, const GridFunction& v, const DirichletProblem& prob, double eps) {
    check_input(v, prob);
    return dot(energy_gradient(u, prob, eps), v) * prob.dom.cell_measure();
}

GridFunction random_zero_boundary(const GridDomain& dom, unsigned long long seed) {
    const TestFunctionFamily family(FamilyKind::Trigonometric, 1, seed, true);
    GridFunction v = family.sample(0, dom);
    const double s = v.sup_abs();
    if (s > 0.0) v *= 1.0 / s;
    return v;
}

double weak_residual(const GridFunction& u, const DirichletProblem& prob, std::size_t test_count, double eps,
                     unsigned long long seed) {
    check_input(u, prob);
    const GridFunction grad = energy_gradient(u, prob, eps);
    double worst = 0.0;
    for (std::size_t k = 0; k < test_count; ++k) {
        const GridFunction v = random_zero_boundary(prob.dom, seed + k);
        const double norm =
            luxemburg_norm(v, prob.p, prob.w) + luxemburg_norm(higher_order_gradient(v, 1, prob.g), prob.p, prob.w);
        const double wf = dot(grad, v) * prob.dom.cell_measure();
        worst = std::max(worst, std::abs(wf) / (norm + 1.0));
    }
    return worst;
}

std::vector<double> coercivity_probe(const DirichletProblem& prob, const GridFunction& direction,
                                     const std::vector<double>& scales) {
    check_input(direction, prob);
    SUBVARLAP_REQUIRE(direction.max() > direction.min(), ErrorCode::InvalidArgument, "direction must be non-constant");
    for (std::size_t i = 0; i < prob.dom.size(); ++i)
        if (prob.dom.is_boundary(i))
            SUBVARLAP_REQUIRE(direction[i] == 0.0, ErrorCode::InvalidArgument, "direction must vanish on the boundary");
    std::vector<double> out;
    out.reserve(scales.size());
    for (double s : scales) {
        GridFunction u = direction;
        u *= s;
        out.push_back(energy(u, prob, 0.0));
    }
    return out;
}

}  // namespace subvarlap
