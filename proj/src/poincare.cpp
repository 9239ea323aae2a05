#include "subvarlap/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "subvarlap/ball_index.hpp"
#include "subvarlap/error.hpp"
#include "subvarlap/harmonic.hpp"
#include "subvarlap/muckenhoupt.hpp"

namespace subvarlap {

double domain_mean(const GridFunction& f, const GridFunction* density) {
    SUBVARLAP_REQUIRE(f.domain().total_measure() > 0.0, ErrorCode::InvalidArgument, "domain has zero measure");
    if (!density) return f.integral() / f.domain().total_measure();
    SUBVARLAP_REQUIRE(density->domain() == f.domain(), ErrorCode::InvalidArgument, "density lives on another grid");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += f[i] * (*density)[i];
        den += (*density)[i];
    }
    SUBVARLAP_REQUIRE(den > 0.0, ErrorCode::InvalidArgument, "density has zero mass");
    return num / den;
}

RatioValue poincare_ratio(const GridFunction& f, const ExponentField& p, const Weight& w, const CarnotGroup& g,
                          RatioMode mode, int order, RatioVariant variant) {
    const GridDomain& dom = f.domain();
    SUBVARLAP_REQUIRE(order == 1 || order == 2, ErrorCode::UnsupportedOrder, "order must be 1 or 2");
    SUBVARLAP_REQUIRE(mode == RatioMode::ZeroBoundary || order == 1, ErrorCode::InvalidArgument,
                      "mean-subtracted ratios are first order");
    SUBVARLAP_REQUIRE(p.domain() == dom && w.field().domain() == dom, ErrorCode::InvalidArgument,
                      "inputs live on different grids");
    const ExponentField lhs_exp =
        variant == RatioVariant::SobolevGain ? sobolev_exponent(p, g.homogeneous_dimension(), order) : p;

    GridFunction numerator = f.abs();
    if (mode == RatioMode::ZeroBoundary) {
        const double tol = 1e-12 * std::max(1.0, f.sup_abs());
        for (std::size_t i = 0; i < dom.size(); ++i)
            if (dom.is_boundary(i))
                SUBVARLAP_REQUIRE(std::abs(f[i]) <= tol, ErrorCode::InvalidArgument,
                                  "zero-boundary mode needs f = 0 on boundary cells");
    } else {
        const double mean = domain_mean(f);
        numerator = f.map([mean](double x) { return std::abs(x - mean); });
    }

    RatioValue out;
    out.numerator = luxemburg_norm(numerator, lhs_exp, w);
    out.denominator = luxemburg_norm(higher_order_gradient(f, order, g), p, w);
    const double scale = luxemburg_norm(f, lhs_exp, w);
    if (out.numerator <= 1e-12 * scale || out.numerator == 0.0) {
        out.status = RatioStatus::Vacuous;
        return out;
    }
    if (out.denominator == 0.0) {
        out.status = RatioStatus::Infinite;
        out.ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    out.ratio = out.numerator / out.denominator;
    return out;
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Bumps: return "bumps";
        case FamilyKind::CoordinateBumps: return "coordbumps";
        case FamilyKind::Trigonometric: return "trig";
        case FamilyKind::Tents: return "tents";
    }
    return "unknown";
}

FamilyKind family_from_string(const std::string& name) {
    if (name == "bumps") return FamilyKind::Bumps;
    if (name == "coordbumps") return FamilyKind::CoordinateBumps;
    if (name == "trig") return FamilyKind::Trigonometric;
    if (name == "tents") return FamilyKind::Tents;
    throw Error(ErrorCode::InvalidArgument, "unknown test-function family '" + name + "'");
}

namespace {
constexpr std::size_t kMemberParams = 48;
}

TestFunctionFamily::TestFunctionFamily(FamilyKind kind, std::size_t count, unsigned long long seed, bool zero_boundary)
    : kind_(kind), count_(count), seed_(seed), zero_boundary_(zero_boundary) {
    SUBVARLAP_REQUIRE(count >= 1, ErrorCode::InvalidArgument, "family must be non-empty");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    members_.resize(count);
    for (auto& m : members_) {
        m.a.resize(kMemberParams);
        for (double& x : m.a) x = unit(rng);
    }
}

std::string TestFunctionFamily::id() const {
    return to_string(kind_) + (zero_boundary_ ? "-zb" : "") + "-n" + std::to_string(count_) + "-s" +
           std::to_string(seed_);
}

GridFunction TestFunctionFamily::sample(std::size_t member, const GridDomain& dom) const {
    SUBVARLAP_REQUIRE(member < members_.size(), ErrorCode::InvalidArgument, "family member out of range");
    const auto& a = members_[member].a;
    const int d = dom.dim();
    using std::numbers::pi;
    auto unit_coords = [&](const Point& x) {
        std::array<double, kMaxDim> s{};
        for (int k = 0; k < d; ++k) {
            const double c0 = dom.center_coord(k, 0);
            const double c1 = dom.center_coord(k, dom.cells(k) - 1);
            s[static_cast<std::size_t>(k)] = (x[k] - c0) / (c1 - c0);
        }
        return s;
    };
    auto fn = [&](const Point& x) {
        const auto s = unit_coords(x);
        auto at = [&](int k) { return s[static_cast<std::size_t>(k)]; };
        double v = 0.0;
        switch (kind_) {
            case FamilyKind::Bumps:
            case FamilyKind::CoordinateBumps: {
                double r2 = 0.0;
                const double rad = 0.25 + 0.45 * a[0];
                for (int k = 0; k < d; ++k) {
                    const double z = at(k) - (0.25 + 0.5 * a[1 + static_cast<std::size_t>(k)]);
                    r2 += z * z;
                }
                r2 /= rad * rad;
                v = r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
                if (kind_ == FamilyKind::CoordinateBumps)
                    v *= (at(0) - a[5]) * (at(d - 1) - a[6]) + 0.25 * (a[7] - 0.5);
                break;
            }
            case FamilyKind::Trigonometric: {
                for (int m = 0; m < 3; ++m) {
                    const std::size_t base = 8 + static_cast<std::size_t>(m) * 8;
                    double term = 2.0 * a[base] - 1.0;
                    for (int k = 0; k < d; ++k) {
                        const double freq = 1.0 + std::floor(3.0 * a[base + 1 + static_cast<std::size_t>(k)]);
                        const double phase = 2.0 * pi * a[base + 4 + static_cast<std::size_t>(k)];
                        term *= std::cos(pi * freq * at(k) + phase);
                    }
                    v += term;
                }
                break;
            }
            case FamilyKind::Tents: {
                const double rad = 0.3 + 0.5 * a[32];
                double l1 = 0.0;
                for (int k = 0; k < d; ++k) l1 += std::abs(at(k) - (0.25 + 0.5 * a[33 + static_cast<std::size_t>(k)]));
                v = std::max(0.0, 1.0 - l1 / rad) + 0.5 * (a[36] - 0.5) * at(0);
                break;
            }
        }
        if (zero_boundary_) {
            for (int k = 0; k < d; ++k) v *= std::sin(pi * std::clamp(at(k), 0.0, 1.0));
        }
        return v;
    };
    GridFunction out = GridFunction::sample(dom, fn);
    if (zero_boundary_) {
        // sin(π) is not exactly zero in floating point.
        for (std::size_t i = 0; i < out.size(); ++i)
            if (dom.is_boundary(i)) out[i] = 0.0;
    }
    return out;
}

namespace {

GridDomain capped(const GridDomain& dom, int max_cells) {
    std::vector<double> lo(static_cast<std::size_t>(dom.dim())), hi(lo.size());
    std::vector<int> n(lo.size());
    bool same = true;
    for (int k = 0; k < dom.dim(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        n[kk] = std::min(dom.cells(k), max_cells);
        same = same && n[kk] == dom.cells(k);
        lo[kk] = dom.lo(k);
        hi[kk] = dom.hi(k);
        if (dom.is_node_aligned()) {
            lo[kk] += 0.5 * dom.spacing(k);
            hi[kk] -= 0.5 * dom.spacing(k);
            n[kk] -= 1;
        }
    }
    if (same) return dom;
    return dom.is_node_aligned() ? GridDomain::node_aligned(lo, hi, n) : GridDomain(lo, hi, n);
}

}  // namespace

std::vector<GateResult> sweep_gates(const SweepProblem& problem) {
    std::vector<GateResult> gates;
    const GridDomain& dom = problem.domain;
    const CarnotGroup& g = problem.group;
    const ExponentField p(GridFunction::sample(dom, problem.exponent));
    const double q_dim = g.homogeneous_dimension();

    if (problem.mode == RatioMode::MeanSubtracted)
        gates.push_back({"order = 1 for mean-subtracted", problem.order == 1, "order " + std::to_string(problem.order)});

    if (problem.variant == RatioVariant::SobolevGain) {
        const double limit = q_dim / problem.order;
        gates.push_back({problem.order == 1 ? "p+ < Q" : "p+ < Q/2", p.plus() < limit,
                         "p+ = " + std::to_string(p.plus()) + ", Q/m = " + std::to_string(limit)});
        return gates;
    }

    const double delta = problem.jump_delta > 0.0 ? problem.jump_delta : 4.0 * g.cell_scale(dom);
    const auto jump = jump_condition_check(p, g, delta);
    gates.push_back({"jump condition", jump.holds,
                     std::to_string(jump.failures.size()) + " failing cells, delta = " + std::to_string(delta)});

    const double pm = p.minus();
    GateResult weight_gate{"w in A_{p-,(p-)*}", false, ""};
    if (pm > 1.0 && pm < q_dim) {
        const double pstar = q_dim * pm / (q_dim - pm);
        const GridDomain coarse = capped(dom, std::max(problem.weight_gate_cells, 8));
        const Weight w(GridFunction::sample(coarse, problem.weight));
        const auto pc = ExponentField::constant(coarse, pm);
        const auto qc = ExponentField::constant(coarse, pstar);
        std::vector<double> est;
        for (int e = 0; e <= 2; ++e)
            est.push_back(apq_constant_estimate(w, pc, qc, BallFamily::grid_dyadic(coarse, g, e), g).constant);
        weight_gate.passed = std::isfinite(est.back()) && classify_growth(est) == Growth::Stable;
        weight_gate.detail = "estimates " + std::to_string(est[0]) + ", " + std::to_string(est[1]) + ", " +
                             std::to_string(est[2]);
    } else {
        weight_gate.detail = "needs 1 < p- < Q, got p- = " + std::to_string(pm);
    }
    gates.push_back(weight_gate);
    return gates;
}

SweepResult ratio_sweep(const TestFunctionFamily& family, const SweepProblem& problem, int refinements) {
    SUBVARLAP_REQUIRE(refinements >= 0, ErrorCode::InvalidArgument, "refinements must be >= 0");
    SUBVARLAP_REQUIRE(family.zero_boundary() == (problem.mode == RatioMode::ZeroBoundary), ErrorCode::InvalidArgument,
                      "family boundary behaviour does not match the ratio mode");
    SweepResult out;
    out.gates = sweep_gates(problem);
    for (const auto& gate : out.gates) out.gates_passed = out.gates_passed && gate.passed;
    if (!out.gates_passed) return out;

    const std::string inequality =
        std::string(problem.variant == RatioVariant::SobolevGain ? "sobolev-gain" : "same-exponent") +
        (problem.mode == RatioMode::MeanSubtracted ? "/mean-subtracted" : "/zero-boundary") + "/m" +
        std::to_string(problem.order);
    for (int level = 0; level <= refinements; ++level) {
        const GridDomain dom = problem.domain.refined(1 << level);
        const ExponentField p(GridFunction::sample(dom, problem.exponent));
        const Weight w(GridFunction::sample(dom, problem.weight));
        RatioReport report;
        report.inequality = inequality;
        for (int k = 0; k < dom.dim(); ++k) report.resolution.push_back(dom.cells(k));
        report.ratios.resize(family.count());
#pragma omp parallel for schedule(dynamic)
        for (std::size_t m = 0; m < family.count(); ++m)
            report.ratios[m] = poincare_ratio(family.sample(m, dom), p, w, problem.group, problem.mode, problem.order,
                                              problem.variant);
        for (std::size_t m = 0; m < report.ratios.size(); ++m) {
            const auto& r = report.ratios[m];
            if (r.status != RatioStatus::Finite) continue;
            if (!report.max_ratio || r.ratio > *report.max_ratio) {
                report.max_ratio = r.ratio;
                report.argmax = m;
            }
        }
        out.reports.push_back(std::move(report));
    }
    for (std::size_t i = 1; i < out.reports.size(); ++i) {
        const auto& a = out.reports[i - 1].max_ratio;
        const auto& b = out.reports[i].max_ratio;
        if (!a || !b) continue;
        const double f = std::max(*a / *b, *b / *a);
        out.refinement_factor = std::max(out.refinement_factor.value_or(1.0), f);
    }
    return out;
}

GridFunction level_truncation(const GridFunction& f, double c, int j) {
    const double lo = std::ldexp(1.0, j);
    const double hi = 2.0 * lo;
    return f.map([=](double x) { return std::clamp(std::abs(x - c), lo, hi); });
}

Ball central_ball(const GridDomain& dom, const CarnotGroup& g) {
    const BallIndex index(dom, g);
    const Point c = dom.midpoint();
    double lo = 0.0;
    double hi = gauge_diameter(dom, g);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (index.ball_inside(c, mid) ? lo : hi) = mid;
    }
    return {c, lo};
}

RepresentationResult representation_check(const GridFunction& f, const CarnotGroup& g, std::optional<Ball> b0) {
    const GridDomain& dom = f.domain();
    RepresentationResult out;
    out.central_ball = b0 ? *b0 : central_ball(dom, g);
    const BallIndex index(dom, g);
    const LinePrefix sums(dom, f.values());
    double s = 0.0;
    std::size_t count = 0;
    index.for_each_run(out.central_ball.center, out.central_ball.radius, [&](std::size_t first, int n) {
        s += sums.run_sum(first, n);
        count += static_cast<std::size_t>(n);
    });
    SUBVARLAP_REQUIRE(count > 0, ErrorCode::InvalidArgument, "central ball contains no cells");
    out.ball_mean = s / static_cast<double>(count);

    const GridFunction potential = fractional_integral(higher_order_gradient(f, 1, g), 1.0, g);
    for (std::size_t i = 0; i < dom.size(); ++i) {
        if (dom.is_boundary(i)) continue;
        if (potential[i] < 1e-12) {
            ++out.excluded;
            continue;
        }
        ++out.evaluated;
        const double ratio = std::abs(f[i] - out.ball_mean) / potential[i];
        if (ratio > out.constant) {
            out.constant = ratio;
            out.argmax = i;
        }
    }
    SUBVARLAP_REQUIRE(out.evaluated > 0, ErrorCode::VacuousReport, "every interior point was excluded");
    return out;
}

}  // namespace subvarlap
