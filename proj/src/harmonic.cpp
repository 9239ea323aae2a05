#include "subvarlap/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "subvarlap/ball_index.hpp"
#include "subvarlap/error.hpp"

namespace subvarlap {

namespace {

void require_same_grid(const GridDomain& a, const GridDomain& b) {
    SUBVARLAP_REQUIRE(a == b, ErrorCode::InvalidArgument, "inputs live on different grids");
}

GridFunction maximal_grid_family(const GridFunction& f, const BallFamily& balls, const CarnotGroup& g,
                                 const GridFunction* density) {
    const GridDomain& dom = f.domain();
    const std::size_t n = dom.size();
    std::vector<double> mass(n), dens(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (density) dens[i] = (*density)[i];
        mass[i] = std::abs(f[i]) * dens[i];
    }
    const BallIndex index(dom, g);
    const LinePrefix mass_sum(dom, mass);
    const LinePrefix dens_sum(dom, dens);
    GridFunction out(dom, 0.0);
    std::vector<double> avg(n);
    const bool euclid = g.kind() == CarnotGroup::Kind::Euclidean;
    for (double r : balls.radii()) {
        const auto stencil = euclid ? index.euclidean_stencil(r) : BallIndex::Stencil{};
#pragma omp parallel for schedule(dynamic, 64)
        for (std::size_t c = 0; c < n; ++c) {
            double sm = 0.0, sd = 0.0;
            auto add = [&](std::size_t first, int cnt) {
                sm += mass_sum.run_sum(first, cnt);
                sd += dens_sum.run_sum(first, cnt);
            };
            if (euclid)
                index.for_each_run(c, stencil, add);
            else
                index.for_each_run(dom.center(c), r, add);
            avg[c] = sd > 0.0 ? sm / sd : 0.0;
        }
        // The gauges are symmetric, so the balls of radius r containing x
        // are exactly those centred in B(x, r).
        const LineRangeExtremum best(dom, avg, true);
#pragma omp parallel for schedule(dynamic, 64)
        for (std::size_t x = 0; x < n; ++x) {
            double m = out[x];
            auto take = [&](std::size_t first, int cnt) { m = std::max(m, best.query(first, cnt)); };
            if (euclid)
                index.for_each_run(x, stencil, take);
            else
                index.for_each_run(dom.center(x), r, take);
            out[x] = m;
        }
    }
    return out;
}

GridFunction maximal_explicit_family(const GridFunction& f, const BallFamily& balls, const CarnotGroup& g,
                                     const GridFunction* density) {
    const GridDomain& dom = f.domain();
    const BallIndex index(dom, g);
    GridFunction out(dom, 0.0);
    std::vector<char> covered(dom.size(), 0);
    for (const auto& b : balls.balls()) {
        g.check(b.center);
        double sm = 0.0, sd = 0.0;
        index.for_each_run(b.center, b.radius, [&](std::size_t first, int cnt) {
            for (std::size_t i = first; i < first + static_cast<std::size_t>(cnt); ++i) {
                const double d = density ? (*density)[i] : 1.0;
                sm += std::abs(f[i]) * d;
                sd += d;
            }
        });
        if (sd <= 0.0) continue;
        const double a = sm / sd;
        index.for_each_run(b.center, b.radius, [&](std::size_t first, int cnt) {
            for (std::size_t i = first; i < first + static_cast<std::size_t>(cnt); ++i) {
                out[i] = std::max(out[i], a);
                covered[i] = 1;
            }
        });
    }
    for (char c : covered)
        SUBVARLAP_REQUIRE(c, ErrorCode::IncompleteFamily, "some grid point lies in no ball of the family");
    return out;
}

}  // namespace

GridFunction maximal_operator(const GridFunction& f, const BallFamily& balls, const CarnotGroup& g,
                              const GridFunction* density) {
    SUBVARLAP_REQUIRE(f.domain().dim() == g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    SUBVARLAP_REQUIRE(f.all_finite(), ErrorCode::InvalidArgument, "non-finite input to maximal operator");
    if (density) {
        require_same_grid(f.domain(), density->domain());
        SUBVARLAP_REQUIRE(density->min() >= 0.0, ErrorCode::InvalidArgument, "density must be non-negative");
    }
    SUBVARLAP_REQUIRE(!balls.empty(), ErrorCode::IncompleteFamily, "empty ball family");
    if (balls.policy() == BallFamily::Policy::GridDyadic) return maximal_grid_family(f, balls, g, density);
    return maximal_explicit_family(f, balls, g, density);
}

double fractional_kernel(double d, double alpha, const CarnotGroup& g) {
    return std::pow(d, alpha) / g.ball_volume(d);
}

double truncated_kernel(double d, double r, double alpha, const CarnotGroup& g) {
    return std::min(fractional_kernel(r, alpha, g), fractional_kernel(d, alpha, g));
}

double self_cell_distance(const GridDomain& dom, const CarnotGroup& g) {
    Point half(dom.dim());
    for (int k = 0; k < dom.dim(); ++k) half[k] = 0.5 * dom.spacing(k);
    return g.gauge(half);
}

GridFunction fractional_integral(const GridFunction& f, double alpha, const CarnotGroup& g) {
    const GridDomain& dom = f.domain();
    const double q_dim = g.homogeneous_dimension();
    SUBVARLAP_REQUIRE(alpha > 0.0 && alpha < q_dim, ErrorCode::InvalidArgument, "alpha must lie in (0, Q)");
    SUBVARLAP_REQUIRE(dom.dim() == g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    const double cell = dom.cell_measure();
    const double self = fractional_kernel(self_cell_distance(dom, g), alpha, g) * cell;
    const std::size_t n = dom.size();
    GridFunction out(dom, 0.0);
    const auto v = f.values();

    if (g.kind() == CarnotGroup::Kind::Euclidean) {
        // Translation-invariant kernel: tabulate it once per offset.
        const int d = dom.dim();
        std::vector<std::size_t> extent(static_cast<std::size_t>(d)), stride(static_cast<std::size_t>(d));
        std::size_t table_size = 1;
        for (int k = d - 1; k >= 0; --k) {
            const auto kk = static_cast<std::size_t>(k);
            extent[kk] = static_cast<std::size_t>(2 * dom.cells(k) - 1);
            stride[kk] = table_size;
            table_size *= extent[kk];
        }
        std::vector<double> table(table_size);
        for (std::size_t t = 0; t < table_size; ++t) {
            double s = 0.0;
            bool zero = true;
            for (int k = 0; k < d; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const long off = static_cast<long>((t / stride[kk]) % extent[kk]) - (dom.cells(k) - 1);
                zero = zero && off == 0;
                const double dx = static_cast<double>(off) * dom.spacing(k);
                s += dx * dx;
            }
            table[t] = zero ? self : fractional_kernel(std::sqrt(s), alpha, g) * cell;
        }
        const int n_last = dom.line_length();
        const std::size_t lines = dom.line_count();
#pragma omp parallel for schedule(static)
        for (std::size_t x = 0; x < n; ++x) {
            const CellIndex cx = dom.unravel(x);
            double acc = 0.0;
            for (std::size_t line = 0; line < lines; ++line) {
                const std::size_t first = line * static_cast<std::size_t>(n_last);
                const CellIndex cy = dom.unravel(first);
                std::size_t base = 0;
                for (int k = 0; k + 1 < d; ++k) {
                    const auto kk = static_cast<std::size_t>(k);
                    base += static_cast<std::size_t>(cy[kk] - cx[kk] + dom.cells(k) - 1) * stride[kk];
                }
                const double* krow = table.data() + base + static_cast<std::size_t>(n_last - 1 - cx[static_cast<std::size_t>(d - 1)]);
                const double* frow = v.data() + first;
                for (int j = 0; j < n_last; ++j) acc += frow[j] * krow[j];
            }
            out[x] = acc;
        }
        return out;
    }

    // Heisenberg: d^α/|B(d)| = (8/π²) (d⁴)^{(α-4)/4}.
    const double c = 8.0 / (std::numbers::pi * std::numbers::pi) * cell;
    const double e = (alpha - 4.0) / 4.0;
    std::vector<Point> centers(n);
    for (std::size_t i = 0; i < n; ++i) centers[i] = dom.center(i);
#pragma omp parallel for schedule(static)
    for (std::size_t x = 0; x < n; ++x) {
        const Point& a = centers[x];
        double acc = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (v[y] == 0.0) continue;
            if (y == x) {
                acc += v[y] * self;
                continue;
            }
            const Point& b = centers[y];
            const double dx = b[0] - a[0];
            const double dy = b[1] - a[1];
            const double dt = b[2] - a[2] - 0.5 * (a[0] * b[1] - a[1] * b[0]);
            const double rho2 = dx * dx + dy * dy;
            acc += v[y] * c * std::pow(rho2 * rho2 + 16.0 * dt * dt, e);
        }
        out[x] = acc;
    }
    return out;
}

LinearishOperator identity_operator() {
    return {"identity", [](const GridFunction& f) { return f; }, false};
}

LinearishOperator maximal_operator_op(BallFamily balls, CarnotGroup g, std::optional<GridFunction> density) {
    return {"maximal",
            [balls = std::move(balls), g = std::move(g), density = std::move(density)](const GridFunction& f) {
                return maximal_operator(f, balls, g, density ? &*density : nullptr);
            },
            true};
}

LinearishOperator fractional_integral_op(double alpha, CarnotGroup g) {
    return {"fracint", [alpha, g = std::move(g)](const GridFunction& f) { return fractional_integral(f, alpha, g); },
            false};
}

OperatorNormEstimate operator_norm_estimate(const LinearishOperator& op, const ExponentField& p, const Weight& w,
                                            const std::vector<GridFunction>& probes, const std::string& family_id) {
    SUBVARLAP_REQUIRE(!probes.empty(), ErrorCode::InvalidArgument, "probe family is empty");
    OperatorNormEstimate est;
    est.op = op.id;
    est.probe_family = family_id;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double den = luxemburg_norm(probes[i], p, w);
        if (den == 0.0) {
            ++est.skipped;
            continue;
        }
        ++est.probes_used;
        const double ratio = luxemburg_norm(op.apply(probes[i]), p, w) / den;
        if (ratio > est.value) {
            est.value = ratio;
            est.argmax = i;
        }
    }
    if (op.clamp_at_one) est.value = std::max(est.value, 1.0);
    return est;
}

std::vector<GridFunction> bump_indicator_probes(const GridDomain& dom, std::size_t count, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<GridFunction> out;
    out.emplace_back(dom, 1.0);
    const int d = dom.dim();
    for (std::size_t m = 1; out.size() < count; ++m) {
        if (m % 2 == 1) {
            // Indicator of a random dyadic sub-box of level 1..4.
            const int level = 1 + static_cast<int>(unit(rng) * 4.0);
            std::vector<double> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k) {
                const int parts = 1 << level;
                const int which = std::min(parts - 1, static_cast<int>(unit(rng) * parts));
                const double w = (dom.hi(k) - dom.lo(k)) / parts;
                lo[static_cast<std::size_t>(k)] = dom.lo(k) + which * w;
                hi[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)] + w;
            }
            out.push_back(GridFunction::sample(dom, [&](const Point& x) {
                for (int k = 0; k < d; ++k)
                    if (x[k] < lo[static_cast<std::size_t>(k)] || x[k] >= hi[static_cast<std::size_t>(k)]) return 0.0;
                return 1.0;
            }));
        } else {
            std::vector<double> c(static_cast<std::size_t>(d)), s(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k) {
                const double ext = dom.hi(k) - dom.lo(k);
                c[static_cast<std::size_t>(k)] = dom.lo(k) + unit(rng) * ext;
                s[static_cast<std::size_t>(k)] = (0.05 + 0.45 * unit(rng)) * ext;
            }
            out.push_back(GridFunction::sample(dom, [&](const Point& x) {
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double z = (x[k] - c[static_cast<std::size_t>(k)]) / s[static_cast<std::size_t>(k)];
                    r2 += z * z;
                }
                return r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
            }));
        }
    }
    return out;
}

std::vector<GridFunction> shell_probes(const GridDomain& dom, const CarnotGroup& g, const Point& center, int levels) {
    const double big_r = 0.5 * gauge_diameter(dom, g);
    std::vector<GridFunction> out;
    for (int k = 0; k < levels; ++k) {
        const double outer = big_r * std::pow(0.5, k);
        const double inner = 0.5 * outer;
        GridFunction f = GridFunction::sample(dom, [&](const Point& y) {
            const double d = g.distance(center, y);
            return d >= inner && d < outer ? 1.0 : 0.0;
        });
        if (f.max() > 0.0) out.push_back(std::move(f));
    }
    return out;
}

RubioDeFranciaResult rubio_de_francia(const GridFunction& h, const ExponentField& p, const GridFunction* mu_density,
                                      const OperatorNormEstimate& norm_m, int k_terms, const BallFamily& balls,
                                      const CarnotGroup& g) {
    SUBVARLAP_REQUIRE(h.min() >= 0.0, ErrorCode::InvalidArgument, "Rubio de Francia input must be non-negative");
    SUBVARLAP_REQUIRE(norm_m.value >= 1.0, ErrorCode::InvalidArgument, "||M|| estimate must be >= 1");
    SUBVARLAP_REQUIRE(k_terms >= 1, ErrorCode::InvalidArgument, "need at least one term");
    require_same_grid(h.domain(), p.domain());
    const GridDomain& dom = h.domain();

    // L^{p(.)}_μ with μ = density dx is L^{p(.)}_w with w = density^{1/p}.
    GridFunction wf(dom, 1.0);
    if (mu_density) {
        require_same_grid(dom, mu_density->domain());
        for (std::size_t i = 0; i < dom.size(); ++i) wf[i] = std::pow((*mu_density)[i], 1.0 / p[i]);
    }
    auto norm = [&](const GridFunction& f) {
        return luxemburg_norm(f.values(), p.values(), wf.values(), dom.cell_measure());
    };

    RubioDeFranciaResult out;
    out.rh = h;
    const double h_norm = norm(h);
    out.term_norms.push_back(h_norm);
    out.last_term_norm = h_norm;
    out.terms = 1;
    const double scale = 1.0 / (2.0 * norm_m.value);
    GridFunction iterate = h;
    double factor = 1.0;
    for (int k = 1; k <= k_terms && h_norm > 0.0; ++k) {
        iterate = maximal_operator(iterate, balls, g, mu_density);
        factor *= scale;
        const GridFunction term = factor * iterate;
        const double tn = norm(term);
        SUBVARLAP_REQUIRE(tn < out.term_norms.back(), ErrorCode::NormEstimateTooSmall,
                          "series term " + std::to_string(k) + " did not decrease; ||M|| = " +
                              std::to_string(norm_m.value) + " is an underestimate");
        out.rh += term;
        out.term_norms.push_back(tn);
        out.last_term_norm = tn;
        out.terms = k + 1;
        if (tn < 1e-12 * h_norm) break;
    }
    if (h_norm > 0.0) out.tail_sup = factor * scale * maximal_operator(iterate, balls, g, mu_density).max();
    return out;
}

SawyerWheedenResult sawyer_wheeden_check(const GridFunction& w_target, const GridFunction& v_source, double p,
                                         double q, double alpha, const BallFamily& balls, const CarnotGroup& g,
                                         const SawyerWheedenOptions& opts) {
    SUBVARLAP_REQUIRE(p > 1.0 && p <= q && std::isfinite(q), ErrorCode::InvalidArgument, "need 1 < p <= q < infinity");
    SUBVARLAP_REQUIRE(alpha > 0.0 && alpha < g.homogeneous_dimension(), ErrorCode::InvalidArgument,
                      "alpha must lie in (0, Q)");
    const GridDomain& dom = w_target.domain();
    require_same_grid(dom, v_source.domain());
    SawyerWheedenResult out;
    if (balls.empty()) return out;

    const double p_dual = p / (p - 1.0);
    const double kq = g.quasi_metric_constant();
    const double sep = 1.0 / (9.0 * kq * kq * kq * kq);
    std::vector<double> v_pow(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) v_pow[i] = std::pow(v_source[i], 1.0 - p_dual);
    const BallIndex index(dom, g);
    const LinePrefix w_sum(dom, w_target.values());
    const LinePrefix v_sum(dom, v_pow);
    std::vector<Point> centers(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) centers[i] = dom.center(i);

    std::mt19937_64 rng(opts.seed);
    balls.for_each(dom, [&](const Point& c, double r) {
        std::vector<std::size_t> cells;
        double sw = 0.0, sv = 0.0;
        index.for_each_run(c, r, [&](std::size_t first, int cnt) {
            sw += w_sum.run_sum(first, cnt);
            sv += v_sum.run_sum(first, cnt);
            for (std::size_t i = first; i < first + static_cast<std::size_t>(cnt); ++i) cells.push_back(i);
        });
        if (cells.size() < 2) {
            ++out.skipped;
            return;
        }
        // φ(B) is attained at the closest admissible pair since K decreases in d.
        const std::size_t anchors =
            std::clamp<std::size_t>(opts.pair_budget / cells.size(), std::size_t{1}, cells.size());
        double min_sep = std::numeric_limits<double>::infinity();
        const double threshold = sep * r;
        for (std::size_t a = 0; a < anchors; ++a) {
            const std::size_t ia = anchors == cells.size() ? cells[a] : cells[rng() % cells.size()];
            for (std::size_t ib : cells) {
                const double d = g.distance(centers[ia], centers[ib]);
                if (d >= threshold && d > 0.0) min_sep = std::min(min_sep, d);
            }
        }
        if (!std::isfinite(min_sep)) {
            ++out.skipped;
            return;
        }
        ++out.balls_used;
        const double phi = fractional_kernel(min_sep, alpha, g);
        const double value =
            phi * std::pow(sw * dom.cell_measure(), 1.0 / q) * std::pow(sv * dom.cell_measure(), 1.0 / p_dual);
        if (value > out.value) {
            out.value = value;
            out.argmax = {c, r};
        }
    });
    return out;
}

WeakTypeResult weak_type_check(const GridFunction& f, double alpha, double p, double q, const Weight& w,
                               const CarnotGroup& g, const WeakTypeOptions& opts) {
    const double q_dim = g.homogeneous_dimension();
    SUBVARLAP_REQUIRE(p >= 1.0 && p < q && std::isfinite(q), ErrorCode::InvalidArgument, "need 1 <= p < q < infinity");
    SUBVARLAP_REQUIRE(std::abs(1.0 / p - 1.0 / q - alpha / q_dim) < 1e-9, ErrorCode::InvalidArgument,
                      "exponents must satisfy 1/p - 1/q = alpha/Q");
    SUBVARLAP_REQUIRE(opts.t_levels >= 0 && opts.t_levels <= 16, ErrorCode::InvalidArgument, "t_levels out of range");
    const GridDomain& dom = f.domain();
    require_same_grid(dom, w.field().domain());
    const double cell = dom.cell_measure();

    WeakTypeResult out;
    double rhs_mass = 0.0;
    for (std::size_t i = 0; i < dom.size(); ++i) rhs_mass += std::pow(std::abs(f[i]) * w[i], p);
    const double rhs_norm = std::pow(rhs_mass * cell, 1.0 / p);

    const GridFunction inf = fractional_integral(f, alpha, g).abs();
    double tmin = std::numeric_limits<double>::infinity();
    for (double x : inf.values())
        if (x > 0.0) tmin = std::min(tmin, x);
    const double tmax = inf.max();
    const std::size_t count = (std::size_t{1} << opts.t_levels) + 1;
    if (rhs_norm > 0.0 && tmax > 0.0) {
        std::vector<double> wq(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i) wq[i] = std::pow(w[i], q);
        for (std::size_t j = 0; j < count; ++j) {
            // Nested grids: the 2^k + 1 grid is a subset of the 2^{k+1} + 1 grid.
            const double frac = static_cast<double>(j) / static_cast<double>(count - 1);
            const double t = tmin * std::pow(tmax / tmin, frac) * (1.0 - 1e-12);
            double lhs_mass = 0.0;
            for (std::size_t i = 0; i < dom.size(); ++i)
                if (inf[i] > t) lhs_mass += wq[i];
            ++out.t_evaluated;
            const double ratio = std::pow(lhs_mass * cell, 1.0 / q) / (rhs_norm / std::pow(t, 1.0));
            if (ratio > out.constant) {
                out.constant = ratio;
                out.t_at_max = t;
            }
        }
    } else {
        out.t_skipped = count;
    }

    if (opts.p1_constant && p == 1.0) {
        SUBVARLAP_REQUIRE(opts.p1_balls != nullptr && opts.p1_balls->policy() == BallFamily::Policy::GridDyadic,
                          ErrorCode::InvalidArgument, "p = 1 constant needs a grid ball family");
        const BallIndex index(dom, g);
        std::vector<double> wq(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i) wq[i] = std::pow(w[i], q);
        const LinePrefix wq_sum(dom, wq);
        std::vector<Point> centers(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i) centers[i] = dom.center(i);
        const double self = self_cell_distance(dom, g);
        double best = 0.0;
        for (std::size_t x = 0; x < dom.size(); ++x) {
            for (double r : opts.p1_balls->radii()) {
                double mass = 0.0;
                index.for_each_run(centers[x], r, [&](std::size_t first, int cnt) { mass += wq_sum.run_sum(first, cnt); });
                double sup = 0.0;
                for (std::size_t y = 0; y < dom.size(); ++y) {
                    const double d = y == x ? self : g.distance(centers[x], centers[y]);
                    sup = std::max(sup, truncated_kernel(d, r, alpha, g) / w[y]);
                }
                best = std::max(best, std::pow(mass * cell, 1.0 / q) * sup);
            }
        }
        out.p1_constant = best;
    }
    return out;
}

}  // namespace subvarlap
