#include "subvarlap/muckenhoupt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subvarlap/ball_index.hpp"
#include "subvarlap/error.hpp"

namespace subvarlap {

namespace {

double constant_gamma(const ExponentField& p, const ExponentField& q) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < p.values().size(); ++i) {
        const double gam = 1.0 / p[i] - 1.0 / q[i];
        lo = std::min(lo, gam);
        hi = std::max(hi, gam);
    }
    SUBVARLAP_REQUIRE(hi - lo <= 1e-12, ErrorCode::InvalidExponentPair, "1/p - 1/q is not constant");
    SUBVARLAP_REQUIRE(lo >= -1e-12 && hi < 1.0, ErrorCode::InvalidExponentPair, "1/p - 1/q must lie in [0, 1)");
    return std::max(0.0, 0.5 * (lo + hi));
}

}  // namespace

std::vector<BallQuantity> apq_ball_quantities(const Weight& w, const ExponentField& p, const ExponentField& q,
                                              const BallFamily& balls, const CarnotGroup& g) {
    const GridDomain& dom = w.field().domain();
    SUBVARLAP_REQUIRE(p.domain() == dom && q.domain() == dom, ErrorCode::InvalidArgument,
                      "weight and exponents live on different grids");
    SUBVARLAP_REQUIRE(dom.dim() == g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    const double gamma = constant_gamma(p, q);
    const bool p_is_one = p.is_constant() && p.minus() == 1.0;
    const ExponentField p_dual = p_is_one ? p : conjugate_exponent(p);
    const bool constant = p.is_constant() && q.is_constant();
    const double cell = dom.cell_measure();
    const BallIndex index(dom, g);

    std::vector<double> w_inv(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) w_inv[i] = 1.0 / w[i];

    // Constant exponents: both norms are powers of ball sums.
    LinePrefix w_q_sum, w_inv_sum;
    LineRangeExtremum w_inv_max;
    if (constant) {
        const double qc = q.minus();
        const double pd = p_dual.minus();
        std::vector<double> a(dom.size()), b(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i) {
            a[i] = std::pow(w[i], qc);
            b[i] = std::pow(w_inv[i], pd);
        }
        w_q_sum = LinePrefix(dom, a);
        if (p_is_one)
            w_inv_max = LineRangeExtremum(dom, w_inv, true);
        else
            w_inv_sum = LinePrefix(dom, b);
    }

    auto quantity = [&](const Point& c, double r) {
        std::size_t count = 0;
        double value = 0.0;
        if (constant) {
            double sa = 0.0, sb = 0.0, mb = 0.0;
            index.for_each_run(c, r, [&](std::size_t first, int n) {
                count += static_cast<std::size_t>(n);
                sa += w_q_sum.run_sum(first, n);
                if (p_is_one)
                    mb = std::max(mb, w_inv_max.query(first, n));
                else
                    sb += w_inv_sum.run_sum(first, n);
            });
            if (count == 0) return 0.0;
            const double na = std::pow(sa * cell, 1.0 / q.minus());
            const double nb = p_is_one ? mb : std::pow(sb * cell, 1.0 / p_dual.minus());
            value = na * nb;
        } else {
            std::vector<double> fw, fq, fi, fp;
            index.for_each_run(c, r, [&](std::size_t first, int n) {
                for (std::size_t i = first; i < first + static_cast<std::size_t>(n); ++i) {
                    fw.push_back(w[i]);
                    fq.push_back(q[i]);
                    fi.push_back(w_inv[i]);
                    fp.push_back(p_dual[i]);
                }
            });
            count = fw.size();
            if (count == 0) return 0.0;
            value = luxemburg_norm(fw, fq, {}, cell) * luxemburg_norm(fi, fp, {}, cell);
        }
        return std::pow(static_cast<double>(count) * cell, gamma - 1.0) * value;
    };

    std::vector<BallQuantity> out;
    if (balls.policy() == BallFamily::Policy::Explicit) {
        out.resize(balls.balls().size());
#pragma omp parallel for schedule(dynamic)
        for (std::size_t b = 0; b < balls.balls().size(); ++b) {
            const auto& ball = balls.balls()[b];
            g.check(ball.center);
            out[b] = {ball, quantity(ball.center, ball.radius)};
        }
        return out;
    }
    const auto& radii = balls.radii();
    out.resize(dom.size() * radii.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const Point c = dom.center(i);
        for (std::size_t k = 0; k < radii.size(); ++k) out[i * radii.size() + k] = {{c, radii[k]}, quantity(c, radii[k])};
    }
    return out;
}

MuckenhouptEstimate apq_constant_estimate(const Weight& w, const ExponentField& p, const ExponentField& q,
                                          const BallFamily& balls, const CarnotGroup& g) {
    MuckenhouptEstimate est;
    est.gamma = constant_gamma(p, q);
    const auto all = apq_ball_quantities(w, p, q, balls, g);
    est.balls = all.size();
    for (const auto& bq : all) {
        if (bq.value > est.constant) {
            est.constant = bq.value;
            est.argmax = bq.ball;
        }
    }
    return est;
}

Growth classify_growth(std::span<const double> estimates, double stable_tol) {
    SUBVARLAP_REQUIRE(estimates.size() >= 2, ErrorCode::InvalidArgument, "need at least two estimates");
    bool doubling = true;
    bool stable = true;
    for (std::size_t i = 1; i < estimates.size(); ++i) {
        const double prev = estimates[i - 1];
        const double cur = estimates[i];
        if (!(cur >= 2.0 * prev)) doubling = false;
        if (!(std::abs(cur - prev) < stable_tol * std::abs(prev))) stable = false;
    }
    if (doubling) return Growth::Divergent;
    if (stable) return Growth::Stable;
    return Growth::Inconclusive;
}

DoublingResult doubling_check(const GridFunction& density, const BallFamily& balls, const CarnotGroup& g) {
    const GridDomain& dom = density.domain();
    SUBVARLAP_REQUIRE(dom.dim() == g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    SUBVARLAP_REQUIRE(density.min() >= 0.0, ErrorCode::InvalidArgument, "density must be non-negative");
    const BallIndex index(dom, g);
    const LinePrefix sums(dom, density.values());
    auto mu = [&](const Point& c, double r) {
        double s = 0.0;
        index.for_each_run(c, r, [&](std::size_t first, int n) { s += sums.run_sum(first, n); });
        return s * dom.cell_measure();
    };
    DoublingResult out;
    balls.for_each(dom, [&](const Point& c, double r) {
        if (!index.ball_inside(c, 2.0 * r)) return;
        const double small = mu(c, r);
        if (small <= 0.0) {
            ++out.zero_measure;
            return;
        }
        ++out.balls_used;
        const double ratio = mu(c, 2.0 * r) / small;
        if (ratio > out.ratio) {
            out.ratio = ratio;
            out.argmax = {c, r};
        }
    });
    return out;
}

}  // namespace subvarlap
