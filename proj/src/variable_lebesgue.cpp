#include "subvarlap/variable_lebesgue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "subvarlap/ball_index.hpp"
#include "subvarlap/error.hpp"

namespace subvarlap {

ExponentField::ExponentField(GridFunction p) : p_(std::move(p)) {
    SUBVARLAP_REQUIRE(p_.size() > 0, ErrorCode::InvalidArgument, "empty exponent field");
    SUBVARLAP_REQUIRE(p_.all_finite(), ErrorCode::InvalidArgument, "exponent must be finite everywhere");
    p_minus_ = p_.min();
    p_plus_ = p_.max();
    SUBVARLAP_REQUIRE(p_minus_ >= 1.0, ErrorCode::InvalidArgument,
                      "exponent must be >= 1 (found " + std::to_string(p_minus_) + ")");
}

ExponentField ExponentField::constant(const GridDomain& dom, double p) { return ExponentField(GridFunction(dom, p)); }

ExponentField ExponentField::scaled(double s) const { return ExponentField(s * p_); }

Weight::Weight(GridFunction w) : w_(std::move(w)) {
    SUBVARLAP_REQUIRE(w_.all_finite(), ErrorCode::InvalidWeight, "weight must be finite");
    for (double x : w_.values()) SUBVARLAP_REQUIRE(x > 0.0, ErrorCode::InvalidWeight, "weight must be positive");
}

Weight Weight::unit(const GridDomain& dom) { return Weight(GridFunction(dom, 1.0)); }

Weight Weight::power(double s) const {
    return Weight(w_.map([s](double x) { return std::pow(x, s); }));
}

namespace {

void check_shapes(std::span<const double> f, std::span<const double> p, std::span<const double> w) {
    SUBVARLAP_REQUIRE(f.size() == p.size(), ErrorCode::InvalidArgument, "function and exponent shapes differ");
    SUBVARLAP_REQUIRE(w.empty() || w.size() == f.size(), ErrorCode::InvalidArgument, "weight shape differs");
}

}  // namespace

double modular(std::span<const double> f, std::span<const double> p, std::span<const double> w, double cell_measure) {
    check_shapes(f, p, w);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(w.empty() ? f[i] : f[i] * w[i]);
        SUBVARLAP_REQUIRE(std::isfinite(a), ErrorCode::InvalidArgument, "non-finite value in modular");
        if (a > 0.0) s += std::pow(a, p[i]);
    }
    return s * cell_measure;
}

double modular(const GridFunction& f, const ExponentField& p) {
    return modular(f.values(), p.values(), {}, f.domain().cell_measure());
}

double modular(const GridFunction& f, const ExponentField& p, const Weight& w) {
    return modular(f.values(), p.values(), w.values(), f.domain().cell_measure());
}

double luxemburg_norm(std::span<const double> f, std::span<const double> p, std::span<const double> w,
                      double cell_measure, double tol) {
    check_shapes(f, p, w);
    // Work with logs so that each modular evaluation costs one exp per cell.
    std::vector<double> log_a;
    std::vector<double> expo;
    log_a.reserve(f.size());
    expo.reserve(f.size());
    double pmin = std::numeric_limits<double>::infinity();
    double pmax = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(w.empty() ? f[i] : f[i] * w[i]);
        SUBVARLAP_REQUIRE(std::isfinite(a), ErrorCode::InvalidArgument, "non-finite value in Luxemburg norm");
        if (a == 0.0) continue;
        log_a.push_back(std::log(a));
        expo.push_back(p[i]);
        pmin = std::min(pmin, p[i]);
        pmax = std::max(pmax, p[i]);
    }
    if (log_a.empty()) return 0.0;
    const double log_cell = std::log(cell_measure);
    auto rho = [&](double log_lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < log_a.size(); ++i) s += std::exp(expo[i] * (log_a[i] - log_lambda) + log_cell);
        return s;
    };
    const double log_rho1 = std::log(rho(0.0));
    if (pmin == pmax) return std::exp(log_rho1 / pmin);

    // Sandwich: the norm lies between rho^{1/p+} and rho^{1/p-}.
    double lo = std::min(log_rho1 / pmin, log_rho1 / pmax);
    double hi = std::max(log_rho1 / pmin, log_rho1 / pmax);
    const double pad = 1e-12 + 4 * std::numeric_limits<double>::epsilon() * (std::abs(lo) + std::abs(hi));
    lo -= pad;
    hi += pad;
    while (rho(lo) < 1.0) lo -= std::max(1e-12, hi - lo);
    while (rho(hi) > 1.0) hi += std::max(1e-12, hi - lo);
    const double log_tol = std::log1p(tol);
    while (hi - lo > log_tol) {
        const double mid = 0.5 * (lo + hi);
        if (rho(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

double luxemburg_norm(const GridFunction& f, const ExponentField& p, double tol) {
    return luxemburg_norm(f.values(), p.values(), {}, f.domain().cell_measure(), tol);
}

double luxemburg_norm(const GridFunction& f, const ExponentField& p, const Weight& w, double tol) {
    return luxemburg_norm(f.values(), p.values(), w.values(), f.domain().cell_measure(), tol);
}

ExponentField conjugate_exponent(const ExponentField& p) {
    GridFunction out(p.domain());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double pi = p[i];
        SUBVARLAP_REQUIRE(pi > 1.0, ErrorCode::ConjugateInfinite, "conjugate exponent is infinite where p = 1");
        out[i] = pi / (pi - 1.0);
    }
    return ExponentField(std::move(out));
}

ExponentField sobolev_exponent(const ExponentField& p, int q_dim, int order) {
    SUBVARLAP_REQUIRE(order >= 1, ErrorCode::InvalidArgument, "order must be >= 1");
    const double limit = static_cast<double>(q_dim) / order;
    SUBVARLAP_REQUIRE(p.plus() < limit, ErrorCode::SobolevExponentUndefined,
                      "p+ = " + std::to_string(p.plus()) + " is not below Q/order = " + std::to_string(limit));
    GridFunction out(p.domain());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = q_dim * p[i] / (q_dim - order * p[i]);
    return ExponentField(std::move(out));
}

LogHolderResult log_holder_check(const ExponentField& p, const CarnotGroup& g, const LogHolderOptions& opts) {
    const GridDomain& dom = p.domain();
    const std::size_t n = dom.size();
    std::vector<Point> centers(n);
    for (std::size_t i = 0; i < n; ++i) centers[i] = dom.center(i);

    LogHolderResult out;
    auto visit = [&](std::size_t a, std::size_t b) {
        const double d = g.distance(centers[a], centers[b]);
        if (!(d > 0.0 && d < 0.5)) return;
        ++out.pairs;
        const double c = std::abs(p[a] - p[b]) * -std::log(d);
        if (c > out.c0) {
            out.c0 = c;
            out.witness_a = a;
            out.witness_b = b;
        }
    };
    if (n <= opts.exhaustive_limit) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) visit(a, b);
    } else {
        // Random pairs miss the closest straddling pairs, so every cell is
        // also paired with its axis neighbours.
        for (std::size_t a = 0; a < n; ++a) {
            const CellIndex c = dom.unravel(a);
            for (int k = 0; k < dom.dim(); ++k) {
                CellIndex nb = c;
                if (++nb[static_cast<std::size_t>(k)] < dom.cells(k)) visit(a, dom.linear(nb));
            }
        }
        std::mt19937_64 rng(opts.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t s = 0; s < opts.sampled_pairs; ++s) visit(pick(rng), pick(rng));
    }
    out.bounded = out.c0 <= opts.threshold;
    return out;
}

JumpConditionResult jump_condition_check(const ExponentField& p, const CarnotGroup& g, double delta) {
    const GridDomain& dom = p.domain();
    SUBVARLAP_REQUIRE(dom.dim() == g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    SUBVARLAP_REQUIRE(delta > g.cell_scale(dom), ErrorCode::InvalidArgument,
                      "delta must exceed the cell scale " + std::to_string(g.cell_scale(dom)));
    const BallIndex index(dom, g);
    const LineRangeExtremum mins(dom, p.values(), false);
    const LineRangeExtremum maxs(dom, p.values(), true);
    const double q = g.homogeneous_dimension();

    JumpConditionResult out;
    out.local_min.resize(dom.size());
    out.local_max.resize(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        index.for_each_run(dom.center(i), delta, [&](std::size_t first, int count) {
            lo = std::min(lo, mins.query(first, count));
            hi = std::max(hi, maxs.query(first, count));
        });
        out.local_min[i] = lo;
        out.local_max[i] = hi;
        const bool ok = lo >= q || hi <= q * lo / (q - lo) * (1.0 + 1e-12);
        if (!ok) out.failures.push_back(i);
    }
    out.holds = out.failures.empty();
    return out;
}

}  // namespace subvarlap
