#include "subvarlap/ball_family.hpp"

#include <cmath>

#include "subvarlap/error.hpp"

namespace subvarlap {

double gauge_diameter(const GridDomain& dom, const CarnotGroup& g) {
    const int d = dom.dim();
    const int corners = 1 << d;
    double diam = 0.0;
    for (int a = 0; a < corners; ++a) {
        for (int b = 0; b < corners; ++b) {
            Point pa(d), pb(d);
            for (int k = 0; k < d; ++k) {
                pa[k] = (a >> k & 1) ? dom.hi(k) : dom.lo(k);
                pb[k] = (b >> k & 1) ? dom.hi(k) : dom.lo(k);
            }
            diam = std::max(diam, g.distance(pa, pb));
        }
    }
    return diam;
}

BallFamily BallFamily::grid_dyadic(const GridDomain& dom, const CarnotGroup& g, int enrichment) {
    SUBVARLAP_REQUIRE(enrichment >= 0 && enrichment <= 6, ErrorCode::InvalidArgument, "enrichment must be 0..6");
    BallFamily fam;
    fam.policy_ = Policy::GridDyadic;
    fam.enrichment_ = enrichment;
    const double r0 = 0.5 * g.cell_scale(dom) * (1.0 + 1e-9);
    const double diam = gauge_diameter(dom, g);
    const double step = std::pow(2.0, 1.0 / static_cast<double>(1 << enrichment));
    for (double r = r0;; r *= step) {
        fam.radii_.push_back(r);
        if (r > diam) break;
    }
    return fam;
}

BallFamily BallFamily::explicit_balls(std::vector<Ball> balls) {
    BallFamily fam;
    fam.policy_ = Policy::Explicit;
    for (const auto& b : balls)
        SUBVARLAP_REQUIRE(b.radius > 0.0, ErrorCode::InvalidArgument, "ball radius must be positive");
    fam.balls_ = std::move(balls);
    return fam;
}

std::string BallFamily::id() const {
    if (policy_ == Policy::GridDyadic) return "grid-dyadic-e" + std::to_string(enrichment_);
    return "explicit-" + std::to_string(balls_.size());
}

bool BallFamily::empty() const noexcept {
    return policy_ == Policy::Explicit ? balls_.empty() : radii_.empty();
}

std::size_t BallFamily::size(const GridDomain& dom) const {
    return policy_ == Policy::Explicit ? balls_.size() : dom.size() * radii_.size();
}

}  // namespace subvarlap
