#include "subvarlap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "subvarlap/error.hpp"

namespace subvarlap {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::UnsupportedOrder: return "unsupported-order";
        case ErrorCode::ConjugateInfinite: return "conjugate-infinite";
        case ErrorCode::SobolevExponentUndefined: return "sobolev-exponent-undefined";
        case ErrorCode::InvalidExponentPair: return "invalid-exponent-pair";
        case ErrorCode::InvalidWeight: return "invalid-weight";
        case ErrorCode::IncompleteFamily: return "incomplete-family";
        case ErrorCode::NormEstimateTooSmall: return "norm-estimate-too-small";
        case ErrorCode::InvalidState: return "invalid-state";
        case ErrorCode::VacuousReport: return "vacuous-report";
        case ErrorCode::ParseError: return "parse-error";
    }
    return "unknown";
}

Point::Point(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
    SUBVARLAP_REQUIRE(dim_ >= 1 && dim_ <= kMaxDim, ErrorCode::InvalidArgument, "point dimension must be 1..3");
    std::copy(coords.begin(), coords.end(), c_.begin());
}

GridDomain::GridDomain(std::vector<double> lo, std::vector<double> hi, std::vector<int> cells)
    : lo_(std::move(lo)), hi_(std::move(hi)), n_(std::move(cells)) {
    dim_ = static_cast<int>(lo_.size());
    SUBVARLAP_REQUIRE(dim_ >= 1 && dim_ <= kMaxDim, ErrorCode::InvalidArgument, "grid dimension must be 1..3");
    SUBVARLAP_REQUIRE(hi_.size() == lo_.size() && n_.size() == lo_.size(), ErrorCode::InvalidArgument,
                      "bounds and resolution must have the same length");
    size_ = 1;
    cell_measure_ = 1.0;
    h_.resize(lo_.size());
    for (std::size_t k = 0; k < lo_.size(); ++k) {
        SUBVARLAP_REQUIRE(hi_[k] > lo_[k], ErrorCode::InvalidArgument, "empty axis interval");
        SUBVARLAP_REQUIRE(n_[k] >= 1, ErrorCode::InvalidArgument, "resolution must be positive");
        h_[k] = (hi_[k] - lo_[k]) / n_[k];
        cell_measure_ *= h_[k];
        size_ *= static_cast<std::size_t>(n_[k]);
    }
}

GridDomain GridDomain::node_aligned(const std::vector<double>& lo, const std::vector<double>& hi,
                                    const std::vector<int>& intervals) {
    std::vector<double> l(lo.size()), u(lo.size());
    std::vector<int> n(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) {
        SUBVARLAP_REQUIRE(intervals[k] >= 1, ErrorCode::InvalidArgument, "intervals must be positive");
        const double h = (hi[k] - lo[k]) / intervals[k];
        l[k] = lo[k] - 0.5 * h;
        u[k] = hi[k] + 0.5 * h;
        n[k] = intervals[k] + 1;
    }
    GridDomain out(l, u, n);
    out.node_aligned_ = true;
    return out;
}

std::size_t GridDomain::linear(const CellIndex& idx) const {
    std::size_t lin = 0;
    for (int k = 0; k < dim_; ++k) lin = lin * static_cast<std::size_t>(cells(k)) + static_cast<std::size_t>(idx[k]);
    return lin;
}

CellIndex GridDomain::unravel(std::size_t linear) const {
    CellIndex idx{};
    for (int k = dim_ - 1; k >= 0; --k) {
        const auto n = static_cast<std::size_t>(cells(k));
        idx[static_cast<std::size_t>(k)] = static_cast<int>(linear % n);
        linear /= n;
    }
    return idx;
}

Point GridDomain::center(const CellIndex& idx) const {
    Point p(dim_);
    for (int k = 0; k < dim_; ++k) p[k] = center_coord(k, idx[static_cast<std::size_t>(k)]);
    return p;
}

Point GridDomain::center(std::size_t linear) const { return center(unravel(linear)); }

Point GridDomain::midpoint() const {
    Point p(dim_);
    for (int k = 0; k < dim_; ++k) p[k] = 0.5 * (lo(k) + hi(k));
    return p;
}

CellIndex GridDomain::nearest_cell(const Point& p) const {
    CellIndex idx{};
    for (int k = 0; k < dim_; ++k) {
        const int i = static_cast<int>(std::floor((p[k] - lo(k)) / spacing(k)));
        idx[static_cast<std::size_t>(k)] = std::clamp(i, 0, cells(k) - 1);
    }
    return idx;
}

bool GridDomain::is_boundary(const CellIndex& idx) const {
    for (int k = 0; k < dim_; ++k) {
        const int i = idx[static_cast<std::size_t>(k)];
        if (i == 0 || i == cells(k) - 1) return true;
    }
    return false;
}

double GridDomain::min_spacing() const { return *std::min_element(h_.begin(), h_.end()); }
double GridDomain::max_spacing() const { return *std::max_element(h_.begin(), h_.end()); }

GridDomain GridDomain::refined(int factor) const {
    SUBVARLAP_REQUIRE(factor >= 1, ErrorCode::InvalidArgument, "refinement factor must be >= 1");
    if (node_aligned_) {
        std::vector<double> lo(lo_.size()), hi(hi_.size());
        std::vector<int> intervals(n_.size());
        for (std::size_t k = 0; k < n_.size(); ++k) {
            lo[k] = lo_[k] + 0.5 * h_[k];
            hi[k] = hi_[k] - 0.5 * h_[k];
            intervals[k] = (n_[k] - 1) * factor;
        }
        return node_aligned(lo, hi, intervals);
    }
    std::vector<int> n = n_;
    for (auto& c : n) c *= factor;
    return {lo_, hi_, n};
}

GridFunction::GridFunction(GridDomain dom, double fill) : dom_(std::move(dom)), v_(dom_.size(), fill) {}

GridFunction::GridFunction(GridDomain dom, std::vector<double> values) : dom_(std::move(dom)), v_(std::move(values)) {
    SUBVARLAP_REQUIRE(v_.size() == dom_.size(), ErrorCode::InvalidArgument, "value count does not match grid");
}

GridFunction GridFunction::sample(const GridDomain& dom, const std::function<double(const Point&)>& fn) {
    GridFunction out(dom);
    for (std::size_t i = 0; i < dom.size(); ++i) out.v_[i] = fn(dom.center(i));
    return out;
}

bool GridFunction::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double GridFunction::min() const { return *std::min_element(v_.begin(), v_.end()); }
double GridFunction::max() const { return *std::max_element(v_.begin(), v_.end()); }

double GridFunction::sup_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

double GridFunction::integral() const {
    return std::accumulate(v_.begin(), v_.end(), 0.0) * dom_.cell_measure();
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    SUBVARLAP_REQUIRE(o.size() == size(), ErrorCode::InvalidArgument, "shape mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    SUBVARLAP_REQUIRE(o.size() == size(), ErrorCode::InvalidArgument, "shape mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
}

GridFunction GridFunction::abs() const {
    return map([](double x) { return std::abs(x); });
}

GridFunction GridFunction::map(const std::function<double(double)>& fn) const {
    GridFunction out(dom_);
    for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = fn(v_[i]);
    return out;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction operator*(GridFunction a, const GridFunction& b) {
    SUBVARLAP_REQUIRE(a.size() == b.size(), ErrorCode::InvalidArgument, "shape mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    return a;
}

}  // namespace subvarlap
