#include "subvarlap/carnot.hpp"

#include <cmath>
#include <numbers>

#include "subvarlap/ball_index.hpp"
#include "subvarlap/error.hpp"

namespace subvarlap {

CarnotGroup CarnotGroup::heisenberg1() {
    CarnotGroup g;
    g.kind_ = Kind::Heisenberg1;
    g.dim_ = 3;
    g.layers_ = {2, 1};
    g.q_ = 4;
    // The Korányi gauge with this normalisation is a genuine metric.
    g.k_ = 1.0;
    return g;
}

CarnotGroup CarnotGroup::euclidean(int n) {
    SUBVARLAP_REQUIRE(n >= 1 && n <= kMaxDim, ErrorCode::InvalidArgument, "euclidean dimension must be 1..3");
    CarnotGroup g;
    g.kind_ = Kind::Euclidean;
    g.dim_ = n;
    g.layers_ = {n};
    g.q_ = n;
    g.k_ = 1.0;
    return g;
}

CarnotGroup CarnotGroup::from_id(const std::string& id) {
    if (id == "h1") return heisenberg1();
    if (id.size() == 2 && id[0] == 'r' && id[1] >= '1' && id[1] <= '3') return euclidean(id[1] - '0');
    throw Error(ErrorCode::InvalidArgument, "unknown group id '" + id + "'");
}

std::string CarnotGroup::id() const {
    return kind_ == Kind::Heisenberg1 ? "h1" : "r" + std::to_string(dim_);
}

int CarnotGroup::layer_of_axis(int k) const {
    if (kind_ == Kind::Heisenberg1) return k < 2 ? 1 : 2;
    return 1;
}

void CarnotGroup::check(const Point& a) const {
    SUBVARLAP_REQUIRE(a.dim() == dim_, ErrorCode::InvalidArgument,
                      "point has dimension " + std::to_string(a.dim()) + ", group " + id() + " needs " +
                          std::to_string(dim_));
}

Point CarnotGroup::multiply(const Point& a, const Point& b) const {
    check(a);
    check(b);
    Point out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = a[k] + b[k];
    if (kind_ == Kind::Heisenberg1) out[2] += 0.5 * (a[0] * b[1] - a[1] * b[0]);
    return out;
}

Point CarnotGroup::inverse(const Point& a) const {
    check(a);
    Point out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = -a[k];
    return out;
}

Point CarnotGroup::dilate(const Point& a, double eps) const {
    check(a);
    SUBVARLAP_REQUIRE(eps > 0.0, ErrorCode::InvalidArgument, "dilation factor must be positive");
    Point out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = std::pow(eps, layer_of_axis(k)) * a[k];
    return out;
}

double CarnotGroup::gauge(const Point& a) const {
    check(a);
    if (kind_ == Kind::Heisenberg1) {
        const double rho2 = a[0] * a[0] + a[1] * a[1];
        return std::pow(rho2 * rho2 + 16.0 * a[2] * a[2], 0.25);
    }
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) s += a[k] * a[k];
    return std::sqrt(s);
}

double CarnotGroup::distance(const Point& a, const Point& b) const {
    if (kind_ == Kind::Heisenberg1) {
        const double dx = b[0] - a[0];
        const double dy = b[1] - a[1];
        const double dt = b[2] - a[2] - 0.5 * (a[0] * b[1] - a[1] * b[0]);
        const double rho2 = dx * dx + dy * dy;
        return std::pow(rho2 * rho2 + 16.0 * dt * dt, 0.25);
    }
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) s += (b[k] - a[k]) * (b[k] - a[k]);
    return std::sqrt(s);
}

double CarnotGroup::ball_volume(double r) const {
    using std::numbers::pi;
    if (kind_ == Kind::Heisenberg1) return pi * pi * r * r * r * r / 8.0;
    switch (dim_) {
        case 1: return 2.0 * r;
        case 2: return pi * r * r;
        default: return 4.0 * pi * r * r * r / 3.0;
    }
}

std::optional<std::pair<double, double>> CarnotGroup::last_axis_interval(const Point& center, const Point& b,
                                                                        double r) const {
    if (kind_ == Kind::Heisenberg1) {
        const double dx = b[0] - center[0];
        const double dy = b[1] - center[1];
        const double rho2 = dx * dx + dy * dy;
        const double r4 = r * r * r * r;
        if (rho2 * rho2 >= r4) return std::nullopt;
        const double half = std::sqrt(r4 - rho2 * rho2) / 4.0;
        const double mid = center[2] + 0.5 * (center[0] * b[1] - center[1] * b[0]);
        return std::pair{mid, half};
    }
    double s = 0.0;
    for (int k = 0; k + 1 < dim_; ++k) s += (b[k] - center[k]) * (b[k] - center[k]);
    if (s >= r * r) return std::nullopt;
    return std::pair{center[dim_ - 1], std::sqrt(r * r - s)};
}

std::vector<double> CarnotGroup::bounding_half_extents(const Point& center, double r) const {
    std::vector<double> ext(static_cast<std::size_t>(dim_), r);
    if (kind_ == Kind::Heisenberg1) ext[2] = r * r / 4.0 + 0.5 * (std::abs(center[0]) + std::abs(center[1])) * r;
    return ext;
}

double CarnotGroup::cell_scale(const GridDomain& dom) const {
    if (kind_ == Kind::Heisenberg1)
        return std::min({dom.spacing(0), dom.spacing(1), 2.0 * std::sqrt(dom.spacing(2))});
    return dom.min_spacing();
}

Point group_multiply(const Point& a, const Point& b, const CarnotGroup& g) { return g.multiply(a, b); }
Point dilate(const Point& a, double eps, const CarnotGroup& g) { return g.dilate(a, eps); }

double homogeneous_quasi_distance(const Point& a, const Point& b, const CarnotGroup& g) {
    g.check(a);
    g.check(b);
    return g.distance(a, b);
}

BallMeasure ball_measure(const Point& center, double r, const CarnotGroup& g, const GridDomain& dom) {
    g.check(center);
    SUBVARLAP_REQUIRE(r > 0.0, ErrorCode::InvalidArgument, "ball radius must be positive");
    SUBVARLAP_REQUIRE(dom.dim() == g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    BallMeasure out;
    if (r < 0.5 * g.cell_scale(dom)) {
        out.degenerate = true;
        return out;
    }
    out.cells = BallIndex(dom, g).count(center, r);
    out.measure = static_cast<double>(out.cells) * dom.cell_measure();
    out.degenerate = out.cells == 0;
    return out;
}

GridFunction axis_derivative(const GridFunction& f, int axis) {
    const GridDomain& dom = f.domain();
    const int n = dom.cells(axis);
    SUBVARLAP_REQUIRE(n >= 3, ErrorCode::InvalidArgument, "finite differences need at least 3 cells per axis");
    std::size_t stride = 1;
    for (int k = dom.dim() - 1; k > axis; --k) stride *= static_cast<std::size_t>(dom.cells(k));
    const double h = dom.spacing(axis);
    GridFunction out(dom);
    const auto v = f.values();
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const int a = static_cast<int>((i / stride) % static_cast<std::size_t>(n));
        if (a == 0)
            out[i] = (v[i + stride] - v[i]) / h;
        else if (a == n - 1)
            out[i] = (v[i] - v[i - stride]) / h;
        else
            out[i] = (v[i + stride] - v[i - stride]) / (2.0 * h);
    }
    return out;
}

std::vector<GridFunction> horizontal_gradient(const GridFunction& f, const CarnotGroup& g) {
    const GridDomain& dom = f.domain();
    SUBVARLAP_REQUIRE(dom.dim() == g.dim(), ErrorCode::InvalidArgument, "grid and group dimensions differ");
    for (int k = 0; k < dom.dim(); ++k)
        SUBVARLAP_REQUIRE(dom.cells(k) >= 3, ErrorCode::InvalidArgument,
                          "horizontal gradient needs at least 3 cells per axis");
    std::vector<GridFunction> out;
    if (g.kind() == CarnotGroup::Kind::Heisenberg1) {
        GridFunction dx = axis_derivative(f, 0);
        GridFunction dy = axis_derivative(f, 1);
        const GridFunction dt = axis_derivative(f, 2);
        for (std::size_t i = 0; i < dom.size(); ++i) {
            const CellIndex c = dom.unravel(i);
            const double x = dom.center_coord(0, c[0]);
            const double y = dom.center_coord(1, c[1]);
            dx[i] -= 0.5 * y * dt[i];
            dy[i] += 0.5 * x * dt[i];
        }
        out.push_back(std::move(dx));
        out.push_back(std::move(dy));
    } else {
        for (int k = 0; k < dom.dim(); ++k) out.push_back(axis_derivative(f, k));
    }
    return out;
}

GridFunction pointwise_norm(const std::vector<GridFunction>& components) {
    SUBVARLAP_REQUIRE(!components.empty(), ErrorCode::InvalidArgument, "no components");
    GridFunction out(components.front().domain());
    for (const auto& c : components)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i] * c[i];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(out[i]);
    return out;
}

GridFunction higher_order_gradient(const GridFunction& f, int m, const CarnotGroup& g) {
    if (m == 1) return pointwise_norm(horizontal_gradient(f, g));
    SUBVARLAP_REQUIRE(m == 2, ErrorCode::UnsupportedOrder, "order must be 1 or 2");
    const auto first = horizontal_gradient(f, g);
    std::vector<GridFunction> terms;
    const auto n1 = first.size();
    for (std::size_t j = 0; j < n1; ++j) {
        // X_i X_j f for i <= j: apply X_j first.
        const auto second = horizontal_gradient(first[j], g);
        for (std::size_t i = 0; i <= j; ++i) terms.push_back(second[i]);
    }
    if (g.kind() == CarnotGroup::Kind::Heisenberg1) terms.push_back(axis_derivative(f, 2));
    return pointwise_norm(terms);
}

}  // namespace subvarlap
