#include "carnot/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace carnot {

Grid::Grid(Box box, std::vector<int> dims) : box_(std::move(box)), dims_(std::move(dims))
{
    const int n = static_cast<int>(dims_.size());
    if (n < 1 || n > kMaxDim)
        throw InputError("Grid: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    if (box_.lo.size() != n || box_.hi.size() != n)
        throw InputError("Grid: box dimension does not match dims");
    spacing_.resize(n);
    strides_.assign(static_cast<std::size_t>(n), 1);
    size_ = 1;
    cell_volume_ = 1.0;
    for (int k = n - 1; k >= 0; --k) {
        const int d = dims_[static_cast<std::size_t>(k)];
        if (d < 1)
            throw InputError("Grid: every axis needs at least one node");
        if (!(box_.hi(k) > box_.lo(k)))
            throw InputError("Grid: box must have positive extent on every axis");
        strides_[static_cast<std::size_t>(k)] = size_;
        size_ *= d;
        spacing_(k) = (box_.hi(k) - box_.lo(k)) / d;
        cell_volume_ *= spacing_(k);
    }
}

Grid Grid::with_spacing(const Box& box, const Point& spacing)
{
    const int n = box.dim();
    if (spacing.size() != n)
        throw InputError("Grid::with_spacing: spacing dimension does not match box");
    std::vector<int> dims(static_cast<std::size_t>(n));
    Box grown = box;
    for (int k = 0; k < n; ++k) {
        if (!(spacing(k) > 0.0))
            throw InputError("Grid::with_spacing: spacing must be positive");
        const double width = box.hi(k) - box.lo(k);
        const int d = std::max(1, static_cast<int>(std::ceil(width / spacing(k) - 1e-9)));
        dims[static_cast<std::size_t>(k)] = d;
        const double pad = 0.5 * (d * spacing(k) - width);
        grown.lo(k) -= pad;
        grown.hi(k) += pad;
    }
    return Grid(grown, dims);
}

Point Grid::node(Eigen::Index flat) const
{
    Point p(dim());
    for (int k = 0; k < dim(); ++k)
        p(k) = box_.lo(k) + (index_along(flat, k) + 0.5) * spacing_(k);
    return p;
}

bool Grid::on_boundary(Eigen::Index flat) const
{
    for (int k = 0; k < dim(); ++k) {
        const int i = index_along(flat, k);
        if (i == 0 || i == dims_[static_cast<std::size_t>(k)] - 1)
            return true;
    }
    return false;
}

bool Grid::same_nodes(const Grid& other, double rel_tol) const
{
    if (dims_ != other.dims_)
        return false;
    for (int k = 0; k < dim(); ++k) {
        const double tol = rel_tol * spacing_(k);
        if (std::abs(box_.lo(k) - other.box_.lo(k)) > tol || std::abs(box_.hi(k) - other.box_.hi(k)) > tol)
            return false;
    }
    return true;
}

GridField::GridField(GroupSpec group, Grid grid, Eigen::ArrayXd values, std::optional<Eigen::ArrayXd> density)
    : group_(std::move(group)), grid_(std::move(grid)), values_(std::move(values)), density_(std::move(density))
{
    if (grid_.dim() != group_.n)
        throw InputError("GridField: grid dimension " + std::to_string(grid_.dim()) + " does not match group " +
                         group_.id);
    if (values_.size() != grid_.size())
        throw InputError("GridField: expected " + std::to_string(grid_.size()) + " values, got " +
                         std::to_string(values_.size()));
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        const double v = values_(i);
        if (!std::isfinite(v) || v < 0.0)
            throw InputError("GridField: values must be finite and nonnegative (node " + std::to_string(i) + ")");
        if (v != 0.0 && grid_.on_boundary(i))
            throw InputError("GridField: field does not vanish on the boundary layer (node " + std::to_string(i) +
                             "); enlarge the box");
    }
    if (density_) {
        if (density_->size() != grid_.size())
            throw InputError("GridField: density size does not match the grid");
        for (Eigen::Index i = 0; i < density_->size(); ++i)
            if (!std::isfinite((*density_)(i)) || (*density_)(i) < 0.0)
                throw InputError("GridField: density must be finite and nonnegative");
    }
}

Eigen::ArrayXd GridField::weights() const
{
    if (density_)
        return *density_ * grid_.cell_volume();
    return Eigen::ArrayXd::Constant(grid_.size(), grid_.cell_volume());
}

GridField sample_field(const GroupSpec& g, const Grid& grid, const ScalarFn& f, const ScalarFn& density)
{
    Eigen::ArrayXd values(grid.size());
    std::optional<Eigen::ArrayXd> rho;
    if (density)
        rho.emplace(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const Point p = grid.node(i);
        values(i) = f(p);
        if (rho)
            (*rho)(i) = density(p);
    }
    return GridField(g, grid, std::move(values), std::move(rho));
}

double integrate(const GridField& field, const std::function<double(double)>& phi)
{
    if (phi(0.0) != 0.0)
        throw InputError("integrate: phi(0) must be 0, otherwise the integral over the unbounded complement diverges");
    const Eigen::ArrayXd w = field.weights();
    const Eigen::ArrayXd& u = field.values();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u(i) != 0.0)
            sum += phi(u(i)) * w(i);
    return sum;
}

double superlevel_measure(const GridField& field, double t)
{
    if (!(t >= 0.0))
        throw InputError("superlevel_measure: t must be >= 0");
    const Eigen::ArrayXd w = field.weights();
    const Eigen::ArrayXd& u = field.values();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u(i) > t)
            sum += w(i);
    return sum;
}

double DistributionFunction::operator()(double t) const
{
    if (thresholds.size() == 0)
        throw InputError("DistributionFunction: empty table");
    if (t < 0.0)
        return total_mass;
    if (degenerate() || t >= max_value())
        return measures(measures.size() - 1);
    const double* begin = thresholds.data();
    const double* end = begin + thresholds.size();
    const auto k = std::upper_bound(begin, end, t) - begin - 1;
    return measures(k);
}

DistributionFunction distribution_function(const GridField& field, int levels)
{
    if (levels < 2)
        throw InputError("distribution_function: need at least 2 levels");
    const Eigen::ArrayXd& u = field.values();
    const Eigen::ArrayXd w = field.weights();

    std::vector<Eigen::Index> order;
    order.reserve(static_cast<std::size_t>(u.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u(i) > 0.0)
            order.push_back(i);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return u(a) < u(b) || (u(a) == u(b) && a < b);
    });
    // tail[j] = mass of order[j..]
    std::vector<double> tail(order.size() + 1, 0.0);
    for (std::size_t j = order.size(); j-- > 0;)
        tail[j] = tail[j + 1] + w(order[j]);

    DistributionFunction d;
    d.total_mass = w.sum();
    d.thresholds.resize(levels);
    d.measures.resize(levels);
    const double top = field.max_value();
    for (int k = 0; k < levels; ++k) {
        const double t = k == levels - 1 ? top : top * k / (levels - 1);
        d.thresholds(k) = t;
        const auto it = std::upper_bound(order.begin(), order.end(), t,
                                         [&](double v, Eigen::Index idx) { return v < u(idx); });
        d.measures(k) = tail[static_cast<std::size_t>(it - order.begin())];
    }
    return d;
}

namespace {

bool is_heisenberg(const GroupSpec& g) { return g.id == "heisenberg1"; }

// Per-axis length scale: H^1 fields are squashed in t so that they look alike under the
// gauges, whose unit balls have t-extent 1/4 or less.
Point axis_scale(const GroupSpec& g)
{
    Point s = Point::Ones(g.n);
    if (is_heisenberg(g))
        s(2) = 0.25;
    return s;
}

Point pick(const GroupSpec& g, std::initializer_list<double> xs)
{
    Point p = Point::Zero(g.n);
    int i = 0;
    for (double x : xs) {
        if (i == g.n)
            break;
        p(i++) = x;
    }
    return p.cwiseProduct(axis_scale(g));
}

Box centred_box(const Point& c, const Point& half) { return Box{c - half, c + half}; }

Box hull(const Box& a, const Box& b) { return Box{a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi)}; }

double bump(const Point& x, const Point& c, const Point& s)
{
    const double q = ((x - c).array() / s.array()).square().sum();
    return q < 1.0 ? (1.0 - q) * (1.0 - q) : 0.0;
}

} // namespace

AnalyticField analytic_field(const std::string& name, const GroupSpec& g)
{
    const int n = g.n;
    const Point scale = axis_scale(g);
    AnalyticField f;
    f.name = name;

    if (name == "tent") {
        f.fn = [scale](const Point& x) {
            return std::max(0.0, 1.0 - (x.array() / scale.array()).matrix().norm());
        };
        f.support = centred_box(Point::Zero(n), scale);
    } else if (name == "plateau") {
        f.fn = [scale](const Point& x) {
            const auto z = x.array() / scale.array();
            return (z >= 0.0).all() && (z <= 1.0).all() ? 2.0 : 0.0;
        };
        f.support = Box{Point::Zero(n), scale};
    } else if (name == "two-plateaus") {
        // height 2 on [-2, -1), height 1 on [0.5, 2) along x_0, unit cross-section
        f.fn = [scale, n](const Point& x) {
            for (int k = 1; k < n; ++k)
                if (std::abs(x(k) / scale(k)) > 0.5)
                    return 0.0;
            if (x(0) >= -2.0 && x(0) < -1.0)
                return 2.0;
            if (x(0) >= 0.5 && x(0) < 2.0)
                return 1.0;
            return 0.0;
        };
        Point half = 0.5 * scale;
        half(0) = 2.0;
        f.support = centred_box(Point::Zero(n), half);
    } else if (name == "gaussian") {
        const Point c = pick(g, {0.1, -0.05, 0.08});
        const Point s = pick(g, {0.5, 0.35, 0.45});
        constexpr double qcut = 4.0;
        f.fn = [c, s](const Point& x) {
            const double q = ((x - c).array() / s.array()).square().sum();
            return q < qcut ? std::exp(-q) - std::exp(-qcut) : 0.0;
        };
        f.support = centred_box(c, 2.0 * s);
    } else if (name == "two-bump") {
        const Point c1 = pick(g, {-0.45, 0.1, 0.12});
        const Point s1 = pick(g, {0.4, 0.3, 0.4});
        const Point c2 = pick(g, {0.5, -0.2, -0.16});
        const Point s2 = pick(g, {0.3, 0.45, 0.48});
        f.fn = [=](const Point& x) { return 2.0 * bump(x, c1, s1) + bump(x, c2, s2); };
        f.support = hull(centred_box(c1, s1), centred_box(c2, s2));
    } else if (name == "pyramid") {
        // sheared square pyramid: z_0 = (x_0 - c_0)/a_0, z_k = (x_k - c_k - k_k (x_0 - c_0))/a_k
        const Point c = pick(g, {0.1, -0.1, 0.04});
        const Point a = pick(g, {0.8, 0.5, 0.5});
        const Point shear = pick(g, {0.0, 0.4, -0.3});
        f.fn = [=](const Point& x) {
            const double d0 = x(0) - c(0);
            double m = std::abs(d0) / a(0);
            for (int k = 1; k < x.size(); ++k)
                m = std::max(m, std::abs(x(k) - c(k) - shear(k) * d0) / a(k));
            return std::max(0.0, 1.0 - m);
        };
        Point half = a + shear.cwiseAbs() * a(0);
        half(0) = a(0);
        f.support = centred_box(c, half);
    } else if (name == "zero") {
        f.fn = [](const Point&) { return 0.0; };
        f.support = centred_box(Point::Zero(n), scale);
    } else {
        throw InputError("unknown field builder '" + name + "'");
    }
    return f;
}

std::vector<std::string> analytic_field_names()
{
    return {"tent", "plateau", "two-plateaus", "gaussian", "two-bump", "pyramid", "zero"};
}

Grid grid_around(const Box& support, int nodes)
{
    if (nodes < 5)
        throw InputError("grid_around: need at least 5 nodes per axis");
    const int n = support.dim();
    Box box = support;
    for (int k = 0; k < n; ++k) {
        const double h = (support.hi(k) - support.lo(k)) / (nodes - 4);
        box.lo(k) -= 2.0 * h;
        box.hi(k) += 2.0 * h;
    }
    return Grid(box, std::vector<int>(static_cast<std::size_t>(n), nodes));
}

Grid grid_around_spacing(const Box& support, double h)
{
    if (!(h > 0.0))
        throw InputError("grid_around_spacing: spacing must be positive");
    const double width = support.hi(0) - support.lo(0);
    const int nodes = static_cast<int>(std::ceil(width / h - 1e-9)) + 4;
    return grid_around(support, nodes);
}

double cell_step_percentile(const GridField& field, double q)
{
    const Grid& grid = field.grid();
    const Eigen::ArrayXd& u = field.values();
    std::vector<double> g;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        double best = 0.0;
        for (int k = 0; k < grid.dim(); ++k) {
            const Eigen::Index s = grid.stride(k);
            const int idx = grid.index_along(i, k);
            const int d = grid.dims()[static_cast<std::size_t>(k)];
            const double lo = idx > 0 ? u(i - s) : u(i);
            const double hi = idx < d - 1 ? u(i + s) : u(i);
            const double span = (idx > 0 && idx < d - 1) ? 2.0 : 1.0;
            best = std::max(best, std::abs(hi - lo) / span);
        }
        if (best > 0.0)
            g.push_back(best);
    }
    if (g.empty())
        return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(g.size() - 1)));
    std::nth_element(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(k), g.end());
    return g[k];
}

GridField build_field(const AnalyticField& field, const GroupSpec& g, const Grid& grid, const ScalarFn& density)
{
    return sample_field(g, grid, field.fn, density);
}

} // namespace carnot
