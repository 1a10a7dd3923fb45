#include "carnot/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace carnot {

double VolumeFunction::operator()(double r) const
{
    if (!(r >= 0.0))
        throw InputError("V(r): r must be >= 0");
    if (kind == Kind::homogeneous)
        return c1 * std::pow(r, Q_eff);
    const Eigen::Index last = table_r.size() - 1;
    if (r >= table_r(last))
        return table_v(last);
    const double* begin = table_r.data();
    const auto j = std::upper_bound(begin, begin + table_r.size(), r) - begin;
    const double r0 = table_r(j - 1), r1 = table_r(j);
    const double v0 = table_v(j - 1), v1 = table_v(j);
    return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
}

double VolumeFunction::max_radius() const
{
    return kind == Kind::homogeneous ? std::numeric_limits<double>::infinity() : table_r(table_r.size() - 1);
}

double VolumeFunction::max_volume() const
{
    return kind == Kind::homogeneous ? std::numeric_limits<double>::infinity() : table_v(table_v.size() - 1);
}

Point ball_extent(const Gauge& gauge, double r)
{
    Point e = gauge.unit_ball_extent;
    for (int k = 0; k < e.size(); ++k)
        e(k) *= std::pow(r, gauge.group.dilation_weights[static_cast<std::size_t>(k)]);
    return e;
}

VolumeFunction homogeneous_volume(const Gauge& gauge, double c1, double c1_stderr)
{
    if (!(c1 > 0.0))
        throw InputError("homogeneous_volume: c1 must be positive");
    VolumeFunction V;
    V.kind = VolumeFunction::Kind::homogeneous;
    V.gauge_id = gauge.id;
    V.c1 = c1;
    V.c1_stderr = c1_stderr;
    V.Q_eff = gauge.group.Q;
    return V;
}

VolumeFunction volume_function(const Gauge& gauge, const VolumeOptions& options)
{
    const int n = gauge.group.n;
    // slightly larger than B_1 so boundary points of the ball are never clipped
    const Point half = 1.001 * gauge.unit_ball_extent;
    const Box box{-half, half};
    const double box_vol = box.volume();

    if (options.method == VolumeOptions::Method::monte_carlo) {
        if (options.samples < 1)
            throw InputError("volume_function: samples must be >= 1");
        Rng rng(options.seed);
        std::int64_t inside = 0;
        for (std::int64_t s = 0; s < options.samples; ++s)
            if (gauge.eval(uniform_point(rng, box)) < 1.0)
                ++inside;
        const double f = static_cast<double>(inside) / static_cast<double>(options.samples);
        const double err = box_vol * std::sqrt(f * (1.0 - f) / static_cast<double>(options.samples));
        if (inside == 0)
            throw NumericalError("volume_function: no Monte Carlo sample fell inside B_1");
        return homogeneous_volume(gauge, box_vol * f, err);
    }

    if (options.quadrature_nodes < 2)
        throw InputError("volume_function: quadrature_nodes must be >= 2");
    const Grid grid(box, std::vector<int>(static_cast<std::size_t>(n), options.quadrature_nodes));
    std::int64_t inside = 0;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        if (gauge.eval(grid.node(i)) < 1.0)
            ++inside;
    if (inside == 0)
        throw NumericalError("volume_function: no quadrature node fell inside B_1");
    return homogeneous_volume(gauge, static_cast<double>(inside) * grid.cell_volume());
}

VolumeFunction tabulated_volume(const Gauge& gauge, const Grid& grid, const Eigen::ArrayXd& density)
{
    if (density.size() != grid.size())
        throw InputError("tabulated_volume: density size does not match the grid");
    Eigen::ArrayXd radius(grid.size());
    double r_in = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        radius(i) = gauge.eval(grid.node(i));
        if (grid.on_boundary(i))
            r_in = std::min(r_in, radius(i));
    }
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        if (radius(i) < r_in)
            order.push_back(i);
    if (order.empty())
        throw StructureError("tabulated_volume: no node lies strictly inside the boundary layer");
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return radius(a) < radius(b) || (radius(a) == radius(b) && a < b);
    });

    std::vector<double> rs{0.0}, vs{0.0};
    double cum = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const Eigen::Index i = order[j];
        cum += density(i) * grid.cell_volume();
        const double r = std::max(radius(i), 1e-12 * r_in);
        if (r == rs.back()) {
            vs.back() = cum;
            continue;
        }
        if (!(cum > vs.back()))
            throw StructureError("tabulated_volume: V is flat near r = " + std::to_string(r) +
                                 " (density vanishes on a shell); V must be strictly increasing");
        rs.push_back(r);
        vs.push_back(cum);
    }
    VolumeFunction V;
    V.kind = VolumeFunction::Kind::tabulated;
    V.gauge_id = gauge.id;
    V.table_r = Eigen::Map<Eigen::ArrayXd>(rs.data(), static_cast<Eigen::Index>(rs.size()));
    V.table_v = Eigen::Map<Eigen::ArrayXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
    V.Q_eff = gauge.group.Q;
    // effective exponent from the outer half of the table
    const Eigen::Index last = V.table_r.size() - 1;
    const Eigen::Index mid = last / 2;
    if (mid > 0 && V.table_r(last) > V.table_r(mid))
        V.Q_eff = std::log(V.table_v(last) / V.table_v(mid)) / std::log(V.table_r(last) / V.table_r(mid));
    return V;
}

double volume_inverse(const VolumeFunction& V, double v)
{
    if (!(v >= 0.0))
        throw InputError("volume_inverse: v must be >= 0");
    if (v == 0.0)
        return 0.0;
    if (V.kind == VolumeFunction::Kind::homogeneous)
        return std::pow(v / V.c1, 1.0 / V.Q_eff);
    if (v > V.max_volume() * (1.0 + 1e-12))
        throw InputError("volume_inverse: v = " + std::to_string(v) + " exceeds the tabulated range " +
                         std::to_string(V.max_volume()));
    const double* begin = V.table_v.data();
    const auto j = std::lower_bound(begin, begin + V.table_v.size(), v) - begin;
    if (j >= V.table_v.size())
        return V.max_radius();
    const double v0 = V.table_v(j - 1), v1 = V.table_v(j);
    const double r0 = V.table_r(j - 1), r1 = V.table_r(j);
    return r0 + (r1 - r0) * (v - v0) / (v1 - v0);
}

namespace {

// Largest k with measures(k) > v, or -1.
Eigen::Index last_above(const DistributionFunction& dist, double v)
{
    // measures is nonincreasing: find the first index with measures <= v
    Eigen::Index lo = 0, hi = dist.measures.size();
    while (lo < hi) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (dist.measures(mid) > v)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo - 1;
}

} // namespace

double nu_tilde(const DistributionFunction& dist, const VolumeFunction& V, double r)
{
    if (!(r >= 0.0))
        throw InputError("nu_tilde: r must be >= 0");
    if (dist.degenerate())
        return 0.0;
    // nu is constant on [t_k, t_{k+1}), so the sup over that interval is its right end
    const Eigen::Index k = last_above(dist, V(r));
    return k < 0 ? 0.0 : dist.thresholds(std::min(k + 1, static_cast<Eigen::Index>(dist.levels() - 1)));
}

Eigen::ArrayXd sample_profile(const DistributionFunction& dist, const VolumeFunction& V, const Eigen::ArrayXd& radii)
{
    Eigen::ArrayXd out(radii.size());
    for (Eigen::Index j = 0; j < radii.size(); ++j)
        out(j) = nu_tilde(dist, V, radii(j));
    return out;
}

double ProfileDerivative::psi_at(double v) const
{
    // segments are stored by increasing radius, so value_lo/value_hi decrease with j
    for (Eigen::Index lo = 0, hi = psi.size(); lo < hi;) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (v >= value_hi(mid))
            hi = mid;
        else if (v < value_lo(mid))
            lo = mid + 1;
        else
            return psi(mid);
    }
    return 0.0;
}

double ProfileDerivative::slope_at(double r) const
{
    const double* begin = r_left.data();
    const auto j = std::upper_bound(begin, begin + r_left.size(), r) - begin - 1;
    if (j < 0 || r >= r_right(j))
        return 0.0;
    return slope(j);
}

ProfileDerivative profile_derivative(const RearrangementProfile& profile)
{
    ProfileDerivative d;
    const Eigen::Index n = profile.radii.size();
    std::vector<double> rl, rr, sl, lo, hi, ps;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const double dr = profile.radii(j + 1) - profile.radii(j);
        const double dv = profile.profile(j + 1) - profile.profile(j);
        if (dr < 0.0 || dv > 0.0)
            throw InputError("profile_derivative: radii must increase and the profile must not increase");
        if (dr == 0.0) {
            if (dv != 0.0)
                ++d.jumps;
            continue;
        }
        rl.push_back(profile.radii(j));
        rr.push_back(profile.radii(j + 1));
        sl.push_back(dv / dr);
        lo.push_back(profile.profile(j + 1));
        hi.push_back(profile.profile(j));
        ps.push_back(-dv / dr);
    }
    auto to_array = [](const std::vector<double>& v) {
        return Eigen::ArrayXd(Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    d.r_left = to_array(rl);
    d.r_right = to_array(rr);
    d.slope = to_array(sl);
    d.value_lo = to_array(lo);
    d.value_hi = to_array(hi);
    d.psi = to_array(ps);
    return d;
}

namespace {

RearrangementProfile make_profile(std::vector<double> rs, std::vector<double> ts)
{
    RearrangementProfile p;
    p.radii = Eigen::Map<Eigen::ArrayXd>(rs.data(), static_cast<Eigen::Index>(rs.size()));
    p.profile = Eigen::Map<Eigen::ArrayXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
    // monotone up to interpolation roundoff in V^{-1}
    for (Eigen::Index j = 1; j < p.radii.size(); ++j)
        p.radii(j) = std::max(p.radii(j), p.radii(j - 1));
    p.support_radius = p.radii(p.radii.size() - 1);
    return p;
}

// Points (V^{-1}(nu_k), t_k) from the top threshold down; nu_{K-1} = 0 gives (0, max u).
RearrangementProfile build_profile(const DistributionFunction& dist, const VolumeFunction& V)
{
    if (dist.degenerate() || dist.measures(0) <= 0.0)
        return {};
    std::vector<double> rs, ts;
    for (int k = dist.levels() - 1; k >= 0; --k) {
        rs.push_back(volume_inverse(V, dist.measures(k)));
        ts.push_back(dist.thresholds(k));
    }
    return make_profile(std::move(rs), std::move(ts));
}

// Same profile from the window average (1/d) int_{t-d/2}^{t+d/2} nu(s) ds, the window
// shrinking near 0 and max u so it never leaves [0, max u]. Averaging over a few cells
// removes the lattice noise of node counts that otherwise dominates the slopes.
RearrangementProfile smoothed_profile(const GridField& field, const VolumeFunction& V, double top, double width,
                                      int segments)
{
    const Eigen::ArrayXd w = field.weights();
    const Eigen::ArrayXd& u = field.values();
    std::vector<double> rs, ts;
    for (int j = segments; j >= 0; --j) {
        const double t = top * j / segments;
        const double d = std::min({width, 2.0 * t, 2.0 * (top - t)});
        const double nu = d > 0.0 ? (((u - t) / d + 0.5).max(0.0).min(1.0) * w).sum() : ((u > t).cast<double>() * w).sum();
        rs.push_back(volume_inverse(V, std::min(nu, V.max_volume())));
        ts.push_back(t);
    }
    return make_profile(std::move(rs), std::move(ts));
}

Rearrangement finish(const GridField& field, const Gauge& gauge, const VolumeFunction& V, const Grid& out_grid,
                     std::optional<Eigen::ArrayXd> out_density, DistributionFunction dist,
                     const RearrangeOptions& options)
{
    const double nu0 = dist.degenerate() ? 0.0 : dist.measures(0);
    const double support_radius = nu0 > 0.0 ? volume_inverse(V, nu0) : 0.0;

    Eigen::ArrayXd values(out_grid.size());
    for (Eigen::Index i = 0; i < out_grid.size(); ++i) {
        values(i) = nu_tilde(dist, V, gauge.eval(out_grid.node(i)));
        if (values(i) != 0.0 && out_grid.on_boundary(i))
            throw TruncationError("rearrange_field: the output box cannot hold B_R with R = " +
                                      std::to_string(support_radius),
                                  support_radius);
    }

    RearrangementProfile profile = build_profile(dist, V);
    ProfileDerivative derivative;
    if (!profile.empty()) {
        const int segments = std::max(1, std::min(options.psi_segments, dist.levels() - 1));
        const double width = options.psi_smoothing_cells * cell_step_percentile(field);
        derivative = profile_derivative(
            width > 0.0 ? smoothed_profile(field, V, dist.max_value(), width, segments) : profile);
    }
    return Rearrangement{GridField(field.group(), out_grid, std::move(values), std::move(out_density)),
                         std::move(profile), std::move(derivative), std::move(dist), V};
}

void check_pairing(const GridField& field, const Gauge& gauge, const RearrangeOptions& options)
{
    if (gauge.group.id != field.group().id)
        throw InputError("rearrange_field: gauge lives on " + gauge.group.id + ", field on " + field.group().id);
    if (options.levels < 2)
        throw InputError("rearrange_field: levels must be >= 2");
}

} // namespace

Rearrangement rearrange_field(const GridField& field, const Gauge& gauge, const VolumeFunction& volume,
                              const RearrangeOptions& options)
{
    check_pairing(field, gauge, options);
    if (field.density())
        throw InputError("rearrange_field: weighted fields need a tabulated volume; use rearrange_weighted");
    if (volume.kind != VolumeFunction::Kind::homogeneous)
        throw InputError("rearrange_field: expected a homogeneous volume function");
    DistributionFunction dist = distribution_function(field, options.levels);
    const double nu0 = dist.degenerate() ? 0.0 : dist.measures(0);
    const double support_radius = nu0 > 0.0 ? volume_inverse(volume, nu0) : 0.0;
    const Point h = field.grid().spacing();

    Grid out_grid;
    if (options.out_box) {
        out_grid = Grid::with_spacing(*options.out_box, h);
    } else {
        const Point half = ball_extent(gauge, support_radius);
        const int n = field.grid().dim();
        std::vector<int> dims(static_cast<std::size_t>(n));
        Box box{Point(n), Point(n)};
        for (int k = 0; k < n; ++k) {
            const int per_side = static_cast<int>(std::ceil(half(k) / h(k) - 1e-9)) + 2;
            dims[static_cast<std::size_t>(k)] = 2 * per_side;
            box.lo(k) = -per_side * h(k);
            box.hi(k) = per_side * h(k);
        }
        out_grid = Grid(box, dims);
    }
    return finish(field, gauge, volume, out_grid, std::nullopt, std::move(dist), options);
}

Rearrangement rearrange_weighted(const GridField& field, const Gauge& gauge, const RearrangeOptions& options)
{
    check_pairing(field, gauge, options);
    if (!field.density())
        throw InputError("rearrange_weighted: field has no density");
    Grid out_grid = options.out_box ? Grid::with_spacing(*options.out_box, field.grid().spacing()) : field.grid();
    Eigen::ArrayXd rho;
    if (out_grid.same_nodes(field.grid())) {
        rho = *field.density();
    } else {
        if (!options.out_density)
            throw InputError("rearrange_weighted: out_density is required when the output grid differs from the input");
        rho.resize(out_grid.size());
        for (Eigen::Index i = 0; i < out_grid.size(); ++i)
            rho(i) = options.out_density(out_grid.node(i));
    }
    const VolumeFunction V = tabulated_volume(gauge, out_grid, rho);
    DistributionFunction dist = distribution_function(field, options.levels);
    const double nu0 = dist.degenerate() ? 0.0 : dist.measures(0);
    if (nu0 > V.max_volume() * (1.0 + 1e-12))
        throw TruncationError("rearrange_weighted: mu({u > 0}) exceeds the measure of the largest ball inside the "
                              "output box",
                              V.max_radius());
    return finish(field, gauge, V, out_grid, std::move(rho), std::move(dist), options);
}

AnalyticField gauge_cone(const Gauge& gauge, double height, double radius)
{
    if (!(height >= 0.0) || !(radius > 0.0))
        throw InputError("gauge_cone: need height >= 0 and radius > 0");
    AnalyticField f;
    f.name = "cone";
    auto eval = gauge.eval;
    f.fn = [eval, height, radius](const Point& x) { return height * std::max(0.0, 1.0 - eval(x) / radius); };
    const Point half = ball_extent(gauge, radius);
    f.support = Box{-half, half};
    return f;
}

} // namespace carnot
