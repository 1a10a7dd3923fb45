#include "carnot/horizontal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace carnot {

HorizontalOperator::HorizontalOperator(const Grid& grid, const GroupSpec& g) : grid_(grid), n_(g.n), m_(g.m)
{
    if (grid.dim() != g.n)
        throw InputError("horizontal operator: grid dimension does not match group " + g.id);
    for (int d : grid.dims())
        if (d < 3)
            throw InputError("horizontal operator: need at least 3 nodes per axis");
    coeff_.resize(grid.size(), n_ * m_);
    identity_frame_ = n_ == m_;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const Frame f = g.frame(grid.node(i));
        for (int j = 0; j < n_; ++j)
            for (int c = 0; c < m_; ++c) {
                const double a = f(j, c);
                coeff_(i, j * m_ + c) = a;
                if (a != (j == c ? 1.0 : 0.0))
                    identity_frame_ = false;
            }
    }
}

Eigen::ArrayXXd HorizontalOperator::partials(const Eigen::ArrayXd& v) const
{
    if (v.size() != grid_.size())
        throw InputError("horizontal operator: value count does not match the grid");
    Eigen::ArrayXXd P(grid_.size(), n_);
    for (int k = 0; k < n_; ++k) {
        const Eigen::Index s = grid_.stride(k);
        const int d = grid_.dims()[static_cast<std::size_t>(k)];
        const double h = grid_.spacing()(k);
        for (Eigen::Index i = 0; i < grid_.size(); ++i) {
            const int idx = grid_.index_along(i, k);
            if (idx == 0)
                P(i, k) = (v(i + s) - v(i)) / h;
            else if (idx == d - 1)
                P(i, k) = (v(i) - v(i - s)) / h;
            else
                P(i, k) = (v(i + s) - v(i - s)) / (2.0 * h);
        }
    }
    return P;
}

Eigen::ArrayXXd HorizontalOperator::gradient(const Eigen::ArrayXd& v) const
{
    Eigen::ArrayXXd P = partials(v);
    if (identity_frame_)
        return P;
    Eigen::ArrayXXd G = Eigen::ArrayXXd::Zero(grid_.size(), m_);
    for (int j = 0; j < n_; ++j)
        for (int c = 0; c < m_; ++c)
            G.col(c) += coeff_.col(j * m_ + c) * P.col(j);
    return G;
}

Eigen::ArrayXd HorizontalOperator::gradient_norm(const Eigen::ArrayXd& v) const
{
    return gradient(v).square().rowwise().sum().sqrt();
}

double HorizontalOperator::energy(const Eigen::ArrayXd& v, double p) const
{
    if (!(p >= 1.0))
        throw InputError("energy: p must be >= 1");
    const Eigen::ArrayXd sq = gradient(v).square().rowwise().sum();
    double sum = 0.0;
    if (p == 2.0)
        sum = sq.sum();
    else if (p == 1.0)
        sum = sq.sqrt().sum();
    else
        sum = sq.pow(0.5 * p).sum();
    return sum * grid_.cell_volume();
}

Eigen::ArrayXd HorizontalOperator::divergence(const Eigen::ArrayXXd& F) const
{
    if (F.rows() != grid_.size() || F.cols() != m_)
        throw InputError("divergence: expected one column per frame field");
    Eigen::ArrayXd div = Eigen::ArrayXd::Zero(grid_.size());
    for (int c = 0; c < m_; ++c) {
        const Eigen::ArrayXXd P = partials(F.col(c));
        for (int j = 0; j < n_; ++j)
            div += coeff_.col(j * m_ + c) * P.col(j);
    }
    return div;
}

HorizontalGradientField horizontal_gradient(const GridField& field, const GroupSpec& g)
{
    const HorizontalOperator op(field.grid(), g);
    return HorizontalGradientField{field.grid(), op.gradient(field.values())};
}

double bv_norm(const GridField& field, const GroupSpec& g) { return energy_p(field, g, 1.0); }

double energy_p(const GridField& field, const GroupSpec& g, double p)
{
    const HorizontalOperator op(field.grid(), g);
    return op.energy(field.values(), p);
}

const char* to_string(PerimeterMethod m)
{
    return m == PerimeterMethod::mollified_bv ? "mollified-bv" : "coarea-slice";
}

namespace {

double max_spacing(const Grid& grid) { return grid.spacing().maxCoeff(); }

Eigen::ArrayXd ramp(const Eigen::ArrayXd& u, double lo, double hi)
{
    return ((u - lo) / (hi - lo)).max(0.0).min(1.0);
}

} // namespace

double level_window(const GridField& field, double eps_cells)
{
    if (!(eps_cells >= 2.0))
        throw InputError("level window: eps must span at least 2 cells");
    return eps_cells * cell_step_percentile(field, 0.95);
}

PerimeterEstimate perimeter_on_band(const HorizontalOperator& op, const Eigen::ArrayXd& u, double lo, double hi,
                                    PerimeterMethod method)
{
    PerimeterEstimate est;
    est.method = method;
    est.spacing = max_spacing(op.grid());
    est.eps = hi - lo;
    est.level_lo = lo;
    est.level_hi = hi;
    if (!(hi > lo))
        return est;
    if (method == PerimeterMethod::mollified_bv) {
        est.value = op.energy(ramp(u, lo, hi), 1.0);
    } else {
        const double upper = op.energy(u.min(hi), 1.0);
        const double lower = op.energy(u.min(lo), 1.0);
        est.value = std::max(0.0, (upper - lower) / (hi - lo));
    }
    return est;
}

namespace {

std::pair<double, double> centred_band(double t, double w, double top)
{
    return {std::max(0.0, t - 0.5 * w), std::min(top, t + 0.5 * w)};
}

double window_for(const GridField& field, const PerimeterOptions& options)
{
    return options.window > 0.0 ? options.window : level_window(field, options.eps_cells);
}

} // namespace

PerimeterEstimate horizontal_perimeter(const GridField& field, double t, const GroupSpec& g,
                                       const PerimeterOptions& options)
{
    if (!(t >= 0.0))
        throw InputError("horizontal_perimeter: t must be >= 0");
    const double top = field.max_value();
    PerimeterEstimate est;
    est.method = options.method;
    est.spacing = max_spacing(field.grid());
    if (t >= top)
        return est;
    const double w = window_for(field, options);
    const auto [lo, hi] = centred_band(t, w, top);
    const HorizontalOperator op(field.grid(), g);
    return perimeter_on_band(op, field.values(), lo, hi, options.method);
}

PerimeterSweep perimeter_sweep(const GridField& field, const GroupSpec& g, int K, const PerimeterOptions& options)
{
    if (K < 1)
        throw InputError("perimeter_sweep: K must be >= 1");
    PerimeterSweep sweep;
    const double top = field.max_value();
    sweep.dt = top / K;
    sweep.levels = Eigen::ArrayXd::Zero(K);
    sweep.perimeters = Eigen::ArrayXd::Zero(K);
    if (top <= 0.0)
        return sweep;
    sweep.window = window_for(field, options);
    const HorizontalOperator op(field.grid(), g);
    for (int k = 0; k < K; ++k) {
        const double t = (k + 0.5) * sweep.dt;
        const auto [lo, hi] = centred_band(t, sweep.window, top);
        sweep.levels(k) = t;
        sweep.perimeters(k) = perimeter_on_band(op, field.values(), lo, hi, options.method).value;
    }
    return sweep;
}

VerificationReport coarea_check(const GridField& field, const GroupSpec& g, int K, double tolerance,
                                const PerimeterOptions& options)
{
    if (K < 16)
        throw InputError("coarea_check: need at least 16 slices");
    const double lhs = bv_norm(field, g);
    const PerimeterSweep sweep = perimeter_sweep(field, g, K, options);
    const double rhs = sweep.perimeters.sum() * sweep.dt;
    VerificationReport rep = VerificationReport::relative_identity("coarea:" + g.id, lhs, rhs, tolerance);
    rep.resolution = {{"K", K},
                      {"h", max_spacing(field.grid())},
                      {"window", sweep.window},
                      {"eps_cells", options.eps_cells},
                      {"relative_gap", rhs != 0.0 ? std::abs(lhs - rhs) / std::abs(lhs) : 0.0}};
    return rep;
}

namespace {

int default_nodes(int n)
{
    switch (n) {
    case 1:
        return 4096;
    case 2:
        return 512;
    default:
        return 128;
    }
}

std::string radius_key(double R)
{
    std::ostringstream s;
    s << "P(R=" << R << ")";
    return s.str();
}

// cone max(0, L - ||x||) on a grid that holds B_L
GridField level_cone(const Gauge& gauge, double L, int nodes)
{
    const Point half = ball_extent(gauge, L);
    const Grid grid = grid_around(Box{-half, half}, nodes);
    auto eval = gauge.eval;
    return sample_field(gauge.group, grid, [&](const Point& x) { return std::max(0.0, L - eval(x)); });
}

} // namespace

VerificationReport perimeter_homogeneity_check(const GroupSpec& g, const Gauge& gauge, const std::vector<double>& radii,
                                               const HomogeneityOptions& options)
{
    if (radii.size() < 2)
        throw InputError("perimeter_homogeneity_check: need at least two radii");
    for (double R : radii)
        if (!(R > 0.0))
            throw InputError("perimeter_homogeneity_check: radii must be positive");
    if (gauge.group.id != g.id)
        throw InputError("perimeter_homogeneity_check: gauge is not on " + g.id);
    const double r_max = *std::max_element(radii.begin(), radii.end());
    const double L = 1.25 * r_max;
    const int nodes = options.nodes > 0 ? options.nodes : default_nodes(g.n);
    const GridField cone = level_cone(gauge, L, nodes);
    const double w = level_window(cone, options.eps_cells);
    const HorizontalOperator op(cone.grid(), g);

    std::vector<double> P;
    for (double R : radii) {
        const double t = L - R;
        P.push_back(perimeter_on_band(op, cone.values(), t - 0.5 * w, t + 0.5 * w, PerimeterMethod::mollified_bv).value);
    }
    // least-squares slope of log P against log R
    double mx = 0, my = 0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        mx += std::log(radii[j]);
        my += std::log(P[j]);
    }
    mx /= static_cast<double>(radii.size());
    my /= static_cast<double>(radii.size());
    double sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        const double dx = std::log(radii[j]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(P[j]) - my);
    }
    const double slope = sxy / sxx;
    const double expected_slope = g.Q - 1;

    VerificationReport rep;
    const std::string id = "perimeter_homogeneity:" + g.id + ":" + gauge.id;
    if (radii.size() == 2) {
        const double ratio = P[1] / P[0];
        const double expected = std::pow(radii[1] / radii[0], expected_slope);
        rep = VerificationReport::identity(id, ratio, expected, options.tolerance);
        rep.resolution["ratio"] = ratio;
    } else {
        rep = VerificationReport::identity(id, slope, expected_slope, options.tolerance);
    }
    rep.resolution["slope"] = slope;
    rep.resolution["nodes"] = nodes;
    rep.resolution["h"] = max_spacing(cone.grid());
    rep.resolution["window"] = w;
    for (std::size_t j = 0; j < radii.size(); ++j)
        rep.resolution[radius_key(radii[j])] = P[j];
    return rep;
}

SphereSamples sample_sphere(const Gauge& gauge, std::int64_t samples, std::uint64_t seed)
{
    if (samples < 1)
        throw InputError("sample_sphere: samples must be >= 1");
    const GroupSpec& g = gauge.group;
    const Point half = 1.001 * gauge.unit_ball_extent;
    const Box box{-half, half};
    Rng rng(seed);
    std::vector<Point> kept;
    kept.reserve(static_cast<std::size_t>(samples / 2));
    for (std::int64_t s = 0; s < samples; ++s) {
        const Point x = uniform_point(rng, box);
        const double r = gauge.eval(x);
        if (!std::isfinite(r))
            throw NumericalError("sample_sphere: non-finite gauge value");
        if (r < 1.0 && r > 0.0)
            kept.push_back(dilate(g, 1.0 / r, x));
    }
    SphereSamples out;
    out.drawn = samples;
    out.weight = g.Q * box.volume() / static_cast<double>(samples);
    out.points.resize(g.n, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j)
        out.points.col(static_cast<Eigen::Index>(j)) = kept[j].array();
    return out;
}

double sigma_unit_sphere(const SphereSamples& sphere) { return sphere.total(); }

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] from the Jacobi matrix eigenproblem.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square().matrix();
    return {es.eigenvalues(), w};
}

} // namespace

double polar_integrate(const std::function<double(const Point&)>& f, const Gauge& gauge, double R,
                       const SphereSamples& sphere, int radial_nodes)
{
    if (!(R > 0.0))
        throw InputError("polar_integrate: R must be positive");
    if (radial_nodes < 1)
        throw InputError("polar_integrate: radial_nodes must be >= 1");
    const GroupSpec& g = gauge.group;
    const auto [x, w] = gauss_legendre(radial_nodes);
    double total = 0.0;
    for (int q = 0; q < radial_nodes; ++q) {
        const double r = 0.5 * R * (x(q) + 1.0);
        double shell = 0.0;
        for (Eigen::Index j = 0; j < sphere.count(); ++j)
            shell += f(dilate(g, r, sphere.point(j)));
        total += 0.5 * R * w(q) * shell * sphere.weight * std::pow(r, g.Q - 1);
    }
    return total;
}

VerificationReport sphere_weight_integral(const Gauge& gauge, const GroupSpec& g, double R,
                                          const SphereWeightOptions& options)
{
    if (!(R > 0.0))
        throw InputError("sphere_weight_integral: R must be positive");
    if (gauge.group.id != g.id)
        throw InputError("sphere_weight_integral: gauge is not on " + g.id);
    const int nodes = options.nodes > 0 ? options.nodes : default_nodes(g.n);
    const double L = 1.25 * R;
    const GridField cone = level_cone(gauge, L, nodes);
    const double w = level_window(cone, options.eps_cells);
    const HorizontalOperator op(cone.grid(), g);
    const Eigen::ArrayXd r = ramp(cone.values(), L - R - 0.5 * w, L - R + 0.5 * w);
    const Eigen::ArrayXd grad = op.gradient_norm(r);
    const Grid& grid = cone.grid();

    double lhs = 0.0, perimeter = 0.0, excluded = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (grad(i) == 0.0)
            continue;
        const Point x = grid.node(i);
        const double hg = (x.array() == 0.0).all() ? 0.0 : gauge_hgrad_norm(gauge, x);
        perimeter += grad(i);
        if (hg < options.hgrad_floor)
            excluded += grad(i);
        else
            lhs += grad(i) / hg;
    }
    lhs *= grid.cell_volume();
    perimeter *= grid.cell_volume();
    excluded *= grid.cell_volume();

    const SphereSamples sphere = sample_sphere(gauge, options.sphere_samples, options.seed);
    std::int64_t low = 0;
    for (Eigen::Index j = 0; j < sphere.count(); ++j)
        if (gauge_hgrad_norm(gauge, sphere.point(j)) < options.hgrad_floor)
            ++low;
    const double excluded_fraction =
        sphere.count() ? static_cast<double>(low) / static_cast<double>(sphere.count()) : 0.0;
    const double sigma = sigma_unit_sphere(sphere);
    const double rhs = std::pow(R, g.Q - 1) * sigma;

    VerificationReport rep = VerificationReport::inequality("sphere_weight:" + g.id + ":" + gauge.id, lhs, rhs, 1.0,
                                                            options.tolerance);
    rep.resolution = {{"R", R},
                      {"nodes", nodes},
                      {"h", max_spacing(grid)},
                      {"window", w},
                      {"perimeter", perimeter},
                      {"sigma_B1", sigma},
                      {"hgrad_floor", options.hgrad_floor},
                      {"excluded_fraction", excluded_fraction},
                      {"excluded_perimeter_fraction", perimeter > 0.0 ? excluded / perimeter : 0.0}};
    if (low > 0) {
        std::ostringstream s;
        s << "degenerate weights: " << excluded_fraction << " of the sphere mass has |D_h||x||| < "
          << options.hgrad_floor << " and was excluded";
        rep.warnings.push_back(s.str());
    }
    return rep;
}

namespace {

constexpr double kPi = std::numbers::pi;

Box scaled_box(const Point& half) { return Box{-half, half}; }

// Minkowski functional of a dilation-star-shaped set, capped at `cap`.
double minkowski(const GroupSpec& g, const std::function<bool(const Point&)>& inside, const Point& x, double cap)
{
    if ((x.array() == 0.0).all())
        return 0.0;
    if (!inside(dilate(g, 1.0 / cap, x)))
        return cap;
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid > 0.0 && inside(dilate(g, 1.0 / mid, x)))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

SetSpec coordinate_box(const GroupSpec& g, const Point& half, const std::string& name)
{
    SetSpec s;
    s.name = name;
    s.inside = [half](const Point& x) { return (x.array().abs() < half.array()).all(); };
    Point big = half;
    for (int k = 0; k < g.n; ++k)
        big(k) *= std::pow(1.25, g.dilation_weights[static_cast<std::size_t>(k)]);
    s.bounding = scaled_box(big);
    return s;
}

SetSpec ellipsoid(const GroupSpec& g, const Point& axes, const std::string& name)
{
    SetSpec s = coordinate_box(g, axes, name);
    s.inside = [axes](const Point& x) { return (x.array() / axes.array()).square().sum() < 1.0; };
    return s;
}

SetSpec gauge_ball(const Gauge& gauge, bool unit)
{
    SetSpec s;
    s.name = "ball:" + gauge.id;
    auto eval = gauge.eval;
    s.inside = [eval](const Point& x) { return eval(x) < 1.0; };
    s.defining = eval;
    s.bounding = scaled_box(ball_extent(gauge, 1.25));
    s.unit_ball = unit;
    return s;
}

// Set of revolution |t| < lambda/4 (arccos rho + rho sqrt(1 - rho^2)), rho < 1: swept by the
// geodesics that join its poles.
SetSpec bubble(double lambda)
{
    SetSpec s;
    std::ostringstream name;
    name << "bubble:" << lambda;
    s.name = name.str();
    s.inside = [lambda](const Point& x) {
        const double rho = std::hypot(x(0), x(1));
        if (rho >= 1.0)
            return false;
        return std::abs(x(2)) < 0.25 * lambda * (std::acos(rho) + rho * std::sqrt(1.0 - rho * rho));
    };
    s.bounding = scaled_box(make_point({1.25, 1.25, 1.5625 * lambda * kPi / 8.0}));
    return s;
}

} // namespace

std::vector<SetSpec> default_set_family(const Gauge& gauge, bool balls_only)
{
    const GroupSpec& g = gauge.group;
    std::vector<SetSpec> family{gauge_ball(gauge, true)};
    if (balls_only)
        return family;
    const int n = g.n;
    if (g.id == "heisenberg1") {
        for (const char* other : {"koranyi", "box", "carnot"})
            if (gauge.id != other)
                family.push_back(gauge_ball(gauge_by_id(other, g), false));
        family.push_back(coordinate_box(g, make_point({1.0, 1.0, 0.1}), "box:1x1x0.1"));
        family.push_back(coordinate_box(g, make_point({1.0, 1.0, 0.3}), "box:1x1x0.3"));
        family.push_back(ellipsoid(g, make_point({1.0, 1.0, 0.25}), "ellipsoid:1x1x0.25"));
        family.push_back(ellipsoid(g, make_point({1.0, 0.6, 0.2}), "ellipsoid:1x0.6x0.2"));
        for (double lambda : {0.8, 1.0, 1.25})
            family.push_back(bubble(lambda));
        return family;
    }
    if (n == 1) {
        family.push_back(coordinate_box(g, make_point({0.5}), "interval:0.5"));
        return family;
    }
    family.push_back(coordinate_box(g, Point::Ones(n), "cube"));
    Point slab = Point::Ones(n);
    slab(n - 1) = 0.5;
    family.push_back(coordinate_box(g, slab, "box:slab"));
    Point ax = Point::Ones(n);
    for (int k = 1; k < n; ++k)
        ax(k) = 1.0 - 0.3 * k;
    family.push_back(ellipsoid(g, ax, "ellipsoid"));
    Point near = Point::Ones(n);
    near(n - 1) = 0.85;
    family.push_back(ellipsoid(g, near, "ellipsoid:near-round"));
    if (gauge.id != "box")
        family.push_back(gauge_ball(box_gauge(g), false));
    return family;
}

SetMeasurement measure_set(const SetSpec& set, const GroupSpec& g, int nodes, double eps_cells)
{
    const Grid grid = grid_around(set.bounding, nodes);
    constexpr double cap = 1.3;
    Eigen::ArrayXd f(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const Point x = grid.node(i);
        f(i) = set.defining ? std::min(cap, set.defining(x)) : minkowski(g, set.inside, x, cap);
    }
    const Eigen::ArrayXd u = (1.25 - f).max(0.0);
    const GridField field(g, grid, u);
    const double w = level_window(field, eps_cells);
    const HorizontalOperator op(grid, g);

    SetMeasurement m;
    m.name = set.name;
    m.unit_ball = set.unit_ball;
    // the ramp average of node counts is second order in w, unlike the bare count of {f < 1}
    m.volume = ramp(u, 0.25 - 0.5 * w, 0.25 + 0.5 * w).sum() * grid.cell_volume();
    m.perimeter = perimeter_on_band(op, u, 0.25 - 0.5 * w, 0.25 + 0.5 * w, PerimeterMethod::mollified_bv).value;
    const double Q = g.Q;
    m.ratio = m.perimeter > 0.0 ? std::pow(m.volume, (Q - 1.0) / Q) / m.perimeter : 0.0;
    return m;
}

std::vector<VectorFieldFn> default_dual_dictionary(const Gauge& gauge)
{
    const GroupSpec g = gauge.group;
    std::vector<VectorFieldFn> dict;
    for (double delta : {0.02, 0.1, 0.3}) {
        // smoothed horizontal unit normal of the gauge spheres
        dict.push_back([g, eval = gauge.eval, delta](const Point& p) {
            Eigen::VectorXd F = Eigen::VectorXd::Zero(g.m);
            const double r = eval(p);
            if (r == 0.0)
                return F;
            const double s = 1e-6 * r;
            const Frame frame = g.frame(p);
            for (int i = 0; i < g.m; ++i) {
                const Point v = frame.col(i);
                F(i) = (eval(Point(p + s * v)) - eval(Point(p - s * v))) / (2.0 * s);
            }
            return Eigen::VectorXd(F / std::sqrt(F.squaredNorm() + delta * delta));
        });
        // horizontal position vector
        dict.push_back([g, delta](const Point& p) {
            Eigen::VectorXd F = p.head(g.m);
            return Eigen::VectorXd(F / std::sqrt(F.squaredNorm() + delta * delta));
        });
    }
    return dict;
}

double perimeter_dual_lower_bound(const GridField& field, double t, const GroupSpec& g,
                                  const std::vector<VectorFieldFn>& dictionary)
{
    const Grid& grid = field.grid();
    const HorizontalOperator op(grid, g);
    double best = 0.0;
    for (const auto& F : dictionary) {
        Eigen::ArrayXXd cols(grid.size(), g.m);
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            const Eigen::VectorXd v = F(grid.node(i));
            if (v.size() != g.m)
                throw InputError("perimeter_dual_lower_bound: vector field must have m components");
            if (v.norm() > 1.0 + 1e-12)
                throw InputError("perimeter_dual_lower_bound: vector field exceeds unit length");
            cols.row(i) = v.transpose().array();
        }
        const Eigen::ArrayXd div = op.divergence(cols);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            if (field.values()(i) > t)
                sum += div(i);
        best = std::max(best, sum * grid.cell_volume());
    }
    return best;
}

std::int64_t level_band_count(const GridField& field, double t, double s)
{
    return static_cast<std::int64_t>(((field.values() > t) && (field.values() < s)).count());
}

} // namespace carnot
